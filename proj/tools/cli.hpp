#pragma once

#include <iosfwd>

namespace unistoch::cli {

/// Runs one command line. Results go to `out` as JSON (or CSV where a
/// command streams point data); usage messages go to `err`.
/// Exit codes: 0 success, 1 domain error (error JSON on `out`), 2 usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace unistoch::cli
