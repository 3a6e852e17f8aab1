#pragma once

// JSON and CSV representations of the library's values. Layouts are
// described in docs/formats.md.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "unistoch/birkhoff.hpp"
#include "unistoch/bracelet.hpp"
#include "unistoch/matcore.hpp"
#include "unistoch/membership.hpp"
#include "unistoch/randhaar.hpp"

namespace unistoch::io {

using json = nlohmann::json;

struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error("format", w) {}
};

// {"rows": n, "cols": m, "entries": [[re, im], ...]} row-major.
json to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const json& j);

// Block unitaries add "d" and "s" to the complex layout.
json to_json(const BlockUnitary& u);
/// d and s are read from the document when present, else taken from the
/// arguments (0 means "must be in the document").
BlockUnitary block_unitary_from_json(const json& j, std::size_t d = 0, std::size_t s = 0, const Tolerance& tol = {});

// {"d": n, "entries": [[x, ...], ...]}
json to_json(const RealMatrix& m);
RealMatrix real_matrix_from_json(const json& j);
BistochasticMatrix bistochastic_from_json(const json& j, const Tolerance& tol = {});

json to_json(const std::vector<cplx>& v);  // [[re, im], ...]

json to_json(const BirkhoffDecomposition& dec);
json to_json(const RationalApproximation& a);
json to_json(const BraceletReport& r);
json to_json(const BraceletMatrixReport& r);
json to_json(const GeneralizedBraceletReport& r);
json to_json(const PairScreen& p);
json to_json(const MembershipVerdict& v, bool include_certificate = false);
json to_json(const MomentReport& r);
json to_json(const CorrelationReport& r);
json to_json(const HaarMomentReport& r);
json to_json(const SolverConfig& c);

std::string to_string(Axis a);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// Comma-separated rows with a header line; doubles use shortest round-trip
/// formatting.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(const std::string& x);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Reads a CSV produced by CsvWriter: header then rows of cells.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

std::string format_double(double x);

}  // namespace unistoch::io
