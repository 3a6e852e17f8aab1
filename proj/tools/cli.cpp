#include "cli.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "unistoch/birkhoff.hpp"
#include "unistoch/blockmaps.hpp"
#include "unistoch/bracelet.hpp"
#include "unistoch/io.hpp"
#include "unistoch/membership.hpp"
#include "unistoch/randhaar.hpp"

namespace unistoch::cli {

namespace {

using json = nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw InternalError("sha256 failed");
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
  return hex.str();
}

// Everything a RunManifest needs, collected while a command runs.
class Run {
 public:
  Run(int argc, const char* const* argv) : start_(std::chrono::steady_clock::now()) {
    for (int k = 0; k < argc; ++k) line_ += (k ? " " : "") + std::string(argv[k]);
  }

  json load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io::FormatError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    digests_[path] = sha256_hex(buf.str());
    try {
      return json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw io::FormatError(path + ": " + e.what());
    }
  }

  void uses_seed(std::uint64_t seed) { seed_ = seed; }

  json manifest() const {
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start_;
    json digests = json::object();
    for (const auto& [path, hex] : digests_) digests[path] = "sha256:" + hex;
    return {{"command_line", line_},
            {"seed", seed_ ? json(*seed_) : json(nullptr)},
            {"version", UNISTOCH_VERSION},
            {"wall_time_s", wall.count()},
            {"input_digests", std::move(digests)}};
  }

 private:
  std::string line_;
  std::chrono::steady_clock::time_point start_;
  std::map<std::string, std::string> digests_;
  std::optional<std::uint64_t> seed_;
};

std::size_t default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

struct SolverOpts {
  SolverConfig cfg;
  std::string rule = "gauss_newton";

  void attach(CLI::App* sc) {
    sc->add_option("--restarts", cfg.restarts, "Solver restarts")->capture_default_str();
    sc->add_option("--max-iters", cfg.max_iters, "Iterations per restart")->capture_default_str();
    sc->add_option("--seed", cfg.seed, "Random seed")->envname("UNISTOCH_SEED")->capture_default_str();
    sc->add_option("--threads", cfg.threads, "Restarts run in parallel batches of this size");
    sc->add_option("--rule", rule, "Descent rule")->check(CLI::IsMember({"gauss_newton", "steepest"}));
  }

  SolverConfig resolve() const {
    SolverConfig c = cfg;
    c.rule = rule == "steepest" ? DescentRule::Steepest : DescentRule::GaussNewton;
    return c;
  }
};

void write_csv_target(const std::optional<std::string>& path, std::ostream& out,
                      const std::function<void(std::ostream&)>& body) {
  if (!path) {
    body(out);
    return;
  }
  std::ofstream f(*path);
  if (!f) throw io::FormatError("cannot write " + *path);
  body(f);
}

json perm_list(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized unistochastic matrices: construction, certification and sampling", "unistoch"};
  app.require_subcommand(1);
  app.set_version_flag("--version", UNISTOCH_VERSION);

  Run run(argc, argv);
  // Each handler returns the JSON result, or nullopt when it streamed CSV to `out`.
  std::map<CLI::App*, std::function<std::optional<json>()>> handlers;
  const std::size_t hw = default_threads();

  // map
  {
    auto* sc = app.add_subcommand("map", "phi_{d,s} of a block unitary");
    auto o = std::make_shared<std::tuple<std::string, std::size_t, std::size_t>>();
    sc->add_option("--matrix", std::get<0>(*o), "Complex matrix JSON")->required();
    sc->add_option("--d", std::get<1>(*o), "Block grid dimension");
    sc->add_option("--s", std::get<2>(*o), "Block size");
    handlers[sc] = [&run, o]() -> std::optional<json> {
      const auto u = io::block_unitary_from_json(run.load(std::get<0>(*o)), std::get<1>(*o), std::get<2>(*o));
      return json{{"d", u.d()}, {"s", u.s()}, {"phi", io::to_json(phi(u).entries())}};
    };
  }

  // uq
  {
    auto* sc = app.add_subcommand("uq", "The 6x6 orthogonal U_q and its image");
    auto q = std::make_shared<double>(0.0);
    auto emit = std::make_shared<std::string>();
    sc->add_option("--q", *q, "Parameter in [0, 1]")->required();
    sc->add_option("--emit", *emit, "Write U_q to this file");
    handlers[sc] = [q, emit]() -> std::optional<json> {
      const auto u = u_q(*q);
      if (!emit->empty()) io::write_json_file(*emit, io::to_json(u));
      return json{{"q", *q},
                  {"unitarity_residual", unitarity_residual(u.matrix())},
                  {"phi", io::to_json(phi(u).entries())},
                  {"unitary", io::to_json(u)}};
    };
  }

  // realify
  {
    auto* sc = app.add_subcommand("realify", "Real orthogonal embedding U(n) -> O(2n)");
    auto o = std::make_shared<std::tuple<std::string, std::size_t, std::size_t, std::string>>();
    sc->add_option("--matrix", std::get<0>(*o), "Complex matrix JSON")->required();
    sc->add_option("--d", std::get<1>(*o), "Block grid dimension");
    sc->add_option("--s", std::get<2>(*o), "Block size");
    sc->add_option("--out", std::get<3>(*o), "Write the orthogonal matrix here instead of inline");
    handlers[sc] = [&run, o]() -> std::optional<json> {
      const auto u = io::block_unitary_from_json(run.load(std::get<0>(*o)), std::get<1>(*o), std::get<2>(*o));
      const auto e = realify(u);
      const RealMatrix src = phi(e.source).entries(), dst = phi(e.target).entries();
      json j{{"d", u.d()},
             {"s_source", u.s()},
             {"s_target", e.target.s()},
             {"phi_source", io::to_json(src)},
             {"phi_target", io::to_json(dst)},
             {"max_abs_diff", max_abs_diff(src, dst)},
             {"orthogonality_residual", unitarity_residual(e.target.matrix())}};
      if (std::get<3>(*o).empty())
        j["target"] = io::to_json(e.target);
      else
        io::write_json_file(std::get<3>(*o), io::to_json(e.target));
      return j;
    };
  }

  // bracelet
  {
    auto* sc = app.add_subcommand("bracelet", "Bracelet / generalized bracelet test of a bistochastic matrix");
    auto path = std::make_shared<std::string>();
    auto s = std::make_shared<std::size_t>(1);
    auto solve = std::make_shared<bool>(false);
    auto solver = std::make_shared<SolverOpts>();
    sc->add_option("--matrix", *path, "Bistochastic matrix JSON")->required();
    sc->add_option("--s", *s, "Order s")->capture_default_str();
    sc->add_flag("--solve", *solve, "Try to certify undecided pairs numerically");
    solver->attach(sc);
    handlers[sc] = [&run, path, s, solve, solver]() -> std::optional<json> {
      const auto b = io::bistochastic_from_json(run.load(*path));
      if (*s == 1) {
        const auto rep = is_bracelet_matrix(b);
        json j = io::to_json(rep);
        j["verdict"] = rep.satisfied ? "yes" : "no";
        j["s"] = 1;
        return j;
      }
      PairCertifier cert;
      if (*solve) {
        run.uses_seed(solver->cfg.seed);
        cert = pair_certifier(solver->resolve());
      }
      json j = io::to_json(is_generalized_bracelet_matrix(b, *s, cert));
      j["s"] = *s;
      return j;
    };
  }

  // eset
  {
    auto* sc = app.add_subcommand("eset", "Grid scan of the slice set E(s) as CSV");
    auto s = std::make_shared<std::size_t>(2);
    auto grid = std::make_shared<std::size_t>(201);
    auto outp = std::make_shared<std::string>();
    sc->add_option("--s", *s, "Order s")->required();
    sc->add_option("--grid", *grid, "Points per axis")->capture_default_str();
    sc->add_option("--out", *outp, "CSV file (default: standard output)");
    handlers[sc] = [&out, s, grid, outp]() -> std::optional<json> {
      const auto pts = emit_E_set(*s, *grid);
      std::size_t inside = 0;
      const std::optional<std::string> target = outp->empty() ? std::nullopt : std::optional(*outp);
      write_csv_target(target, out, [&](std::ostream& os) {
        io::CsvWriter w(os, {"alpha1", "beta1", "in_set"});
        for (const auto& p : pts) {
          w.cell(p.alpha1).cell(p.beta1).cell(static_cast<long long>(p.in_set));
          w.end_row();
          inside += p.in_set;
        }
      });
      if (!target) return std::nullopt;
      return json{{"s", *s}, {"grid", *grid}, {"points", pts.size()}, {"in_set", inside}, {"out", *outp}};
    };
  }

  // decompose
  {
    auto* sc = app.add_subcommand("decompose", "Birkhoff-von Neumann decomposition");
    auto path = std::make_shared<std::string>();
    sc->add_option("--matrix", *path, "Bistochastic matrix JSON")->required();
    handlers[sc] = [&run, path]() -> std::optional<json> {
      const auto b = io::bistochastic_from_json(run.load(*path));
      const auto dec = birkhoff_decompose(b);
      json j = io::to_json(dec);
      j["reconstruction_error"] = max_abs_diff(dec.reconstruct(), b.entries());
      return j;
    };
  }

  // approximate
  {
    auto* sc = app.add_subcommand("approximate", "Rational generalized-unistochastic approximation");
    auto path = std::make_shared<std::string>();
    auto eps = std::make_shared<double>(0.0);
    auto witness = std::make_shared<std::string>();
    sc->add_option("--matrix", *path, "Bistochastic matrix JSON")->required();
    sc->add_option("--eps", *eps, "Frobenius accuracy")->required();
    sc->add_option("--emit-witness", *witness, "Write the witness block unitary here");
    handlers[sc] = [&run, path, eps, witness]() -> std::optional<json> {
      const auto b = io::bistochastic_from_json(run.load(*path));
      const auto a = approximate_by_generalized_unistochastic(b, *eps);
      if (!witness->empty()) io::write_json_file(*witness, io::to_json(a.witness));
      json j = io::to_json(a);
      j["eps"] = *eps;
      return j;
    };
  }

  // member
  {
    auto* sc = app.add_subcommand("member", "Certify membership in U_{d,s}");
    auto path = std::make_shared<std::string>();
    auto s = std::make_shared<std::size_t>(1);
    auto cert = std::make_shared<std::string>();
    auto warm = std::make_shared<std::string>();
    auto solver = std::make_shared<SolverOpts>();
    solver->cfg.threads = hw;
    sc->add_option("--matrix", *path, "Bistochastic matrix JSON")->required();
    sc->add_option("--s", *s, "Order s")->required();
    sc->add_option("--emit-certificate", *cert, "Write the certificate unitary here");
    sc->add_option("--warm-start", *warm, "Block unitary JSON used as the first starting point");
    solver->attach(sc);
    handlers[sc] = [&run, path, s, cert, warm, solver]() -> std::optional<json> {
      const auto b = io::bistochastic_from_json(run.load(*path));
      std::optional<BlockUnitary> ws;
      if (!warm->empty()) ws = io::block_unitary_from_json(run.load(*warm), b.d(), *s);
      const SolverConfig cfg = solver->resolve();
      run.uses_seed(cfg.seed);
      const auto v = certify_membership(b, *s, cfg, ws);
      if (!cert->empty() && v.certificate) io::write_json_file(*cert, io::to_json(*v.certificate));
      json j = io::to_json(v);
      j["s"] = *s;
      j["config"] = io::to_json(cfg);
      return j;
    };
  }

  // pair
  {
    auto* sc = app.add_subcommand("pair", "Brac_{d,s} feasibility of a pair of probability vectors");
    auto alpha = std::make_shared<std::vector<double>>();
    auto beta = std::make_shared<std::vector<double>>();
    auto s = std::make_shared<std::size_t>(1);
    auto cert = std::make_shared<std::string>();
    auto solver = std::make_shared<SolverOpts>();
    solver->cfg.threads = hw;
    sc->add_option("--alpha", *alpha, "Comma-separated probabilities")->required()->delimiter(',');
    sc->add_option("--beta", *beta, "Comma-separated probabilities")->required()->delimiter(',');
    sc->add_option("--s", *s, "Order s")->required();
    sc->add_option("--emit-certificate", *cert, "Write the certificate unitary here");
    solver->attach(sc);
    handlers[sc] = [&run, alpha, beta, s, cert, solver]() -> std::optional<json> {
      const ProbabilityVectorPair pair(*alpha, *beta);
      const SolverConfig cfg = solver->resolve();
      run.uses_seed(cfg.seed);
      const auto v = pair_feasibility(pair, *s, cfg);
      if (!cert->empty() && v.certificate) io::write_json_file(*cert, io::to_json(*v.certificate));
      json j = io::to_json(v);
      j["s"] = *s;
      j["screen"] = io::to_json(screen_pair(pair, *s));
      return j;
    };
  }

  // sample
  {
    auto* sc = app.add_subcommand("sample", "Draw mu_{d,s}-distributed bistochastic matrices as CSV");
    auto d = std::make_shared<std::size_t>(3), s = std::make_shared<std::size_t>(1), count = std::make_shared<std::size_t>(100);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto outp = std::make_shared<std::string>();
    sc->add_option("--d", *d)->required();
    sc->add_option("--s", *s)->required();
    sc->add_option("--count", *count)->capture_default_str();
    sc->add_option("--seed", *seed)->envname("UNISTOCH_SEED")->capture_default_str();
    sc->add_option("--out", *outp, "CSV file (default: standard output)");
    handlers[sc] = [&run, &out, d, s, count, seed, outp]() -> std::optional<json> {
      run.uses_seed(*seed);
      std::vector<std::string> header{"sample"};
      for (std::size_t i = 1; i <= *d; ++i)
        for (std::size_t j = 1; j <= *d; ++j) header.push_back("b_" + std::to_string(i) + "_" + std::to_string(j));
      const std::optional<std::string> target = outp->empty() ? std::nullopt : std::optional(*outp);
      Rng rng(*seed, 0);
      write_csv_target(target, out, [&](std::ostream& os) {
        io::CsvWriter w(os, header);
        for (std::size_t k = 0; k < *count; ++k) {
          const auto b = sample_mu(*d, *s, rng);
          w.cell(static_cast<long long>(k));
          for (double x : b.entries().data()) w.cell(x);
          w.end_row();
        }
      });
      if (!target) return std::nullopt;
      return json{{"d", *d}, {"s", *s}, {"count", *count}, {"seed", *seed}, {"out", *outp}};
    };
  }

  // moments / correlations
  for (const bool corr : {false, true}) {
    auto* sc = corr ? app.add_subcommand("correlations", "Variance, covariance and correlation estimates")
                    : app.add_subcommand("moments", "First and second moment estimates");
    auto d = std::make_shared<std::size_t>(3), s = std::make_shared<std::size_t>(1);
    auto samples = std::make_shared<std::size_t>(100000);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto threads = std::make_shared<std::size_t>(hw);
    sc->add_option("--d", *d)->required();
    sc->add_option("--s", *s)->required();
    sc->add_option("--samples", *samples)->capture_default_str();
    sc->add_option("--seed", *seed)->envname("UNISTOCH_SEED")->capture_default_str();
    sc->add_option("--threads", *threads, "Worker threads (results do not depend on this)");
    handlers[sc] = [&run, corr, d, s, samples, seed, threads]() -> std::optional<json> {
      run.uses_seed(*seed);
      if (corr) return io::to_json(estimate_correlations(*d, *s, *samples, *seed, *threads));
      return io::to_json(estimate_moments(*d, *s, *samples, *seed, *threads));
    };
  }

  // spectra
  {
    auto* sc = app.add_subcommand("spectra", "Eigenvalues of mu_{d,s} samples as CSV");
    auto d = std::make_shared<std::size_t>(3), s = std::make_shared<std::size_t>(1);
    auto samples = std::make_shared<std::size_t>(1000);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto outp = std::make_shared<std::string>(), hypo = std::make_shared<std::string>();
    auto points = std::make_shared<std::size_t>(512);
    sc->add_option("--d", *d)->required();
    sc->add_option("--s", *s)->required();
    sc->add_option("--samples", *samples)->capture_default_str();
    sc->add_option("--seed", *seed)->envname("UNISTOCH_SEED")->capture_default_str();
    sc->add_option("--out", *outp, "CSV file (default: standard output)");
    sc->add_option("--hypocycloid", *hypo, "Also write the d-cusp hypocycloid to this CSV file");
    sc->add_option("--points", *points, "Hypocycloid resolution")->capture_default_str();
    handlers[sc] = [&run, &out, d, s, samples, seed, outp, hypo, points]() -> std::optional<json> {
      run.uses_seed(*seed);
      const std::optional<std::string> target = outp->empty() ? std::nullopt : std::optional(*outp);
      Rng rng(*seed, 0);
      write_csv_target(target, out, [&](std::ostream& os) {
        io::CsvWriter w(os, {"re", "im"});
        for (std::size_t k = 0; k < *samples; ++k)
          for (const cplx z : spectrum(sample_mu(*d, *s, rng))) {
            w.cell(z.real()).cell(z.imag());
            w.end_row();
          }
      });
      if (!hypo->empty()) {
        write_csv_target(*hypo, out, [&](std::ostream& os) {
          io::CsvWriter w(os, {"re", "im"});
          for (const cplx z : hypocycloid(*d, *points)) {
            w.cell(z.real()).cell(z.imag());
            w.end_row();
          }
        });
      }
      if (!target) return std::nullopt;
      return json{{"d", *d}, {"s", *s}, {"samples", *samples}, {"seed", *seed}, {"out", *outp},
                  {"hypocycloid", hypo->empty() ? json(nullptr) : json(*hypo)}};
    };
  }

  // slice3
  {
    auto* sc = app.add_subcommand("slice3", "Membership verdicts on the (id, (123), (132)) simplex as CSV");
    auto samples = std::make_shared<std::size_t>(1000);
    auto s = std::make_shared<std::size_t>(1);
    auto outp = std::make_shared<std::string>();
    auto solver = std::make_shared<SolverOpts>();
    solver->cfg.threads = hw;
    solver->cfg.restarts = 8;
    sc->add_option("--samples", *samples)->capture_default_str();
    sc->add_option("--s", *s)->required();
    sc->add_option("--out", *outp, "CSV file (default: standard output)");
    solver->attach(sc);
    handlers[sc] = [&run, &out, samples, s, outp, solver]() -> std::optional<json> {
      const SolverConfig cfg = solver->resolve();
      run.uses_seed(cfg.seed);
      const std::optional<std::string> target = outp->empty() ? std::nullopt : std::optional(*outp);
      std::size_t members = 0;
      write_csv_target(target, out, [&](std::ostream& os) {
        io::CsvWriter w(os, {"lambda1", "lambda2", "lambda3", "verdict", "method", "bracelet_margin"});
        for (const auto& p : sample_simplex_slice(*samples, cfg.seed)) {
          const auto v = certify_membership(p.b, *s, cfg);
          members += v.status == MembershipStatus::Member;
          w.cell(p.lambda[0]).cell(p.lambda[1]).cell(p.lambda[2]);
          w.cell(to_string(v.status)).cell(v.method).cell(is_bracelet_matrix(p.b).margin);
          w.end_row();
        }
      });
      if (!target) return std::nullopt;
      return json{{"samples", *samples}, {"s", *s}, {"members", members}, {"out", *outp}};
    };
  }

  // lattice
  {
    auto* sc = app.add_subcommand("lattice", "Admissible weights on the segment [pi, sigma]");
    auto d = std::make_shared<std::size_t>(3), s = std::make_shared<std::size_t>(1);
    auto pi = std::make_shared<std::string>("id"), sigma = std::make_shared<std::string>();
    sc->add_option("--d", *d)->required();
    sc->add_option("--s", *s)->required();
    sc->add_option("--pi", *pi, "Cycle notation, e.g. 123 or (12)(34), or id")->capture_default_str();
    sc->add_option("--sigma", *sigma, "Cycle notation")->required();
    handlers[sc] = [d, s, pi, sigma]() -> std::optional<json> {
      const auto p = Permutation::parse_cycles(*pi, *d);
      const auto q = Permutation::parse_cycles(*sigma, *d);
      return json{{"d", *d}, {"s", *s}, {"pi", p.to_cycle_string()}, {"sigma", q.to_cycle_string()},
                  {"lambdas", perm_list(segment_lattice(*d, *s, p, q))}};
    };
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (CLI::App* sc : app.get_subcommands()) {
      auto result = handlers.at(sc)();
      if (result) {
        (*result)["manifest"] = run.manifest();
        out << result->dump(2) << '\n';
      }
    }
    return 0;
  } catch (const Error& e) {
    out << json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}, {"manifest", run.manifest()}}.dump(2) << '\n';
    return 1;
  } catch (const std::exception& e) {
    out << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}, {"manifest", run.manifest()}}.dump(2)
        << '\n';
    return 1;
  }
}

}  // namespace unistoch::cli
