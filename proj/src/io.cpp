#include "unistoch/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace unistoch::io {

namespace {

std::size_t get_count(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0)
    throw FormatError(std::string("missing or invalid \"") + key + "\"");
  return j.at(key).get<std::size_t>();
}

double get_number(const json& j) {
  if (!j.is_number()) throw FormatError("expected a number");
  return j.get<double>();
}

json estimate(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

}  // namespace

json to_json(const ComplexMatrix& m) {
  json entries = json::array();
  for (const cplx& z : m.data()) entries.push_back({z.real(), z.imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

ComplexMatrix complex_matrix_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("complex matrix must be a JSON object");
  const std::size_t rows = get_count(j, "rows"), cols = get_count(j, "cols");
  const json& e = j.contains("entries") ? j.at("entries") : throw FormatError("missing \"entries\"");
  if (!e.is_array() || e.size() != rows * cols) throw FormatError("\"entries\" must hold rows*cols [re, im] pairs");
  std::vector<cplx> data;
  data.reserve(e.size());
  for (const auto& z : e) {
    if (!z.is_array() || z.size() != 2) throw FormatError("each entry must be [re, im]");
    data.emplace_back(get_number(z[0]), get_number(z[1]));
  }
  return ComplexMatrix(rows, cols, std::move(data));
}

json to_json(const BlockUnitary& u) {
  json j = to_json(u.matrix());
  j["d"] = u.d();
  j["s"] = u.s();
  return j;
}

BlockUnitary block_unitary_from_json(const json& j, std::size_t d, std::size_t s, const Tolerance& tol) {
  ComplexMatrix m = complex_matrix_from_json(j);
  if (j.contains("d")) d = get_count(j, "d");
  if (j.contains("s")) s = get_count(j, "s");
  if (d == 0 && s == 0) throw FormatError("block structure unknown: give d or s");
  if (d == 0) d = s ? m.rows() / s : 0;
  if (s == 0) s = d ? m.rows() / d : 0;
  if (d * s != m.rows()) throw DimensionError("matrix side is not d*s");
  return BlockUnitary(std::move(m), d, s, tol);
}

json to_json(const RealMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return {{"d", m.rows()}, {"entries", std::move(rows)}};
}

RealMatrix real_matrix_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("real matrix must be a JSON object");
  const std::size_t d = get_count(j, "d");
  const json& e = j.contains("entries") ? j.at("entries") : throw FormatError("missing \"entries\"");
  if (!e.is_array() || e.size() != d) throw FormatError("\"entries\" must have d rows");
  RealMatrix m(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    if (!e[r].is_array() || e[r].size() != d) throw FormatError("each row must have d entries");
    for (std::size_t c = 0; c < d; ++c) m(r, c) = get_number(e[r][c]);
  }
  return m;
}

BistochasticMatrix bistochastic_from_json(const json& j, const Tolerance& tol) {
  return validate_bistochastic(real_matrix_from_json(j), tol);
}

json to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (const cplx& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

json to_json(const BirkhoffDecomposition& dec) {
  json terms = json::array();
  for (const auto& t : dec.terms) terms.push_back({{"weight", t.weight}, {"perm", t.perm.to_cycle_string()}});
  return {{"d", dec.d}, {"terms", std::move(terms)}};
}

json to_json(const RationalApproximation& a) {
  json counts = json::array();
  for (const auto& [perm, k] : a.counts) counts.push_back({{"perm", perm.to_cycle_string()}, {"count", k}});
  return {{"N", a.N},
          {"delta", a.delta},
          {"counts", std::move(counts)},
          {"achieved_error", a.achieved_error},
          {"target_mixture", to_json(a.target_mixture)}};
}

json to_json(const BraceletReport& r) {
  return {{"satisfied", r.satisfied}, {"worst_index", r.worst_index}, {"margin", r.margin}};
}

std::string to_string(Axis a) { return a == Axis::Row ? "row" : "column"; }

json to_json(const BraceletMatrixReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    json e = to_json(p.report);
    e["axis"] = to_string(p.axis);
    e["first"] = p.first;
    e["second"] = p.second;
    pairs.push_back(std::move(e));
  }
  return {{"satisfied", r.satisfied}, {"margin", r.margin}, {"pair_reports", std::move(pairs)}};
}

json to_json(const PairScreen& p) { return {{"verdict", to_string(p.verdict)}, {"reason", p.reason}}; }

json to_json(const GeneralizedBraceletReport& r) {
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    json e = to_json(p.screen);
    e["axis"] = to_string(p.axis);
    e["first"] = p.first;
    e["second"] = p.second;
    pairs.push_back(std::move(e));
  }
  return {{"verdict", to_string(r.verdict)}, {"pair_reports", std::move(pairs)}};
}

json to_json(const MembershipVerdict& v, bool include_certificate) {
  json j = {{"status", to_string(v.status)},
            {"residual", std::isfinite(v.residual) ? json(v.residual) : json(nullptr)},
            {"rejection_reason", v.rejection_reason ? json(*v.rejection_reason) : json(nullptr)},
            {"method", v.method},
            {"restarts_used", v.restarts_used},
            {"winning_restart", v.winning_restart},
            {"iterations", v.iterations}};
  if (include_certificate && v.certificate) j["certificate"] = to_json(*v.certificate);
  return j;
}

json to_json(const MomentReport& r) {
  return {{"d", r.d},
          {"s", r.s},
          {"n", r.n},
          {"samples", r.samples},
          {"seed", r.seed},
          {"est_mean", estimate(r.est_mean)},
          {"est_second", estimate(r.est_second)},
          {"est_cross_row", estimate(r.est_cross_row)},
          {"est_cross_col", estimate(r.est_cross_col)},
          {"est_cross_diag", estimate(r.est_cross_diag)},
          {"theory_mean", r.theory.mean},
          {"theory_second", r.theory.second},
          {"theory_cross_samerow", r.theory.cross_samerow},
          {"theory_cross_diag", r.theory.cross_diag}};
}

json to_json(const CorrelationReport& r) {
  return {{"d", r.d},
          {"s", r.s},
          {"n", r.n},
          {"samples", r.samples},
          {"seed", r.seed},
          {"var", r.theory.var},
          {"cov_line", r.theory.cov_line},
          {"rho_line", r.theory.rho_line},
          {"cov_diag", r.theory.cov_diag},
          {"rho_diag", r.theory.rho_diag},
          {"empirical",
           {{"var", estimate(r.var)},
            {"cov_row", estimate(r.cov_row)},
            {"rho_row", estimate(r.rho_row)},
            {"cov_col", estimate(r.cov_col)},
            {"rho_col", estimate(r.rho_col)},
            {"cov_diag", estimate(r.cov_diag)},
            {"rho_diag", estimate(r.rho_diag)}}}};
}

json to_json(const HaarMomentReport& r) {
  return {{"n", r.n},
          {"samples", r.samples},
          {"abs2", estimate(r.abs2)},
          {"abs4", estimate(r.abs4)},
          {"theory_abs2", r.theory_abs2},
          {"theory_abs4", r.theory_abs4}};
}

json to_json(const SolverConfig& c) {
  return {{"restarts", c.restarts},
          {"max_iters", c.max_iters},
          {"step_init", c.step_init},
          {"grad_tol", c.grad_tol},
          {"seed", c.seed},
          {"rule", c.rule == DescentRule::GaussNewton ? "gauss_newton" : "steepest"}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }
CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }

CsvWriter& CsvWriter::cell(const std::string& x) {
  if (filled_ == columns_) throw FormatError("too many CSV cells in row");
  out_ << (filled_ ? "," : "") << x;
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw FormatError("incomplete CSV row");
  out_ << '\n';
  filled_ = 0;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace unistoch::io
