#include "unistoch/bracelet.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

namespace unistoch {

ProbabilityVectorPair::ProbabilityVectorPair(ProbabilityVector alpha, ProbabilityVector beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (alpha_.size() != beta_.size()) throw DimensionError("probability vector pair has mismatched lengths");
}

ProbabilityVectorPair::ProbabilityVectorPair(std::vector<double> alpha, std::vector<double> beta, const Tolerance& tol)
    : ProbabilityVectorPair(ProbabilityVector(std::move(alpha), tol), ProbabilityVector(std::move(beta), tol)) {}

BraceletReport bracelet_pair(const ProbabilityVectorPair& pair, const Tolerance& tol) {
  const std::size_t d = pair.d();
  double total = 0.0, largest = -1.0;
  std::size_t worst = 0;
  for (std::size_t j = 0; j < d; ++j) {
    const double l = std::sqrt(pair.alpha()[j] * pair.beta()[j]);
    total += l;
    if (l > largest) {
      largest = l;
      worst = j;
    }
  }
  BraceletReport rep;
  rep.worst_index = worst;
  rep.margin = total - 2.0 * largest;
  rep.satisfied = rep.margin >= -tol.validation_eps;
  return rep;
}

BraceletMatrixReport is_bracelet_matrix(const BistochasticMatrix& b) {
  BraceletMatrixReport out;
  out.margin = std::numeric_limits<double>::infinity();
  const std::size_t d = b.d();
  for (int pass = 0; pass < 2; ++pass) {
    const Axis axis = pass == 0 ? Axis::Row : Axis::Column;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) {
        ProbabilityVectorPair pair = axis == Axis::Row ? ProbabilityVectorPair(b.row(p), b.row(q), b.tol())
                                                       : ProbabilityVectorPair(b.col(p), b.col(q), b.tol());
        const auto rep = bracelet_pair(pair, b.tol());
        out.satisfied = out.satisfied && rep.satisfied;
        out.margin = std::min(out.margin, rep.margin);
        out.pairs.push_back({axis, p, q, rep});
      }
  }
  return out;
}

bool unistochastic3(const BistochasticMatrix& b) {
  if (b.d() != 3) throw DimensionError("unistochastic3 needs a 3x3 matrix");
  return is_bracelet_matrix(b).satisfied;
}

bool generalized_necessary(const ProbabilityVectorPair& pair, std::size_t s, const Tolerance& tol) {
  if (s < 1) throw ParameterError("order s must be >= 1");
  const std::size_t d = pair.d();
  const double sd = static_cast<double>(s);
  std::vector<double> l(d);
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    l[j] = std::sqrt(pair.alpha()[j] * pair.beta()[j]);
    total += l[j];
  }
  for (std::size_t i = 0; i < d; ++i) {
    const double bi = pair.beta()[i];
    if (bi < 1.0 - 1.0 / sd - tol.validation_eps) continue;
    const double lhs = std::sqrt(pair.alpha()[i]) * std::sqrt(std::max(0.0, sd * bi - (sd - 1.0)));
    const double rhs = sd * (total - l[i]);
    if (lhs > rhs + tol.validation_eps) return false;
  }
  return true;
}

namespace {

// ceil(x * s) with x snapped onto the 1/s lattice when within validation_eps.
long snapped_ceil(double x, std::size_t s, const Tolerance& tol) {
  const double sd = static_cast<double>(s);
  const double nearest = std::round(x * sd);
  if (std::abs(x - nearest / sd) <= tol.validation_eps) return static_cast<long>(nearest);
  return static_cast<long>(std::ceil(x * sd));
}

}  // namespace

bool slice_membership(double alpha1, double beta1, std::size_t s, const Tolerance& tol) {
  if (s < 1) throw ParameterError("order s must be >= 1");
  return snapped_ceil(alpha1, s, tol) + snapped_ceil(beta1, s, tol) <= static_cast<long>(s);
}

std::optional<SlicePattern> match_slice_pattern(const ProbabilityVectorPair& pair, const Tolerance& tol) {
  const std::size_t d = pair.d();
  if (d < 3) return std::nullopt;
  std::vector<std::size_t> sa, sb;
  for (std::size_t j = 0; j < d; ++j) {
    if (pair.alpha()[j] > tol.validation_eps) sa.push_back(j);
    if (pair.beta()[j] > tol.validation_eps) sb.push_back(j);
  }
  if (sa.size() > 2 || sb.size() > 2) return std::nullopt;
  std::vector<std::size_t> shared;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(shared));
  if (shared.size() != 1) return std::nullopt;
  const std::size_t c1 = shared.front();

  auto other_of = [c1](const std::vector<std::size_t>& supp) -> std::optional<std::size_t> {
    for (std::size_t c : supp)
      if (c != c1) return c;
    return std::nullopt;
  };
  auto oa = other_of(sa);
  auto ob = other_of(sb);
  auto free_column = [&](std::optional<std::size_t> avoid) {
    for (std::size_t c = 0; c < d; ++c) {
      if (c == c1 || (avoid && c == *avoid)) continue;
      if (std::find(sa.begin(), sa.end(), c) != sa.end()) continue;
      if (std::find(sb.begin(), sb.end(), c) != sb.end()) continue;
      return c;
    }
    return d;  // unreachable for d >= 3
  };
  if (!oa) oa = free_column(ob);
  if (!ob) ob = free_column(oa);
  return SlicePattern{c1, *oa, *ob, pair.alpha()[c1], pair.beta()[c1]};
}

std::vector<ESetPoint> emit_E_set(std::size_t s, std::size_t grid, const Tolerance& tol) {
  if (s < 1) throw ParameterError("order s must be >= 1");
  if (grid < 2) throw ParameterError("grid must have at least 2 points per axis");
  std::vector<ESetPoint> pts;
  pts.reserve(grid * grid);
  const double step = 1.0 / static_cast<double>(grid - 1);
  for (std::size_t i = 0; i < grid; ++i)
    for (std::size_t j = 0; j < grid; ++j) {
      const double a = static_cast<double>(i) * step;
      const double b = static_cast<double>(j) * step;
      pts.push_back({a, b, slice_membership(a, b, s, tol)});
    }
  return pts;
}

std::vector<double> segment_lattice(std::size_t d, std::size_t s, const Permutation& pi, const Permutation& sigma) {
  if (s < 1) throw ParameterError("order s must be >= 1");
  if (pi.size() != d || sigma.size() != d) throw DimensionError("permutations must act on d points");
  const auto lengths = pi.inverse().compose(sigma).cycle_lengths();
  if (std::none_of(lengths.begin(), lengths.end(), [](std::size_t l) { return l >= 3; }))
    throw NotApplicableError("pi^-1 sigma has no cycle of length >= 3");
  std::vector<double> out(s + 1);
  for (std::size_t k = 0; k <= s; ++k) out[k] = static_cast<double>(k) / static_cast<double>(s);
  return out;
}

std::string to_string(Verdict3 v) {
  switch (v) {
    case Verdict3::Yes:
      return "yes";
    case Verdict3::No:
      return "no";
    case Verdict3::Unknown:
      return "unknown";
  }
  return "unknown";
}

PairScreen screen_pair(const ProbabilityVectorPair& pair, std::size_t s, const Tolerance& tol) {
  if (s < 1) throw ParameterError("order s must be >= 1");
  if (pair.d() == 1) return {Verdict3::No, "empty"};
  // Brac_d is contained in Brac_{d,s} for every s.
  if (bracelet_pair(pair, tol).satisfied) return {Verdict3::Yes, "bracelet"};
  if (s == 1) return {Verdict3::No, "bracelet"};
  if (pair.d() == 2) return {Verdict3::No, "rigidity"};
  if (const auto pat = match_slice_pattern(pair, tol))
    return slice_membership(pat->alpha1, pat->beta1, s, tol) ? PairScreen{Verdict3::Yes, "slice"}
                                                             : PairScreen{Verdict3::No, "slice"};
  if (!generalized_necessary(pair, s, tol) || !generalized_necessary(pair.swapped(), s, tol))
    return {Verdict3::No, "necessary"};
  return {};
}

GeneralizedBraceletReport is_generalized_bracelet_matrix(const BistochasticMatrix& b, std::size_t s,
                                                         const PairCertifier& certifier) {
  GeneralizedBraceletReport out;
  const std::size_t d = b.d();
  std::vector<ProbabilityVectorPair> pairs;
  bool rejected = false;
  for (int pass = 0; pass < 2; ++pass) {
    const Axis axis = pass == 0 ? Axis::Row : Axis::Column;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) {
        pairs.push_back(axis == Axis::Row ? ProbabilityVectorPair(b.row(p), b.row(q), b.tol())
                                          : ProbabilityVectorPair(b.col(p), b.col(q), b.tol()));
        const auto screen = screen_pair(pairs.back(), s, b.tol());
        rejected = rejected || screen.verdict == Verdict3::No;
        out.pairs.push_back({axis, p, q, screen});
      }
  }
  if (rejected) {
    out.verdict = Verdict3::No;
    return out;
  }
  bool all_yes = true;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto& screen = out.pairs[k].screen;
    if (screen.verdict == Verdict3::Unknown && certifier && certifier(pairs[k], s))
      screen = {Verdict3::Yes, "solver"};
    all_yes = all_yes && screen.verdict == Verdict3::Yes;
  }
  out.verdict = all_yes ? Verdict3::Yes : Verdict3::Unknown;
  return out;
}

}  // namespace unistoch
