#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "unistoch/matcore.hpp"
#include "unistoch/permutation.hpp"

namespace oracle {

using unistoch::ComplexMatrix;
using unistoch::RealMatrix;

// phi by the definition, no kernels.
inline RealMatrix phi(const ComplexMatrix& m, std::size_t d, std::size_t s) {
  RealMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < s; ++k)
        for (std::size_t l = 0; l < s; ++l) acc += std::norm(m(i * s + k, j * s + l));
      out(i, j) = acc / static_cast<double>(s);
    }
  return out;
}

// Number of points (i, j) of the grid {0..g-1}^2, read as (i/(g-1), j/(g-1)),
// with ceil(i s/(g-1)) + ceil(j s/(g-1)) <= s. Integer arithmetic only.
inline std::size_t e_set_count(std::size_t s, std::size_t g) {
  const std::size_t m = g - 1;
  std::size_t total = 0;
  for (std::size_t i = 0; i <= m; ++i) {
    const std::size_t c = (i * s + m - 1) / m;
    if (c > s) continue;
    total += (s - c) * m / s + 1;
  }
  return total;
}

// Continuum area of E(s) in the unit square: the staircase under
// ceil(a s) + ceil(b s) <= s is a union of s(s-1)/2 cells of side 1/s.
inline double e_set_area(std::size_t s) {
  return static_cast<double>(s - 1) / (2.0 * static_cast<double>(s));
}

// min_i (sum_{j != i} l_j - l_i) with l_j = sqrt(a_j b_j).
inline double bracelet_margin(const std::vector<double>& a, const std::vector<double>& b) {
  double best = INFINITY;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double others = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != i) others += std::sqrt(a[j] * b[j]);
    best = std::min(best, others - std::sqrt(a[i] * b[i]));
  }
  return best;
}

inline std::vector<std::size_t> random_permutation(std::size_t d, std::mt19937_64& g) {
  std::vector<std::size_t> p(d);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), g);
  return p;
}

// Random convex mixture of `terms` random permutation matrices.
inline RealMatrix random_bistochastic(std::size_t d, std::size_t terms, std::mt19937_64& g) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(terms);
  for (auto& x : w) x = ex(g);
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  RealMatrix out(d, d);
  for (std::size_t t = 0; t < terms; ++t) {
    const auto p = random_permutation(d, g);
    for (std::size_t i = 0; i < d; ++i) out(i, p[i]) += w[t] / sum;
  }
  return out;
}

// Second moments of B = phi(U), U Haar on U(n), n = d s, by counting the
// pairs of unitary entries and applying the fourth-order Haar moments
// E|u|^4 = 2/(n(n+1)), E|u_11 u_12|^2 = 1/(n(n+1)), E|u_11 u_22|^2 = 1/(n^2-1).
struct BlockMoments {
  double mean, second, same_line, disjoint;
};

inline BlockMoments block_moments(std::size_t d, std::size_t s) {
  const double n = static_cast<double>(d * s), sd = static_cast<double>(s);
  const double same = 2.0 / (n * (n + 1)), line = 1.0 / (n * (n + 1)), off = 1.0 / (n * n - 1);
  const double s2 = sd * sd;
  BlockMoments m{};
  m.mean = 1.0 / static_cast<double>(d);
  // Same block: s^2 identical pairs, 2 s^2 (s-1) sharing a row or column, s^2 (s-1)^2 sharing neither.
  m.second = (s2 * same + 2.0 * s2 * (sd - 1) * line + s2 * (sd - 1) * (sd - 1) * off) / s2;
  // Blocks in one block row: s^3 pairs share a unitary row, the rest share nothing.
  m.same_line = (sd * s2 * line + sd * s2 * (sd - 1) * off) / s2;
  m.disjoint = s2 * s2 * off / s2;
  return m;
}

// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
template <typename Cdf>
double ks_one_sample(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double dmax = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = cdf(x[k]);
    dmax = std::max({dmax, (static_cast<double>(k) + 1.0) / n - f, f - static_cast<double>(k) / n});
  }
  return dmax;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    dmax = std::max(dmax, std::abs(static_cast<double>(i) / static_cast<double>(a.size()) -
                                   static_cast<double>(j) / static_cast<double>(b.size())));
  }
  return dmax;
}

// Asymptotic 1% critical value c(0.01) = 1.628 for sqrt(n_eff) D.
inline double ks_critical_1pct(double n_eff) { return 1.628 / std::sqrt(n_eff); }

}  // namespace oracle
