#include "unistoch/birkhoff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unistoch/blockmaps.hpp"

namespace unistoch {

RealMatrix BirkhoffDecomposition::reconstruct() const {
  RealMatrix out(d, d);
  for (const auto& t : terms)
    for (std::size_t i = 0; i < d; ++i) out(i, t.perm(i)) += t.weight;
  return out;
}

namespace {

class Matcher {
 public:
  Matcher(const RealMatrix& w, double threshold)
      : w_(w), thr_(threshold), n_(w.rows()), col_owner_(n_, npos), visited_(n_, false) {}

  std::optional<Permutation> run() {
    for (std::size_t r = 0; r < n_; ++r) {
      std::fill(visited_.begin(), visited_.end(), false);
      if (!augment(r)) return std::nullopt;
    }
    std::vector<std::size_t> img(n_);
    for (std::size_t c = 0; c < n_; ++c) img[col_owner_[c]] = c;
    return Permutation(std::move(img));
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool augment(std::size_t r) {
    for (std::size_t c = 0; c < n_; ++c) {
      if (w_(r, c) <= thr_ || visited_[c]) continue;
      visited_[c] = true;
      if (col_owner_[c] == npos || augment(col_owner_[c])) {
        col_owner_[c] = r;
        return true;
      }
    }
    return false;
  }

  const RealMatrix& w_;
  double thr_;
  std::size_t n_;
  std::vector<std::size_t> col_owner_;
  std::vector<bool> visited_;
};

}  // namespace

std::optional<Permutation> perfect_matching(const RealMatrix& weights, double threshold) {
  if (weights.rows() != weights.cols()) throw DimensionError("matching needs a square weight matrix");
  return Matcher(weights, threshold).run();
}

BirkhoffDecomposition birkhoff_decompose(const BistochasticMatrix& b) {
  const std::size_t d = b.d();
  const double eps = b.tol().validation_eps;
  RealMatrix residual = b.entries();
  BirkhoffDecomposition dec{d, {}};
  const std::size_t max_terms = d * d - 2 * d + 2;

  auto max_entry = [&] { return *std::max_element(residual.data().begin(), residual.data().end()); };

  while (max_entry() > eps) {
    auto perm = perfect_matching(residual, eps);
    if (!perm) {
      // Leftover float noise from an input that was bistochastic only to
      // within validation_eps.
      if (max_entry() <= b.tol().certificate_eps) break;
      throw InternalError("residual support has no perfect matching; input is not bistochastic");
    }
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) w = std::min(w, residual(i, (*perm)(i)));
    for (std::size_t i = 0; i < d; ++i) {
      double& x = residual(i, (*perm)(i));
      x = std::max(0.0, x - w);
    }
    dec.terms.push_back({w, std::move(*perm)});
    if (dec.terms.size() > max_terms + d) throw InternalError("Birkhoff peeling failed to terminate");
  }
  return dec;
}

std::vector<std::size_t> round_to_counts(const std::vector<double>& weights, std::size_t N) {
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> rema;
  std::size_t used = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double x = std::max(0.0, weights[k]) * static_cast<double>(N);
    counts[k] = static_cast<std::size_t>(std::floor(x));
    used += counts[k];
    rema.push_back({x - std::floor(x), k});
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < N && !rema.empty(); k = (k + 1) % rema.size()) {
    ++counts[rema[k].second];
    ++used;
  }
  while (used > N) {
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --used;
  }
  return counts;
}

RationalApproximation approximate_by_generalized_unistochastic(const BistochasticMatrix& b, double eps) {
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
  const std::size_t d = b.d();
  const auto dec = birkhoff_decompose(b);
  const std::size_t m = dec.terms.size();

  // The bound only involves the permutations actually present, so m - 1
  // replaces d! - 1.
  const double others = static_cast<double>(std::max<std::size_t>(m, 2) - 1);
  const double delta = eps / (2.0 * others * std::sqrt(static_cast<double>(d)));
  const auto N = static_cast<std::size_t>(std::ceil(1.0 / delta));

  std::size_t absorber = 0;
  for (std::size_t k = 1; k < m; ++k)
    if (dec.terms[k].weight > dec.terms[absorber].weight) absorber = k;

  std::vector<std::size_t> counts(m, 0);
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < m; ++k) {
    if (k == absorber) continue;
    counts[k] = static_cast<std::size_t>(std::floor(static_cast<double>(N) * dec.terms[k].weight));
    assigned += counts[k];
  }
  if (assigned > N) throw InternalError("floor counts exceed N");
  counts[absorber] = N - assigned;

  std::vector<Permutation> perms;
  for (const auto& t : dec.terms) perms.push_back(t.perm);
  BlockUnitary witness = rational_mixture_witness(perms, counts);

  RealMatrix mixture(d, d);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < d; ++i)
      mixture(i, perms[k](i)) += static_cast<double>(counts[k]) / static_cast<double>(N);

  const RealMatrix image = phi_raw(witness.matrix(), d, N);
  const double err = frobenius_norm(b.entries() - image);
  if (err > eps) throw InternalError("rational approximation missed the requested accuracy");

  std::vector<std::pair<Permutation, std::size_t>> named;
  for (std::size_t k = 0; k < m; ++k) named.emplace_back(perms[k], counts[k]);
  return RationalApproximation{N, delta, std::move(named), std::move(witness), err, std::move(mixture)};
}

}  // namespace unistoch
