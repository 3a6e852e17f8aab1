#include "unistoch/randhaar.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <thread>

#include "unistoch/blockmaps.hpp"

namespace unistoch {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (stream * 0xD1B54A32D192ED03ULL);
  std::array<std::uint32_t, 8> words{};
  for (std::size_t k = 0; k < words.size(); k += 2) {
    const std::uint64_t v = splitmix64(state);
    words[k] = static_cast<std::uint32_t>(v);
    words[k + 1] = static_cast<std::uint32_t>(v >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : eng_(make_engine(seed, stream)) {}

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

cplx Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

ComplexMatrix haar_unitary(std::size_t n, Rng& rng) {
  if (n < 1) throw ParameterError("haar_unitary needs n >= 1");
  Eigen::MatrixXcd z(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) z(r, c) = rng.complex_normal();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const auto& packed = qr.matrixQR();
  ComplexMatrix out(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const cplx rjj = packed(c, c);
    const double mag = std::abs(rjj);
    const cplx phase = mag > 0.0 ? rjj / mag : cplx{1.0};
    for (std::size_t r = 0; r < n; ++r) out(r, c) = q(r, c) * phase;
  }
  return out;
}

BistochasticMatrix sample_mu(std::size_t d, std::size_t s, Rng& rng) {
  if (d < 2 || s < 1) throw ParameterError("sample_mu needs d >= 2 and s >= 1");
  RealMatrix b = phi_raw(haar_unitary(d * s, rng), d, s);
  return validate_bistochastic(std::move(b));
}

void RunningStats::push(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_), nt = na + nb;
  const double delta = o.mean_ - mean_;
  mean_ += delta * nb / nt;
  m2_ += o.m2_ + delta * delta * na * nb / nt;
  n_ += o.n_;
}

double RunningStats::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double RunningStats::standard_error() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

void RunningCovariance::push(double x, double y) {
  ++n_;
  const double nn = static_cast<double>(n_);
  const double dx = x - mx_;
  const double dy = y - my_;
  mx_ += dx / nn;
  my_ += dy / nn;
  cxx_ += dx * (x - mx_);
  cyy_ += dy * (y - my_);
  cxy_ += dx * (y - my_);
}

void RunningCovariance::merge(const RunningCovariance& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_), nt = na + nb;
  const double dx = o.mx_ - mx_, dy = o.my_ - my_;
  const double w = na * nb / nt;
  cxx_ += o.cxx_ + dx * dx * w;
  cyy_ += o.cyy_ + dy * dy * w;
  cxy_ += o.cxy_ + dx * dy * w;
  mx_ += dx * nb / nt;
  my_ += dy * nb / nt;
  n_ += o.n_;
}

double RunningCovariance::covariance() const { return n_ > 1 ? cxy_ / static_cast<double>(n_ - 1) : 0.0; }
double RunningCovariance::var_x() const { return n_ > 1 ? cxx_ / static_cast<double>(n_ - 1) : 0.0; }
double RunningCovariance::var_y() const { return n_ > 1 ? cyy_ / static_cast<double>(n_ - 1) : 0.0; }
double RunningCovariance::correlation() const {
  const double den = std::sqrt(cxx_ * cyy_);
  return den > 0.0 ? cxy_ / den : 0.0;
}

MomentTheory moment_theory(std::size_t d, std::size_t s) {
  const double dd = static_cast<double>(d), ss = static_cast<double>(s), n = dd * ss;
  const double den = dd * (n * n - 1.0);
  return {1.0 / dd, (dd * (ss * ss + 1.0) - 2.0) / den, (dd * ss * ss - 1.0) / den, ss * ss / (n * n - 1.0)};
}

CorrelationTheory correlation_theory(std::size_t d, std::size_t s) {
  const double dd = static_cast<double>(d), n = dd * static_cast<double>(s);
  const double base = dd * dd * (n * n - 1.0);
  const double var = (dd - 1.0) * (dd - 1.0) / base;
  const double cov_line = -(dd - 1.0) / base;
  const double cov_diag = 1.0 / base;
  return {var, cov_line, cov_line / var, cov_diag, cov_diag / var};
}

namespace {

std::size_t batch_count(std::size_t samples) { return std::clamp<std::size_t>(samples / 100, 2, 100); }

std::size_t batch_size(std::size_t samples, std::size_t batches, std::size_t k) {
  return samples / batches + (k < samples % batches ? 1 : 0);
}

// Runs work(k) for k in [0, batches) on up to `threads` threads. Each call
// writes only its own slot, so the merge order is fixed by k.
void for_each_batch(std::size_t batches, std::size_t threads, const std::function<void(std::size_t)>& work) {
  threads = std::clamp<std::size_t>(threads, 1, batches);
  if (threads == 1) {
    for (std::size_t k = 0; k < batches; ++k) work(k);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t k = t; k < batches; k += threads) work(k);
    });
  for (auto& th : pool) th.join();
}

struct EntryDraw {
  double b11, b12, b21, b22;
};

template <typename Acc, typename Push>
std::vector<Acc> run_batches(std::size_t d, std::size_t s, std::size_t samples, std::uint64_t seed,
                             std::size_t threads, Push push) {
  const std::size_t K = batch_count(samples);
  std::vector<Acc> acc(K);
  for_each_batch(K, threads, [&](std::size_t k) {
    Rng rng(seed, k + 1);
    const std::size_t m = batch_size(samples, K, k);
    for (std::size_t t = 0; t < m; ++t) {
      const RealMatrix b = phi_raw(haar_unitary(d * s, rng), d, s);
      push(acc[k], EntryDraw{b(0, 0), b(0, 1), b(1, 0), b(1, 1)});
    }
  });
  return acc;
}

void require_sampling(std::size_t d, std::size_t s, std::size_t samples) {
  if (d < 2 || s < 1) throw ParameterError("sampling needs d >= 2 and s >= 1");
  if (samples < 100) throw ParameterError("estimators need at least 100 samples");
}

Estimate mean_estimate(const RunningStats& r) { return {r.mean(), r.standard_error()}; }

}  // namespace

MomentReport estimate_moments(std::size_t d, std::size_t s, std::size_t samples, std::uint64_t seed,
                              std::size_t threads) {
  require_sampling(d, s, samples);
  struct Acc {
    RunningStats mean, second, row, col, diag;
  };
  auto batches = run_batches<Acc>(d, s, samples, seed, threads, [](Acc& a, const EntryDraw& e) {
    a.mean.push(e.b11);
    a.second.push(e.b11 * e.b11);
    a.row.push(e.b11 * e.b12);
    a.col.push(e.b11 * e.b21);
    a.diag.push(e.b11 * e.b22);
  });
  Acc total;
  for (const auto& a : batches) {
    total.mean.merge(a.mean);
    total.second.merge(a.second);
    total.row.merge(a.row);
    total.col.merge(a.col);
    total.diag.merge(a.diag);
  }
  MomentReport rep;
  rep.d = d;
  rep.s = s;
  rep.n = d * s;
  rep.samples = samples;
  rep.seed = seed;
  rep.est_mean = mean_estimate(total.mean);
  rep.est_second = mean_estimate(total.second);
  rep.est_cross_row = mean_estimate(total.row);
  rep.est_cross_col = mean_estimate(total.col);
  rep.est_cross_diag = mean_estimate(total.diag);
  rep.theory = moment_theory(d, s);
  return rep;
}

CorrelationReport estimate_correlations(std::size_t d, std::size_t s, std::size_t samples, std::uint64_t seed,
                                        std::size_t threads) {
  require_sampling(d, s, samples);
  struct Acc {
    RunningCovariance row, col, diag;
  };
  auto batches = run_batches<Acc>(d, s, samples, seed, threads, [](Acc& a, const EntryDraw& e) {
    a.row.push(e.b11, e.b12);
    a.col.push(e.b11, e.b21);
    a.diag.push(e.b11, e.b22);
  });
  const std::size_t K = batches.size();

  auto merged = [&](std::size_t skip) {
    Acc t;
    for (std::size_t k = 0; k < K; ++k) {
      if (k == skip) continue;
      t.row.merge(batches[k].row);
      t.col.merge(batches[k].col);
      t.diag.merge(batches[k].diag);
    }
    return t;
  };
  using Stat = std::function<double(const Acc&)>;
  const std::vector<Stat> stats = {
      [](const Acc& a) { return a.row.var_x(); },       [](const Acc& a) { return a.row.covariance(); },
      [](const Acc& a) { return a.row.correlation(); }, [](const Acc& a) { return a.col.covariance(); },
      [](const Acc& a) { return a.col.correlation(); }, [](const Acc& a) { return a.diag.covariance(); },
      [](const Acc& a) { return a.diag.correlation(); },
  };
  const Acc all = merged(K);
  std::vector<Acc> leave_out;
  for (std::size_t k = 0; k < K; ++k) leave_out.push_back(merged(k));

  std::vector<Estimate> est;
  for (const auto& f : stats) {
    double mean = 0.0;
    for (const auto& a : leave_out) mean += f(a);
    mean /= static_cast<double>(K);
    double ss = 0.0;
    for (const auto& a : leave_out) ss += (f(a) - mean) * (f(a) - mean);
    est.push_back({f(all), std::sqrt(ss * static_cast<double>(K - 1) / static_cast<double>(K))});
  }

  CorrelationReport rep;
  rep.d = d;
  rep.s = s;
  rep.n = d * s;
  rep.samples = samples;
  rep.seed = seed;
  rep.var = est[0];
  rep.cov_row = est[1];
  rep.rho_row = est[2];
  rep.cov_col = est[3];
  rep.rho_col = est[4];
  rep.cov_diag = est[5];
  rep.rho_diag = est[6];
  rep.theory = correlation_theory(d, s);
  return rep;
}

HaarMomentReport estimate_haar_moments(std::size_t n, std::size_t samples, std::uint64_t seed, std::size_t threads) {
  if (n < 1) throw ParameterError("haar moments need n >= 1");
  if (samples < 100) throw ParameterError("estimators need at least 100 samples");
  const std::size_t K = batch_count(samples);
  struct Acc {
    RunningStats a2, a4;
  };
  std::vector<Acc> acc(K);
  for_each_batch(K, threads, [&](std::size_t k) {
    Rng rng(seed, k + 1);
    const std::size_t m = batch_size(samples, K, k);
    for (std::size_t t = 0; t < m; ++t) {
      const double x = std::norm(haar_unitary(n, rng)(0, 0));
      acc[k].a2.push(x);
      acc[k].a4.push(x * x);
    }
  });
  Acc total;
  for (const auto& a : acc) {
    total.a2.merge(a.a2);
    total.a4.merge(a.a4);
  }
  const double nn = static_cast<double>(n);
  return {n, samples, mean_estimate(total.a2), mean_estimate(total.a4), 1.0 / nn, 2.0 / (nn * (nn + 1.0))};
}

std::vector<cplx> spectrum(const BistochasticMatrix& b) {
  const std::size_t d = b.d();
  Eigen::MatrixXd m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = b(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
  std::vector<cplx> out(d);
  for (std::size_t k = 0; k < d; ++k) out[k] = es.eigenvalues()(k);
  std::sort(out.begin(), out.end(), [](cplx a, cplx c) {
    if (a.real() != c.real()) return a.real() > c.real();
    return a.imag() > c.imag();
  });
  return out;
}

std::vector<cplx> hypocycloid(std::size_t d, std::size_t points) {
  if (d < 3) throw ParameterError("hypocycloid needs d >= 3");
  if (points < 1) throw ParameterError("hypocycloid needs at least one point");
  const double dd = static_cast<double>(d);
  std::vector<cplx> out(points);
  for (std::size_t k = 0; k < points; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points);
    out[k] = ((dd - 1.0) * std::polar(1.0, th) + std::polar(1.0, -(dd - 1.0) * th)) / dd;
  }
  return out;
}

BistochasticMatrix circulant3(double l1, double l2, double l3, const Tolerance& tol) {
  return validate_bistochastic(RealMatrix::from_rows({{l1, l2, l3}, {l3, l1, l2}, {l2, l3, l1}}), tol);
}

std::vector<SimplexSample> sample_simplex_slice(std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw ParameterError("need at least one sample");
  Rng rng(seed, 0);
  std::vector<SimplexSample> out;
  out.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    std::array<double, 3> e{};
    for (auto& x : e) x = -std::log(1.0 - rng.uniform());
    const double sum = e[0] + e[1] + e[2];
    std::array<double, 3> l{e[0] / sum, e[1] / sum, e[2] / sum};
    out.push_back({l, circulant3(l[0], l[1], l[2])});
  }
  return out;
}

}  // namespace unistoch
