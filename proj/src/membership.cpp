#include "unistoch/membership.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "unistoch/birkhoff.hpp"
#include "unistoch/blockmaps.hpp"
#include "unistoch/randhaar.hpp"

namespace unistoch {

namespace {

using EMat = Eigen::MatrixXcd;
using RowMajorC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EMat to_eigen(const ComplexMatrix& m) {
  return Eigen::Map<const RowMajorC>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                     static_cast<Eigen::Index>(m.cols()));
}

ComplexMatrix from_eigen(const EMat& m) {
  ComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  Eigen::Map<RowMajorC>(out.data().data(), m.rows(), m.cols()) = m;
  return out;
}

struct PairIndex {
  std::size_t a, b;
};

std::vector<PairIndex> upper_pairs(std::size_t n) {
  std::vector<PairIndex> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) out.push_back({a, b});
  return out;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

double norm2(const std::vector<double>& v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

void require_target(const ComplexMatrix& u, const BlockTarget& t) {
  if (u.rows() != t.d * t.s || u.cols() != t.d * t.s) throw DimensionError("iterate does not match the target grid");
}

}  // namespace

void SolverConfig::validate() const {
  if (restarts < 1) throw ParameterError("restarts must be >= 1");
  if (max_iters < 1) throw ParameterError("max_iters must be >= 1");
  if (!(step_init > 0.0)) throw ParameterError("step_init must be positive");
  if (!(grad_tol >= 0.0)) throw ParameterError("grad_tol must be non-negative");
  if (threads < 1) throw ParameterError("threads must be >= 1");
}

std::string to_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::Member:
      return "Member";
    case MembershipStatus::RejectedAnalytic:
      return "RejectedAnalytic";
    case MembershipStatus::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

BlockTarget BlockTarget::full(const BistochasticMatrix& b, std::size_t s) {
  if (s < 1) throw ParameterError("order s must be >= 1");
  std::vector<std::size_t> rows(b.d());
  std::iota(rows.begin(), rows.end(), 0);
  return {b.d(), s, std::move(rows), b.entries()};
}

BlockTarget BlockTarget::pair(const ProbabilityVectorPair& p, std::size_t s) {
  if (s < 1) throw ParameterError("order s must be >= 1");
  if (p.d() < 2) throw DimensionError("pair targets need d >= 2");
  RealMatrix v(2, p.d());
  for (std::size_t j = 0; j < p.d(); ++j) {
    v(0, j) = p.alpha()[j];
    v(1, j) = p.beta()[j];
  }
  return {p.d(), s, {0, 1}, std::move(v)};
}

ObjectiveValue objective(const ComplexMatrix& u, const BlockTarget& t) {
  require_target(u, t);
  const RealMatrix ph = phi_rows(u, t.d, t.s, t.rows);
  ObjectiveValue out{0.0, ComplexMatrix(u.rows(), u.cols())};
  const double scale = 2.0 / static_cast<double>(t.s);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::size_t i = t.rows[r];
    for (std::size_t j = 0; j < t.d; ++j) {
      const double res = ph(r, j) - t.values(r, j);
      out.value += res * res;
      for (std::size_t k = 0; k < t.s; ++k)
        for (std::size_t l = 0; l < t.s; ++l) {
          const std::size_t row = i * t.s + k, col = j * t.s + l;
          out.gradient(row, col) = scale * res * u(row, col);
        }
    }
  }
  return out;
}

ObjectiveValue objective(const BlockUnitary& u, const BistochasticMatrix& b) {
  if (u.d() != b.d()) throw DimensionError("unitary grid and bistochastic matrix differ in d");
  return objective(u.matrix(), BlockTarget::full(b, u.s()));
}

std::size_t tangent_dim(std::size_t n) { return n * (n - 1); }

ComplexMatrix tangent_basis(std::size_t n, std::size_t k) {
  std::vector<double> x(tangent_dim(n), 0.0);
  if (k >= x.size()) throw DimensionError("tangent index out of range");
  x[k] = 1.0;
  return tangent_matrix(n, x);
}

ComplexMatrix tangent_matrix(std::size_t n, std::span<const double> x) {
  if (x.size() != tangent_dim(n)) throw DimensionError("tangent coordinate vector has the wrong length");
  const auto pairs = upper_pairs(n);
  const std::size_t half = pairs.size();
  ComplexMatrix out(n, n);
  for (std::size_t q = 0; q < half; ++q) {
    const auto [a, b] = pairs[q];
    const double re = x[q] * kInvSqrt2, im = x[q + half] * kInvSqrt2;
    out(a, b) += cplx(re, im);
    out(b, a) += cplx(-re, im);
  }
  return out;
}

std::vector<double> target_residual(const ComplexMatrix& u, const BlockTarget& t) {
  require_target(u, t);
  const RealMatrix ph = phi_rows(u, t.d, t.s, t.rows);
  std::vector<double> r(t.rows.size() * t.d);
  for (std::size_t p = 0; p < t.rows.size(); ++p)
    for (std::size_t j = 0; j < t.d; ++j) r[p * t.d + j] = ph(p, j) - t.values(p, j);
  return r;
}

RealMatrix tangent_jacobian(const ComplexMatrix& u, const BlockTarget& t) {
  require_target(u, t);
  const std::size_t n = u.rows(), s = t.s, d = t.d;
  const auto pairs = upper_pairs(n);
  const std::size_t half = pairs.size();
  RealMatrix jac(t.rows.size() * d, 2 * half);
  const EMat ue = to_eigen(u);
  const double c = std::sqrt(2.0) / static_cast<double>(s);
  for (std::size_t p = 0; p < t.rows.size(); ++p) {
    const auto blk = ue.middleRows(static_cast<Eigen::Index>(t.rows[p] * s), static_cast<Eigen::Index>(s));
    const EMat gram = blk.adjoint() * blk;  // gram(a, b) = sum_r conj(U_ra) U_rb over the block row
    for (std::size_t q = 0; q < half; ++q) {
      const auto [a, b] = pairs[q];
      const std::size_t ja = a / s, jb = b / s;
      if (ja == jb) continue;
      const cplx g = gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      jac(p * d + jb, q) += c * g.real();
      jac(p * d + ja, q) -= c * g.real();
      jac(p * d + jb, q + half) += c * g.imag();
      jac(p * d + ja, q + half) -= c * g.imag();
    }
  }
  return jac;
}

ComplexMatrix retract(const ComplexMatrix& u, std::span<const double> x) {
  const std::size_t n = u.rows();
  const EMat ue = to_eigen(u);
  const EMat m = ue + ue * to_eigen(tangent_matrix(n, x));
  Eigen::HouseholderQR<EMat> qr(m);
  EMat q = qr.householderQ() * EMat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    const cplx r = qr.matrixQR()(c, c);
    const double mag = std::abs(r);
    if (mag > 0.0) q.col(c) *= r / mag;
  }
  return from_eigen(q);
}

ComplexMatrix polar_unitary(const ComplexMatrix& m) {
  Eigen::JacobiSVD<EMat> svd(to_eigen(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return from_eigen(svd.matrixU() * svd.matrixV().adjoint());
}

namespace {

struct RunResult {
  ComplexMatrix u;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  double drift = 0.0;
};

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> eigen_view(const RealMatrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

// One descent run from u. Stops at residual <= stop_tol, a small gradient,
// a failed line search, a stall or the iteration budget.
RunResult descend(ComplexMatrix u, const BlockTarget& t, const SolverConfig& cfg, double stop_tol) {
  RunResult out;
  const std::size_t p = tangent_dim(u.rows());
  std::vector<double> r = target_residual(u, t);
  double f = norm2(r);
  double step = cfg.step_init;
  double f_checkpoint = f;
  constexpr std::size_t kStallWindow = 50;

  std::size_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (std::sqrt(f) <= stop_tol) break;
    const RealMatrix jac = tangent_jacobian(u, t);
    const auto J = eigen_view(jac);
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    const Eigen::VectorXd g = 2.0 * J.transpose() * rv;
    if (g.norm() <= cfg.grad_tol) break;

    auto line_search = [&](const Eigen::VectorXd& dir, double t0, double& accepted) -> bool {
      const double slope = g.dot(dir);
      if (!(slope < 0.0)) return false;
      std::vector<double> x(p);
      for (double tt = t0; tt > 1e-14 * t0 && tt > 1e-300; tt *= 0.5) {
        for (std::size_t k = 0; k < p; ++k) x[k] = tt * dir(static_cast<Eigen::Index>(k));
        ComplexMatrix un = retract(u, x);
        std::vector<double> rn = target_residual(un, t);
        const double fn = norm2(rn);
        if (fn <= f + 1e-4 * tt * slope) {
          u = std::move(un);
          r = std::move(rn);
          f = fn;
          accepted = tt;
          return true;
        }
      }
      return false;
    };

    double accepted = 0.0;
    bool moved = false;
    if (cfg.rule == DescentRule::GaussNewton) {
      const Eigen::Index m = J.rows();
      const double mu = 1e-2 * std::sqrt(f) + 1e-15;
      const Eigen::MatrixXd normal = J * J.transpose() + mu * Eigen::MatrixXd::Identity(m, m);
      const Eigen::VectorXd y = normal.ldlt().solve(rv);
      const Eigen::VectorXd dir = -(J.transpose() * y);
      moved = line_search(dir, 1.0, accepted);
    }
    if (!moved) {
      moved = line_search(-g, step, accepted);
      if (moved) step = std::min(2.0 * accepted, 1e3);
    }
    if (!moved) break;
    if (cfg.audit_retraction) out.drift = std::max(out.drift, unitarity_residual(u));
    if ((it + 1) % kStallWindow == 0) {
      if (f > f_checkpoint * (1.0 - 1e-6)) {
        ++it;
        break;
      }
      f_checkpoint = f;
    }
  }
  out.u = std::move(u);
  out.residual = std::sqrt(f);
  out.iterations = it;
  return out;
}

std::vector<double> random_coordinates(std::size_t p, Rng& rng, double scale) {
  std::vector<double> x(p);
  for (auto& v : x) v = scale * rng.normal();
  return x;
}

// Initial point for restart k. Restart 0 uses the warm start, nudged off
// it unless it already solves the problem (permutation-like points are
// critical points of the objective).
ComplexMatrix initial_point(std::size_t k, const BlockTarget& t, const SolverConfig& cfg,
                            const std::optional<ComplexMatrix>& warm, double stop_tol) {
  const std::size_t n = t.d * t.s;
  Rng rng(cfg.seed, k);
  if (k == 0 && warm) {
    if (std::sqrt(norm2(target_residual(*warm, t))) <= stop_tol) return *warm;
    return retract(*warm, random_coordinates(tangent_dim(n), rng, 0.05));
  }
  return haar_unitary(n, rng);
}

MembershipVerdict member_from(const ComplexMatrix& u, const BlockTarget& t, const Tolerance& tol,
                              std::string method) {
  const ComplexMatrix cert = polar_unitary(u);
  MembershipVerdict v;
  v.residual = std::sqrt(norm2(target_residual(cert, t)));
  v.method = std::move(method);
  if (v.residual <= tol.certificate_eps) {
    v.status = MembershipStatus::Member;
    v.certificate = BlockUnitary(cert, t.d, t.s, tol);
  }
  return v;
}

MembershipVerdict rejected(std::string reason) {
  MembershipVerdict v;
  v.status = MembershipStatus::RejectedAnalytic;
  v.residual = std::numeric_limits<double>::quiet_NaN();
  v.rejection_reason = std::move(reason);
  v.method = "analytic";
  return v;
}

// Exact certificate: the residual is recomputed from the unitary itself.
MembershipVerdict certified(BlockUnitary u, const BlockTarget& t, const Tolerance& tol, std::string method) {
  MembershipVerdict v;
  v.residual = std::sqrt(norm2(target_residual(u.matrix(), t)));
  v.method = std::move(method);
  if (v.residual > tol.certificate_eps) throw InternalError("closed-form construction missed its target");
  v.status = MembershipStatus::Member;
  v.certificate = std::move(u);
  return v;
}

}  // namespace

MembershipVerdict solve_target(const BlockTarget& t, const SolverConfig& cfg, const Tolerance& tol,
                               const std::optional<ComplexMatrix>& warm_start) {
  cfg.validate();
  if (t.d < 2) throw DimensionError("solver needs d >= 2");
  if (warm_start) require_target(*warm_start, t);
  const double stop_tol = 1e-2 * tol.certificate_eps;

  std::vector<RunResult> runs(cfg.restarts);
  std::vector<MembershipVerdict> verdicts(cfg.restarts);
  auto run_one = [&](std::size_t k) {
    runs[k] = descend(initial_point(k, t, cfg, warm_start, stop_tol), t, cfg, stop_tol);
    verdicts[k] = member_from(runs[k].u, t, tol, "solver");
  };

  MembershipVerdict best;
  best.residual = std::numeric_limits<double>::infinity();
  best.method = "solver";
  double drift = 0.0;
  std::size_t done = 0;
  while (done < cfg.restarts) {
    const std::size_t batch = std::min(cfg.threads, cfg.restarts - done);
    if (batch == 1) {
      run_one(done);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t k = done; k < done + batch; ++k) pool.emplace_back(run_one, k);
      for (auto& th : pool) th.join();
    }
    for (std::size_t k = done; k < done + batch; ++k) {
      drift = std::max(drift, runs[k].drift);
      const bool better = verdicts[k].status == MembershipStatus::Member || verdicts[k].residual < best.residual;
      if (better && best.status != MembershipStatus::Member) {
        best = verdicts[k];
        best.winning_restart = k;
        best.iterations = runs[k].iterations;
      }
    }
    done += batch;
    if (best.status == MembershipStatus::Member) break;
  }
  best.restarts_used = done;
  best.max_unitarity_drift = drift;
  return best;
}

MembershipVerdict solve_membership_numerically(const BistochasticMatrix& b, std::size_t s, const SolverConfig& cfg,
                                               const std::optional<BlockUnitary>& warm_start) {
  const BlockTarget t = BlockTarget::full(b, s);
  std::optional<ComplexMatrix> warm;
  if (warm_start) {
    if (warm_start->d() != b.d() || warm_start->s() != s) throw DimensionError("warm start has the wrong grid");
    warm = warm_start->matrix();
  } else {
    const auto dec = birkhoff_decompose(b);
    std::vector<double> w;
    std::vector<Permutation> perms;
    for (const auto& term : dec.terms) {
      w.push_back(term.weight);
      perms.push_back(term.perm);
    }
    warm = rational_mixture_witness(perms, round_to_counts(w, s)).matrix();
  }
  return solve_target(t, cfg, b.tol(), warm);
}

namespace {

bool is_lattice(double x, std::size_t s, double eps) {
  const double xs = x * static_cast<double>(s);
  return std::abs(xs - std::round(xs)) <= eps * static_cast<double>(s);
}

}  // namespace

MembershipVerdict certify_membership(const BistochasticMatrix& b, std::size_t s, const SolverConfig& cfg,
                                     const std::optional<BlockUnitary>& warm_start) {
  cfg.validate();
  if (s < 1) throw ParameterError("order s must be >= 1");
  const std::size_t d = b.d();
  const Tolerance& tol = b.tol();
  const BlockTarget target = BlockTarget::full(b, s);

  if (d == 2) {
    const double a = std::clamp(b(0, 0), 0.0, 1.0);
    const double c = std::sqrt(a), sn = std::sqrt(1.0 - a);
    ComplexMatrix u(2, 2, {c, sn, -sn, c});
    return certified(tensor_embed(BlockUnitary(std::move(u), 2, 1, tol), s), target, tol, "closed_form");
  }

  const auto dec = birkhoff_decompose(b);
  if (std::all_of(dec.terms.begin(), dec.terms.end(),
                  [&](const BirkhoffTerm& term) { return is_lattice(term.weight, s, tol.validation_eps); })) {
    std::vector<Permutation> perms;
    std::vector<std::size_t> counts;
    for (const auto& term : dec.terms) {
      perms.push_back(term.perm);
      counts.push_back(static_cast<std::size_t>(std::llround(term.weight * static_cast<double>(s))));
    }
    if (std::accumulate(counts.begin(), counts.end(), std::size_t{0}) == s)
      return certified(rational_mixture_witness(perms, counts), target, tol, "rational");
  }

  if (s == 1 && !is_bracelet_matrix(b).satisfied) return rejected("bracelet");

  if (dec.terms.size() == 2) {
    const auto lengths = dec.terms[0].perm.inverse().compose(dec.terms[1].perm).cycle_lengths();
    const bool long_cycle = std::any_of(lengths.begin(), lengths.end(), [](std::size_t l) { return l >= 3; });
    if (long_cycle && !is_lattice(dec.terms[0].weight, s, tol.validation_eps)) return rejected("segment");
  }

  if (s > 1) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = p + 1; q < d; ++q) {
          const ProbabilityVectorPair pr = pass == 0 ? ProbabilityVectorPair(b.row(p), b.row(q), tol)
                                                     : ProbabilityVectorPair(b.col(p), b.col(q), tol);
          const auto screen = screen_pair(pr, s, tol);
          if (screen.verdict == Verdict3::No) return rejected(screen.reason);
        }
  }

  MembershipVerdict v = solve_membership_numerically(b, s, cfg, warm_start);
  if (v.status != MembershipStatus::Member && s > 1 && d == 3 && unistochastic3(b)) {
    // U_{3,1} is contained in U_{3,s}: a unistochastic preimage embeds.
    MembershipVerdict v1 = solve_membership_numerically(b, 1, cfg);
    if (v1.status == MembershipStatus::Member) {
      MembershipVerdict e = certified(tensor_embed(*v1.certificate, s), target, tol, "solver_embedded");
      e.restarts_used = v.restarts_used + v1.restarts_used;
      e.iterations = v1.iterations;
      return e;
    }
  }
  return v;
}

namespace {

// Rows u, v of length d with |u_j|^2 = alpha_j, |v_j|^2 = beta_j and
// <u, v> = 0: the terms sqrt(alpha_j beta_j) e^{-i theta_j} must close a
// polygon, which the bracelet condition allows. The longest side is laid
// against the two balanced sums of the others as a triangle.
ComplexMatrix polygon_rows(const ProbabilityVectorPair& pair) {
  const std::size_t d = pair.d();
  std::vector<double> len(d);
  for (std::size_t j = 0; j < d; ++j) len[j] = std::sqrt(pair.alpha()[j] * pair.beta()[j]);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return len[x] > len[y]; });

  const double L = len[order[0]];
  double A = 0.0, B = 0.0;
  std::vector<int> group(d, 0);
  for (std::size_t k = 1; k < d; ++k) {
    const std::size_t j = order[k];
    if (A <= B) {
      A += len[j];
      group[j] = 1;
    } else {
      B += len[j];
      group[j] = 2;
    }
  }
  // Sides L (direction 1), A (P - L) and B (-P) close when |P| = B, |P - L| = A.
  cplx dirA{1.0}, dirB{-1.0};
  if (L > 0.0) {
    const double x = (B * B - A * A + L * L) / (2.0 * L);
    const double y = std::sqrt(std::max(0.0, B * B - x * x));
    const cplx P{x, y};
    if (A > 0.0) dirA = (P - L) / A;
    if (B > 0.0) dirB = -P / B;
  }
  ComplexMatrix rows(2, d);
  for (std::size_t j = 0; j < d; ++j) {
    const cplx dir = j == order[0] ? cplx{1.0} : (group[j] == 1 ? dirA : dirB);
    rows(0, j) = std::sqrt(pair.alpha()[j]);
    rows(1, j) = std::sqrt(pair.beta()[j]) * std::conj(dir);
  }
  return rows;
}

// Diagonal blocks realising the slice pattern: A_1 occupies the first
// ceil(alpha1 s) diagonal positions and B_1 the last ceil(beta1 s), so
// A_1 B_1^* = 0 when the ceilings fit into s.
ComplexMatrix slice_rows(const SlicePattern& pat, std::size_t d, std::size_t s, const Tolerance& tol) {
  const double sd = static_cast<double>(s);
  auto diag_weights = [&](double x) {
    const double snapped = std::abs(x * sd - std::round(x * sd)) <= tol.validation_eps * sd ? std::round(x * sd) : x * sd;
    std::vector<double> w(s, 0.0);
    const auto whole = static_cast<std::size_t>(std::floor(snapped));
    for (std::size_t k = 0; k < whole && k < s; ++k) w[k] = 1.0;
    if (whole < s) w[whole] = snapped - static_cast<double>(whole);
    return w;
  };
  const auto a = diag_weights(pat.alpha1);
  auto b = diag_weights(pat.beta1);
  std::reverse(b.begin(), b.end());
  ComplexMatrix rows(2 * s, d * s);
  for (std::size_t k = 0; k < s; ++k) {
    rows(k, pat.shared * s + k) = std::sqrt(a[k]);
    rows(k, pat.alpha_other * s + k) = std::sqrt(std::max(0.0, 1.0 - a[k]));
    rows(s + k, pat.shared * s + k) = std::sqrt(b[k]);
    rows(s + k, pat.beta_other * s + k) = std::sqrt(std::max(0.0, 1.0 - b[k]));
  }
  return rows;
}

}  // namespace

MembershipVerdict pair_feasibility(const ProbabilityVectorPair& pair, std::size_t s, const SolverConfig& cfg) {
  cfg.validate();
  if (s < 1) throw ParameterError("order s must be >= 1");
  const Tolerance tol;
  const auto screen = screen_pair(pair, s, tol);
  if (screen.verdict == Verdict3::No) return rejected(screen.reason);
  const std::size_t d = pair.d();
  const BlockTarget target = BlockTarget::pair(pair, s);

  if (screen.verdict == Verdict3::Yes && screen.reason == "bracelet") {
    BlockUnitary u(complete_to_unitary(polygon_rows(pair)), d, 1, tol);
    return certified(tensor_embed(u, s), target, tol, "bracelet_polygon");
  }
  if (screen.verdict == Verdict3::Yes && screen.reason == "slice") {
    const auto pat = match_slice_pattern(pair, tol);
    BlockUnitary u(complete_to_unitary(slice_rows(*pat, d, s, tol)), d, s, tol);
    return certified(std::move(u), target, tol, "slice_construction");
  }
  return solve_target(target, cfg, tol);
}

PairCertifier pair_certifier(const SolverConfig& cfg) {
  return [cfg](const ProbabilityVectorPair& pair, std::size_t s) {
    return pair_feasibility(pair, s, cfg).status == MembershipStatus::Member;
  };
}

}  // namespace unistoch
