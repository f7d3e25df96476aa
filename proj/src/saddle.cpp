#include "rmiter/saddle.hpp"

#include <cmath>

namespace rmiter {

Vec schur_apply(const SaddleProblem& prob, const Vec& q) {
  if (q.size() != prob.n_p)
    throw std::invalid_argument("schur_apply: pressure dimension mismatch");
  Vec rhs = prob.apply_Bt(project_zero_mean(q));
  CgResult inner = cg_solve(prob.apply_A, rhs, Vec::Zero(prob.n_u), prob.inner_tol, prob.inner_max);
  if (!inner.converged)
    throw InnerSolveError("schur_apply: inner CG did not reach tolerance",
                          inner.rel_residual, inner.iters);
  return project_zero_mean(prob.apply_B(inner.x));
}

double rayleigh(const SaddleProblem& prob, const Vec& q) {
  const double qq = dot(q, q);
  if (qq == 0.0)
    throw std::invalid_argument("rayleigh: zero vector");
  return dot(schur_apply(prob, q), q) / qq;
}

namespace {

// Power sweep on op from a zero-mean unit start. to_value maps the raw
// Rayleigh quotient of op to the reported estimate (identity for the max
// phase, shift - lambda for the shifted min phase); the stop test
// residual <= tol * |value| uses the reported value. Every iterate is
// re-projected: the shifted operator amplifies rounding-level drift into
// the constant direction (its eigenvalue there is the shift itself, which
// dominates the whole zero-mean spectrum).
template <class ToValue>
SpectralEstimate power_iterate(const std::function<Vec(const Vec&)>& op, Vec v,
                               double tol, Index max_iter, ToValue&& to_value) {
  SpectralEstimate est;
  v = project_zero_mean(std::move(v));
  v /= v.norm();
  for (Index k = 1; k <= max_iter; ++k) {
    Vec w = project_zero_mean(op(v));
    const double lambda = dot(v, w);
    const double residual = (w - lambda * v).norm();
    est.value = to_value(lambda);
    est.iterations = k;
    est.residual = residual;
    if (residual <= tol * std::abs(est.value)) {
      est.converged = true;
      return est;
    }
    const double wn = w.norm();
    if (wn == 0.0) return est;  // operator annihilated the iterate
    v = w / wn;
  }
  return est;
}

}  // namespace

SpectralEstimate estimate_extreme_eigen(const SaddleProblem& prob, bool want_max,
                                        double tol, Index max_iter, std::uint64_t seed) {
  if (tol <= 0.0)
    throw std::invalid_argument("estimate_extreme_eigen: tol must be positive");

  SplitMix64 rng(seed);
  auto schur = [&prob](const Vec& q) { return schur_apply(prob, q); };

  SpectralEstimate max_est = power_iterate(schur, rng.next_vec(prob.n_p), tol, max_iter,
                                           [](double l) { return l; });
  max_est.is_max = true;
  if (want_max) return max_est;

  // Smallest eigenvalue via the shifted operator s I - S. For a unit iterate
  // the residual of the shifted pair equals ||S v - value v||, so the
  // reported residual keeps the documented meaning.
  const double shift = 1.01 * max_est.value;
  auto shifted = [&prob, shift](const Vec& q) {
    Vec sq = schur_apply(prob, q);
    return Vec(shift * q - sq);
  };
  SplitMix64 rng_min(seed + 1);
  SpectralEstimate est = power_iterate(shifted, rng_min.next_vec(prob.n_p), tol, max_iter,
                                       [shift](double l) { return shift - l; });
  est.is_max = false;
  est.converged = est.converged && max_est.converged;
  return est;
}

}  // namespace rmiter
