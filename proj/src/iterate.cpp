#include "rmiter/iterate.hpp"

#include <algorithm>
#include <cmath>

namespace rmiter {

Vec step1_exact(const SaddleProblem& prob, const Vec& p_n) {
  Vec rhs = prob.f - prob.apply_Bt(p_n);
  CgResult inner = cg_solve(prob.apply_A, rhs, Vec::Zero(prob.n_u), prob.inner_tol, prob.inner_max);
  if (!inner.converged)
    throw InnerSolveError("step1_exact: inner CG did not reach tolerance",
                          inner.rel_residual, inner.iters);
  return inner.x;
}

Vec step1_richardson(const SaddleProblem& prob, const Vec& u_n, const Vec& p_n, double omega) {
  if (omega <= 0.0)
    throw std::invalid_argument("step1_richardson: omega must be positive");
  Vec residual = prob.f - prob.apply_A(u_n) - prob.apply_Bt(p_n);
  return u_n + omega * residual;
}

Vec step2_pressure_update(const SaddleProblem& prob, const Vec& p_n, const Vec& u_np1,
                          const Vec& u_n, double alpha2, double beta) {
  Vec incr = alpha2 * prob.apply_B(u_np1);
  if (beta != 0.0) incr += beta * prob.apply_B(u_np1 - u_n);
  return project_zero_mean(p_n + incr);
}

bool check_sufficient_condition(double alpha2, double beta, double M) {
  if (M <= 0.0)
    throw std::invalid_argument("check_sufficient_condition: M must be positive");
  return beta >= 0.0 && beta + alpha2 < 1.0 / M;
}

double energy_functional(const Vec& e_n, const Vec& e_nm1,
                         const std::function<Vec(const Vec&)>& schur,
                         double alpha2, double beta) {
  Vec w_n = schur(e_n);
  Vec w_nm1 = schur(e_nm1);
  const double en_sq = dot(e_n, e_n);
  const double en_S = dot(w_n, e_n);
  const double enm1_S = dot(w_nm1, e_nm1);
  Vec d = e_n - e_nm1;
  const double d_sq = dot(d, d);
  const double d_S = dot(w_n - w_nm1, d);
  return en_sq + beta * enm1_S + alpha2 * en_S + (d_sq - (beta + alpha2) * d_S);
}

double estimate_lambda_max_A(const SaddleProblem& prob, Index steps, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vec v = rng.next_vec(prob.n_u);
  v /= v.norm();
  double lambda = 0.0;
  for (Index k = 0; k < steps; ++k) {
    Vec w = prob.apply_A(v);
    lambda = dot(v, w);
    const double wn = w.norm();
    if (wn == 0.0) break;
    v = w / wn;
  }
  return lambda;
}

IterationHistory run(const SaddleProblem& prob, const IterationConfig& cfg,
                     bool track_energy, const Vec* exact_p) {
  cfg.validate();
  if (track_energy && exact_p == nullptr)
    throw std::invalid_argument("run: energy tracking requires the exact pressure");

  constexpr double kDivergenceGuard = 1e12;

  // the config's inner-solver settings govern the run
  SaddleProblem inner = prob;
  inner.inner_tol = cfg.inner_tol;
  inner.inner_max = cfg.inner_max;

  IterationHistory hist;
  hist.u = Vec::Zero(inner.n_u);
  hist.p = Vec::Zero(inner.n_p);

  double omega = cfg.richardson_omega;
  if (cfg.step1 == Step1Kind::richardson && omega <= 0.0)
    omega = 1.0 / estimate_lambda_max_A(inner);

  auto schur = [&inner](const Vec& q) { return schur_apply(inner, q); };

  for (Index n = 0; n < cfg.max_outer; ++n) {
    Vec u_next;
    Vec p_next;
    try {
      u_next = cfg.step1 == Step1Kind::exact
                   ? step1_exact(inner, hist.p)
                   : step1_richardson(inner, hist.u, hist.p, omega);
      p_next = step2_pressure_update(inner, hist.p, u_next, hist.u, cfg.alpha2, cfg.beta);
    } catch (const InnerSolveError& err) {
      throw RunAbortedError(err.what(), std::move(hist));
    }

    IterationRecord rec;
    rec.u_increment_norm = norm_h(u_next - hist.u, inner.h);
    rec.p_increment_norm = norm_h(p_next - hist.p, inner.h);
    rec.div_norm = norm_h(inner.apply_B(u_next), inner.h);
    if (track_energy) {
      Vec e_np1 = *exact_p - p_next;
      Vec e_n = *exact_p - hist.p;
      rec.energy = energy_functional(e_np1, e_n, schur, cfg.alpha2, cfg.beta);
    }
    hist.records.push_back(rec);
    hist.iterations = static_cast<Index>(hist.records.size());
    hist.u = std::move(u_next);
    hist.p = std::move(p_next);

    const double incr = std::max(rec.u_increment_norm, rec.p_increment_norm);
    if (incr <= cfg.tol) {
      hist.converged = true;
      break;
    }
    if (!(incr <= kDivergenceGuard)) {  // catches overflow to inf/nan as well
      hist.diverged = true;
      break;
    }
  }
  return hist;
}

}  // namespace rmiter
