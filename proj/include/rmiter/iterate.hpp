#ifndef RMITER_ITERATE_HPP
#define RMITER_ITERATE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "rmiter/saddle.hpp"
#include "rmiter/types.hpp"

namespace rmiter {

enum class Step1Kind { exact, richardson };

/// Parameters of the two-step iteration
///
///   Step 1:  A u^{n+1} = f - Bt p^n
///   Step 2:  p^{n+1} = p^n + beta B(u^{n+1} - u^n) + alpha2 B u^{n+1}
///
/// beta = 0 reduces Step 2 to the plain Uzawa pressure update.
struct IterationConfig {
  double alpha2 = 1.5;
  double beta = 0.0;
  double tol = 1e-6;       // outer stopping tolerance, mesh-weighted norms
  Index max_outer = 500;
  Step1Kind step1 = Step1Kind::exact;
  double richardson_omega = 0.0;  // <= 0 selects 1/lambda_max(A), estimated
  double inner_tol = 1e-12;
  Index inner_max = 10000;

  void validate() const {
    if (alpha2 <= 0.0)
      throw std::invalid_argument("IterationConfig: alpha2 must be positive (alpha2 = 0 leaves p frozen)");
    if (beta < 0.0) throw std::invalid_argument("IterationConfig: beta must be nonnegative");
    if (tol <= 0.0) throw std::invalid_argument("IterationConfig: tol must be positive");
  }
};

struct IterationRecord {
  double u_increment_norm = 0.0;
  double p_increment_norm = 0.0;
  double div_norm = 0.0;                 // ||B u^{n+1}||, mesh-weighted
  std::optional<double> energy;          // E^{n+1}, when tracked
};

struct IterationHistory {
  Index iterations = 0;
  bool converged = false;
  bool diverged = false;                 // increment norm exceeded the guard
  std::vector<IterationRecord> records;  // one per outer iteration
  Vec u;
  Vec p;
};

/// Thrown when the inner solver fails mid-run; carries the partial history.
struct RunAbortedError : std::runtime_error {
  RunAbortedError(const std::string& what, IterationHistory partial_)
      : std::runtime_error(what), partial(std::move(partial_)) {}
  IterationHistory partial;
};

/// Step 1: u^{n+1} = A^{-1}(f - Bt p^n) by CG at prob.inner_tol.
Vec step1_exact(const SaddleProblem& prob, const Vec& p_n);

/// Richardson replacement for Step 1: u^{n+1} = u^n + omega (f - A u^n - Bt p^n).
Vec step1_richardson(const SaddleProblem& prob, const Vec& u_n, const Vec& p_n, double omega);

/// Step 2 pressure update, projected to zero mean. The beta term is skipped
/// entirely when beta == 0 so that path is bit-identical to plain Uzawa.
Vec step2_pressure_update(const SaddleProblem& prob, const Vec& p_n, const Vec& u_np1,
                          const Vec& u_n, double alpha2, double beta);

/// Sufficient convergence condition: beta >= 0 and beta + alpha2 < 1/M.
bool check_sufficient_condition(double alpha2, double beta, double M);

/// Energy functional of the convergence analysis,
///
///   E = |e_n|^2 + beta |e_{n-1}|_S^2 + alpha2 |e_n|_S^2
///       + ( |e_n - e_{n-1}|^2 - (beta + alpha2) |e_n - e_{n-1}|_S^2 ),
///
/// with |q|_S^2 = dot(schur(q), q) in the plain Euclidean inner product.
double energy_functional(const Vec& e_n, const Vec& e_nm1,
                         const std::function<Vec(const Vec&)>& schur,
                         double alpha2, double beta);

/// Estimates lambda_max(A) with a fixed number of power steps; used to pick
/// the default Richardson relaxation 1/lambda_max.
double estimate_lambda_max_A(const SaddleProblem& prob, Index steps = 50,
                             std::uint64_t seed = 0x9E3779B97F4A7C15ULL);

/// Runs the iteration from u = 0, p = 0 until
/// max(||u^{n+1}-u^n||, ||p^{n+1}-p^n||) <= cfg.tol in mesh-weighted norms,
/// divergence (increment > 1e12), or cfg.max_outer. With track_energy the
/// per-iteration records carry E^{n+1} computed against exact_p.
IterationHistory run(const SaddleProblem& prob, const IterationConfig& cfg,
                     bool track_energy = false, const Vec* exact_p = nullptr);

}  // namespace rmiter

#endif
