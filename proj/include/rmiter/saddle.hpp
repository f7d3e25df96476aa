#ifndef RMITER_SADDLE_HPP
#define RMITER_SADDLE_HPP

#include <cstdint>
#include <functional>

#include "rmiter/core.hpp"
#include "rmiter/types.hpp"

namespace rmiter {

/// Abstract saddle-point problem
///
///   A u + Bt p = f,   B u = 0,
///
/// with A SPD on the velocity space, Bt the adjoint of B, and pressures
/// living in the zero-mean subspace. For Stokes, A = -laplacian,
/// Bt = gradient, B = -divergence.
struct SaddleProblem {
  std::function<Vec(const Vec&)> apply_A;   // velocity -> velocity
  std::function<Vec(const Vec&)> apply_B;   // velocity -> pressure
  std::function<Vec(const Vec&)> apply_Bt;  // pressure -> velocity
  Vec f;                                    // velocity right-hand side
  Index n_u = 0;
  Index n_p = 0;
  double h = 1.0;           // mesh scale for weighted norms
  double inner_tol = 1e-12; // inner CG relative tolerance
  Index inner_max = 10000;
};

/// Extreme Rayleigh-quotient estimate for the Schur complement.
struct SpectralEstimate {
  double value = 0.0;      // estimated eigenvalue, > 0 when converged
  bool is_max = true;      // which end of the spectrum
  Index iterations = 0;
  double residual = 0.0;   // ||S q - value q|| / ||q|| at termination
  bool converged = false;
};

/// Applies the Schur complement S = B A^{-1} Bt to a pressure vector:
/// project, solve A w = Bt q by CG at prob.inner_tol, apply B, project.
/// Throws InnerSolveError if the inner CG does not reach tolerance.
Vec schur_apply(const SaddleProblem& prob, const Vec& q);

/// Rayleigh quotient (S q, q) / (q, q). The uniform mesh weights of the
/// pressure inner product cancel in the ratio.
double rayleigh(const SaddleProblem& prob, const Vec& q);

/// Power-iteration estimate of the largest (is_max) or smallest Schur
/// eigenvalue, from a seeded random zero-mean start vector. The smallest
/// eigenvalue is obtained by powering the shifted operator s I - S with
/// s = 1.01 * M_est, where M_est is computed first from the same budget.
/// Terminates once residual <= tol * value, else at max_iter with
/// converged = false.
SpectralEstimate estimate_extreme_eigen(const SaddleProblem& prob, bool want_max,
                                        double tol, Index max_iter, std::uint64_t seed);

}  // namespace rmiter

#endif
