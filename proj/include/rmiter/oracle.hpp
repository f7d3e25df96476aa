#ifndef RMITER_ORACLE_HPP
#define RMITER_ORACLE_HPP

#include <vector>

#include "rmiter/saddle.hpp"
#include "rmiter/types.hpp"

namespace rmiter {
namespace oracle {

/// Dense Schur complement assembled column by column, symmetrized.
struct DenseSchur {
  DenseMatrix matrix;          // (S + S^T)/2
  double max_asymmetry = 0.0;  // max |S - S^T| before symmetrization
};

/// Applies schur_apply to every projected basis vector at inner tolerance
/// 1e-13. Refuses problems with n_p > 400. Note the assembled matrix acts on
/// the full pressure space through the zero-mean projector, so it carries
/// one (near-)zero eigenvalue for the constant direction.
DenseSchur assemble_dense_schur(const SaddleProblem& prob);

/// Eigenvalues of a symmetric matrix, ascending. Rejects input whose
/// asymmetry exceeds 1e-8 * ||S||.
std::vector<double> dense_sym_eigs(const DenseMatrix& S);

/// Keeps the eigenvalues of a projected Schur matrix that belong to the
/// zero-mean subspace: drops entries below rel_cut * max|eig| (the
/// projector's null direction) and requires the rest to be positive.
std::vector<double> zero_mean_spectrum(const std::vector<double>& eigs, double rel_cut = 1e-6);

/// Spectral radius of the two-term error recursion
///
///   e^{n+1} = [1 - (beta + alpha2) lambda] e^n + beta lambda e^{n-1}
///
/// maximized over the given Schur eigenvalues (all must be positive).
/// A value below 1 predicts convergence of the exact-arithmetic iteration,
/// above 1 divergence.
double companion_spectral_radius(const std::vector<double>& eigs, double alpha2, double beta);

/// Direct dense solve of the saddle system with the pressure mean pinned to
/// zero through a bordered Lagrange-multiplier row/column. Gaussian
/// elimination with partial pivoting; total dimension capped at 2000.
struct DirectSolution {
  Vec u;
  Vec p;
};
DirectSolution direct_solve(const SaddleProblem& prob);

/// Densifies a linear operator by applying it to basis vectors.
DenseMatrix densify(const std::function<Vec(const Vec&)>& op, Index rows, Index cols);

}  // namespace oracle
}  // namespace rmiter

#endif
