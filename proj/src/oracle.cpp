#include "rmiter/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>

namespace rmiter {
namespace oracle {

DenseMatrix densify(const std::function<Vec(const Vec&)>& op, Index rows, Index cols) {
  DenseMatrix M(rows, cols);
  Vec e = Vec::Zero(cols);
  for (Index j = 0; j < cols; ++j) {
    e[j] = 1.0;
    Vec col = op(e);
    if (col.size() != rows)
      throw std::invalid_argument("densify: operator output size does not match");
    M.col(j) = col;
    e[j] = 0.0;
  }
  return M;
}

DenseSchur assemble_dense_schur(const SaddleProblem& prob) {
  if (prob.n_p > 400)
    throw std::invalid_argument("assemble_dense_schur: n_p > 400 exceeds the desk-scale cap");

  SaddleProblem tight = prob;
  tight.inner_tol = 1e-13;

  DenseMatrix S = densify([&tight](const Vec& q) { return schur_apply(tight, q); },
                          prob.n_p, prob.n_p);

  DenseSchur out;
  out.max_asymmetry = (S - S.transpose()).cwiseAbs().maxCoeff();
  out.matrix = 0.5 * (S + S.transpose());
  return out;
}

std::vector<double> dense_sym_eigs(const DenseMatrix& S) {
  if (S.rows() != S.cols())
    throw std::invalid_argument("dense_sym_eigs: matrix is not square");
  const double scale = S.cwiseAbs().maxCoeff();
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-8 * scale)
    throw std::invalid_argument("dense_sym_eigs: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense_sym_eigs: eigensolver failed");
  const Vec& ev = solver.eigenvalues();  // ascending
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

std::vector<double> zero_mean_spectrum(const std::vector<double>& eigs, double rel_cut) {
  if (eigs.empty()) return {};
  double amax = 0.0;
  for (double e : eigs) amax = std::max(amax, std::abs(e));
  std::vector<double> kept;
  kept.reserve(eigs.size());
  for (double e : eigs)
    if (std::abs(e) > rel_cut * amax) kept.push_back(e);
  for (double e : kept)
    if (e <= 0.0)
      throw std::invalid_argument("zero_mean_spectrum: negative eigenvalue beyond the projector null space");
  return kept;
}

double companion_spectral_radius(const std::vector<double>& eigs, double alpha2, double beta) {
  if (eigs.empty())
    throw std::invalid_argument("companion_spectral_radius: empty spectrum");
  double rho = 0.0;
  for (double lambda : eigs) {
    if (lambda <= 0.0)
      throw std::invalid_argument("companion_spectral_radius: eigenvalues must be positive");
    // roots of r^2 - b r - beta*lambda with b = 1 - (beta + alpha2) lambda
    const double b = 1.0 - (beta + alpha2) * lambda;
    const double disc = b * b + 4.0 * beta * lambda;
    double r;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      r = std::max(std::abs(0.5 * (b + s)), std::abs(0.5 * (b - s)));
    } else {
      r = std::abs(std::complex<double>(0.5 * b, 0.5 * std::sqrt(-disc)));
    }
    rho = std::max(rho, r);
  }
  return rho;
}

DirectSolution direct_solve(const SaddleProblem& prob) {
  const Index n_u = prob.n_u;
  const Index n_p = prob.n_p;
  const Index n = n_u + n_p;
  if (n > 2000)
    throw std::invalid_argument("direct_solve: total dimension exceeds the desk-scale cap");

  // Bordered system: the extra Lagrange multiplier column/row pins the
  // pressure mean to zero and removes the constant-pressure null space.
  DenseMatrix K = DenseMatrix::Zero(n + 1, n + 1);
  K.block(0, 0, n_u, n_u) = densify(prob.apply_A, n_u, n_u);
  K.block(0, n_u, n_u, n_p) = densify(prob.apply_Bt, n_u, n_p);
  K.block(n_u, 0, n_p, n_u) = densify(prob.apply_B, n_p, n_u);
  K.block(n_u, n, n_p, 1).setOnes();
  K.block(n, n_u, 1, n_p).setOnes();

  Vec rhs = Vec::Zero(n + 1);
  rhs.head(n_u) = prob.f;

  Eigen::PartialPivLU<DenseMatrix> lu(K);
  Vec z = lu.solve(rhs);

  const double resid = (K * z - rhs).norm();
  const double rhs_norm = rhs.norm();
  if (!z.allFinite() || resid > 1e-8 * std::max(rhs_norm, 1.0))
    throw SingularSystemError("direct_solve: system is singular beyond pivot tolerance");

  DirectSolution sol;
  sol.u = z.head(n_u);
  sol.p = z.segment(n_u, n_p);
  return sol;
}

}  // namespace oracle
}  // namespace rmiter
