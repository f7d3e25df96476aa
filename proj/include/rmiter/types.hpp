#ifndef RMITER_TYPES_HPP
#define RMITER_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace rmiter {

using Index = Eigen::Index;

/// Dense 64-bit vector. Holds velocities, pressures and right-hand sides.
using Vec = Eigen::VectorXd;

/// Sparse matrix in compressed-row storage (sorted column indices per row).
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row-major dense matrix, used by the desk-scale oracle.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Thrown when a CG breakdown indicates the operator is not SPD.
struct NotSpdError : std::runtime_error {
  explicit NotSpdError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an inner solve fails to reach its tolerance.
struct InnerSolveError : std::runtime_error {
  InnerSolveError(const std::string& what, double rel_residual_, Index iters_)
      : std::runtime_error(what), rel_residual(rel_residual_), iters(iters_) {}
  double rel_residual;
  Index iters;
};

/// Thrown by the dense direct solver on a singular system.
struct SingularSystemError : std::runtime_error {
  explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rmiter

#endif
