#ifndef RMITER_CORE_HPP
#define RMITER_CORE_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <utility>

#include "rmiter/types.hpp"

namespace rmiter {

/// Euclidean inner product with an explicit length check.
inline double dot(const Vec& x, const Vec& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("dot: length mismatch");
  return x.dot(y);
}

/// Mesh-weighted discrete L2 norm on a 2D grid with spacing h:
/// sqrt(h^2 * sum x_i^2).
inline double norm_h(const Vec& x, double h) {
  if (h <= 0.0)
    throw std::invalid_argument("norm_h: h must be positive");
  return std::sqrt(h * h * x.squaredNorm());
}

/// y = A*x with a dimension check. Row sums accumulate in stored
/// (column-sorted) order, so results are reproducible run to run.
inline Vec spmv(const SpMat& A, const Vec& x) {
  if (A.cols() != x.size())
    throw std::invalid_argument("spmv: dimension mismatch");
  return A * x;
}

namespace detail {
inline bool same_bits(const Vec& a, const Vec& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

// Neumaier-compensated mean. A plain sum over O(1) entries cannot see the
// sub-ulp drift that repeated mean subtraction induces, which stalls the
// projection loop below; the compensated sum tracks it.
inline double compensated_mean(const Vec& p) {
  double s = 0.0, c = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    const double x = p[i];
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return (s + c) / static_cast<double>(p.size());
}
}  // namespace detail

/// Removes the mean component of p. Subtracts the compensated mean until it
/// falls below the one-subtraction rounding floor 4 eps max|p_i|; a vector
/// already under that floor is returned unchanged, so applying the
/// projection twice gives the same bits as applying it once.
inline Vec project_zero_mean(Vec p) {
  if (p.size() == 0)
    throw std::invalid_argument("project_zero_mean: empty vector");
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  for (int pass = 0; pass < 64; ++pass) {
    const double m = detail::compensated_mean(p);
    if (std::abs(m) <= 4.0 * kEps * p.cwiseAbs().maxCoeff()) return p;
    Vec q = p.array() - m;
    if (detail::same_bits(q, p)) return p;
    p = std::move(q);
  }
  return p;
}

/// splitmix64 stream. Same seed gives the same sequence on every platform.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), using the top 53 bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Vector with entries uniform in [-1, 1).
  Vec next_vec(Index n) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = 2.0 * next_double() - 1.0;
    return v;
  }
};

struct CgResult {
  Vec x;
  Index iters = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Unpreconditioned conjugate gradients for an SPD operator.
///
/// Stops when ||b - A x|| <= rel_tol * ||b|| (Euclidean, via the recurrence
/// residual) or after max_iter iterations; the result carries the reached
/// relative residual either way. A search direction with p'Ap <= 0 beyond
/// rounding slack throws NotSpdError.
template <class Op>
CgResult cg_solve(Op&& apply, const Vec& b, const Vec& x0, double rel_tol, Index max_iter) {
  if (rel_tol <= 0.0)
    throw std::invalid_argument("cg_solve: rel_tol must be positive");
  if (b.size() != x0.size())
    throw std::invalid_argument("cg_solve: b/x0 length mismatch");

  const double bnorm = b.norm();
  if (bnorm == 0.0) return {Vec::Zero(b.size()), 0, 0.0, true};

  CgResult res;
  res.x = x0;
  Vec r = b - apply(x0);
  Vec p = r;
  double rr = r.squaredNorm();
  res.rel_residual = std::sqrt(rr) / bnorm;
  if (res.rel_residual <= rel_tol) {
    res.converged = true;
    return res;
  }

  for (Index k = 1; k <= max_iter; ++k) {
    Vec Ap = apply(p);
    const double pAp = dot(p, Ap);
    if (pAp <= 0.0) {
      if (pAp < -1e-14 * p.squaredNorm())
        throw NotSpdError("cg_solve: operator is not positive definite (p'Ap < 0)");
      break;  // stagnation at rounding level
    }
    const double alpha = rr / pAp;
    res.x += alpha * p;
    r -= alpha * Ap;
    const double rr_next = r.squaredNorm();
    res.iters = k;
    res.rel_residual = std::sqrt(rr_next) / bnorm;
    if (res.rel_residual <= rel_tol) {
      res.converged = true;
      return res;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return res;
}

}  // namespace rmiter

#endif
