#include "rmiter/stokes.hpp"

#include <memory>
#include <vector>

namespace rmiter {

double lid_profile_eval(LidProfile profile, double x) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("lid_profile_eval: x outside [0, 1]");
  switch (profile) {
    case LidProfile::regularized: return 4.0 * x * (1.0 - x);
    case LidProfile::unit: return 1.0;
  }
  throw std::invalid_argument("lid_profile_eval: unknown profile");
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Unknown layout for an N x N cell grid, h = 1/N:
//   u(i,j): x-velocity on the vertical edge x = (i+1)h, y = (j+1/2)h,
//           i in [0, N-2], j in [0, N-1]
//   v(i,j): y-velocity on the horizontal edge x = (i+1/2)h, y = (j+1)h,
//           i in [0, N-1], j in [0, N-2]
//   p(i,j): cell center x = (i+1/2)h, y = (j+1/2)h, i,j in [0, N-1]
struct MacLayout {
  Index n;
  Index nu_x() const { return (n - 1) * n; }
  Index u(Index i, Index j) const { return j * (n - 1) + i; }
  Index v(Index i, Index j) const { return nu_x() + j * n + i; }
  Index p(Index i, Index j) const { return j * n + i; }
};

}  // namespace

StokesSystem build_mac_stokes(Index n_cells, LidProfile lid) {
  if (n_cells < 3)
    throw std::invalid_argument("build_mac_stokes: need at least 3 cells per side");

  const Index n = n_cells;
  const double h = 1.0 / static_cast<double>(n);
  const double ih2 = 1.0 / (h * h);
  const double ih = 1.0 / h;
  const MacLayout L{n};

  const Index n_u = 2 * n * (n - 1);
  const Index n_p = n * n;

  StokesSystem sys;
  sys.n_cells = n;
  sys.h = h;
  sys.lid = lid;
  sys.f_lifted = Vec::Zero(n_u);

  std::vector<Triplet> a;
  a.reserve(static_cast<std::size_t>(5 * n_u));

  // x-velocity rows of the 5-point Laplacian. West/east neighbours on the
  // side walls are known zeros (normal components); south/north neighbours
  // are tangential ghosts reflected across the wall, ghost = 2g - interior.
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i + 1 < n; ++i) {
      const Index row = L.u(i, j);
      double diag = 4.0;
      if (i > 0) a.emplace_back(row, L.u(i - 1, j), -ih2);
      if (i + 2 < n) a.emplace_back(row, L.u(i + 1, j), -ih2);
      if (j > 0)
        a.emplace_back(row, L.u(i, j - 1), -ih2);
      else
        diag += 1.0;  // bottom wall, g = 0
      if (j + 1 < n) {
        a.emplace_back(row, L.u(i, j + 1), -ih2);
      } else {
        diag += 1.0;  // lid
        const double g = lid_profile_eval(lid, static_cast<double>(i + 1) * h);
        sys.f_lifted[row] += 2.0 * g * ih2;
      }
      a.emplace_back(row, row, diag * ih2);
    }
  }

  // y-velocity rows. South/north neighbours on the top/bottom walls are
  // known zeros; west/east neighbours are tangential ghosts (g = 0).
  for (Index j = 0; j + 1 < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index row = L.v(i, j);
      double diag = 4.0;
      if (j > 0) a.emplace_back(row, L.v(i, j - 1), -ih2);
      if (j + 2 < n) a.emplace_back(row, L.v(i, j + 1), -ih2);
      if (i > 0)
        a.emplace_back(row, L.v(i - 1, j), -ih2);
      else
        diag += 1.0;
      if (i + 1 < n)
        a.emplace_back(row, L.v(i + 1, j), -ih2);
      else
        diag += 1.0;
      a.emplace_back(row, row, diag * ih2);
    }
  }

  sys.A.resize(n_u, n_u);
  sys.A.setFromTriplets(a.begin(), a.end());
  sys.A.makeCompressed();

  // B = -div at cell centers; faces on the walls carry zero normal velocity
  // and drop out. Bt = grad is assembled as the exact transpose.
  std::vector<Triplet> b;
  std::vector<Triplet> bt;
  b.reserve(static_cast<std::size_t>(4 * n_p));
  bt.reserve(static_cast<std::size_t>(2 * n_u));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Index cell = L.p(i, j);
      if (i + 1 < n) b.emplace_back(cell, L.u(i, j), -ih);      // east face
      if (i > 0) b.emplace_back(cell, L.u(i - 1, j), ih);       // west face
      if (j + 1 < n) b.emplace_back(cell, L.v(i, j), -ih);      // north face
      if (j > 0) b.emplace_back(cell, L.v(i, j - 1), ih);       // south face
    }
  }
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i + 1 < n; ++i) {
      bt.emplace_back(L.u(i, j), L.p(i + 1, j), ih);
      bt.emplace_back(L.u(i, j), L.p(i, j), -ih);
    }
  for (Index j = 0; j + 1 < n; ++j)
    for (Index i = 0; i < n; ++i) {
      bt.emplace_back(L.v(i, j), L.p(i, j + 1), ih);
      bt.emplace_back(L.v(i, j), L.p(i, j), -ih);
    }

  sys.B.resize(n_p, n_u);
  sys.B.setFromTriplets(b.begin(), b.end());
  sys.B.makeCompressed();
  sys.Bt.resize(n_u, n_p);
  sys.Bt.setFromTriplets(bt.begin(), bt.end());
  sys.Bt.makeCompressed();

  return sys;
}

double divergence_norm(const StokesSystem& sys, const Vec& u) {
  return norm_h(spmv(sys.B, u), sys.h);
}

SaddleProblem make_saddle_problem(const StokesSystem& sys, double inner_tol, Index inner_max) {
  auto shared = std::make_shared<const StokesSystem>(sys);
  SaddleProblem prob;
  prob.apply_A = [shared](const Vec& x) { return spmv(shared->A, x); };
  prob.apply_B = [shared](const Vec& x) { return spmv(shared->B, x); };
  prob.apply_Bt = [shared](const Vec& x) { return spmv(shared->Bt, x); };
  prob.f = sys.f_lifted;
  prob.n_u = sys.n_u();
  prob.n_p = sys.n_p();
  prob.h = sys.h;
  prob.inner_tol = inner_tol;
  prob.inner_max = inner_max;
  return prob;
}

}  // namespace rmiter
