#ifndef RMITER_STOKES_HPP
#define RMITER_STOKES_HPP

#include "rmiter/saddle.hpp"
#include "rmiter/types.hpp"

namespace rmiter {

/// Lid velocity profile of the driven cavity.
enum class LidProfile {
  regularized,  // g(x) = 4 x (1 - x), vanishes at the corners
  unit,         // g(x) = 1, discontinuous at the corners
};

double lid_profile_eval(LidProfile profile, double x);

/// Staggered (MAC) finite-difference Stokes system on the unit square:
/// pressures at cell centers, x-velocities on vertical edges, y-velocities
/// on horizontal edges. Dirichlet data is lifted into f, so the retained
/// unknowns satisfy homogeneous boundary conditions.
struct StokesSystem {
  Index n_cells = 0;  // N cells per side
  double h = 0.0;     // 1/N
  LidProfile lid = LidProfile::regularized;
  SpMat A;            // vector Laplacian on both components, boundary-lifted
  SpMat B;            // negative discrete divergence, velocity -> pressure
  SpMat Bt;           // discrete gradient, the transpose of B
  Vec f_lifted;       // lid data folded into the velocity right-hand side

  Index n_u() const { return A.rows(); }
  Index n_p() const { return B.rows(); }
};

/// Assembles the N x N cavity with the given lid. Velocity unknowns:
/// (N-1)*N per component; pressures: N^2. Tangential wall data enters the
/// Laplacian through ghost-cell reflection (ghost = 2 g - interior); normal
/// wall velocities are eliminated as zeros.
StokesSystem build_mac_stokes(Index n_cells, LidProfile lid);

/// Mesh-weighted L2 norm of the discrete divergence, ||B u||_h.
double divergence_norm(const StokesSystem& sys, const Vec& u);

/// Wraps the assembled operators as a SaddleProblem.
SaddleProblem make_saddle_problem(const StokesSystem& sys, double inner_tol = 1e-12,
                                  Index inner_max = 10000);

}  // namespace rmiter

#endif
