#pragma once

#include <vector>

#include "spreadopt/riccati.hpp"

namespace spreadopt {

/// Self-consistency gate: the solution must agree with a half-resolution
/// solve to this relative tolerance on the inner half of the domain,
/// otherwise GridTooCoarse is thrown.
inline constexpr double kFdSelfCheckTol = 1e-3;

struct FdGrid {
  double z_min = -6.0;
  double z_max = 6.0;
  int nz = 801;        // spatial nodes, odd so half-resolution nodes align
  int nt = 2000;       // time steps, even for the same reason
  double theta = 0.5;  // 0.5 = Crank-Nicolson, 1.0 = implicit Euler
};

enum class FdBoundary {
  ansatz,          // Dirichlet from the closed-form exp(g + h z^2/2)
  zero_curvature,  // second difference vanishes at the edge nodes
};

struct FdSolution {
  std::vector<double> z;    // spatial nodes
  std::vector<double> phi;  // phi(z, t=0) for the given horizon
};

/// Theta-scheme finite-difference solution of the backward Cauchy problem
///
///   phi_t + z (a.b) phi_z + (b2/2) phi_zz + (xi a2 / 2) z^2 phi = 0,
///   phi(z, T) = 1,
///
/// marched in time-to-go with central differences and a tridiagonal solve
/// per step. This is the independent oracle for the exp(g + h z^2/2) ansatz,
/// so it never evaluates the closed forms except (optionally) on the
/// boundary. Refuses horizons at or beyond 0.98 t_esc, where the growing
/// quadratic potential makes the truncated problem meaningless.
FdSolution solve_cauchy_fd(const RiccatiSpec& spec, double horizon,
                           const FdGrid& grid = {},
                           FdBoundary bc = FdBoundary::ansatz);

}  // namespace spreadopt
