#include "spreadopt/pde.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace spreadopt {

namespace {

// One theta-scheme march of the interior problem; bc selects the edge rows.
// Returns phi at time-to-go = horizon. No self-check at this level.
std::vector<double> march(const RiccatiSpec& spec, double horizon,
                          const FdGrid& g, FdBoundary bc,
                          const std::vector<double>& z) {
  const int nz = g.nz;
  const double dz = (g.z_max - g.z_min) / (nz - 1);
  const double dt = horizon / g.nt;
  const double theta = g.theta;

  // Spatial operator L phi = (a.b) z phi_z + (b2/2) phi_zz
  //                          + (xi a2 / 2) z^2 phi, rows (lo, di, up).
  std::vector<double> lo(nz), di(nz), up(nz);
  for (int i = 0; i < nz; ++i) {
    const double conv = spec.ab * z[i] / (2.0 * dz);
    const double diff = 0.5 * spec.b2 / (dz * dz);
    lo[i] = diff - conv;
    di[i] = -2.0 * diff + 0.5 * spec.xi * spec.a2 * z[i] * z[i];
    up[i] = diff + conv;
  }

  // Implicit rows of (I - theta dt L).
  std::vector<double> ia(nz), ib(nz), ic(nz);
  for (int i = 0; i < nz; ++i) {
    ia[i] = -theta * dt * lo[i];
    ib[i] = 1.0 - theta * dt * di[i];
    ic[i] = -theta * dt * up[i];
  }

  std::vector<double> phi(nz, 1.0), rhs(nz), cp(nz), dp(nz), next(nz);
  for (int n = 0; n < g.nt; ++n) {
    const double tau1 = (n + 1) * dt;
    for (int i = 1; i < nz - 1; ++i) {
      rhs[i] = phi[i] + (1.0 - theta) * dt *
                            (lo[i] * phi[i - 1] + di[i] * phi[i] +
                             up[i] * phi[i + 1]);
    }
    if (bc == FdBoundary::ansatz) {
      const double gg = riccati_g(spec, tau1);
      const double hh = riccati_h(spec, tau1);
      const double bl = std::exp(gg + 0.5 * hh * z.front() * z.front());
      const double br = std::exp(gg + 0.5 * hh * z.back() * z.back());
      // Dirichlet rows.
      cp[0] = 0.0;
      dp[0] = bl;
      for (int i = 1; i < nz - 1; ++i) {
        const double den = ib[i] - ia[i] * cp[i - 1];
        cp[i] = ic[i] / den;
        dp[i] = (rhs[i] - ia[i] * dp[i - 1]) / den;
      }
      next[nz - 1] = br;
      for (int i = nz - 2; i >= 0; --i) next[i] = dp[i] - cp[i] * next[i + 1];
    } else {
      // zero_curvature: fold phi_0 = 2 phi_1 - phi_2 into row 1 and
      // phi_{n-1} = 2 phi_{n-2} - phi_{n-3} into row n-2.
      const double b1 = ib[1] + 2.0 * ia[1];
      const double c1 = ic[1] - ia[1];
      cp[1] = c1 / b1;
      dp[1] = rhs[1] / b1;
      for (int i = 2; i < nz - 2; ++i) {
        const double den = ib[i] - ia[i] * cp[i - 1];
        cp[i] = ic[i] / den;
        dp[i] = (rhs[i] - ia[i] * dp[i - 1]) / den;
      }
      const int j = nz - 2;
      const double aj = ia[j] - ic[j];
      const double bj = ib[j] + 2.0 * ic[j];
      const double den = bj - aj * cp[j - 1];
      next[j] = (rhs[j] - aj * dp[j - 1]) / den;
      for (int i = j - 1; i >= 1; --i) next[i] = dp[i] - cp[i] * next[i + 1];
      next[0] = 2.0 * next[1] - next[2];
      next[nz - 1] = 2.0 * next[nz - 2] - next[nz - 3];
    }
    phi.swap(next);
  }
  return phi;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  }
  return v;
}

}  // namespace

FdSolution solve_cauchy_fd(const RiccatiSpec& spec, double horizon,
                           const FdGrid& grid, FdBoundary bc) {
  if (!(horizon > 0.0)) {
    throw DomainError("horizon must be > 0, got " + std::to_string(horizon));
  }
  if (horizon >= 0.98 * spec.t_esc) {
    throw EscapeTimeExceeded(
        "horizon " + std::to_string(horizon) +
        " is within 2% of the escape time " + std::to_string(spec.t_esc) +
        "; the truncated problem is unreliable there");
  }
  if (!(grid.z_min < grid.z_max)) {
    throw DomainError("z_min must be < z_max");
  }
  if (grid.nz < 9 || grid.nz % 2 == 0) {
    throw DomainError("nz must be odd and >= 9, got " +
                      std::to_string(grid.nz));
  }
  if (grid.nt < 2 || grid.nt % 2 != 0) {
    throw DomainError("nt must be even and >= 2, got " +
                      std::to_string(grid.nt));
  }
  if (!(grid.theta >= 0.5 && grid.theta <= 1.0)) {
    throw DomainError("theta must lie in [0.5, 1]");
  }

  FdSolution out;
  out.z = linspace(grid.z_min, grid.z_max, grid.nz);
  out.phi = march(spec, horizon, grid, bc, out.z);

  // Step-doubling self-check: a half-resolution solve must agree on the
  // inner half of the domain, else the grid cannot support the horizon.
  FdGrid half = grid;
  half.nz = (grid.nz - 1) / 2 + 1;
  half.nt = grid.nt / 2;
  const std::vector<double> zc = linspace(grid.z_min, grid.z_max, half.nz);
  const std::vector<double> coarse = march(spec, horizon, half, bc, zc);
  const double z_inner = 0.5 * std::max(std::abs(grid.z_min), grid.z_max);
  double worst = 0.0;
  for (int i = 0; i < half.nz; ++i) {
    if (std::abs(zc[i]) > z_inner) continue;
    const double fine = out.phi[2 * i];
    const double scale = std::max(std::abs(fine), 1e-300);
    worst = std::max(worst, std::abs(coarse[i] - fine) / scale);
  }
  if (!(worst <= kFdSelfCheckTol)) {
    throw GridTooCoarse("half-resolution disagreement " +
                        std::to_string(worst) + " exceeds " +
                        std::to_string(kFdSelfCheckTol) +
                        "; refine nz/nt for this horizon");
  }
  return out;
}

}  // namespace spreadopt
