#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gnls/numerics.hpp"
#include "gnls/potential.hpp"

namespace gnls {

/// Outgoing (A) and incoming (B) plane-wave amplitudes at x >= b.
struct ABPair {
  cplx A;
  cplx B;
};

/// Splits u(x), u'(x) at position x into A e^{ikx} + B e^{-ikx}. Works for complex k.
ABPair split_plane_waves(cplx value, cplx slope, cplx k, double x);

struct PlaneWaveMatch {
  double k = 0.0;
  cplx epsilon;
  cplx A;
  cplx B;
};

/// u'' = (Q(x,u) - k^2) u with u(0) = eps, u'(0) = -ik eps.
ComplexTrajectory solve_nonlinear(const NonlinearPotential& potential, double k, cplx epsilon,
                                  const SpatialGrid& grid);

/// A, B from the trajectory endpoint at x = b.
ABPair match_coefficients(const ComplexTrajectory& trajectory, double k);

struct VolterraOptions {
  std::size_t max_iter = 200;
  double tol = 1e-12;
};

struct VolterraResult {
  ComplexTrajectory trajectory;
  std::size_t iterations = 0;
  /// Sup-norm change in the last iteration.
  double residual = 0.0;
};

/// Picard iteration of the integral form of the scattering problem. Independent of the RK4 path.
VolterraResult volterra_oracle(const NonlinearPotential& potential, double k, cplx epsilon, const SpatialGrid& grid,
                               VolterraOptions options = {});

struct ScatteringSweep {
  std::vector<double> k_grid;
  std::vector<cplx> eps_list;
  /// Row-major: k index outer, eps index inner.
  std::vector<PlaneWaveMatch> table;
  double b = 0.0;
  std::size_t degree = 0;
  /// Existence radius used for the warnings below.
  double delta = 0.0;
  std::vector<std::string> warnings;

  const PlaneWaveMatch& at(std::size_t ik, std::size_t ie) const { return table[ik * eps_list.size() + ie]; }
};

struct SweepOptions {
  /// Trial amplitude bound r for the existence estimate.
  double r = 1.0;
  std::size_t threads = 1;
};

ScatteringSweep sweep(const NonlinearPotential& potential, const std::vector<double>& k_grid,
                      const std::vector<cplx>& eps_list, const SpatialGrid& grid, SweepOptions options = {});

}  // namespace gnls
