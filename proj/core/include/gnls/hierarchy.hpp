#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gnls/forward.hpp"
#include "gnls/numerics.hpp"
#include "gnls/potential.hpp"

namespace gnls {

/// u1'' = (q0 - k^2) u1, u1(0) = 1, u1'(0) = -ik. Closed form when q0 vanishes.
ComplexTrajectory jost_right(const CoefficientFunction& q0, cplx k, const SpatialGrid& grid);

/// v1'' = (q0 - k^2) v1 integrated down from v1(b) = e^{ikb}, v1'(b) = ik e^{ikb}.
ComplexTrajectory jost_left(const CoefficientFunction& q0, cplx k, const SpatialGrid& grid);

struct JostSolutions {
  cplx k;
  ComplexTrajectory u1;
  ComplexTrajectory v1;
  cplx A1;
  cplx B1;

  cplx transmission() const { return 1.0 / B1; }
  cplx reflection() const { return A1 / B1; }
  /// v1' u1 - v1 u1' at node i; equals 2ik B1 for every i.
  cplx wronskian(std::size_t i) const;
  /// Largest deviation of the Wronskian from 2ik B1 over the grid, relative to its magnitude.
  double wronskian_defect() const;
};

/// Builds the Jost pair and reads A1, B1 off u1 at x = b.
/// Throws NumericalError if the Wronskian disagrees with 2ik B1 beyond 1e-6 relative.
JostSolutions linear_scattering(const CoefficientFunction& q0, cplx k, const SpatialGrid& grid);

/// Coefficient of eps^n in (sum_m eps^m u_m)^j at one point; u[m-1] holds u_m.
cplx power_coefficient(std::span<const cplx> u, std::size_t j, std::size_t n);

/// Same on every grid node. u_list holds u_1 .. u_L with L >= n - j + 1.
GridFunction power_coefficients(std::span<const ComplexTrajectory> u_list, std::size_t j, std::size_t n);

/// g_n = sum_{j=2}^{n} [eps^n](P^j) q_{j-1}  and  h_n = same sum without the j = n term,
/// evaluated from the values u_1 .. u_{n-1} at one point. q holds q_0 .. (at least q_{n-1}).
std::pair<cplx, cplx> forcing_at(std::span<const cplx> u, std::span<const double> q, std::size_t n);

struct CascadeState {
  cplx k;
  std::size_t order = 0;
  /// u[n-1] holds u_n.
  std::vector<ComplexTrajectory> u;
  /// AB[n-1] holds (A_n, B_n); zero-filled when k = 0.
  std::vector<ABPair> AB;
};

/// Returns (g_n, h_n) on the grid. The state must hold u_1 .. u_{n-1}.
std::pair<GridFunction, GridFunction> forcing(const NonlinearPotential& potential, const CascadeState& state,
                                              std::size_t n);

/// Solves orders 1 .. order as one coupled RK4 system so forcing is exact at every stage.
CascadeState solve_cascade(const NonlinearPotential& potential, cplx k, std::size_t order, const SpatialGrid& grid);

/// A_n, B_n from the endpoint values of u_n at x = b.
ABPair extract_AB(cplx value_at_b, cplx slope_at_b, cplx k, double b);

/// Green's function of the linear problem; requires |B1| >= 1e-10.
cplx green(double x, double t, const JostSolutions& jost);

/// -int_0^b G(x,t) f(t) dt on every node, from running integrals of the Jost pair.
GridFunction apply_negative_green(const JostSolutions& jost, const GridFunction& f);

enum class SeriesSource { cascade, extracted };

struct SeriesCoefficients {
  std::vector<cplx> k_grid;
  std::size_t order = 0;
  /// A[n-1][ik] holds A_n(k_ik).
  std::vector<std::vector<cplx>> A;
  std::vector<std::vector<cplx>> B;
  SeriesSource source = SeriesSource::cascade;
  /// Least-squares residual per k (A and B combined); zero for cascade data.
  std::vector<double> residual;
  /// Condition number of the scaled Vandermonde matrix (extracted only).
  double condition = 0.0;
};

/// Cascade coefficients on a list of wavenumbers.
SeriesCoefficients cascade_series(const NonlinearPotential& potential, const std::vector<cplx>& k_grid,
                                  std::size_t order, const SpatialGrid& grid, std::size_t threads = 1);

/// Least-squares fit of A(k; eps) = sum_{n=1}^{order} eps^n A_n(k), same for B.
/// Throws NumericalError when the Vandermonde condition number exceeds 1e12.
SeriesCoefficients extract_series(const ScatteringSweep& sweep, std::size_t order);

/// Default extraction amplitudes: `count` log-spaced values in [delta/50, delta/5].
std::vector<cplx> default_eps_list(double delta, std::size_t count = 5);

}  // namespace gnls
