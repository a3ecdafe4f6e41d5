#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gnls {

using cplx = std::complex<double>;
inline constexpr cplx kI{0.0, 1.0};

/// Uniform grid on [0, b] with an even number of intervals (composite Simpson).
class SpatialGrid {
 public:
  /// Default resolution: intervals per unit of support width.
  static constexpr std::size_t kDefaultDensity = 2000;

  SpatialGrid(double width, std::size_t intervals);

  static SpatialGrid with_default_density(double width);

  double width() const noexcept { return width_; }
  std::size_t intervals() const noexcept { return intervals_; }
  std::size_t size() const noexcept { return intervals_ + 1; }
  double step() const noexcept { return step_; }
  double node(std::size_t i) const noexcept {
    return i >= intervals_ ? width_ : static_cast<double>(i) * step_;
  }
  std::vector<double> nodes() const;

  /// Composite Simpson weights; sum to width().
  std::vector<double> simpson_weights() const;

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) noexcept {
    return a.width_ == b.width_ && a.intervals_ == b.intervals_;
  }

 private:
  double width_;
  std::size_t intervals_;
  double step_;
};

/// Complex samples of a function on a grid (no derivative information).
struct GridFunction {
  SpatialGrid grid;
  std::vector<cplx> values;

  explicit GridFunction(const SpatialGrid& g) : grid(g), values(g.size()) {}
  GridFunction(const SpatialGrid& g, std::vector<cplx> v);
};

/// A function together with its x-derivative on every grid node.
struct ComplexTrajectory {
  SpatialGrid grid;
  std::vector<cplx> value;
  std::vector<cplx> slope;

  explicit ComplexTrajectory(const SpatialGrid& g) : grid(g), value(g.size()), slope(g.size()) {}

  /// Cubic Hermite interpolation of the value at any x in [0, b].
  cplx value_at(double x) const;
  /// Derivative of the Hermite interpolant.
  cplx slope_at(double x) const;
};

enum class Direction { forward, backward };

struct IntegrationOptions {
  Direction direction = Direction::forward;
  /// RK4 steps per grid interval; output stays on the grid nodes.
  std::size_t substeps = 1;
};

/// u'' = f(x, u, u')
using SecondOrderRhs = std::function<cplx(double x, cplx u, cplx du)>;

/// u_i'' = f_i(x, u, u') for a vector of coupled equations. Writes into ddu.
using SecondOrderSystemRhs =
    std::function<void(double x, std::span<const cplx> u, std::span<const cplx> du, std::span<cplx> ddu)>;

/// Classical RK4 for a scalar second-order ODE. Initial data sit at x = 0 for
/// forward integration and at x = b for backward integration.
/// Throws TrajectoryBlowUp when the state stops being finite.
ComplexTrajectory integrate_ivp(const SecondOrderRhs& rhs, cplx initial_value, cplx initial_slope,
                                const SpatialGrid& grid, IntegrationOptions options = {});

std::vector<ComplexTrajectory> integrate_system(const SecondOrderSystemRhs& rhs,
                                                std::span<const cplx> initial_values,
                                                std::span<const cplx> initial_slopes, const SpatialGrid& grid,
                                                IntegrationOptions options = {});

/// Substeps needed so that frequency * (step / substeps) <= max_phase.
std::size_t substeps_for_frequency(double frequency, double step, double max_phase = 0.05);

/// Composite Simpson over the whole grid.
cplx quad(std::span<const cplx> samples, const SpatialGrid& grid);
double quad(std::span<const double> samples, const SpatialGrid& grid);

/// Composite Simpson over nodes [first, last]; last - first must be even.
cplx quad_range(std::span<const cplx> samples, const SpatialGrid& grid, std::size_t first, std::size_t last);

/// Running integral F(x_i) = int_0^{x_i} f, fourth order (local cubic interpolation).
std::vector<cplx> cumulative_integral(std::span<const cplx> samples, const SpatialGrid& grid);

struct DenseSolution {
  Eigen::VectorXcd x;
  double residual_norm = 0.0;
};

/// Gaussian elimination with partial pivoting. Throws NumericalError when a
/// pivot falls below 1e-13 times the largest matrix entry.
DenseSolution solve_dense(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs);

}  // namespace gnls
