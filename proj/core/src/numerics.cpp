#include "gnls/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gnls/errors.hpp"

namespace gnls {

namespace {

constexpr double kBlowUpMagnitude = 1e150;

bool usable(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag()) && std::abs(z) < kBlowUpMagnitude;
}

void check_length(std::size_t got, const SpatialGrid& grid) {
  if (got != grid.size()) {
    throw ContractError("sample count " + std::to_string(got) + " does not match grid size " +
                        std::to_string(grid.size()));
  }
}

}  // namespace

SpatialGrid::SpatialGrid(double width, std::size_t intervals) : width_(width), intervals_(intervals) {
  if (!(width > 0.0) || !std::isfinite(width)) throw ContractError("grid width must be positive and finite");
  if (intervals < 2 || intervals % 2 != 0) throw ContractError("grid needs an even number (>= 2) of intervals");
  step_ = width_ / static_cast<double>(intervals_);
}

SpatialGrid SpatialGrid::with_default_density(double width) {
  auto n = static_cast<std::size_t>(std::ceil(width * static_cast<double>(kDefaultDensity)));
  n += n % 2;
  return SpatialGrid(width, std::max<std::size_t>(n, 2));
}

std::vector<double> SpatialGrid::nodes() const {
  std::vector<double> x(size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = node(i);
  return x;
}

std::vector<double> SpatialGrid::simpson_weights() const {
  std::vector<double> w(size());
  const double third = step_ / 3.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i == 0 || i == intervals_) {
      w[i] = third;
    } else {
      w[i] = (i % 2 == 1 ? 4.0 : 2.0) * third;
    }
  }
  return w;
}

GridFunction::GridFunction(const SpatialGrid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  check_length(values.size(), grid);
}

namespace {

struct HermiteCell {
  std::size_t i;
  double t;
  double h;
};

HermiteCell locate(const SpatialGrid& grid, double x) {
  const double b = grid.width();
  if (x < -1e-12 * b || x > b * (1 + 1e-12)) throw ContractError("interpolation point outside [0, b]");
  const double h = grid.step();
  auto i = static_cast<std::size_t>(std::clamp(std::floor(x / h), 0.0, static_cast<double>(grid.intervals() - 1)));
  return {i, (x - grid.node(i)) / h, h};
}

}  // namespace

cplx ComplexTrajectory::value_at(double x) const {
  const auto [i, t, h] = locate(grid, x);
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * value[i] + (t3 - 2 * t2 + t) * h * slope[i] + (-2 * t3 + 3 * t2) * value[i + 1] +
         (t3 - t2) * h * slope[i + 1];
}

cplx ComplexTrajectory::slope_at(double x) const {
  const auto [i, t, h] = locate(grid, x);
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * value[i] + (-6 * t2 + 6 * t) * value[i + 1]) / h + (3 * t2 - 4 * t + 1) * slope[i] +
         (3 * t2 - 2 * t) * slope[i + 1];
}

std::size_t substeps_for_frequency(double frequency, double step, double max_phase) {
  const double phase = std::abs(frequency) * step;
  if (!(phase > max_phase)) return 1;
  return static_cast<std::size_t>(std::ceil(phase / max_phase));
}

std::vector<ComplexTrajectory> integrate_system(const SecondOrderSystemRhs& rhs, std::span<const cplx> initial_values,
                                                std::span<const cplx> initial_slopes, const SpatialGrid& grid,
                                                IntegrationOptions options) {
  const std::size_t dim = initial_values.size();
  if (dim == 0 || initial_slopes.size() != dim) throw ContractError("initial value and slope vectors must match");
  if (options.substeps == 0) throw ContractError("substeps must be positive");

  const std::size_t n = grid.intervals();
  const bool forward = options.direction == Direction::forward;
  const double h = (forward ? 1.0 : -1.0) * grid.step() / static_cast<double>(options.substeps);

  std::vector<ComplexTrajectory> out(dim, ComplexTrajectory(grid));
  std::vector<cplx> u(initial_values.begin(), initial_values.end());
  std::vector<cplx> v(initial_slopes.begin(), initial_slopes.end());
  std::vector<cplx> k1u(dim), k1v(dim), k2u(dim), k2v(dim), k3u(dim), k3v(dim), k4u(dim), k4v(dim);
  std::vector<cplx> us(dim), vs(dim);

  auto store = [&](std::size_t node) {
    for (std::size_t d = 0; d < dim; ++d) {
      if (!usable(u[d]) || !usable(v[d])) throw TrajectoryBlowUp(node);
      out[d].value[node] = u[d];
      out[d].slope[node] = v[d];
    }
  };

  std::size_t node = forward ? 0 : n;
  store(node);
  for (std::size_t step = 0; step < n; ++step) {
    const double x0 = grid.node(node);
    for (std::size_t sub = 0; sub < options.substeps; ++sub) {
      const double x = x0 + static_cast<double>(sub) * h;
      // k1
      rhs(x, u, v, k1v);
      for (std::size_t d = 0; d < dim; ++d) {
        k1u[d] = v[d];
        us[d] = u[d] + 0.5 * h * k1u[d];
        vs[d] = v[d] + 0.5 * h * k1v[d];
      }
      // k2
      rhs(x + 0.5 * h, us, vs, k2v);
      for (std::size_t d = 0; d < dim; ++d) {
        k2u[d] = vs[d];
        us[d] = u[d] + 0.5 * h * k2u[d];
        vs[d] = v[d] + 0.5 * h * k2v[d];
      }
      // k3
      rhs(x + 0.5 * h, us, vs, k3v);
      for (std::size_t d = 0; d < dim; ++d) {
        k3u[d] = vs[d];
        us[d] = u[d] + h * k3u[d];
        vs[d] = v[d] + h * k3v[d];
      }
      // k4
      rhs(x + h, us, vs, k4v);
      for (std::size_t d = 0; d < dim; ++d) {
        k4u[d] = vs[d];
        u[d] += (h / 6.0) * (k1u[d] + 2.0 * k2u[d] + 2.0 * k3u[d] + k4u[d]);
        v[d] += (h / 6.0) * (k1v[d] + 2.0 * k2v[d] + 2.0 * k3v[d] + k4v[d]);
      }
    }
    node = forward ? node + 1 : node - 1;
    store(node);
  }
  return out;
}

ComplexTrajectory integrate_ivp(const SecondOrderRhs& rhs, cplx initial_value, cplx initial_slope,
                                const SpatialGrid& grid, IntegrationOptions options) {
  const cplx u0[1] = {initial_value};
  const cplx du0[1] = {initial_slope};
  auto system = [&rhs](double x, std::span<const cplx> u, std::span<const cplx> du, std::span<cplx> ddu) {
    ddu[0] = rhs(x, u[0], du[0]);
  };
  auto result = integrate_system(system, u0, du0, grid, options);
  return std::move(result.front());
}

namespace {

template <typename T>
T simpson(std::span<const T> f, double h, std::size_t first, std::size_t last) {
  T odd{}, even{};
  for (std::size_t i = first + 1; i < last; ++i) {
    if ((i - first) % 2 == 1) {
      odd += f[i];
    } else {
      even += f[i];
    }
  }
  return (h / 3.0) * (f[first] + f[last] + 4.0 * odd + 2.0 * even);
}

}  // namespace

cplx quad(std::span<const cplx> samples, const SpatialGrid& grid) {
  check_length(samples.size(), grid);
  return simpson(samples, grid.step(), 0, grid.intervals());
}

double quad(std::span<const double> samples, const SpatialGrid& grid) {
  check_length(samples.size(), grid);
  return simpson(samples, grid.step(), 0, grid.intervals());
}

cplx quad_range(std::span<const cplx> samples, const SpatialGrid& grid, std::size_t first, std::size_t last) {
  check_length(samples.size(), grid);
  if (last < first || last > grid.intervals() || (last - first) % 2 != 0) {
    throw ContractError("quad_range needs an even number of intervals inside the grid");
  }
  if (first == last) return {};
  return simpson(samples, grid.step(), first, last);
}

std::vector<cplx> cumulative_integral(std::span<const cplx> f, const SpatialGrid& grid) {
  check_length(f.size(), grid);
  const std::size_t n = grid.intervals();
  const double c = grid.step() / 24.0;
  std::vector<cplx> out(n + 1);
  if (n < 3) {
    // two intervals: Simpson halves via quadratic interpolation
    out[1] = (grid.step() / 12.0) * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    out[2] = out[1] + (grid.step() / 12.0) * (-f[0] + 8.0 * f[1] + 5.0 * f[2]);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    cplx piece;
    if (i == 0) {
      piece = c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    } else if (i == n - 1) {
      piece = c * (f[n - 3] - 5.0 * f[n - 2] + 19.0 * f[n - 1] + 9.0 * f[n]);
    } else {
      piece = c * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    }
    out[i + 1] = out[i] + piece;
  }
  return out;
}

DenseSolution solve_dense(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs) {
  const Eigen::Index n = matrix.rows();
  if (n < 1 || matrix.cols() != n) throw ContractError("solve_dense needs a non-empty square matrix");
  if (rhs.size() != n) throw ContractError("right-hand side length does not match matrix");

  Eigen::MatrixXcd a = matrix;
  Eigen::VectorXcd x = rhs;
  const double scale = a.cwiseAbs().maxCoeff();
  const double threshold = 1e-13 * scale;

  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    double best = std::abs(a(col, col));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double mag = std::abs(a(r, col));
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (!(best > threshold)) {
      throw NumericalError("numerically singular matrix (pivot " + std::to_string(best) + " at column " +
                           std::to_string(col) + ")");
    }
    if (pivot != col) {
      a.row(col).swap(a.row(pivot));
      std::swap(x(col), x(pivot));
    }
    const cplx inv = 1.0 / a(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const cplx factor = a(r, col) * inv;
      if (factor == cplx{}) continue;
      a.row(r).tail(n - col) -= factor * a.row(col).tail(n - col);
      x(r) -= factor * x(col);
    }
  }
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    cplx acc = x(r);
    for (Eigen::Index c = r + 1; c < n; ++c) acc -= a(r, c) * x(c);
    x(r) = acc / a(r, r);
  }
  return {x, (matrix * x - rhs).norm()};
}

}  // namespace gnls
