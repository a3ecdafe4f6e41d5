#include "gnls/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gnls/errors.hpp"
#include "gnls/parallel.hpp"

namespace gnls {

namespace {

void require_nonzero(cplx k) {
  if (k == cplx{}) throw ContractError("wavenumber k = 0 is excluded (plane-wave basis degenerates)");
}

void require_matching_width(const NonlinearPotential& p, const SpatialGrid& grid) {
  if (std::abs(grid.width() - p.support()) > 1e-12 * p.support()) {
    throw ContractError("spatial grid width does not match potential support");
  }
}

std::string describe_pair(double k, cplx eps) {
  std::ostringstream os;
  os.precision(10);
  os << "(k=" << k << ", eps=" << eps.real() << (eps.imag() < 0 ? "" : "+") << eps.imag() << "i)";
  return os.str();
}

}  // namespace

ABPair split_plane_waves(cplx value, cplx slope, cplx k, double x) {
  require_nonzero(k);
  const cplx ek = std::exp(kI * k * x);
  const cplx A = (k * value - kI * slope) / (2.0 * k * ek);
  const cplx B = (k * value + kI * slope) * ek / (2.0 * k);
  return {A, B};
}

ComplexTrajectory solve_nonlinear(const NonlinearPotential& potential, double k, cplx epsilon,
                                  const SpatialGrid& grid) {
  require_nonzero(k);
  require_matching_width(potential, grid);
  const double k2 = k * k;
  auto rhs = [&potential, k2](double x, cplx u, cplx) { return (eval_Q(potential, x, u) - k2) * u; };
  IntegrationOptions opts;
  opts.substeps = substeps_for_frequency(std::abs(k), grid.step());
  return integrate_ivp(rhs, epsilon, -kI * k * epsilon, grid, opts);
}

ABPair match_coefficients(const ComplexTrajectory& trajectory, double k) {
  const std::size_t last = trajectory.grid.intervals();
  return split_plane_waves(trajectory.value[last], trajectory.slope[last], k, trajectory.grid.width());
}

VolterraResult volterra_oracle(const NonlinearPotential& potential, double k, cplx epsilon, const SpatialGrid& grid,
                               VolterraOptions options) {
  require_nonzero(k);
  require_matching_width(potential, grid);
  const std::size_t n = grid.size();

  std::vector<cplx> incident(n), incident_slope(n);
  std::vector<double> s(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.node(i);
    incident[i] = epsilon * std::exp(-kI * k * x);
    incident_slope[i] = -kI * k * incident[i];
    s[i] = std::sin(k * x);
    c[i] = std::cos(k * x);
  }

  VolterraResult result{ComplexTrajectory(grid), 0, 0.0};
  auto& u = result.trajectory;
  u.value = incident;
  u.slope = incident_slope;

  std::vector<cplx> fs(n), fc(n), next(n);
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const cplx f = eval_Q(potential, grid.node(i), u.value[i]) * u.value[i];
      fs[i] = s[i] * f;
      fc[i] = c[i] * f;
    }
    const auto Is = cumulative_integral(fs, grid);
    const auto Ic = cumulative_integral(fc, grid);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = incident[i] + (s[i] * Ic[i] - c[i] * Is[i]) / k;
      u.slope[i] = incident_slope[i] + c[i] * Ic[i] + s[i] * Is[i];
      diff = std::max(diff, std::abs(next[i] - u.value[i]));
      if (!std::isfinite(std::abs(next[i]))) throw TrajectoryBlowUp(i);
    }
    u.value.swap(next);
    result.iterations = iter;
    result.residual = diff;
    if (diff <= options.tol) return result;
  }
  std::ostringstream os;
  os << "Picard did not converge after " << options.max_iter << " iterations (last residual " << result.residual
     << ")";
  throw NumericalError(os.str());
}

ScatteringSweep sweep(const NonlinearPotential& potential, const std::vector<double>& k_grid,
                      const std::vector<cplx>& eps_list, const SpatialGrid& grid, SweepOptions options) {
  for (double k : k_grid) {
    if (k == 0.0 || !std::isfinite(k)) throw ContractError("k_grid must contain finite nonzero values");
  }
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (eps_list[i] == cplx{}) throw ContractError("eps_list must not contain 0");
    for (std::size_t j = 0; j < i; ++j) {
      if (eps_list[i] == eps_list[j]) throw ContractError("eps_list values must be distinct");
    }
  }
  require_matching_width(potential, grid);

  ScatteringSweep out;
  out.k_grid = k_grid;
  out.eps_list = eps_list;
  out.b = potential.support();
  out.degree = potential.degree();
  out.delta = epsilon_bound(potential, options.r).delta;
  for (cplx eps : eps_list) {
    if (std::abs(eps) > out.delta) {
      std::ostringstream os;
      os << "|eps| = " << std::abs(eps) << " exceeds the existence radius delta = " << out.delta
         << " (sufficient bound only; solution may still exist)";
      out.warnings.push_back(os.str());
    }
  }

  const std::size_t ne = eps_list.size();
  out.table.resize(k_grid.size() * ne);
  parallel_for(out.table.size(), options.threads, [&](std::size_t idx) {
    const double k = k_grid[idx / ne];
    const cplx eps = eps_list[idx % ne];
    try {
      const auto ab = match_coefficients(solve_nonlinear(potential, k, eps, grid), k);
      out.table[idx] = {k, eps, ab.A, ab.B};
    } catch (const TrajectoryBlowUp& e) {
      throw NumericalError(std::string(e.what()) + " at " + describe_pair(k, eps) +
                           "; eps is likely too large for this potential");
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at " + describe_pair(k, eps));
    }
  });
  return out;
}

}  // namespace gnls
