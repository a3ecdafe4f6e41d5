#include "gnls/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "gnls/errors.hpp"
#include "gnls/parallel.hpp"

namespace gnls {

namespace {

constexpr std::size_t kMaxCascadeOrder = 16;

double jost_frequency(const CoefficientFunction& q0, cplx k) {
  return std::sqrt(std::norm(k) + q0.sup_norm());
}

ComplexTrajectory free_wave(cplx k, double sign, const SpatialGrid& grid) {
  ComplexTrajectory t(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.value[i] = std::exp(sign * kI * k * grid.node(i));
    t.slope[i] = sign * kI * k * t.value[i];
  }
  return t;
}

// pow[j][m] = [eps^m] (sum_l eps^l u_l)^j for 1 <= j, m <= n.
void power_table(std::span<const cplx> u, std::size_t n, std::vector<std::vector<cplx>>& pow) {
  pow.assign(n + 1, std::vector<cplx>(n + 1));
  for (std::size_t m = 1; m <= n && m <= u.size(); ++m) pow[1][m] = u[m - 1];
  for (std::size_t j = 2; j <= n; ++j) {
    for (std::size_t m = j; m <= n; ++m) {
      cplx acc{};
      // (P^{j-1})_{m-l} needs m - l >= j - 1
      for (std::size_t l = 1; l + j - 1 <= m; ++l) acc += pow[1][l] * pow[j - 1][m - l];
      pow[j][m] = acc;
    }
  }
}

void check_order(std::size_t n) {
  if (n < 1 || n > kMaxCascadeOrder) {
    throw ContractError("cascade order must lie in [1, " + std::to_string(kMaxCascadeOrder) + "]");
  }
}

}  // namespace

ComplexTrajectory jost_right(const CoefficientFunction& q0, cplx k, const SpatialGrid& grid) {
  if (q0.is_identically_zero()) return free_wave(k, -1.0, grid);
  const cplx k2 = k * k;
  auto rhs = [&q0, k2](double x, cplx u, cplx) { return (q0(x) - k2) * u; };
  IntegrationOptions opts;
  opts.substeps = substeps_for_frequency(jost_frequency(q0, k), grid.step());
  return integrate_ivp(rhs, 1.0, -kI * k, grid, opts);
}

ComplexTrajectory jost_left(const CoefficientFunction& q0, cplx k, const SpatialGrid& grid) {
  if (q0.is_identically_zero()) return free_wave(k, 1.0, grid);
  const cplx k2 = k * k;
  auto rhs = [&q0, k2](double x, cplx u, cplx) { return (q0(x) - k2) * u; };
  IntegrationOptions opts;
  opts.direction = Direction::backward;
  opts.substeps = substeps_for_frequency(jost_frequency(q0, k), grid.step());
  const cplx eb = std::exp(kI * k * grid.width());
  return integrate_ivp(rhs, eb, kI * k * eb, grid, opts);
}

cplx JostSolutions::wronskian(std::size_t i) const { return v1.slope[i] * u1.value[i] - v1.value[i] * u1.slope[i]; }

double JostSolutions::wronskian_defect() const {
  const cplx target = 2.0 * kI * k * B1;
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < u1.grid.size(); ++i) {
    scale = std::max(scale, std::abs(v1.slope[i] * u1.value[i]) + std::abs(v1.value[i] * u1.slope[i]));
    worst = std::max(worst, std::abs(wronskian(i) - target));
  }
  return scale > 0.0 ? worst / scale : worst;
}

JostSolutions linear_scattering(const CoefficientFunction& q0, cplx k, const SpatialGrid& grid) {
  if (k == cplx{}) throw ContractError("linear scattering needs k != 0");
  JostSolutions j{k, jost_right(q0, k, grid), jost_left(q0, k, grid), {}, {}};
  const std::size_t last = grid.intervals();
  const auto ab = extract_AB(j.u1.value[last], j.u1.slope[last], k, grid.width());
  j.A1 = ab.A;
  j.B1 = ab.B;
  const double defect = j.wronskian_defect();
  if (defect > 1e-6) {
    std::ostringstream os;
    os << "Jost pair inconsistent: Wronskian deviates from 2ikB1 by " << defect << " (relative)";
    throw NumericalError(os.str());
  }
  return j;
}

cplx power_coefficient(std::span<const cplx> u, std::size_t j, std::size_t n) {
  if (j < 1 || j > n) throw ContractError("power index j must satisfy 1 <= j <= n");
  if (u.size() < n - j + 1) throw ContractError("power coefficient needs u_1 .. u_{n-j+1}");
  std::vector<std::vector<cplx>> pow;
  power_table(u, n, pow);
  return pow[j][n];
}

GridFunction power_coefficients(std::span<const ComplexTrajectory> u_list, std::size_t j, std::size_t n) {
  if (j < 2 || j + 1 > n) throw ContractError("power_coefficients needs 2 <= j <= n - 1");
  if (u_list.size() < n - j + 1) throw ContractError("power_coefficients needs u_1 .. u_{n-j+1}");
  const SpatialGrid& grid = u_list.front().grid;
  GridFunction out(grid);
  const std::size_t L = n - j + 1;
  std::vector<cplx> local(L);
  std::vector<std::vector<cplx>> pow;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t m = 0; m < L; ++m) local[m] = u_list[m].value[i];
    power_table(local, n, pow);
    out.values[i] = pow[j][n];
  }
  return out;
}

std::pair<cplx, cplx> forcing_at(std::span<const cplx> u, std::span<const double> q, std::size_t n) {
  if (n < 2) throw ContractError("forcing is defined for n >= 2");
  if (u.size() + 1 < n) throw ContractError("forcing g_n needs u_1 .. u_{n-1}");
  std::vector<std::vector<cplx>> pow;
  power_table(u.first(std::min(u.size(), n - 1)), n, pow);
  auto qv = [&q](std::size_t idx) { return idx < q.size() ? q[idx] : 0.0; };
  cplx h{};
  for (std::size_t j = 2; j + 1 <= n; ++j) h += pow[j][n] * qv(j - 1);
  return {h + pow[n][n] * qv(n - 1), h};
}

std::pair<GridFunction, GridFunction> forcing(const NonlinearPotential& potential, const CascadeState& state,
                                              std::size_t n) {
  if (n < 2) throw ContractError("forcing is defined for n >= 2");
  if (state.u.size() + 1 < n) {
    throw ContractError("cascade state holds orders up to " + std::to_string(state.u.size()) + ", forcing g_" +
                        std::to_string(n) + " needs " + std::to_string(n - 1));
  }
  const SpatialGrid& grid = state.u.front().grid;
  GridFunction g(grid), h(grid);
  std::vector<cplx> local(n - 1);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    for (std::size_t m = 0; m + 1 < n; ++m) local[m] = state.u[m].value[i];
    for (std::size_t m = 0; m < n; ++m) q[m] = potential.coefficient(m)(x);
    const auto [gv, hv] = forcing_at(local, q, n);
    g.values[i] = gv;
    h.values[i] = hv;
  }
  return {std::move(g), std::move(h)};
}

CascadeState solve_cascade(const NonlinearPotential& potential, cplx k, std::size_t order, const SpatialGrid& grid) {
  check_order(order);
  if (std::abs(grid.width() - potential.support()) > 1e-12 * potential.support()) {
    throw ContractError("spatial grid width does not match potential support");
  }
  const CoefficientFunction& q0 = potential.coefficient(0);
  const bool free_u1 = q0.is_identically_zero();
  const cplx k2 = k * k;

  CascadeState state{k, order, {}, {}};
  // With q0 = 0 the first order is a plane wave; only orders >= 2 need integration.
  const std::size_t offset = free_u1 ? 1 : 0;
  const std::size_t dim = order - offset;

  if (dim == 0) {
    state.u.push_back(jost_right(q0, k, grid));
  } else {
    std::vector<cplx> u0(dim), du0(dim);
    if (!free_u1) {
      u0[0] = 1.0;
      du0[0] = -kI * k;
    }
    auto rhs = [&, offset, order](double x, std::span<const cplx> u, std::span<const cplx>, std::span<cplx> ddu) {
      cplx full[kMaxCascadeOrder];
      double q[kMaxCascadeOrder];
      if (offset == 1) full[0] = std::exp(-kI * k * x);
      for (std::size_t d = 0; d < u.size(); ++d) full[d + offset] = u[d];
      for (std::size_t m = 0; m < order; ++m) q[m] = potential.coefficient(m)(x);
      const cplx linear = q[0] - k2;
      // powers of the partial sum, orders up to `order`
      cplx pow[kMaxCascadeOrder + 1][kMaxCascadeOrder + 1] = {};
      for (std::size_t m = 1; m <= order; ++m) pow[1][m] = full[m - 1];
      for (std::size_t j = 2; j <= order; ++j) {
        for (std::size_t m = j; m <= order; ++m) {
          cplx acc{};
          for (std::size_t l = 1; l + j - 1 <= m; ++l) acc += pow[1][l] * pow[j - 1][m - l];
          pow[j][m] = acc;
        }
      }
      for (std::size_t d = 0; d < u.size(); ++d) {
        const std::size_t n = d + offset + 1;
        cplx g{};
        for (std::size_t j = 2; j <= n; ++j) g += pow[j][n] * q[j - 1];
        ddu[d] = linear * u[d] + g;
      }
    };
    IntegrationOptions opts;
    opts.substeps = substeps_for_frequency(static_cast<double>(order) * jost_frequency(q0, k), grid.step());
    auto traj = integrate_system(rhs, u0, du0, grid, opts);
    if (free_u1) state.u.push_back(jost_right(q0, k, grid));
    for (auto& t : traj) state.u.push_back(std::move(t));
  }

  state.AB.resize(order);
  if (k != cplx{}) {
    const std::size_t last = grid.intervals();
    for (std::size_t n = 0; n < order; ++n) {
      state.AB[n] = extract_AB(state.u[n].value[last], state.u[n].slope[last], k, grid.width());
    }
  }
  return state;
}

ABPair extract_AB(cplx value_at_b, cplx slope_at_b, cplx k, double b) {
  return split_plane_waves(value_at_b, slope_at_b, k, b);
}

cplx green(double x, double t, const JostSolutions& jost) {
  if (std::abs(jost.B1) < 1e-10) {
    throw NumericalError("|B1| below 1e-10: k is near a bound state / resonance");
  }
  const double lo = std::min(x, t);
  const double hi = std::max(x, t);
  return -jost.v1.value_at(hi) * jost.u1.value_at(lo) / (2.0 * kI * jost.k * jost.B1);
}

GridFunction apply_negative_green(const JostSolutions& jost, const GridFunction& f) {
  if (std::abs(jost.B1) < 1e-10) {
    throw NumericalError("|B1| below 1e-10: k is near a bound state / resonance");
  }
  const SpatialGrid& grid = f.grid;
  const std::size_t n = grid.size();
  std::vector<cplx> uf(n), vf(n);
  for (std::size_t i = 0; i < n; ++i) {
    uf[i] = jost.u1.value[i] * f.values[i];
    vf[i] = jost.v1.value[i] * f.values[i];
  }
  const auto Iu = cumulative_integral(uf, grid);
  const auto Iv = cumulative_integral(vf, grid);
  const cplx scale = 1.0 / (2.0 * kI * jost.k * jost.B1);
  GridFunction out(grid);
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = scale * (jost.u1.value[i] * (Iv.back() - Iv[i]) + jost.v1.value[i] * Iu[i]);
  }
  return out;
}

SeriesCoefficients cascade_series(const NonlinearPotential& potential, const std::vector<cplx>& k_grid,
                                  std::size_t order, const SpatialGrid& grid, std::size_t threads) {
  check_order(order);
  SeriesCoefficients out;
  out.k_grid = k_grid;
  out.order = order;
  out.A.assign(order, std::vector<cplx>(k_grid.size()));
  out.B.assign(order, std::vector<cplx>(k_grid.size()));
  out.residual.assign(k_grid.size(), 0.0);
  out.source = SeriesSource::cascade;
  parallel_for(k_grid.size(), threads, [&](std::size_t ik) {
    if (k_grid[ik] == cplx{}) throw ContractError("cascade series excludes k = 0");
    const auto state = solve_cascade(potential, k_grid[ik], order, grid);
    for (std::size_t n = 0; n < order; ++n) {
      out.A[n][ik] = state.AB[n].A;
      out.B[n][ik] = state.AB[n].B;
    }
  });
  return out;
}

SeriesCoefficients extract_series(const ScatteringSweep& sweep, std::size_t order) {
  check_order(order);
  const std::size_t ne = sweep.eps_list.size();
  if (ne < order) {
    throw ContractError("extraction through order " + std::to_string(order) + " needs at least that many eps values");
  }
  double scale = 0.0;
  for (cplx e : sweep.eps_list) {
    if (e == cplx{}) throw ContractError("eps_list must not contain 0");
    scale = std::max(scale, std::abs(e));
  }

  Eigen::MatrixXcd V(ne, order);
  for (std::size_t i = 0; i < ne; ++i) {
    const cplx e = sweep.eps_list[i] / scale;
    cplx p = e;
    for (std::size_t n = 0; n < order; ++n, p *= e) V(i, n) = p;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond <= 1e12)) {
    std::ostringstream os;
    os << "ill-conditioned extraction (Vandermonde condition " << cond << "); adjust eps_list";
    throw NumericalError(os.str());
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(V);

  SeriesCoefficients out;
  out.order = order;
  out.source = SeriesSource::extracted;
  out.condition = cond;
  out.A.assign(order, std::vector<cplx>(sweep.k_grid.size()));
  out.B.assign(order, std::vector<cplx>(sweep.k_grid.size()));
  out.residual.assign(sweep.k_grid.size(), 0.0);
  for (std::size_t ik = 0; ik < sweep.k_grid.size(); ++ik) {
    out.k_grid.emplace_back(sweep.k_grid[ik], 0.0);
    Eigen::VectorXcd a(ne), b(ne);
    for (std::size_t i = 0; i < ne; ++i) {
      a(i) = sweep.at(ik, i).A;
      b(i) = sweep.at(ik, i).B;
    }
    const Eigen::VectorXcd ca = qr.solve(a);
    const Eigen::VectorXcd cb = qr.solve(b);
    out.residual[ik] = std::hypot((V * ca - a).norm(), (V * cb - b).norm());
    double unscale = 1.0;
    for (std::size_t n = 0; n < order; ++n) {
      unscale /= scale;
      out.A[n][ik] = ca(static_cast<Eigen::Index>(n)) * unscale;
      out.B[n][ik] = cb(static_cast<Eigen::Index>(n)) * unscale;
    }
  }
  return out;
}

std::vector<cplx> default_eps_list(double delta, std::size_t count) {
  if (!(delta > 0.0)) throw ContractError("existence radius delta must be positive");
  if (count == 0) return {};
  std::vector<cplx> out(count);
  const double lo = std::log(delta / 50.0);
  const double hi = std::log(delta / 5.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::exp(lo + t * (hi - lo));
  }
  return out;
}

}  // namespace gnls
