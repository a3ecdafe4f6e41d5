// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gnls/closed_form.hpp"
#include "gnls/forward.hpp"
#include "gnls/fourier_special.hpp"
#include "gnls/hierarchy.hpp"
#include "gnls/inversion.hpp"

using namespace gnls;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

CoefficientFunction zero() { return CoefficientFunction::zero(1.0); }

NonlinearPotential pure_q2(CoefficientFunction q2) { return NonlinearPotential(1.0, {zero(), zero(), std::move(q2)}); }

const SpatialGrid& grid() {
  static const SpatialGrid g = SpatialGrid::with_default_density(1.0);
  return g;
}

Outcome free_field() {
  const NonlinearPotential p(1.0, {zero()});
  const auto s = sweep(p, {0.5, 1.0, 2.0, 5.0}, {0.1}, grid());
  double err = 0.0;
  for (const auto& e : s.table) err = std::max({err, std::abs(e.A), std::abs(e.B - e.epsilon)});
  return {err <= 1e-10, "max |A|, |B - eps| = " + fmt("%.2e", err)};
}

Outcome linear_unitarity() {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 1.0)});
  const cplx eps = 0.1;
  const auto s = sweep(p, linspace(0.5, 5.0, 20), {eps}, grid());
  double err = 0.0;
  for (const auto& e : s.table) err = std::max(err, std::abs((std::norm(e.B) - std::norm(e.A)) / std::norm(eps) - 1.0));
  return {err <= 1e-8, "max relative flux defect = " + fmt("%.2e", err)};
}

Outcome closed_forms() {
  const auto ks = linspace(0.5, 8.0, 31);
  double worst = 0.0, relation = 0.0;
  const std::vector<std::pair<CoefficientFunction, std::function<ABPair(cplx)>>> cases = {
      {CoefficientFunction::constant(1.0, 1.0), [](cplx k) { return closed_form::constant_gamma(1.0, 1.0, k); }},
      {CoefficientFunction::exponential(1.0, 0.5), [](cplx k) { return closed_form::exponential_alpha(0.5, 1.0, k); }}};
  for (const auto& [q2, exact] : cases) {
    const auto p = pure_q2(q2);
    double dA = 0.0, dB = 0.0, refA = 0.0, refB = 0.0;
    for (double k : ks) {
      const auto got = solve_cascade(p, k, 3, grid()).AB[2];
      const auto ref = exact(k);
      dA = std::max(dA, std::abs(got.A - ref.A));
      dB = std::max(dB, std::abs(got.B - ref.B));
      refA = std::max(refA, std::abs(ref.A));
      refB = std::max(refB, std::abs(ref.B));
      const cplx B2k = solve_cascade(p, 2.0 * k, 3, grid()).AB[2].B;
      relation = std::max(relation, std::abs(got.A + 2.0 * B2k));
    }
    worst = std::max({worst, dA / refA, dB / refB});
  }
  return {worst <= 1e-6 && relation <= 1e-7,
          "norm-wise relative error " + fmt("%.2e", worst) + ", |A3(k) + 2 B3(2k)| " + fmt("%.2e", relation)};
}

Outcome extraction() {
  const auto p = pure_q2(CoefficientFunction::exponential(1.0, 0.5));
  const std::vector<double> ks{0.5, 1.0, 2.0, 3.5, 5.0};
  std::vector<cplx> eps;
  for (double e : linspace(0.002, 0.02, 5)) eps.emplace_back(e);
  const auto ex = extract_series(sweep(p, ks, eps, grid()), 5);
  double rel = 0.0, a2 = 0.0;
  for (std::size_t ik = 0; ik < ks.size(); ++ik) {
    const cplx ref = solve_cascade(p, ks[ik], 3, grid()).AB[2].A;
    rel = std::max(rel, std::abs(ex.A[2][ik] - ref) / std::abs(ref));
    a2 = std::max(a2, std::abs(ex.A[1][ik]));
  }
  return {rel <= 1e-4 && a2 <= 1e-6, "A3 relative " + fmt("%.2e", rel) + ", max |A2| " + fmt("%.2e", a2)};
}

Outcome operator_norms() {
  const SpatialGrid g(1.0, 512);
  const double k0 = reference_operator_norm(g, 64), syn = synthesis_operator_norm(g, 64);
  bool ok = std::abs(k0 - 1.0) <= 0.02 && std::abs(syn - 1.0) <= 0.02;
  std::ostringstream os;
  os << "||K0|| " << k0 << ", ||S|| " << syn;
  double worst = 0.0;
  for (double l1 : {0.05, 0.2}) {
    const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, l1), CoefficientFunction::sinusoid(1.0, 0.3, kPi)});
    const DataSetDn d{2, 1.0, {p.coefficient(0)}, cascade_provider(p, 2, g)};
    const double xi0 = find_xi0(2, 1.0, l1);
    for (double f : {2.0, 4.0}) {
      const auto sys = build_system(d, g, make_contour(2, 1.0, 64, f * xi0));
      const double ratio = difference_operator_norm(sys) / std::sqrt(sys.diagnostics.s);
      worst = std::max(worst, ratio);
    }
  }
  ok = ok && worst <= 1.05;
  os << ", max ||K-K0|| / sqrt(s) " << worst;
  return {ok, os.str()};
}

Outcome xi0_solver() {
  double worst = 0.0;
  bool monotone = true;
  for (double l1 : {0.01, 0.05, 0.2, 0.5}) {
    for (std::size_t n : {2u, 3u, 5u}) {
      const double x0 = find_xi0(n, 1.0, l1);
      worst = std::max(worst, std::abs(s_of_xi(x0, n, 1.0, l1) - 1.0));
      double prev = s_of_xi(1e-4, n, 1.0, l1);
      for (double xi = 2e-4; xi < 1e3; xi *= 1.25) {
        const double s = s_of_xi(xi, n, 1.0, l1);
        monotone = monotone && s < prev;
        prev = s;
      }
    }
  }
  return {worst <= 1e-10 && monotone, "max |s(xi0) - b| / b = " + fmt("%.2e", worst) + (monotone ? ", decreasing" : ", NOT decreasing")};
}

Outcome green_identity() {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.2), CoefficientFunction::sinusoid(1.0, 0.3, kPi)});
  const cplx k(0.7, 1.5);
  const auto jost = linear_scattering(p.coefficient(0), k, grid());
  const auto state = solve_cascade(p, k, 2, grid());
  const auto rhs = apply_negative_green(jost, forcing(p, state, 2).first);
  const cplx ratio = state.AB[1].B / jost.B1;
  double err = 0.0;
  for (std::size_t i = 0; i < grid().size(); ++i) {
    err = std::max(err, std::abs(state.u[1].value[i] - ratio * jost.u1.value[i] - rhs.values[i]));
  }
  return {err <= 1e-5, "sup |y2 + int G g2| = " + fmt("%.2e", err)};
}

Outcome fourier_closed_form() {
  const SpatialGrid g(1.0, 400);
  auto a3 = [](double k) { return closed_form::constant_gamma(1.0, 1.0, k).A; };
  auto a3_contour = [](cplx k) { return closed_form::constant_gamma(1.0, 1.0, k).A; };
  const auto ra = fourier_invert_integral(a3, SpecialCoefficient::A3, 200.0, g);
  const auto rb = fourier_invert_series(a3_contour, SpecialCoefficient::A3, 0.01, 256, g);
  double e_a = 0.0, e_ab = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    if (x < 0.05 - 1e-12 || x > 0.95 + 1e-12) continue;
    e_a = std::max(e_a, std::abs(ra.q[i] - 1.0));
    e_ab = std::max(e_ab, std::abs(ra.q[i] - rb.q[i]));
  }
  return {e_a <= 2e-2 && e_ab <= 2e-2,
          "integral route sup error " + fmt("%.2e", e_a) + ", integral vs contour sum " + fmt("%.2e", e_ab)};
}

Outcome roundtrip() {
  const auto q1 = CoefficientFunction::sinusoid(1.0, 0.3, kPi);
  const auto q2 = CoefficientFunction::exponential(1.0, 0.5);
  const NonlinearPotential p(1.0, {zero(), q1, q2});
  const auto& g = grid();

  // forward sweep and extraction on the real axis
  const std::vector<double> ks{0.5, 1.0, 2.0, 4.0};
  const auto delta = epsilon_bound(p, 1.0).delta;
  const auto ex = extract_series(sweep(p, ks, default_eps_list(delta), g), 5);
  const auto cs = cascade_series(p, std::vector<cplx>(ks.begin(), ks.end()), 3, g);
  double extract_err = 0.0;
  for (std::size_t n = 1; n < 3; ++n) {
    for (std::size_t ik = 0; ik < ks.size(); ++ik) {
      extract_err = std::max(extract_err, std::abs(ex.A[n][ik] - cs.A[n][ik]) / std::abs(cs.A[n][ik]));
    }
  }

  // contour data is generated by the cascade of the synthetic potential
  auto provider = [&](std::size_t n) { return cascade_provider(p, n, g); };
  RecoverConfig cfg;
  cfg.M = 256;
  std::vector<std::vector<ReconstructionResult>> by_route;
  for (Route r : {Route::F, Route::E}) {
    cfg.route = r;
    by_route.push_back(recover_all(zero(), 3, provider, g, cfg));
  }
  const double e1 = relative_l2_error(by_route[0][0].q, q1, g);
  const double e2 = relative_l2_error(by_route[0][1].q, q2, g);
  const double e1E = relative_l2_error(by_route[1][0].q, q1, g);
  const double e2E = relative_l2_error(by_route[1][1].q, q2, g);
  double agree = 0.0;
  for (std::size_t o = 0; o < 2; ++o) {
    agree = std::max(agree, relative_l2_error(by_route[0][o].q, by_route[1][o].as_coefficient(), g));
  }
  std::ostringstream os;
  os << "F: q1 " << fmt("%.2e", e1) << " q2 " << fmt("%.2e", e2) << "; E: q1 " << fmt("%.2e", e1E) << " q2 "
     << fmt("%.2e", e2E) << "; E vs F " << fmt("%.2e", agree) << "; extraction rel " << fmt("%.2e", extract_err);
  return {std::max({e1, e2, e1E, e2E}) <= 1e-2 && agree <= 2e-2, os.str()};
}

Outcome neumann_vs_direct() {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.05), CoefficientFunction::sinusoid(1.0, 0.3, kPi)});
  const DataSetDn d{2, 1.0, {p.coefficient(0)}, cascade_provider(p, 2, grid())};
  const double xi = 2.0 * find_xi0(2, 1.0, 0.05);
  const auto sys = build_system(d, grid(), make_contour(2, 1.0, 64, xi));
  const auto nr = invert_neumann(sys);
  const auto direct = invert_direct(sys);
  double sup = 0.0;
  for (std::size_t i = 0; i < grid().size(); ++i) {
    const double w = std::exp(-3.0 * xi * grid().node(i));
    sup = std::max(sup, w * std::abs(nr.phi(static_cast<Eigen::Index>(i)) - direct(static_cast<Eigen::Index>(i))));
  }
  double ratio = 0.0;
  for (double r : nr.term_ratios) ratio = std::max(ratio, r);
  const double bound = sys.diagnostics.contraction + 0.05;
  std::ostringstream os;
  os << "sup |q_neumann - q_direct| " << fmt("%.2e", sup) << ", " << nr.terms << " terms, max ratio "
     << fmt("%.3f", ratio) << " (bound " << fmt("%.3f", bound) << ")";
  return {sup <= 1e-6 && ratio <= bound, os.str()};
}

Outcome convergence_orders() {
  auto rk_error = [](std::size_t intervals) {
    const SpatialGrid g(1.0, intervals);
    const double k = 5.0;
    const auto t = integrate_ivp([k](double, cplx u, cplx) { return -k * k * u; }, 1.0, -kI * k, g);
    return std::abs(t.value.back() - std::exp(-kI * k));
  };
  auto simpson_error = [](std::size_t intervals) {
    const SpatialGrid g(1.0, intervals);
    std::vector<cplx> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-2.0 * kI * g.node(i));
    return std::abs(quad(f, g) - (1.0 - std::exp(-2.0 * kI)) / (2.0 * kI));
  };
  const double rk = rk_error(50) / rk_error(100);
  const double si = simpson_error(16) / simpson_error(32);
  auto in_range = [](double r) { return r >= 12.0 && r <= 20.0; };
  return {in_range(rk) && in_range(si), "RK4 factor " + fmt("%.2f", rk) + ", Simpson factor " + fmt("%.2f", si)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"free-field exactness", free_field},
      {"linear unitarity", linear_unitarity},
      {"third-order closed forms", closed_forms},
      {"eps-series extraction", extraction},
      {"operator norms", operator_norms},
      {"xi0 solver", xi0_solver},
      {"Green's function identity", green_identity},
      {"closed-form Fourier inversion", fourier_closed_form},
      {"end-to-end roundtrip", roundtrip},
      {"Neumann vs direct", neumann_vs_direct},
      {"convergence orders", convergence_orders},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2zu %-30s %s  %s  [%.1fs]\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
