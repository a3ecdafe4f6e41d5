#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gnls/closed_form.hpp"
#include "gnls/errors.hpp"
#include "gnls/inversion.hpp"

using namespace gnls;

namespace {

constexpr double kPi = std::numbers::pi;
const SpatialGrid kGrid(1.0, 1000);

CoefficientFunction zero() { return CoefficientFunction::zero(1.0); }

CoefficientFunction bump() {
  // sin^2(pi x): vanishes with its slope at both ends
  return CoefficientFunction::tabulated(SpatialGrid(1.0, 4000), [] {
    std::vector<double> v(4001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::sin(kPi * static_cast<double>(i) / 4000.0), 2);
    return v;
  }());
}

DataSetDn cascade_data(const NonlinearPotential& p, std::size_t n) {
  std::vector<CoefficientFunction> known;
  for (std::size_t j = 0; j + 2 <= n; ++j) known.push_back(p.coefficient(j));
  return {n, 1.0, known, cascade_provider(p, n, kGrid)};
}

DataSetDn closed_form_data(std::function<ABPair(cplx)> f) { return {3, 1.0, {zero(), zero()}, std::move(f)}; }

Eigen::VectorXcd samples(const std::function<cplx(double)>& f) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(kGrid.size()));
  for (std::size_t i = 0; i < kGrid.size(); ++i) v(static_cast<Eigen::Index>(i)) = f(kGrid.node(i));
  return v;
}

}  // namespace

TEST(DataSet, Validation) {
  DataSetDn d{2, 1.0, {zero()}, nullptr};
  EXPECT_THROW(d.validate(), ContractError);
  d.series = [](cplx) { return ABPair{}; };
  EXPECT_NO_THROW(d.validate());
  d.known_coeffs.push_back(zero());
  EXPECT_THROW(d.validate(), ContractError);
  d.n = 1;
  EXPECT_THROW(d.validate(), ContractError);
}

TEST(Hn, LowOrdersVanish) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.3), CoefficientFunction::sinusoid(1.0, 0.2, 2.0)});
  for (const auto& v : compute_hn_for_data(cascade_data(p, 2), cplx(1.0, 0.2), kGrid).values) EXPECT_EQ(v, cplx{});
  const NonlinearPotential q2only(1.0, {zero(), zero(), CoefficientFunction::constant(1.0, 1.0)});
  for (const auto& v : compute_hn_for_data(cascade_data(q2only, 3), 1.3, kGrid).values) EXPECT_EQ(v, cplx{});
}

TEST(Hn, ThirdOrderWithLinearTerm) {
  const double c = 0.4;
  const NonlinearPotential p(1.0, {zero(), CoefficientFunction::constant(1.0, c)});
  const cplx k(1.1, 0.3);
  const auto h = compute_hn_for_data(cascade_data(p, 3), k, kGrid);
  const auto s = solve_cascade(p, k, 2, kGrid);
  for (std::size_t i = 0; i < kGrid.size(); i += 50) {
    EXPECT_NEAR(std::abs(h.values[i] - 2.0 * c * s.u[0].value[i] * s.u[1].value[i]), 0.0, 1e-14);
  }
}

TEST(DataFunctionals, FreeLinearPartReducesToCoefficients) {
  const auto d = closed_form_data([](cplx k) { return closed_form::constant_gamma(1.0, 1.0, k); });
  for (cplx k : {cplx(0.7, 0.0), cplx(2.0, 0.5)}) {
    const auto ab = closed_form::constant_gamma(1.0, 1.0, k);
    EXPECT_NEAR(std::abs(compute_En(d, k, kGrid) + 2.0 * kI * k * ab.B), 0.0, 1e-13);
    EXPECT_NEAR(std::abs(compute_Fn(d, k, kGrid) - 2.0 * kI * k * ab.A), 0.0, 1e-13);
  }
}

TEST(DataFunctionals, MomentIdentities) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.2), CoefficientFunction::sinusoid(1.0, 0.3, kPi),
                                   CoefficientFunction::exponential(1.0, 0.5)});
  for (std::size_t n : {2u, 3u}) {
    const auto d = cascade_data(p, n);
    const auto& qn = p.coefficient(n - 1);
    for (cplx k : {cplx(1.0, 0.0), cplx(-2.5, 0.3), cplx(0.4, 1.0)}) {
      const auto j = linear_scattering(p.coefficient(0), k, kGrid);
      std::vector<cplx> fu(kGrid.size()), fv(kGrid.size());
      for (std::size_t i = 0; i < kGrid.size(); ++i) {
        const cplx u = j.u1.value[i];
        fu[i] = std::pow(u, static_cast<int>(n + 1)) * qn(kGrid.node(i));
        fv[i] = j.v1.value[i] * std::pow(u, static_cast<int>(n)) * qn(kGrid.node(i));
      }
      const cplx F = compute_Fn(d, k, kGrid), E = compute_En(d, k, kGrid);
      EXPECT_LE(std::abs(F - quad(fu, kGrid)), 1e-6 * std::max(1.0, std::abs(F))) << "n=" << n << " k=" << k;
      EXPECT_LE(std::abs(E - quad(fv, kGrid)), 1e-6 * std::max(1.0, std::abs(E))) << "n=" << n << " k=" << k;
    }
  }
}

TEST(SOfXi, Examples) {
  EXPECT_EQ(s_of_xi(0.5, 2, 1.0, 0.0), 0.0);
  EXPECT_THROW(s_of_xi(0.0, 2, 1.0, 0.1), ContractError);
  EXPECT_THROW(s_of_xi(-1.0, 2, 1.0, 0.1), ContractError);
  const double xi = 0.7;
  const double expected = 27.0 / (2.0 * xi) * 0.01 / std::tanh(1.5 * xi) * std::exp(0.6);
  EXPECT_NEAR(s_of_xi(xi, 2, 1.0, 0.1), expected, 1e-12 * expected);
  double prev = s_of_xi(0.01, 3, 1.0, 0.2);
  for (double x = 0.02; x < 50.0; x *= 1.5) {
    const double s = s_of_xi(x, 3, 1.0, 0.2);
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(FindXi0, SolvesThresholdEquation) {
  EXPECT_EQ(find_xi0(2, 1.0, 0.0), 0.0);
  for (Route r : {Route::F, Route::E}) {
    for (double l1 : {0.01, 0.1, 0.5}) {
      const double x0 = find_xi0(3, 1.5, l1, r);
      EXPECT_NEAR(s_of_xi(x0, 3, 1.5, l1, r), 1.5, 1e-9);
    }
  }
  EXPECT_DOUBLE_EQ(auto_xi(2, 1.0, 0.0, Route::F), 0.01);
  EXPECT_DOUBLE_EQ(auto_xi(2, 1.0, 0.5, Route::F), 2.0 * find_xi0(2, 1.0, 0.5));
  EXPECT_DOUBLE_EQ(auto_xi(2, 2.0, 0.5, Route::F, Method::direct), 0.005);
}

TEST(Contour, WavenumbersAndValidation) {
  const auto c = make_contour(2, 1.0, 3, 0.25);
  EXPECT_EQ(c.modes(), 7u);
  EXPECT_NEAR(std::abs(c.k(1) - cplx(2.0 * kPi / 3.0, 0.25)), 0.0, 1e-15);
  EXPECT_EQ(c.k_values().front(), c.k(-3));
  const auto e = make_contour(3, 1.0, 3, 0.25, Route::E);
  EXPECT_NEAR(e.k(1).real(), kPi, 1e-15);
  EXPECT_THROW(make_contour(2, 1.0, 3, 0.0), ContractError);
  EXPECT_THROW(make_contour(1, 1.0, 3, 0.1), ContractError);
}

TEST(BuildSystem, FreeKernelIsFourier) {
  const NonlinearPotential p(1.0, {zero(), CoefficientFunction::constant(1.0, 1.0)});
  for (Route r : {Route::F, Route::E}) {
    const std::size_t n = r == Route::F ? 2 : 3;
    const NonlinearPotential pe(1.0, {zero(), zero(), CoefficientFunction::constant(1.0, 1.0)});
    const auto sys = build_system(cascade_data(r == Route::F ? p : pe, n), kGrid, make_contour(n, 1.0, 5, 0.3, r));
    for (long m = -5; m <= 5; ++m) {
      for (std::size_t i = 0; i < kGrid.size(); i += 97) {
        EXPECT_NEAR(std::abs(sys.kernel(m, i) - std::polar(1.0, -2.0 * kPi * m * kGrid.node(i))), 0.0, 1e-12);
      }
    }
    EXPECT_EQ(sys.diagnostics.s, 0.0);
    EXPECT_NEAR(difference_operator_norm(sys), 0.0, 1e-10);
  }
}

TEST(BuildSystem, SingleModeAndLimits) {
  const NonlinearPotential p(1.0, {zero(), CoefficientFunction::constant(1.0, 1.0)});
  const auto sys = build_system(cascade_data(p, 2), kGrid, make_contour(2, 1.0, 0, 0.3));
  EXPECT_EQ(sys.K.rows(), 1);
  EXPECT_THROW(build_system(cascade_data(p, 2), kGrid, make_contour(2, 1.0, 250, 0.3)), ContractError);
  EXPECT_THROW(build_system(cascade_data(p, 2), kGrid, make_contour(3, 1.0, 4, 0.3)), ContractError);
}

TEST(Norms, ReferenceAndSynthesis) {
  for (double b : {1.0, 2.5}) {
    const SpatialGrid g(b, 400);
    EXPECT_NEAR(reference_operator_norm(g, 20), std::sqrt(b), 1e-10);
    EXPECT_NEAR(synthesis_operator_norm(g, 20), 1.0 / std::sqrt(b), 1e-10);
  }
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(kGrid.size()));
  EXPECT_NEAR(weighted_norm(kGrid, ones), 1.0, 1e-14);
}

TEST(Norms, AnalysisThenSynthesisIsIdentityOnTrigPolynomials) {
  const auto phi = samples([](double t) { return std::exp(2.0 * kI * kPi * 3.0 * t) - 0.5 * std::cos(2.0 * kPi * t); });
  const auto back = fourier_synthesis(kGrid, 10, fourier_analysis(kGrid, 10, phi));
  EXPECT_LE((back - phi).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Norms, PerturbationBoundedByContractionFunction) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.05), CoefficientFunction::sinusoid(1.0, 0.3, kPi)});
  const auto d = cascade_data(p, 2);
  for (double xi : {0.5, 2.0}) {
    const auto sys = build_system(d, kGrid, make_contour(2, 1.0, 16, xi));
    EXPECT_LE(difference_operator_norm(sys), 1.05 * std::sqrt(sys.diagnostics.s)) << "xi=" << xi;
  }
}

TEST(Neumann, SingleTermWithoutLinearPotential) {
  const NonlinearPotential p(1.0, {zero(), bump()});
  const auto sys = build_system(cascade_data(p, 2), kGrid, make_contour(2, 1.0, 32, 0.05));
  EXPECT_EQ(invert_neumann(sys).terms, 1u);
}

TEST(Neumann, ZeroDataGivesZero) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.05), zero()});
  const auto sys = build_system(cascade_data(p, 2), kGrid, make_contour(2, 1.0, 16, auto_xi(2, 1.0, 0.05, Route::F)));
  const auto r = invert_neumann(sys);
  EXPECT_LE(r.phi.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Neumann, AgreesWithDirect) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.03), bump()});
  const double xi = auto_xi(2, 1.0, 0.03, Route::F);
  const auto sys = build_system(cascade_data(p, 2), kGrid, make_contour(2, 1.0, 32, xi));
  ASSERT_LT(sys.diagnostics.contraction, 1.0);
  const auto nr = invert_neumann(sys);
  EXPECT_GT(nr.terms, 1u);
  const auto direct = invert_direct(sys);
  EXPECT_LE(weighted_norm(kGrid, nr.phi - direct) / weighted_norm(kGrid, direct), 1e-8);
}

TEST(Neumann, RefusesWithoutContraction) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.5), bump()});
  const auto sys = build_system(cascade_data(p, 2), kGrid, make_contour(2, 1.0, 8, 0.01));
  ASSERT_GE(sys.diagnostics.contraction, 1.0);
  EXPECT_THROW(invert_neumann(sys), NumericalError);
}

TEST(Direct, ManufacturedTrialSpaceSolution) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.05), zero()});
  auto sys = build_system(cascade_data(p, 2), kGrid, make_contour(2, 1.0, 16, 0.5));
  const auto phi = samples([](double t) { return cplx(std::sin(2.0 * kPi * t)); });
  sys.p = sys.K * phi;
  const auto got = invert_direct(sys);
  EXPECT_LE(weighted_norm(kGrid, got - phi) / weighted_norm(kGrid, phi), 1e-6);
}

TEST(Direct, OffTrialSpaceKeepsSmallResidual) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.05), zero()});
  auto sys = build_system(cascade_data(p, 2), kGrid, make_contour(2, 1.0, 16, 0.5));
  const auto phi = samples([](double t) { return cplx(std::sin(kPi * t)); });
  sys.p = sys.K * phi;
  const auto got = invert_direct(sys);
  EXPECT_LE((sys.K * got - sys.p).norm() / sys.p.norm(), 1e-6);
  EXPECT_LE(weighted_norm(kGrid, got - phi) / weighted_norm(kGrid, phi), 0.1);
}

TEST(RecoverQ, SmoothLinearCoefficient) {
  const NonlinearPotential p(1.0, {zero(), bump()});
  for (Method m : {Method::direct, Method::neumann, Method::fourier_special}) {
    RecoverConfig cfg;
    cfg.method = m;
    cfg.M = 32;
    const auto r = recover_q(cascade_data(p, 2), kGrid, cfg);
    EXPECT_LE(relative_l2_error(r.q, bump(), kGrid), 1e-6) << to_string(m);
    EXPECT_LE(r.relative_residual, 1e-6);
    EXPECT_DOUBLE_EQ(r.xi_used, 0.01);
    EXPECT_TRUE(r.warnings.empty());
  }
}

TEST(RecoverQ, WithLinearPotentialBothRoutes) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.2), zero(), bump()});
  for (Route route : {Route::F, Route::E}) {
    RecoverConfig cfg;
    cfg.route = route;
    cfg.M = 32;
    const auto r = recover_q(cascade_data(p, 3), kGrid, cfg);
    EXPECT_LE(relative_l2_error(r.q, bump(), kGrid), 1e-4) << to_string(route);
    EXPECT_LE(r.relative_residual, 1e-6);
    EXPECT_GT(r.xi0, 0.0);
    EXPECT_DOUBLE_EQ(r.xi_used, 0.01);
  }
}

TEST(RecoverQ, ZeroDataRecoversZero) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.1), zero()});
  const auto r = recover_q(cascade_data(p, 2), kGrid, RecoverConfig{.M = 16});
  for (double v : r.q) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(RecoverQ, ConstantAndExponentialQuadraticCoefficients) {
  RecoverConfig cfg;
  cfg.M = 128;
  const auto rg = recover_q(closed_form_data([](cplx k) { return closed_form::constant_gamma(2.0, 1.0, k); }), kGrid, cfg);
  EXPECT_LE(relative_l2_error(rg.q, CoefficientFunction::constant(1.0, 2.0), kGrid), 3e-2);
  const auto ra = recover_q(closed_form_data([](cplx k) { return closed_form::exponential_alpha(0.5, 1.0, k); }), kGrid, cfg);
  EXPECT_LE(relative_l2_error(ra.q, CoefficientFunction::exponential(1.0, 0.5), kGrid), 3e-2);
}

TEST(RecoverQ, FourierSpecialNeedsFreeLinearPart) {
  const NonlinearPotential p(1.0, {CoefficientFunction::constant(1.0, 0.1), bump()});
  RecoverConfig cfg;
  cfg.method = Method::fourier_special;
  EXPECT_THROW(recover_q(cascade_data(p, 2), kGrid, cfg), ContractError);
}

TEST(RecoverAll, RecursesThroughOrders) {
  const auto q2 = CoefficientFunction::tabulated(SpatialGrid(1.0, 4000), [] {
    std::vector<double> v(4001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * std::pow(std::sin(kPi * static_cast<double>(i) / 4000.0), 4);
    return v;
  }());
  const NonlinearPotential p(1.0, {zero(), bump(), q2});
  RecoverConfig cfg;
  cfg.M = 32;
  const auto rs = recover_all(zero(), 4, [&](std::size_t n) { return cascade_provider(p, n, kGrid); }, kGrid, cfg);
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_LE(relative_l2_error(rs[0].q, bump(), kGrid), 1e-6);
  EXPECT_LE(relative_l2_error(rs[1].q, q2, kGrid), 1e-5);
  double peak = 0.0;
  for (double v : rs[2].q) peak = std::max(peak, std::abs(v));
  EXPECT_LE(peak, 1e-5);
}

TEST(RecoverAll, TagsFailingOrder) {
  RecoverConfig cfg;
  cfg.M = 400;
  try {
    recover_all(zero(), 3, [](std::size_t) { return SeriesProvider([](cplx) { return ABPair{}; }); }, kGrid, cfg);
    FAIL() << "expected contract error";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("order n=2"), std::string::npos) << e.what();
  }
}
