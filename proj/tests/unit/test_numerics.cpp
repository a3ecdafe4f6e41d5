#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "gnls/errors.hpp"
#include "gnls/numerics.hpp"

using namespace gnls;

namespace {

double plane_wave_error(double k, std::size_t intervals) {
  const SpatialGrid grid(1.0, intervals);
  auto rhs = [k](double, cplx u, cplx) { return -k * k * u; };
  const auto t = integrate_ivp(rhs, 1.0, -kI * k, grid);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) err = std::max(err, std::abs(t.value[i] - std::exp(-kI * k * grid.node(i))));
  return err;
}

double simpson_error(std::size_t intervals) {
  const SpatialGrid grid(1.0, intervals);
  std::vector<cplx> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-2.0 * kI * grid.node(i));
  return std::abs(quad(f, grid) - (1.0 - std::exp(-2.0 * kI)) / (2.0 * kI));
}

}  // namespace

TEST(SpatialGrid, RejectsOddOrTinyIntervalCounts) {
  EXPECT_THROW(SpatialGrid(1.0, 3), ContractError);
  EXPECT_THROW(SpatialGrid(1.0, 0), ContractError);
  EXPECT_THROW(SpatialGrid(-1.0, 4), ContractError);
}

TEST(SpatialGrid, NodesAndWeights) {
  const SpatialGrid grid(2.0, 10);
  const auto x = grid.nodes();
  EXPECT_EQ(x.front(), 0.0);
  EXPECT_EQ(x.back(), 2.0);
  for (std::size_t i = 1; i < x.size(); ++i) EXPECT_GT(x[i], x[i - 1]);
  double sum = 0.0;
  for (double w : grid.simpson_weights()) sum += w;
  EXPECT_NEAR(sum, 2.0, 1e-14);
  EXPECT_EQ(SpatialGrid::with_default_density(1.0).intervals(), 2000u);
}

TEST(IntegrateIvp, FreePlaneWave) { EXPECT_LE(plane_wave_error(1.0, 2000), 1e-9); }

TEST(IntegrateIvp, ZeroRhsKeepsConstant) {
  const SpatialGrid grid(1.0, 100);
  const cplx c(0.3, -1.2);
  const auto t = integrate_ivp([](double, cplx, cplx) { return cplx{}; }, c, 0.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(t.value[i], c);
    EXPECT_EQ(t.slope[i], cplx{});
  }
}

TEST(IntegrateIvp, ConstantCoefficientMatchesMatrixExponential) {
  const double k = 2.0;
  const SpatialGrid grid(1.0, 2000);
  auto rhs = [k](double, cplx u, cplx) { return (1.0 - k * k) * u; };
  const auto t = integrate_ivp(rhs, 1.0, -2.0 * kI, grid);

  Eigen::Matrix2cd A;
  A << 0.0, 1.0, 1.0 - k * k, 0.0;
  Eigen::Vector2cd y0(1.0, -2.0 * kI);
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); i += 50) {
    const Eigen::Matrix2cd E = (A * grid.node(i)).exp();
    const Eigen::Vector2cd y = E * y0;
    err = std::max({err, std::abs(t.value[i] - y(0)), std::abs(t.slope[i] - y(1))});
  }
  EXPECT_LE(err, 1e-8);
}

TEST(IntegrateIvp, Rk4OrderUnderHalving) {
  const double ratio = plane_wave_error(5.0, 50) / plane_wave_error(5.0, 100);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(IntegrateIvp, BackwardReproducesForward) {
  const SpatialGrid grid(1.5, 600);
  auto rhs = [](double, cplx u, cplx du) { return (0.7 - 4.0) * u + 0.1 * du; };
  const auto fwd = integrate_ivp(rhs, cplx(1.0, 0.5), cplx(-0.3, 2.0), grid);
  const std::size_t last = grid.intervals();
  IntegrationOptions back;
  back.direction = Direction::backward;
  const auto bwd = integrate_ivp(rhs, fwd.value[last], fwd.slope[last], grid, back);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(std::abs(fwd.value[i] - bwd.value[i]), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(fwd.slope[i] - bwd.slope[i]), 0.0, 1e-10);
  }
}

TEST(IntegrateIvp, SubstepsImproveHighFrequencyAccuracy) {
  const double k = 60.0;
  const SpatialGrid grid(1.0, 200);
  auto rhs = [k](double, cplx u, cplx) { return -k * k * u; };
  IntegrationOptions opts;
  opts.substeps = substeps_for_frequency(k, grid.step());
  EXPECT_GT(opts.substeps, 1u);
  const double coarse = std::abs(integrate_ivp(rhs, 1.0, -kI * k, grid).value.back() - std::exp(-kI * k));
  const double fine = std::abs(integrate_ivp(rhs, 1.0, -kI * k, grid, opts).value.back() - std::exp(-kI * k));
  EXPECT_LE(fine, 1e-5);
  EXPECT_LT(fine, 1e-3 * coarse);
}

TEST(IntegrateIvp, BlowUpReportsNode) {
  const SpatialGrid grid(1.0, 200);
  auto rhs = [](double, cplx u, cplx) { return 1e6 * u * u * u; };
  try {
    integrate_ivp(rhs, 1.0, 0.0, grid);
    FAIL() << "expected blow-up";
  } catch (const TrajectoryBlowUp& e) {
    EXPECT_GT(e.node(), 0u);
    EXPECT_LE(e.node(), grid.intervals());
    EXPECT_NE(std::string(e.what()).find("trajectory blow-up"), std::string::npos);
  }
}

TEST(IntegrateSystem, CoupledMatchesScalar) {
  const SpatialGrid grid(1.0, 400);
  auto sys = [](double, std::span<const cplx> u, std::span<const cplx>, std::span<cplx> ddu) {
    ddu[0] = -4.0 * u[0];
    ddu[1] = -4.0 * u[1] + u[0];
  };
  const cplx u0[] = {1.0, 0.0};
  const cplx du0[] = {0.0, 0.0};
  const auto out = integrate_system(sys, u0, du0, grid);
  // u1 = cos 2x, u2'' + 4 u2 = cos 2x, u2(0)=u2'(0)=0  =>  u2 = x sin(2x) / 4
  for (std::size_t i = 0; i < grid.size(); i += 40) {
    const double x = grid.node(i);
    EXPECT_NEAR(std::abs(out[0].value[i] - std::cos(2 * x)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(out[1].value[i] - x * std::sin(2 * x) / 4), 0.0, 1e-9);
  }
}

TEST(Quad, AnalyticExponential) { EXPECT_LE(simpson_error(2000), 1e-9); }

TEST(Quad, ZeroSamples) {
  const SpatialGrid grid(1.0, 10);
  const std::vector<cplx> f(grid.size());
  EXPECT_EQ(quad(f, grid), cplx{});
}

TEST(Quad, ExponentialTimesOscillation) {
  const SpatialGrid grid(1.0, 2000);
  const double k = 1.3;
  std::vector<cplx> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double t = grid.node(i);
    f[i] = std::exp(0.5 * t) * std::exp(-4.0 * kI * k * t);
  }
  const cplx z(0.5, -5.2);
  EXPECT_LE(std::abs(quad(f, grid) - (std::exp(z) - 1.0) / z), 1e-8);
}

TEST(Quad, SimpsonOrderUnderHalving) {
  const double ratio = simpson_error(16) / simpson_error(32);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Quad, LengthMismatchIsContractError) {
  const SpatialGrid grid(1.0, 10);
  const std::vector<cplx> f(5);
  EXPECT_THROW(quad(f, grid), ContractError);
  EXPECT_THROW(quad_range(std::vector<cplx>(11), grid, 0, 3), ContractError);
}

TEST(CumulativeIntegral, RunningIntegralOfCosine) {
  const SpatialGrid grid(2.0, 400);
  std::vector<cplx> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(3.0 * grid.node(i));
  const auto F = cumulative_integral(f, grid);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(F[i].real(), std::sin(3.0 * grid.node(i)) / 3.0, 1e-9);
  const SpatialGrid two(1.0, 2);
  const std::vector<cplx> lin{0.0, 0.5, 1.0};
  EXPECT_NEAR(cumulative_integral(lin, two).back().real(), 0.5, 1e-15);
}

TEST(ComplexTrajectory, HermiteInterpolation) {
  const SpatialGrid grid(1.0, 100);
  ComplexTrajectory t(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.value[i] = std::exp(kI * grid.node(i));
    t.slope[i] = kI * t.value[i];
  }
  for (double x : {0.0, 0.123, 0.5, 0.9871, 1.0}) {
    EXPECT_NEAR(std::abs(t.value_at(x) - std::exp(kI * x)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(t.slope_at(x) - kI * std::exp(kI * x)), 0.0, 1e-6);
  }
  EXPECT_THROW(t.value_at(1.5), ContractError);
}

TEST(SolveDense, Identity) {
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(4, 4);
  Eigen::VectorXcd v(4);
  v << cplx(1, 2), cplx(-3, 0), cplx(0, 0.5), cplx(7, -1);
  const auto s = solve_dense(I, v);
  EXPECT_EQ(s.x, v);
  EXPECT_EQ(s.residual_norm, 0.0);
}

TEST(SolveDense, Diagonal) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2);
  A(0, 0) = 2.0 * kI;
  A(1, 1) = -1.0;
  Eigen::VectorXcd b(2);
  b << 2.0 * kI, 3.0;
  const auto s = solve_dense(A, b);
  EXPECT_NEAR(std::abs(s.x(0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.x(1) + 3.0), 0.0, 1e-15);
}

TEST(SolveDense, RandomWellConditioned) {
  std::mt19937 rng(20240611);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXcd A(20, 20);
    Eigen::VectorXcd b(20);
    for (int i = 0; i < 20; ++i) {
      b(i) = cplx(nd(rng), nd(rng));
      for (int j = 0; j < 20; ++j) A(i, j) = cplx(nd(rng), nd(rng));
      A(i, i) += 10.0;
    }
    EXPECT_LE(solve_dense(A, b).residual_norm, 1e-10);
  }
}

TEST(SolveDense, SingularAndShapeErrors) {
  Eigen::MatrixXcd A(2, 2);
  A << 1.0, 2.0, 2.0, 4.0;
  EXPECT_THROW(solve_dense(A, Eigen::VectorXcd::Ones(2)), NumericalError);
  EXPECT_THROW(solve_dense(Eigen::MatrixXcd(2, 3), Eigen::VectorXcd::Ones(2)), ContractError);
  EXPECT_THROW(solve_dense(Eigen::MatrixXcd::Identity(2, 2), Eigen::VectorXcd::Ones(3)), ContractError);
}
