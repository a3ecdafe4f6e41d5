#include "gnls/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gnls/errors.hpp"
#include "gnls/parallel.hpp"

namespace gnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Index row_of(long m, std::size_t M) { return static_cast<Eigen::Index>(m + static_cast<long>(M)); }

// P(m, i) = e^{-2 pi i m t_i / b}, rows m = -M .. M
Eigen::MatrixXcd fourier_matrix(const SpatialGrid& grid, std::size_t M) {
  const auto rows = static_cast<Eigen::Index>(2 * M + 1);
  const auto cols = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd P(rows, cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    const double theta = kTwoPi * grid.node(static_cast<std::size_t>(i)) / grid.width();
    for (long m = -static_cast<long>(M); m <= static_cast<long>(M); ++m) {
      P(row_of(m, M), i) = std::polar(1.0, -theta * static_cast<double>(m));
    }
  }
  return P;
}

Eigen::VectorXd weight_vector(const SpatialGrid& grid) {
  const auto w = grid.simpson_weights();
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

double largest_eigenvalue(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

double coth(double x) { return 1.0 / std::tanh(x); }

std::string order_tag(std::size_t n) { return "order n=" + std::to_string(n) + ": "; }

}  // namespace

void DataSetDn::validate() const {
  if (n < 2) throw ContractError("data set order n must be >= 2");
  if (!(b > 0.0)) throw ContractError("data set support width must be positive");
  if (known_coeffs.size() != n - 1) {
    throw ContractError("data set for n=" + std::to_string(n) + " needs q_0 .. q_" + std::to_string(n - 2) + " (" +
                        std::to_string(n - 1) + " coefficients), got " + std::to_string(known_coeffs.size()));
  }
  if (!series) throw ContractError("data set has no A_n/B_n source");
}

SeriesProvider cascade_provider(NonlinearPotential potential, std::size_t n, SpatialGrid grid) {
  return [potential = std::move(potential), n, grid](cplx k) {
    return solve_cascade(potential, k, n, grid).AB[n - 1];
  };
}

DataTerms data_terms(const DataSetDn& d, cplx k, const SpatialGrid& grid) {
  d.validate();
  const CoefficientFunction& q0 = d.known_coeffs.front();
  DataTerms out{linear_scattering(q0, k, grid), GridFunction(grid)};
  if (d.n >= 3) {
    const NonlinearPotential known(d.b, d.known_coeffs);
    const auto state = solve_cascade(known, k, d.n - 1, grid);
    out.h = forcing(known, state, d.n).second;
  }
  return out;
}

GridFunction compute_hn_for_data(const DataSetDn& d, cplx k, const SpatialGrid& grid) {
  d.validate();
  if (d.n == 2) return GridFunction(grid);
  const NonlinearPotential known(d.b, d.known_coeffs);
  const auto state = solve_cascade(known, k, d.n - 1, grid);
  return forcing(known, state, d.n).second;
}

namespace {

cplx integral_against(const ComplexTrajectory& f, const GridFunction& h) {
  std::vector<cplx> prod(h.values.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = f.value[i] * h.values[i];
  return quad(prod, h.grid);
}

cplx En_from(const DataTerms& t, const ABPair& ab) {
  return -2.0 * kI * t.jost.k * ab.B - integral_against(t.jost.v1, t.h);
}

cplx Fn_from(const DataTerms& t, const ABPair& ab) {
  const auto& j = t.jost;
  return 2.0 * kI * j.k * (j.B1 * ab.A - j.A1 * ab.B) - integral_against(j.u1, t.h);
}

}  // namespace

cplx compute_En(const DataSetDn& d, cplx k, const SpatialGrid& grid) {
  return En_from(data_terms(d, k, grid), d.series(k));
}

cplx compute_Fn(const DataSetDn& d, cplx k, const SpatialGrid& grid) {
  return Fn_from(data_terms(d, k, grid), d.series(k));
}

std::size_t route_power(Route route, std::size_t n) {
  if (n < 2) throw ContractError("inversion order n must be >= 2");
  return route == Route::F ? n + 1 : n - 1;
}

double s_of_xi(double xi, std::size_t n, double b, double q0_l1) { return s_of_xi(xi, n, b, q0_l1, Route::F); }

double s_of_xi(double xi, std::size_t n, double b, double q0_l1, Route route) {
  if (!(xi > 0.0)) throw ContractError("s(xi) requires xi > 0");
  if (!(b > 0.0) || q0_l1 < 0.0) throw ContractError("s(xi) requires b > 0 and a non-negative L1 norm");
  if (q0_l1 == 0.0) return 0.0;
  const double np1 = static_cast<double>(n + 1);
  const double pw = static_cast<double>(route_power(route, n));
  return b * b * np1 * np1 * pw / (2.0 * xi) * q0_l1 * q0_l1 * coth(pw * b * xi / 2.0) *
         std::exp(2.0 * b * np1 * q0_l1);
}

double find_xi0(std::size_t n, double b, double q0_l1, Route route) {
  if (q0_l1 < 0.0) throw ContractError("L1 norm of q0 must be non-negative");
  if (q0_l1 == 0.0) return 0.0;
  auto s = [&](double xi) { return s_of_xi(xi, n, b, q0_l1, route); };
  double lo = 1.0, hi = 1.0;
  while (s(hi) > b) hi *= 2.0;
  while (s(lo) < b) lo *= 0.5;
  double mid = std::sqrt(lo * hi);
  for (int it = 0; it < 400; ++it) {
    mid = std::sqrt(lo * hi);
    const double v = s(mid);
    if (std::abs(v - b) <= 1e-12 * b) break;
    (v > b ? lo : hi) = mid;
    if (hi / lo - 1.0 < 1e-15) break;
  }
  return mid;
}

cplx ContourGrid::k(long m) const {
  return {kTwoPi * static_cast<double>(m) / (static_cast<double>(power()) * b), xi};
}

std::vector<cplx> ContourGrid::k_values() const {
  std::vector<cplx> out;
  out.reserve(modes());
  for (long m = -static_cast<long>(M); m <= static_cast<long>(M); ++m) out.push_back(k(m));
  return out;
}

ContourGrid make_contour(std::size_t n, double b, std::size_t M, double xi, Route route) {
  if (!(xi > 0.0)) throw ContractError("contour offset xi must be > 0");
  if (!(b > 0.0)) throw ContractError("contour width b must be positive");
  route_power(route, n);
  return {xi, n, b, M, route};
}

cplx InversionSystem::kernel(long m, std::size_t i) const {
  return K(row_of(m, contour.M), static_cast<Eigen::Index>(i)) / weights[i];
}

InversionSystem build_system(const DataSetDn& d, const SpatialGrid& grid, const ContourGrid& contour,
                             BuildOptions options) {
  d.validate();
  if (contour.n != d.n) throw ContractError("contour order does not match data set order");
  if (std::abs(contour.b - d.b) > 1e-12 * d.b || std::abs(grid.width() - d.b) > 1e-12 * d.b) {
    throw ContractError("contour, grid and data set must share the support width");
  }
  if (4 * contour.M >= grid.intervals()) {
    throw ContractError("mode truncation M=" + std::to_string(contour.M) + " needs 4M < N_x (N_x=" +
                        std::to_string(grid.intervals()) + ")");
  }

  const std::size_t rows = contour.modes();
  const std::size_t cols = grid.size();
  const std::size_t pw = contour.power();
  const double xi = contour.xi;
  InversionSystem sys{contour, grid, Eigen::MatrixXcd(rows, cols), Eigen::VectorXcd(rows), grid.simpson_weights(), {}};

  std::vector<double> damp(cols);
  for (std::size_t i = 0; i < cols; ++i) damp[i] = std::exp(-xi * static_cast<double>(pw) * grid.node(i));

  std::vector<double> mu(rows, 0.0), b1(rows, 0.0);
  parallel_for(rows, options.threads, [&](std::size_t r) {
    const long m = static_cast<long>(r) - static_cast<long>(contour.M);
    const cplx k = contour.k(m);
    const DataTerms terms = data_terms(d, k, grid);
    b1[r] = std::abs(terms.jost.B1);
    if (b1[r] < 1e-10) {
      std::ostringstream os;
      os << "contour passes near a zero of B1 at k_m = " << k.real() << (k.imag() < 0 ? "" : "+") << k.imag()
         << "i; raise xi";
      throw NumericalError(os.str());
    }
    const ABPair ab = d.series(k);
    const auto er = static_cast<Eigen::Index>(r);
    sys.p(er) = contour.route == Route::F ? Fn_from(terms, ab) : En_from(terms, ab);
    double worst = 0.0;
    for (std::size_t i = 0; i < cols; ++i) {
      const double t = grid.node(i);
      const cplx u = terms.jost.u1.value[i];
      const cplx prod = contour.route == Route::F ? std::pow(u, static_cast<int>(d.n + 1))
                                                  : terms.jost.v1.value[i] * std::pow(u, static_cast<int>(d.n));
      sys.K(er, static_cast<Eigen::Index>(i)) = damp[i] * prod * sys.weights[i];
      const cplx U = k * (std::exp(kI * k * static_cast<double>(pw) * t) * prod - 1.0);
      worst = std::max(worst, std::abs(U));
    }
    mu[r] = worst;
  });

  const double l1 = d.known_coeffs.front().l1_norm();
  auto& diag = sys.diagnostics;
  diag.s = s_of_xi(xi, d.n, d.b, l1, contour.route);
  diag.contraction = std::sqrt(diag.s / d.b);
  diag.M_U = *std::max_element(mu.begin(), mu.end());
  diag.min_abs_B1 = *std::min_element(b1.begin(), b1.end());
  return sys;
}

Eigen::VectorXcd fourier_analysis(const SpatialGrid& grid, std::size_t M, const Eigen::VectorXcd& phi) {
  if (static_cast<std::size_t>(phi.size()) != grid.size()) throw ContractError("analysis input length mismatch");
  const Eigen::VectorXcd wphi = weight_vector(grid).cast<cplx>().cwiseProduct(phi);
  return fourier_matrix(grid, M) * wphi;
}

Eigen::VectorXcd fourier_synthesis(const SpatialGrid& grid, std::size_t M, const Eigen::VectorXcd& h) {
  if (static_cast<std::size_t>(h.size()) != 2 * M + 1) throw ContractError("synthesis input needs 2M+1 modes");
  return fourier_matrix(grid, M).adjoint() * h / grid.width();
}

double reference_operator_norm(const SpatialGrid& grid, std::size_t M) {
  const Eigen::MatrixXcd P = fourier_matrix(grid, M);
  const Eigen::VectorXd w = weight_vector(grid);
  return std::sqrt(largest_eigenvalue(P * w.cast<cplx>().asDiagonal() * P.adjoint()));
}

double synthesis_operator_norm(const SpatialGrid& grid, std::size_t M) {
  return reference_operator_norm(grid, M) / grid.width();
}

double difference_operator_norm(const InversionSystem& sys) {
  const Eigen::MatrixXcd P = fourier_matrix(sys.grid, sys.contour.M);
  const Eigen::VectorXd w = weight_vector(sys.grid);
  const Eigen::VectorXcd sw = w.cwiseSqrt().cast<cplx>();
  const Eigen::VectorXcd isw = w.cwiseSqrt().cwiseInverse().cast<cplx>();
  const Eigen::MatrixXcd X = sys.K * isw.asDiagonal() - P * sw.asDiagonal();
  return std::sqrt(largest_eigenvalue(X * X.adjoint()));
}

double weighted_norm(const SpatialGrid& grid, const Eigen::VectorXcd& f) {
  if (static_cast<std::size_t>(f.size()) != grid.size()) throw ContractError("weighted norm length mismatch");
  return std::sqrt(weight_vector(grid).dot(f.cwiseAbs2()));
}

NeumannResult invert_neumann(const InversionSystem& sys, NeumannOptions options) {
  const double c = sys.diagnostics.contraction;
  if (c >= 1.0 && !options.force) {
    std::ostringstream os;
    os << "Neumann series not guaranteed (contraction estimate " << c << " >= 1); raise xi";
    throw NumericalError(os.str());
  }
  if (options.max_terms == 0) throw ContractError("Neumann series needs max_terms >= 1");
  const SpatialGrid& grid = sys.grid;
  const Eigen::MatrixXcd P = fourier_matrix(grid, sys.contour.M);
  const Eigen::VectorXcd w = weight_vector(grid).cast<cplx>();
  const double inv_b = 1.0 / grid.width();

  NeumannResult out;
  Eigen::VectorXcd term = P.adjoint() * sys.p * inv_b;
  out.phi = term;
  out.terms = 1;
  const double first = weighted_norm(grid, term);
  double prev = first;
  if (first == 0.0) return out;

  for (std::size_t j = 1; j < options.max_terms; ++j) {
    const Eigen::VectorXcd diff = sys.K * term - P * w.cwiseProduct(term);
    term = -(P.adjoint() * diff) * inv_b;
    const double norm = weighted_norm(grid, term);
    out.term_ratios.push_back(norm / prev);
    prev = norm;
    if (norm <= options.tol * weighted_norm(grid, out.phi)) return out;
    out.phi += term;
    out.terms = j + 1;
    const std::size_t r = out.term_ratios.size();
    const bool growing = r >= 5 && std::all_of(out.term_ratios.end() - 5, out.term_ratios.end(),
                                               [](double v) { return v > 1.0; });
    if (!std::isfinite(norm) || norm > 1e8 * first || growing) {
      std::ostringstream os;
      os << "Neumann series diverges (term " << j << " ratio " << out.term_ratios.back() << "); raise xi";
      throw NumericalError(os.str());
    }
  }
  std::ostringstream os;
  os << "Neumann series did not reach tolerance " << options.tol << " in " << options.max_terms << " terms";
  throw NumericalError(os.str());
}

Eigen::VectorXcd invert_direct(const InversionSystem& sys, DirectOptions options) {
  const SpatialGrid& grid = sys.grid;
  const Eigen::MatrixXcd S = fourier_matrix(grid, sys.contour.M).adjoint() / grid.width();
  const Eigen::MatrixXcd G = sys.K * S;
  const Eigen::MatrixXcd N = G.adjoint() * G;
  const double sigma2 = largest_eigenvalue(N);
  const double lambda = options.lambda_scale * sigma2;
  Eigen::MatrixXcd A = N;
  A.diagonal().array() += lambda;
  const Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() != Eigen::Success || !(sigma2 > 0.0)) {
    throw NumericalError("direct inversion: normal matrix is numerically singular");
  }
  const Eigen::VectorXcd c = llt.solve(G.adjoint() * sys.p);
  return S * c;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::neumann:
      return "neumann";
    case Method::direct:
      return "direct";
    case Method::fourier_special:
      return "fourier_special";
  }
  return "unknown";
}

std::string to_string(Route route) { return route == Route::F ? "F" : "E"; }

double auto_xi(std::size_t n, double b, double q0_l1, Route route, Method method) {
  if (method != Method::neumann) return 0.01 / b;
  return std::max(2.0 * find_xi0(n, b, q0_l1, route), 0.01 / b);
}

CoefficientFunction ReconstructionResult::as_coefficient() const { return CoefficientFunction::tabulated(grid, q); }

ReconstructionResult recover_q(const DataSetDn& d, const SpatialGrid& grid, const RecoverConfig& config) {
  d.validate();
  const CoefficientFunction& q0 = d.known_coeffs.front();
  const double l1 = q0.l1_norm();

  ReconstructionResult res(grid);
  res.n = d.n;
  res.method = config.method;
  res.route = config.route;
  res.M_used = config.M;
  res.xi0 = find_xi0(d.n, d.b, l1, config.route);
  res.xi_used = config.xi ? *config.xi : auto_xi(d.n, d.b, l1, config.route, config.method);
  if (config.method == Method::fourier_special && !q0.is_identically_zero()) {
    throw ContractError("fourier_special inversion requires q0 = 0 (K reduces to the Fourier operator)");
  }

  const ContourGrid contour = make_contour(d.n, d.b, config.M, res.xi_used, config.route);
  const InversionSystem sys = build_system(d, grid, contour, {config.threads});
  res.s = sys.diagnostics.s;

  Eigen::VectorXcd phi;
  switch (config.method) {
    case Method::neumann: {
      auto nr = invert_neumann(sys, config.neumann);
      res.neumann_terms = nr.terms;
      phi = std::move(nr.phi);
      break;
    }
    case Method::direct:
      phi = invert_direct(sys, config.direct);
      break;
    case Method::fourier_special:
      phi = fourier_synthesis(grid, config.M, sys.p);
      break;
  }

  const double pnorm = sys.p.norm();
  res.linear_residual = (sys.K * phi - sys.p).norm();
  res.relative_residual = pnorm > 0.0 ? res.linear_residual / pnorm : res.linear_residual;

  const double pw = static_cast<double>(contour.power());
  res.q.resize(grid.size());
  res.imag_local.resize(grid.size());
  double qmax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx raw = std::exp(-res.xi_used * pw * grid.node(i)) * phi(static_cast<Eigen::Index>(i));
    res.q[i] = raw.real();
    res.imag_local[i] = std::abs(raw.imag());
    res.imag_residual = std::max(res.imag_residual, res.imag_local[i]);
    qmax = std::max(qmax, std::abs(raw.real()));
  }
  if (res.imag_residual > 0.05 * qmax && res.imag_residual > 0.0) {
    res.warnings.push_back("reconstruction poorly resolved; increase M or k coverage (imaginary residual " +
                           std::to_string(res.imag_residual) + ")");
  }
  return res;
}

std::vector<ReconstructionResult> recover_all(const CoefficientFunction& q0, std::size_t N_target,
                                              const ProviderFactory& provider, const SpatialGrid& grid,
                                              const RecoverConfig& config) {
  if (N_target < 2) throw ContractError("recover_all needs N_target >= 2");
  std::vector<ReconstructionResult> out;
  std::vector<CoefficientFunction> known{q0};
  for (std::size_t n = 2; n <= N_target; ++n) {
    DataSetDn d{n, grid.width(), known, {}};
    try {
      d.series = provider(n);
      out.push_back(recover_q(d, grid, config));
    } catch (const NumericalError& e) {
      throw NumericalError(order_tag(n) + e.what());
    } catch (const ContractError& e) {
      throw ContractError(order_tag(n) + e.what());
    }
    known.push_back(out.back().as_coefficient());
  }
  return out;
}

double relative_l2_error(const std::vector<double>& samples, const CoefficientFunction& truth, const SpatialGrid& grid) {
  if (samples.size() != grid.size()) throw ContractError("sample count does not match grid");
  std::vector<double> diff(grid.size()), ref(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = truth(grid.node(i));
    diff[i] = (samples[i] - t) * (samples[i] - t);
    ref[i] = t * t;
  }
  const double num = std::sqrt(quad(diff, grid));
  const double den = std::sqrt(quad(ref, grid));
  return den > 0.0 ? num / den : num;
}

}  // namespace gnls
