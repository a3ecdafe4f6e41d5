#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gnls/forward.hpp"
#include "gnls/hierarchy.hpp"
#include "gnls/numerics.hpp"
#include "gnls/potential.hpp"

namespace gnls {

/// A_n(k), B_n(k) of the target order, evaluable at complex k.
using SeriesProvider = std::function<ABPair(cplx k)>;

/// Everything needed to recover q_{n-1}.
struct DataSetDn {
  std::size_t n = 2;
  double b = 1.0;
  /// q_0 .. q_{n-2}
  std::vector<CoefficientFunction> known_coeffs;
  SeriesProvider series;

  void validate() const;
};

/// Order-n coefficients of a known potential, computed by the cascade on demand.
SeriesProvider cascade_provider(NonlinearPotential potential, std::size_t n, SpatialGrid grid);

/// Linear Jost data and h_n at one wavenumber.
struct DataTerms {
  JostSolutions jost;
  GridFunction h;
};

DataTerms data_terms(const DataSetDn& d, cplx k, const SpatialGrid& grid);

/// h_n from q_0 .. q_{n-2}; q_{n-1} does not enter.
GridFunction compute_hn_for_data(const DataSetDn& d, cplx k, const SpatialGrid& grid);

/// E_n = -2ik B_n - int v1 h_n
cplx compute_En(const DataSetDn& d, cplx k, const SpatialGrid& grid);
/// F_n = 2ik (B1 A_n - A1 B_n) - int u1 h_n
cplx compute_Fn(const DataSetDn& d, cplx k, const SpatialGrid& grid);

/// F: kernel u1^{n+1}, data F_n.  E: kernel v1 u1^n, data E_n.
enum class Route { F, E };

/// Exponent carried by the contour: n + 1 for the F route, n - 1 for the E route.
std::size_t route_power(Route route, std::size_t n);

/// Contraction function of the F route. Throws ContractError for xi <= 0.
double s_of_xi(double xi, std::size_t n, double b, double q0_l1);
/// Route-aware version; the E-route variant is the analogous Hilbert-Schmidt estimate.
double s_of_xi(double xi, std::size_t n, double b, double q0_l1, Route route);

/// Unique root of s(xi0) = b; 0 when q0_l1 = 0.
double find_xi0(std::size_t n, double b, double q0_l1, Route route = Route::F);

struct ContourGrid {
  double xi = 0.0;
  std::size_t n = 2;
  double b = 1.0;
  std::size_t M = 64;
  Route route = Route::F;

  std::size_t power() const { return route_power(route, n); }
  std::size_t modes() const { return 2 * M + 1; }
  /// k_m = 2 pi m / (power b) + i xi, for m = -M .. M.
  cplx k(long m) const;
  std::vector<cplx> k_values() const;
};

ContourGrid make_contour(std::size_t n, double b, std::size_t M, double xi, Route route = Route::F);

struct SystemDiagnostics {
  double s = 0.0;
  /// sqrt(s / b)
  double contraction = 0.0;
  /// max |U(t; k_m)| over the contour
  double M_U = 0.0;
  double min_abs_B1 = 0.0;
};

struct InversionSystem {
  ContourGrid contour;
  SpatialGrid grid;
  /// Kernel samples times Simpson weights, one row per mode m = -M .. M.
  Eigen::MatrixXcd K;
  Eigen::VectorXcd p;
  std::vector<double> weights;
  SystemDiagnostics diagnostics;

  /// Raw kernel value K(m, t_i).
  cplx kernel(long m, std::size_t i) const;
};

struct BuildOptions {
  std::size_t threads = 1;
};

/// Requires 4M < N_x so the discrete Fourier system stays exact. Throws NumericalError when
/// |B1(k_m)| < 1e-10 for some m.
InversionSystem build_system(const DataSetDn& d, const SpatialGrid& grid, const ContourGrid& contour,
                             BuildOptions options = {});

/// sum_i w_i e^{-2 pi i m t_i / b} phi_i for m = -M .. M
Eigen::VectorXcd fourier_analysis(const SpatialGrid& grid, std::size_t M, const Eigen::VectorXcd& phi);
/// (1/b) sum_m h(m) e^{2 pi i m t / b} at every node
Eigen::VectorXcd fourier_synthesis(const SpatialGrid& grid, std::size_t M, const Eigen::VectorXcd& h);

/// Spectral norms in the Simpson-weighted L2 on [0, b].
double reference_operator_norm(const SpatialGrid& grid, std::size_t M);
double synthesis_operator_norm(const SpatialGrid& grid, std::size_t M);
double difference_operator_norm(const InversionSystem& sys);

/// Simpson-weighted L2 norm on the grid.
double weighted_norm(const SpatialGrid& grid, const Eigen::VectorXcd& f);

struct NeumannOptions {
  std::size_t max_terms = 200;
  double tol = 1e-13;
  /// Attempt the series even when the contraction estimate is >= 1.
  bool force = false;
};

struct NeumannResult {
  Eigen::VectorXcd phi;
  std::size_t terms = 0;
  /// ||term_{j+1}|| / ||term_j||
  std::vector<double> term_ratios;
};

NeumannResult invert_neumann(const InversionSystem& sys, NeumannOptions options = {});

struct DirectOptions {
  /// lambda = lambda_scale * ||K S||^2
  double lambda_scale = 1e-10;
};

/// Tikhonov least squares over the truncated Fourier trial space phi = sum_m c_m e^{2 pi i m t / b}.
Eigen::VectorXcd invert_direct(const InversionSystem& sys, DirectOptions options = {});

enum class Method { neumann, direct, fourier_special };

std::string to_string(Method method);
std::string to_string(Route route);

struct RecoverConfig {
  /// nullopt selects auto_xi for the method.
  std::optional<double> xi;
  std::size_t M = 64;
  Method method = Method::direct;
  Route route = Route::F;
  std::size_t threads = 1;
  NeumannOptions neumann;
  DirectOptions direct;
};

/// Neumann: max(2 xi0, 0.01 / b), inside the guaranteed contraction region.
/// Direct and fourier_special: 0.01 / b, since phi = e^{xi (n+1) t} q grows with xi.
double auto_xi(std::size_t n, double b, double q0_l1, Route route, Method method = Method::neumann);

struct ReconstructionResult {
  std::size_t n = 0;
  SpatialGrid grid;
  std::vector<double> q;
  /// |Im| of the raw recovery at each node
  std::vector<double> imag_local;
  double imag_residual = 0.0;
  double linear_residual = 0.0;
  double relative_residual = 0.0;
  double xi_used = 0.0;
  double xi0 = 0.0;
  std::size_t M_used = 0;
  Method method = Method::direct;
  Route route = Route::F;
  double s = 0.0;
  std::size_t neumann_terms = 0;
  std::vector<std::string> warnings;

  explicit ReconstructionResult(const SpatialGrid& g) : grid(g) {}
  CoefficientFunction as_coefficient() const;
};

ReconstructionResult recover_q(const DataSetDn& d, const SpatialGrid& grid, const RecoverConfig& config);

/// Order-n data source for the recursion.
using ProviderFactory = std::function<SeriesProvider(std::size_t n)>;

/// Recovers q_1 .. q_{N_target - 1} in turn, feeding each result into the next h_n.
std::vector<ReconstructionResult> recover_all(const CoefficientFunction& q0, std::size_t N_target,
                                              const ProviderFactory& provider, const SpatialGrid& grid,
                                              const RecoverConfig& config);

/// Relative L2 error of samples against a reference coefficient on the grid.
double relative_l2_error(const std::vector<double>& samples, const CoefficientFunction& truth, const SpatialGrid& grid);

}  // namespace gnls
