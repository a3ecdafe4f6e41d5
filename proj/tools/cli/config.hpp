#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnls/inversion.hpp"
#include "gnls/potential.hpp"

namespace gnls::cli {

/// Config problems. The message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where invert gets its order-n data from.
struct DataSpec {
  enum class Source { cascade, closed_form, series };
  Source source = Source::cascade;
  std::string name;  // constant_gamma | exponential_alpha
  double parameter = 1.0;
  std::filesystem::path file;
};

struct ExperimentConfig {
  nlohmann::json raw;

  double b = 1.0;
  std::size_t degree = 0;
  double r = 1.0;
  std::vector<CoefficientFunction> coefficients;

  std::size_t Nx = 0;
  std::vector<double> k_grid;
  /// empty selects default_eps_list(delta)
  std::vector<cplx> eps_list;
  std::size_t extract_order = 5;

  std::size_t N_target = 3;
  RecoverConfig recover;
  CoefficientFunction known_q0 = CoefficientFunction::zero(1.0);
  DataSpec data;
  double tolerance = 1e-2;

  std::filesystem::path out_dir = "out";

  NonlinearPotential potential() const { return NonlinearPotential(b, coefficients); }
  SpatialGrid grid() const;
};

/// Parses and validates. Missing blocks fall back to defaults.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

CoefficientFunction parse_coefficient(const nlohmann::json& j, double b, const std::string& path);

/// FNV-1a over the canonical (sorted-key) JSON dump.
std::uint64_t config_hash(const nlohmann::json& j);

}  // namespace gnls::cli
