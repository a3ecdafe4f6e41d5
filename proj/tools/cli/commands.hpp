#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "config.hpp"

namespace gnls::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

struct GlobalOptions {
  std::optional<std::filesystem::path> out;
  std::size_t threads = 1;
};

/// Resolves the output directory (flag over config) and creates it.
std::filesystem::path prepare_out_dir(const ExperimentConfig& config, const GlobalOptions& global);

int cmd_forward(const ExperimentConfig& config, const GlobalOptions& global);

struct ExtractOptions {
  std::optional<std::filesystem::path> sweep_file;
  std::optional<std::size_t> order;
};
int cmd_extract(const ExperimentConfig& config, const GlobalOptions& global, const ExtractOptions& options);

int cmd_invert(const ExperimentConfig& config, const GlobalOptions& global);
int cmd_roundtrip(const ExperimentConfig& config, const GlobalOptions& global);

struct ExampleOptions {
  std::string name;
  std::optional<double> parameter;
  double k_cutoff = 200.0;
  std::size_t M = 256;
};
int cmd_example(const ExperimentConfig& config, const GlobalOptions& global, const ExampleOptions& options);

/// tolerance_scale multiplies every tolerance; values below 1 tighten the checks.
int cmd_selfcheck(const ExperimentConfig& config, const GlobalOptions& global, double tolerance_scale);

}  // namespace gnls::cli
