#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace gnls::cli {

/// Per-command run record written as manifest_<command>.json in the output directory.
class RunManifest {
 public:
  RunManifest(std::string command, const nlohmann::json& config, std::filesystem::path out_dir);

  /// True when a previous manifest for this command carries the same config hash.
  bool same_config_as_previous() const { return rerun_; }

  void add_output(const std::filesystem::path& file);
  void record_stage(const std::string& name, double seconds);
  nlohmann::json& diagnostics() { return diagnostics_; }

  /// Fails if a listed output is missing.
  std::filesystem::path write() const;

 private:
  std::string command_;
  std::uint64_t hash_;
  std::filesystem::path out_dir_;
  bool rerun_ = false;
  std::vector<std::pair<std::string, double>> stages_;
  std::vector<std::string> outputs_;
  nlohmann::json diagnostics_ = nlohmann::json::object();
};

/// Times a block and records it on destruction.
class StageTimer {
 public:
  StageTimer(RunManifest& m, std::string name) : m_(m), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    m_.record_stage(name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  RunManifest& m_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace gnls::cli
