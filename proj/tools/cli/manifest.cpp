#include "manifest.hpp"

#include <cstdio>
#include <fstream>

#include "config.hpp"
#include "gnls/errors.hpp"

namespace gnls::cli {

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::filesystem::path manifest_path(const std::filesystem::path& dir, const std::string& command) {
  return dir / ("manifest_" + command + ".json");
}

}  // namespace

RunManifest::RunManifest(std::string command, const nlohmann::json& config, std::filesystem::path out_dir)
    : command_(std::move(command)), hash_(config_hash(config)), out_dir_(std::move(out_dir)) {
  std::ifstream in(manifest_path(out_dir_, command_));
  if (!in) return;
  try {
    const auto prev = nlohmann::json::parse(in);
    rerun_ = prev.value("config_hash", std::string{}) == hex(hash_);
  } catch (const nlohmann::json::exception&) {
    rerun_ = false;
  }
}

void RunManifest::add_output(const std::filesystem::path& file) { outputs_.push_back(file.filename().string()); }

void RunManifest::record_stage(const std::string& name, double seconds) { stages_.emplace_back(name, seconds); }

std::filesystem::path RunManifest::write() const {
  nlohmann::json j;
  j["command"] = command_;
  j["config_hash"] = hex(hash_);
  j["version"] = GNLS_VERSION;
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& [name, secs] : stages_) timings.push_back({{"stage", name}, {"seconds", secs}});
  j["timings"] = timings;
  j["outputs"] = outputs_;
  j["diagnostics"] = diagnostics_;
  for (const auto& f : outputs_) {
    if (!std::filesystem::exists(out_dir_ / f)) throw NumericalError("manifest lists missing output " + f);
  }
  const auto path = manifest_path(out_dir_, command_);
  std::ofstream os(path);
  os << j.dump(2) << '\n';
  if (!os) throw NumericalError("cannot write " + path.string());
  return path;
}

}  // namespace gnls::cli
