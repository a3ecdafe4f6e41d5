#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace gnls::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

const json& block(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) fail(key, "must be an object");
  return j.at(key);
}

double number(const json& j, const char* key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) fail(path + "." + key, "must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) fail(path + "." + key, "must be finite");
  return v;
}

std::size_t count(const json& j, const char* key, const std::string& path, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
    fail(path + "." + key, "must be a non-negative integer");
  }
  return j.at(key).get<std::size_t>();
}

std::string text(const json& j, const char* key, const std::string& path, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail(path + "." + key, "must be a string");
  return j.at(key).get<std::string>();
}

cplx complex_value(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  fail(path, "expected a number or [re, im]");
}

std::vector<double> parse_k_grid(const json& g) {
  std::vector<double> ks;
  if (!g.contains("k_grid")) {
    ks = {0.5, 1.0, 2.0, 4.0};
  } else if (g.at("k_grid").is_array()) {
    for (std::size_t i = 0; i < g.at("k_grid").size(); ++i) {
      const auto& v = g.at("k_grid")[i];
      if (!v.is_number()) fail("grids.k_grid[" + std::to_string(i) + "]", "must be a number");
      ks.push_back(v.get<double>());
    }
  } else if (g.at("k_grid").is_object()) {
    const auto& kg = g.at("k_grid");
    const double lo = number(kg, "min", "grids.k_grid", 0.5);
    const double hi = number(kg, "max", "grids.k_grid", 4.0);
    const std::size_t n = count(kg, "count", "grids.k_grid", 8);
    if (n == 0) fail("grids.k_grid.count", "must be at least 1");
    if (n > 1 && !(hi > lo)) fail("grids.k_grid", "max must exceed min");
    for (std::size_t i = 0; i < n; ++i) {
      ks.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  } else {
    fail("grids.k_grid", "expected a list or {min, max, count}");
  }
  if (ks.empty()) fail("grids.k_grid", "must not be empty");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == 0.0) fail("grids.k_grid[" + std::to_string(i) + "]", "k = 0 is excluded");
  }
  return ks;
}

std::vector<cplx> parse_eps(const json& g) {
  std::vector<cplx> eps;
  if (!g.contains("eps_list")) return eps;
  const auto& e = g.at("eps_list");
  if (e.is_string() && e.get<std::string>() == "auto") return eps;
  if (!e.is_array()) fail("grids.eps_list", "expected a list or \"auto\"");
  for (std::size_t i = 0; i < e.size(); ++i) {
    const std::string path = "grids.eps_list[" + std::to_string(i) + "]";
    const cplx v = complex_value(e[i], path);
    if (v == cplx{}) fail(path, "eps must be nonzero");
    for (const cplx& prev : eps) {
      if (prev == v) fail(path, "duplicate eps value");
    }
    eps.push_back(v);
  }
  return eps;
}

Method parse_method(const std::string& s) {
  if (s == "direct") return Method::direct;
  if (s == "neumann") return Method::neumann;
  if (s == "fourier_special") return Method::fourier_special;
  fail("inversion.method", "unknown method '" + s + "' (neumann | direct | fourier_special)");
}

DataSpec parse_data(const json& d) {
  DataSpec spec;
  const std::string src = text(d, "source", "data", "cascade");
  if (src == "cascade") {
    spec.source = DataSpec::Source::cascade;
  } else if (src == "closed_form") {
    spec.source = DataSpec::Source::closed_form;
    spec.name = text(d, "name", "data", "constant_gamma");
    if (spec.name != "constant_gamma" && spec.name != "exponential_alpha") {
      fail("data.name", "unknown closed form '" + spec.name + "' (constant_gamma | exponential_alpha)");
    }
    spec.parameter = number(d, "parameter", "data", spec.name == "constant_gamma" ? 1.0 : 0.5);
  } else if (src == "series") {
    spec.source = DataSpec::Source::series;
    spec.file = text(d, "file", "data", "");
    if (spec.file.empty()) fail("data.file", "series source needs a file");
  } else {
    fail("data.source", "unknown source '" + src + "' (cascade | closed_form | series)");
  }
  return spec;
}

}  // namespace

SpatialGrid ExperimentConfig::grid() const {
  return Nx == 0 ? SpatialGrid::with_default_density(b) : SpatialGrid(b, Nx);
}

CoefficientFunction parse_coefficient(const json& j, double b, const std::string& path) {
  if (!j.is_object()) fail(path, "must be an object");
  const std::string kind = text(j, "kind", path, "");
  CoefficientFunction f = CoefficientFunction::zero(b);
  if (kind == "zero") {
    f = CoefficientFunction::zero(b);
  } else if (kind == "constant") {
    f = CoefficientFunction::constant(b, number(j, "value", path, 1.0));
  } else if (kind == "exponential") {
    f = CoefficientFunction::exponential(b, number(j, "rate", path, 0.0));
  } else if (kind == "sinusoid") {
    f = CoefficientFunction::sinusoid(b, number(j, "amplitude", path, 1.0), number(j, "frequency", path, std::numbers::pi / b));
  } else {
    fail(path + ".kind", "unknown kind '" + kind + "' (zero | constant | exponential | sinusoid)");
  }
  const double scale = number(j, "scale", path, 1.0);
  return scale == 1.0 ? f : f.scaled(scale);
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  c.raw = j;

  const json& pot = block(j, "potential");
  c.b = number(pot, "b", "potential", 1.0);
  if (!(c.b > 0.0)) fail("potential.b", "must be positive");
  c.r = number(pot, "r", "potential", 1.0);
  if (!(c.r > 0.0)) fail("potential.r", "must be positive");
  std::size_t highest = 0;
  std::set<std::size_t> seen;
  std::vector<std::pair<std::size_t, CoefficientFunction>> specs;
  if (pot.contains("coefficients")) {
    const auto& list = pot.at("coefficients");
    if (!list.is_array()) fail("potential.coefficients", "must be a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "potential.coefficients[" + std::to_string(i) + "]";
      const std::size_t n = count(list[i], "n", path, 0);
      if (!seen.insert(n).second) fail(path + ".n", "duplicate coefficient index");
      specs.emplace_back(n, parse_coefficient(list[i], c.b, path));
      highest = std::max(highest, n);
    }
  }
  c.degree = count(pot, "degree", "potential", highest);
  for (const auto& [n, f] : specs) {
    if (n > c.degree) fail("potential.coefficients", "q_" + std::to_string(n) + " exceeds degree " + std::to_string(c.degree));
  }
  c.coefficients.assign(c.degree + 1, CoefficientFunction::zero(c.b));
  for (const auto& [n, f] : specs) c.coefficients[n] = f;

  const json& g = block(j, "grids");
  c.Nx = count(g, "Nx", "grids", 0);
  if (c.Nx != 0 && (c.Nx < 2 || c.Nx % 2 != 0)) fail("grids.Nx", "must be an even number >= 2");
  c.k_grid = parse_k_grid(g);
  c.eps_list = parse_eps(g);
  c.extract_order = count(g, "extract_order", "grids", 5);
  if (c.extract_order == 0) fail("grids.extract_order", "must be at least 1");

  const json& inv = block(j, "inversion");
  c.N_target = count(inv, "N_target", "inversion", 3);
  if (c.N_target < 2) fail("inversion.N_target", "must be at least 2");
  if (inv.contains("xi")) {
    const auto& xi = inv.at("xi");
    if (xi.is_string() && xi.get<std::string>() == "auto") {
      c.recover.xi.reset();
    } else if (xi.is_number() && xi.get<double>() > 0.0) {
      c.recover.xi = xi.get<double>();
    } else {
      fail("inversion.xi", "expected \"auto\" or a positive number");
    }
  }
  c.recover.M = count(inv, "M", "inversion", 64);
  c.recover.method = parse_method(text(inv, "method", "inversion", "direct"));
  if (inv.contains("use_F")) {
    if (!inv.at("use_F").is_boolean()) fail("inversion.use_F", "must be true or false");
    c.recover.route = inv.at("use_F").get<bool>() ? Route::F : Route::E;
  }
  c.recover.neumann.max_terms = count(inv, "neumann_max_terms", "inversion", 200);
  c.tolerance = number(inv, "tolerance", "inversion", 1e-2);
  c.known_q0 = inv.contains("known_q0") ? parse_coefficient(inv.at("known_q0"), c.b, "inversion.known_q0")
                                        : c.coefficients.front();

  c.data = parse_data(block(j, "data"));
  if (c.data.source == DataSpec::Source::closed_form && c.N_target > 3) {
    fail("inversion.N_target", "closed-form data only covers orders up to 3");
  }

  const json& out = block(j, "output");
  c.out_dir = text(out, "directory", "output", "out");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

std::uint64_t config_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace gnls::cli
