/**
 * @file config.hpp
 * @brief Run configuration: strict JSON parsing into experiment specs.
 *
 * Unknown keys are errors at every level so that a misspelt option fails
 * instead of silently running with the default.
 */
#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vexan/harness.hpp"

namespace vexan {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int dim = 1;
  double half_extent = 2.0;
  std::vector<int> resolutions{32, 64};
  std::map<std::string, ExponentSpec> exponents;
  KernelParams kernel;
  std::uint64_t seed = 1;
  std::string output = "vexan_report";
  int parallelism = 1;
  std::vector<ExperimentSpec> suite;
};

namespace config_detail {

using nlohmann::json;

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

inline std::vector<int> resolutions(const json& j, const char* key, const std::string& where) {
  auto r = get<std::vector<int>>(j, key, where);
  if (r.empty()) throw ConfigError(where + "." + key + ": empty");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 4) throw ConfigError(where + "." + key + ": resolutions must be ≥ 4");
    if (i > 0 && r[i] <= r[i - 1]) throw ConfigError(where + "." + key + ": resolutions must be ascending");
  }
  return r;
}

inline ExponentSpec exponent(const json& j, const std::string& where, int dim) {
  check_keys(j, {"kind", "params"}, where);
  ExponentSpec e{get<std::string>(j, "kind", where), get<std::vector<double>>(j, "params", where)};
  try {
    (void)e.build(dim);
  } catch (const std::exception& ex) {
    throw ConfigError(where + ": " + ex.what());
  }
  return e;
}

inline KernelParams kernel(const json& j, KernelParams base, const std::string& where) {
  check_keys(j, {"m", "rho_cells"}, where);
  maybe(j, "m", base.m, where);
  maybe(j, "rho_cells", base.rho_cells, where);
  if (base.m < 1 || base.m > 2) throw ConfigError(where + ".m: must be 1 or 2");
  if (!(base.rho_cells > 0.0)) throw ConfigError(where + ".rho_cells: must be positive");
  return base;
}

inline CubeFamily family(const json& j, const std::string& where) {
  check_keys(j, {"policy", "max_side"}, where);
  CubeFamily f = CubeFamily::all();
  if (j.contains("policy")) {
    const auto p = get<std::string>(j, "policy", where);
    if (p == "all")
      f.policy = CubePolicy::all_grid_cubes;
    else if (p == "dyadic")
      f.policy = CubePolicy::dyadic;
    else
      throw ConfigError(where + ".policy: expected 'all' or 'dyadic'");
  }
  maybe(j, "max_side", f.max_side_cells, where);
  if (f.max_side_cells < 0) throw ConfigError(where + ".max_side: must be ≥ 0");
  return f;
}

inline ExperimentSpec experiment(const json& j, const RunConfig& cfg, std::size_t index) {
  const std::string where = "suite[" + std::to_string(index) + "]";
  check_keys(j,
             {"kind", "exponents", "cases", "seed_offset", "resolutions", "family", "kernel", "rho_sweep", "inputs", "beta",
              "gamma", "eta", "delta", "alpha", "t", "r", "stability_tol"},
             where);
  ExperimentSpec s;
  const auto kind = get<std::string>(j, "kind", where);
  const auto k = parse_experiment_kind(kind);
  if (!k) throw ConfigError(where + ".kind: unknown experiment '" + kind + "'");
  s.kind = *k;
  s.dim = cfg.dim;
  s.half_extent = cfg.half_extent;
  s.resolutions = j.contains("resolutions") ? resolutions(j, "resolutions", where) : cfg.resolutions;
  s.kernel = j.contains("kernel") ? kernel(j.at("kernel"), cfg.kernel, where + ".kernel") : cfg.kernel;
  if (j.contains("exponents")) {
    for (const auto& name : get<std::vector<std::string>>(j, "exponents", where)) {
      const auto it = cfg.exponents.find(name);
      if (it == cfg.exponents.end()) throw ConfigError(where + ".exponents: undefined exponent '" + name + "'");
      s.exponents.push_back(it->second);
    }
  }
  std::uint64_t offset = 0;
  maybe(j, "seed_offset", offset, where);
  s.seed = cfg.seed + offset;
  maybe(j, "cases", s.cases, where);
  if (s.cases < 1) throw ConfigError(where + ".cases: must be ≥ 1");
  if (j.contains("family")) s.family = family(j.at("family"), where + ".family");
  maybe(j, "rho_sweep", s.rho_sweep, where);
  maybe(j, "inputs", s.inputs, where);
  try {
    (void)parse_input_family(s.inputs);
  } catch (const std::exception& e) {
    throw ConfigError(where + ".inputs: " + e.what());
  }
  maybe(j, "beta", s.beta, where);
  maybe(j, "gamma", s.gamma, where);
  maybe(j, "eta", s.eta, where);
  maybe(j, "delta", s.delta, where);
  maybe(j, "alpha", s.alpha, where);
  maybe(j, "t", s.t, where);
  maybe(j, "r", s.r, where);
  maybe(j, "stability_tol", s.stability_tol, where);
  return s;
}

}  // namespace config_detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using namespace config_detail;
  check_keys(j, {"domain", "exponents", "kernel", "suite", "seed", "output", "parallelism"}, "config");
  RunConfig cfg;
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    check_keys(d, {"dim", "half_extent", "resolutions"}, "domain");
    maybe(d, "dim", cfg.dim, "domain");
    maybe(d, "half_extent", cfg.half_extent, "domain");
    if (d.contains("resolutions")) cfg.resolutions = resolutions(d, "resolutions", "domain");
    if (cfg.dim != 1 && cfg.dim != 2) throw ConfigError("domain.dim: must be 1 or 2");
    if (!(cfg.half_extent > 0.0)) throw ConfigError("domain.half_extent: must be positive");
  }
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0) throw ConfigError("seed: must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  maybe(j, "output", cfg.output, "config");
  maybe(j, "parallelism", cfg.parallelism, "config");
  if (cfg.parallelism < 1) throw ConfigError("parallelism: must be ≥ 1");
  if (j.contains("kernel")) cfg.kernel = kernel(j.at("kernel"), cfg.kernel, "kernel");
  if (j.contains("exponents")) {
    const auto& e = j.at("exponents");
    if (!e.is_object()) throw ConfigError("exponents: expected an object of named exponents");
    for (const auto& [name, spec] : e.items()) cfg.exponents[name] = exponent(spec, "exponents." + name, cfg.dim);
  }
  if (!j.contains("suite") || !j.at("suite").is_array()) throw ConfigError("suite: expected an array");
  std::size_t i = 0;
  for (const auto& entry : j.at("suite")) cfg.suite.push_back(experiment(entry, cfg, i++));
  return cfg;
}

inline RunConfig parse_run_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

/// Re-derives every experiment seed from a new base seed, keeping offsets.
inline void override_seed(RunConfig& cfg, std::uint64_t seed) {
  for (auto& s : cfg.suite) s.seed = seed + (s.seed - cfg.seed);
  cfg.seed = seed;
}

}  // namespace vexan
