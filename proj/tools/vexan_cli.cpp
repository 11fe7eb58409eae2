// vexan command line: verify suites, evaluate norms, certify kernels.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vexan/vexan.hpp"

namespace {

using nlohmann::json;
using vexan::ConfigError;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

// Inline JSON text, or a path to a file holding it.
json json_argument(const std::string& arg, const char* what) {
  std::string text = arg;
  if (std::filesystem::is_regular_file(arg)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

int jobs_from_env() {
  const char* v = std::getenv("VEXAN_JOBS");
  if (!v || !*v) return 0;
  try {
    const int n = std::stoi(v);
    if (n < 1) throw ConfigError("VEXAN_JOBS must be ≥ 1");
    return n;
  } catch (const std::logic_error&) {
    throw ConfigError(std::string("VEXAN_JOBS is not an integer: ") + v);
  }
}

int run_verify(const std::string& path, std::optional<long long> seed, std::optional<std::string> out,
               std::optional<int> jobs) {
  auto cfg = vexan::load_run_config(path);
  if (seed) {
    if (*seed < 0) throw ConfigError("--seed must be ≥ 0");
    vexan::override_seed(cfg, static_cast<std::uint64_t>(*seed));
  }
  if (out) cfg.output = *out;
  if (jobs) {
    if (*jobs < 1) throw ConfigError("--jobs must be ≥ 1");
    cfg.parallelism = *jobs;
  } else if (const int env = jobs_from_env()) {
    cfg.parallelism = env;
  }

  const auto reports = vexan::run_suite(cfg.suite, cfg.parallelism);
  const auto parent = std::filesystem::path(cfg.output).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream jl(cfg.output + ".jsonl"), csv(cfg.output + ".csv");
  if (!jl || !csv) throw std::runtime_error("cannot write reports under '" + cfg.output + "'");
  vexan::write_jsonl(reports, jl);
  vexan::write_summary_csv(reports, csv);

  for (const auto& r : reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(20) << vexan::to_string(r.kind)
              << " measured=" << std::setprecision(6) << r.measured_constant;
    if (r.asserted_bound) std::cout << " bound=" << *r.asserted_bound;
    if (r.status != "ok") std::cout << " status=" << r.status;
    std::cout << '\n';
  }
  const bool pass = vexan::aggregate_pass(reports);
  std::cout << (pass ? "aggregate: PASS" : "aggregate: FAIL") << " (" << cfg.output << ".jsonl)\n";
  return pass ? kExitOk : kExitFail;
}

int run_norm(const std::string& csv_path, const std::string& exponent_arg, double tol) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open '" + csv_path + "'");
  vexan::GridFunction f;
  try {
    f = vexan::read_csv(in);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto j = json_argument(exponent_arg, "--exponent");
  vexan::ExponentSpec spec;
  try {
    spec = {j.at("kind").get<std::string>(), j.at("params").get<std::vector<double>>()};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("--exponent: ") + e.what());
  }
  const auto p = [&] {
    try {
      return spec.build(f.grid().dim());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  std::cout << std::setprecision(17) << vexan::lnorm(f, p, tol) << '\n';
  return kExitOk;
}

vexan::KernelSpec kernel_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    const int m = j.value("m", 2), n = j.value("n", 1);
    const double scale = j.value("scale", 1.0);
    if (kind == "mollified_cz") return vexan::make_mollified_cz_kernel(m, n, j.at("rho").get<double>(), scale);
    if (kind == "fractional") return vexan::make_fractional_kernel(m, n, j.at("alpha").get<double>(), scale);
    throw ConfigError("kernel kind must be 'mollified_cz' or 'fractional'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
}

int run_kernel_cert(const std::string& arg, int samples) {
  const auto j = json_argument(arg, "kernel spec");
  const auto k = kernel_from_json(j);
  const double a = vexan::kernel_size_check(k, samples);
  const auto sm = vexan::kernel_smoothness_check(k, samples);
  json out{{"kernel", vexan::to_json(k)},
           {"samples", samples},
           {"measured_A", a},
           {"measured_A_smooth_x", sm.A_x},
           {"measured_A_smooth_y", sm.A_y},
           {"certified", a <= k.A * (1 + 1e-12) && sm.A_x <= k.A_smooth_x * (1 + 1e-12) &&
                             sm.A_y <= k.A_smooth_y * (1 + 1e-12)}};
  std::cout << out.dump(2) << '\n';
  return out["certified"].get<bool>() ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vexan: numerical checks for variable-exponent harmonic analysis"};
  app.require_subcommand(1);

  std::string config_path, csv_path, exponent_arg, kernel_arg;
  std::optional<long long> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
  double tol = vexan::kDefaultTol;
  int samples = 10000;

  auto* verify = app.add_subcommand("verify", "run the suite in a config, write <out>.jsonl and <out>.csv");
  verify->add_option("config", config_path, "JSON run config")->required();
  verify->add_option("--seed", seed, "base seed override");
  verify->add_option("--out", out, "output path prefix override");
  verify->add_option("--jobs", jobs, "parallel experiments (default: config, or VEXAN_JOBS)");

  auto* norm = app.add_subcommand("norm", "Luxemburg norm of a grid function");
  norm->add_option("csv", csv_path, "grid function CSV")->required();
  norm->add_option("--exponent", exponent_arg, "exponent JSON {kind, params}, inline or file")->required();
  norm->add_option("--tol", tol, "relative tolerance");

  auto* cert = app.add_subcommand("kernel-cert", "measure size and smoothness constants of a kernel");
  cert->add_option("spec", kernel_arg, "kernel JSON {kind, m, n, rho|alpha, scale}, inline or file")->required();
  cert->add_option("--samples", samples, "random configurations per check");

  auto* list = app.add_subcommand("list-suites", "print the experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) {
      for (auto k : vexan::all_experiment_kinds()) std::cout << vexan::to_string(k) << '\n';
      return kExitOk;
    }
    if (*verify) return run_verify(config_path, seed, out, jobs);
    if (*norm) return run_norm(csv_path, exponent_arg, tol);
    if (*cert) return run_kernel_cert(kernel_arg, samples);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitOk;
}
