// Command line front end for the fraclab experiment drivers.
//
// Exit codes: 0 verdict PASS, 1 runtime failure, 2 invalid configuration,
// 3 run finished with a FAIL verdict, 64 bad command line.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "fraclab/config.hpp"
#include "fraclab/experiments.hpp"
#include "fraclab/parallel.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kInvalidConfig = 2;
constexpr int kVerdictFail = 3;
constexpr int kUsage = 64;

const char* describe(const std::string& name) {
  if (name == "simulate-particles") return "Run one particle simulation and dump positions and deposited fields";
  if (name == "solve-pde") return "Solve the regularized or limit PDE and dump snapshots and monitors";
  if (name == "converge-n") return "Particles vs regularized PDE over the N list and seeds";
  if (name == "converge-reg") return "Regularized vs limit PDE over the N list";
  if (name == "theorem2-probe") return "Bounded-Lipschitz distance of empirical measures to the limit PDE";
  if (name == "variance-study") return "Force variance at a probe point versus N";
  if (name == "validate-sampler") return "Characteristic function and tail index of the stable sampler";
  if (name == "pure-diffusion") return "Particles without interaction vs the exact fractional heat solution";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: particle and PDE experiments for fractional cross-diffusion systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int threads = 1;

  for (const auto& name : fraclab::experiment_names()) {
    auto* sub = app.add_subcommand(name, describe(name));
    sub->add_option("--config", config_path, "Config file (INI sections); defaults apply when omitted");
    sub->add_option("--seed", seed, "Master seed (overrides [seeds] master)");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  fraclab::ExperimentConfig cfg;
  try {
    cfg = config_path.empty() ? fraclab::default_config() : fraclab::load_config(config_path);
    if (seed) cfg.master_seed = *seed;
  } catch (const fraclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kInvalidConfig;
  }
  const auto report = fraclab::validate_config(cfg);
  if (!report.ok) {
    std::cerr << "invalid configuration:\n" << report.summary() << '\n';
    return kInvalidConfig;
  }

  fraclab::set_default_threads(threads);
  try {
    const auto result = fraclab::run_experiment(name, cfg);
    fraclab::write_report(result, out_dir);
    std::cout << name << ": " << (result.passed() ? "PASS" : "FAIL") << " (config " << result.config_hash
              << ", seed " << result.master_seed << ") -> " << std::filesystem::path(out_dir) / "results.csv" << '\n';
    for (const auto& a : result.assertions)
      std::cout << "  " << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.detail << '\n';
    return result.passed() ? 0 : kVerdictFail;
  } catch (const std::exception& e) {
    std::cerr << name << " failed: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}
