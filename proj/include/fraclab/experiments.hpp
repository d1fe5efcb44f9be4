#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fraclab/config.hpp"
#include "fraclab/grid.hpp"

namespace fraclab {

struct Assertion {
  std::string name;
  bool passed;
  std::string detail;
};

struct DatFile {
  std::string name;  ///< file name, e.g. "medians.dat"
  std::string comment;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Everything an experiment produces. Rows are kept sorted by the driver
/// (by N, then seed), so the CSV does not depend on scheduling.
struct Report {
  std::string experiment;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<Assertion> assertions;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<DatFile> dat;
  std::vector<std::pair<std::string, Field>> fields;             ///< binary snapshots
  std::vector<std::pair<std::string, std::string>> text_files;   ///< extra CSV / JSON outputs
  std::vector<std::pair<std::string, double>> timings;           ///< wall seconds, kept out of results.csv

  bool passed() const;
  nlohmann::json verdict() const;
  /// results.csv contents: experiment, config_hash, master_seed, then columns.
  std::string csv() const;
};

/// Writes results.csv, verdict.json, timings.csv, config.ini and every
/// auxiliary output into `dir` (created if needed).
void write_report(const Report& r, const std::filesystem::path& dir);

/// Particles vs regularized PDE, ||h^N - u_hat^N||^2 per (N, seed).
Report run_converge_n(const ExperimentConfig& cfg);
/// Regularized vs limit PDE, ||u_hat^N - u||^2 per N.
Report run_converge_reg(const ExperimentConfig& cfg);
/// sup_t d(S_i^N(t), u_i(t)) per (N, seed) with the dictionary lower bound.
Report run_theorem2_probe(const ExperimentConfig& cfg);
/// Across-seed variance of the force at a probe point versus N.
Report run_variance_study(const ExperimentConfig& cfg);
/// Characteristic function and tail index of the stable increments.
Report run_sampler_validation(const ExperimentConfig& cfg);
/// a = 0: particles against the exact fractional heat solution.
Report run_pure_diffusion(const ExperimentConfig& cfg);
/// One particle run (first N, first seed) with position and field snapshots.
Report run_simulate_particles(const ExperimentConfig& cfg);
/// One PDE run (mode from the config) with snapshots and monitors.
Report run_solve_pde(const ExperimentConfig& cfg);

/// Names accepted by run_experiment (the CLI subcommands).
const std::vector<std::string>& experiment_names();
Report run_experiment(const std::string& name, const ExperimentConfig& cfg);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> v);

}  // namespace fraclab
