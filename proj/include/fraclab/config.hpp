#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/grid.hpp"
#include "fraclab/params.hpp"
#include "fraclab/particles.hpp"
#include "fraclab/pde.hpp"

namespace fraclab {

/// Syntax errors, unknown keys and unparsable values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One periodic Gaussian bump: amplitude * prod_a G_width(x_a - center_a),
/// periodized over the torus. `amplitude` is the bump's integral.
struct Bump {
  std::vector<double> center;
  double width = 1.0;
  double amplitude = 1.0;
};

struct InitialCondition {
  std::vector<std::vector<Bump>> species;
  Field evaluate(const PeriodicGrid& grid) const;
};

struct ExperimentConfig {
  ModelParams model;
  ScalingParams scaling;  ///< template; N comes from N_list
  std::vector<std::uint64_t> N_list;

  double L = 0.0;
  int M = 4096;

  // PDE solver
  double pde_dt = 1e-3;
  double T = 1.0;
  int snapshots = 11;  ///< equally spaced in [0, T], both ends included
  bool dealias = true;
  SolverMode pde_mode = SolverMode::Regularized;

  // particles
  double particle_dt = 5e-3;
  DriftMethod drift = DriftMethod::Grid;
  double jump_cap = 0.0;

  // seeds
  std::uint64_t master_seed = 20240601;
  int seed_count = 8;

  InitialCondition initial;

  // variance study
  std::vector<std::uint64_t> variance_N_list;
  int variance_seeds = 200;
  std::vector<double> probe;

  // sampler validation
  std::uint64_t sampler_samples = 1000000;
  std::uint64_t sampler_tail_samples = 10000000;
  std::vector<double> sampler_xi;
  double sampler_dt = 1.0;
  double sampler_sigma = 1.0;
  double tail_r_lo = 10.0;
  double tail_r_hi = 1000.0;

  PeriodicGrid grid() const { return PeriodicGrid(model.d, L, M); }
  std::vector<double> snapshot_times() const;
  /// Canonical key = value echo of every field except the master seed.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
};

/// The built-in defaults (d = 1, n = 2, L = 16 pi).
ExperimentConfig default_config();

/// Parses INI-style text on top of default_config(). Throws ConfigError.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Model and scaling admissibility plus structural checks (grid, times,
/// initial condition).
ValidationReport validate_config(const ExperimentConfig& cfg);

}  // namespace fraclab
