#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fraclab/grid.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/levy.hpp"
#include "fraclab/params.hpp"

namespace fraclab {

/// Positions of all particles of all species on the torus [-L/2, L/2)^d.
/// Each particle carries the weight 1/N. Particles of a species are kept in
/// lexicographic order of their positions at construction; that index is the
/// particle's noise-stream key for the rest of the run.
class ParticleEnsemble {
 public:
  ParticleEnsemble(int d, double L, std::uint64_t N, std::vector<std::vector<double>> positions);

  int dim() const { return d_; }
  int species() const { return static_cast<int>(positions_.size()); }
  double length() const { return L_; }
  std::uint64_t scale() const { return N_; }
  double weight() const { return 1.0 / static_cast<double>(N_); }

  std::size_t count(int i) const { return positions_[static_cast<std::size_t>(i)].size() / static_cast<std::size_t>(d_); }
  std::span<const double> positions(int i) const { return positions_[static_cast<std::size_t>(i)]; }
  std::span<double> positions(int i) { return positions_[static_cast<std::size_t>(i)]; }
  std::span<const double> particle(int i, std::size_t k) const {
    return positions(i).subspan(k * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_));
  }
  /// <S_i^N, 1> = N_i / N.
  double mass(int i) const { return static_cast<double>(count(i)) * weight(); }

 private:
  int d_;
  double L_;
  std::uint64_t N_;
  std::vector<std::vector<double>> positions_;
};

/// Per-species flattened force vectors (d entries per particle).
using Forces = std::vector<std::vector<double>>;

/// N_i = round(N * integral of u0_i).
std::vector<std::size_t> counts_from_mass(const Field& u0, std::uint64_t N);

/// Draws counts[i] i.i.d. particles per species from u0_i / ||u0_i||_1:
/// cell chosen by inverse CDF over the grid cells (cell of node x_m is
/// [x_m - h/2, x_m + h/2)^d), then uniform jitter inside the cell.
/// Throws std::invalid_argument on negative densities or zero mass.
ParticleEnsemble init_from_density(const Field& u0, std::uint64_t N, std::span<const std::size_t> counts,
                                   std::uint64_t seed);

/// force(i,k) = -sum_j a_ij (1/N) sum_l grad^beta V_hat_N(X_i^k - X_j^l) by
/// direct summation with the tabulated periodic kernel.
Forces drift_direct(const ParticleEnsemble& e, const ModelParams& model, const InteractionForce& force);

/// Same force from the grid: s_hat_j = S_j * V_hat_N deposited spectrally,
/// grad^beta applied as a multiplier, cubic interpolation at the particles.
Forces drift_grid(const ParticleEnsemble& e, const PeriodicGrid& grid, const ModelParams& model,
                  const MollifierFamily& fam);

struct StepRecord {
  double time = 0.0;
  std::vector<double> max_displacement;   ///< per species
  std::vector<std::size_t> long_jumps;    ///< per species, |noise| > half the kernel width
  bool jump_cap_active = false;
};

struct NoiseConfig {
  std::uint64_t seed = 0;     ///< ignored by ParticleStepper, which takes the seed per call
  double jump_cap = 0.0;
  double kernel_width = 0.0;  ///< used only for the long-jump count
  bool enabled = true;        ///< false: deterministic drift only
};

/// X <- wrap(X + force dt + dL), with dL drawn from the (species, particle,
/// step) substream of noise.seed.
StepRecord em_step(ParticleEnsemble& e, const Forces& forces, double dt, double t_new, std::uint32_t step_index,
                   const ModelParams& model, const NoiseConfig& noise);

enum class DriftMethod { Direct, Grid };

/// Bundles what a run needs to advance an ensemble.
class ParticleStepper {
 public:
  ParticleStepper(const ModelParams& model, const MollifierFamily& fam, const PeriodicGrid& grid, DriftMethod method,
                  NoiseConfig noise);

  Forces forces(const ParticleEnsemble& e) const;
  /// Advances by dt, computing the drift at the current state.
  StepRecord step(ParticleEnsemble& e, double dt, double t_new, std::uint32_t step_index, std::uint64_t seed) const;
  StepRecord step(ParticleEnsemble& e, const Forces& forces, double dt, double t_new, std::uint32_t step_index,
                  std::uint64_t seed) const;

  const ModelParams& model() const { return model_; }
  const MollifierFamily& family() const { return fam_; }
  const PeriodicGrid& grid() const { return grid_; }

 private:
  ModelParams model_;
  MollifierFamily fam_;
  PeriodicGrid grid_;
  DriftMethod method_;
  NoiseConfig noise_;
  std::optional<InteractionForce> table_;
};

/// h^N = S^N * W_N per species.
Field deposit_h(const ParticleEnsemble& e, const PeriodicGrid& grid, const MollifierFamily& fam);
/// s_hat^N = S^N * V_hat_N per species.
Field deposit_s_hat(const ParticleEnsemble& e, const PeriodicGrid& grid, const MollifierFamily& fam);

/// Trigonometric test function psi(x) = cos(xi.x) or sin(xi.x) on the torus,
/// with exact gradient and fractional Laplacian.
struct TrigTestFunction {
  std::array<int, 3> k{0, 0, 0};  ///< integer wavevector, xi = 2 pi k / L
  bool cosine = true;
  double L = 1.0;

  double xi(int a) const;
  double abs_xi() const;
  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  double frac_laplacian(std::span<const double> x, double alpha) const;
};

/// Accumulates both sides of the weak form along one trajectory:
///   lhs = <S_i(t), psi> - <S_i(0), psi>
///   rhs = int_0^t <S_i, drift . grad psi> - sigma_i <S_i, (-Delta)^alpha psi> dtau  (trapezoid)
class GeneratorAccumulator {
 public:
  GeneratorAccumulator(const TrigTestFunction& psi, int species, const ModelParams& model);
  void observe(double t, const ParticleEnsemble& e, const Forces& forces);
  double lhs() const { return last_pairing_ - first_pairing_; }
  double rhs() const { return integral_; }
  /// Sum of the one-step martingale increments <S(t_{n+1}), psi> - E_n[...],
  /// using the exact conditional expectation of an Euler-Maruyama step for a
  /// trigonometric psi: E psi(x + F dt + dL) = exp(-sigma dt |xi|^{2 alpha}) psi(x + F dt).
  /// lhs() - martingale() has the same mean as lhs() and far less noise.
  double martingale() const { return martingale_; }

 private:
  TrigTestFunction psi_;
  int species_;
  double alpha_;
  double sigma_;
  bool started_ = false;
  double first_pairing_ = 0.0;
  double last_pairing_ = 0.0;
  double last_t_ = 0.0;
  double last_integrand_ = 0.0;
  double integral_ = 0.0;
  double martingale_ = 0.0;
  std::vector<double> last_positions_;
  std::vector<double> last_forces_;
};

struct GeneratorCheckResult {
  double lhs;       ///< seed mean
  double rhs;       ///< seed mean
  double std_err;   ///< standard error of (lhs - rhs) across seeds
  std::vector<double> residuals;
  /// Seed mean and standard error of lhs - martingale - rhs.
  double compensated_residual = 0.0;
  double compensated_std_err = 0.0;
  double residual() const { return lhs - rhs; }
};

/// Runs `seeds` independent trajectories from u0 over [0, T] and compares both
/// sides of the weak form for species `species`. The martingale term has mean
/// zero, so |lhs - rhs| should be within a few standard errors plus an O(dt) bias.
GeneratorCheckResult generator_check(const ParticleStepper& stepper, const Field& u0, std::uint64_t N,
                                     const TrigTestFunction& psi, int species, double T, double dt, int seeds,
                                     std::uint64_t master_seed);

struct ForceVarianceRow {
  std::uint64_t N;
  double kappa_N;
  double mean;
  double variance;
};

/// Across-seed variance of the force on species `species` at the probe point,
/// with particles drawn i.i.d. from u0 (t = 0). d = 1 probes use probe[0].
std::vector<ForceVarianceRow> empirical_force_variance(const ModelParams& model, const ScalingParams& scaling_template,
                                                       std::span<const std::uint64_t> N_list, const Field& u0,
                                                       std::span<const double> probe, int species, int seeds,
                                                       std::uint64_t master_seed);

/// Derives an independent 64-bit seed for replica `index` (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace fraclab
