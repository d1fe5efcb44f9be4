#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/frac_ops.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/params.hpp"

namespace fraclab {

/// Raised when the solution stops being finite or grows by more than a
/// factor 10 in one step.
class SolverBlowup : public std::runtime_error {
 public:
  SolverBlowup(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Regularized: interaction through u_j * W_hat_N. Limit: through u_j itself.
enum class SolverMode { Regularized, Limit };

struct SolverConfig {
  double dt = 1e-3;
  double T = 1.0;
  /// Times at which to store snapshots (must be multiples of dt up to
  /// round-off). Empty means {0, T}.
  std::vector<double> snapshot_times;
  bool dealias = true;
  /// Stop on blow-up (throw) rather than returning a truncated trajectory.
  bool throw_on_blowup = true;
};

struct MonitorSample {
  double t;
  std::vector<double> mass;
  std::vector<double> min;
  std::vector<double> hs_proxy;  ///< Fourier H^s norm with s = d/2 + 2.5
  double cfl;                    ///< dt * max|drift| * max|xi|
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;
  std::vector<MonitorSample> monitors;  ///< every step, t = 0 included
  /// sup_t ||u_i(t)||_2^2 and int_0^T ||(-Delta)^{alpha/2} u_i||_2^2 dt per
  /// species, accumulated at every step.
  std::vector<double> sup_l2_sq;
  std::vector<double> int_seminorm_sq;
  bool completed = false;
  double failure_time = -1.0;
  std::string failure;
  int cfl_warnings = 0;
};

/// Pseudo-spectral solver for
///   d_t u_i = -sigma_i (-Delta)^alpha u_i + div(sum_j a_ij u_i grad^beta (u_j [* W_hat_N]))
/// with an integrating factor for the diffusion and Heun (RK2) for the
/// nonlinear term. Products use the 2/3 rule when dealiasing is on.
class PdeSolver {
 public:
  PdeSolver(const ModelParams& model, const PeriodicGrid& grid, SolverMode mode,
            std::optional<MollifierFamily> fam = std::nullopt, bool dealias = true);

  const PeriodicGrid& grid() const { return ops_.grid(); }
  const ModelParams& model() const { return model_; }
  SolverMode mode() const { return mode_; }

  /// Full right-hand side in physical space (mostly for checks).
  Field rhs(const Field& u) const;
  /// Nonlinear term only, in physical space.
  Field nonlinear(const Field& u) const;
  /// One integrating-factor RK2 step.
  Field step(const Field& u, double dt) const;
  Trajectory solve(const Field& u0, const SolverConfig& cfg) const;

  /// Fourier H^s norm sqrt(sum (1 + |xi|^2)^s |u_hat|^2) in L2 normalization.
  double hs_norm(std::span<const double> f, double s) const;

 private:
  using Spectra = std::vector<Spectrum>;
  Spectra to_spectra(const Field& u) const;
  Field to_field(const Spectra& s) const;
  Spectra nonlinear_spectra(const Spectra& u, double* max_drift = nullptr) const;

  ModelParams model_;
  SpectralOperators ops_;
  SolverMode mode_;
  std::optional<MollifierFamily> fam_;
  bool dealias_;
  std::vector<double> mollifier_;  ///< F(W_hat_N) per mode (ones in the limit mode)
  double max_xi_;
};

/// Right-hand side of the regularized system.
Field rhs_regularized(const Field& u, const ModelParams& model, const MollifierFamily& fam);
/// Right-hand side of the limit system.
Field rhs_limit(const Field& u, const ModelParams& model);

/// Exact solution of d_t u = -sigma (-Delta)^alpha u on the torus at time t.
Field fractional_heat(const Field& u0, const ModelParams& model, double t);

}  // namespace fraclab
