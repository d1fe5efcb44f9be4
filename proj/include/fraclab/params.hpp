#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fraclab {

/// Model coefficients of the cross-diffusion system and of the particle SDEs.
struct ModelParams {
  int n = 1;                    ///< species count
  double alpha = 0.85;          ///< fractional diffusion order, (-Delta)^alpha
  double beta = 0.5;            ///< order of the fractional gradient
  std::vector<double> sigma;    ///< diffusion coefficient per species
  std::vector<double> a;        ///< interaction matrix, row-major n x n
  int d = 1;                    ///< spatial dimension

  double a_ij(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
};

/// Particle-number scaling of the interaction kernels.
struct ScalingParams {
  std::uint64_t N = 1;
  int d = 1;
  double delta = 0.2;
  double rho = 0.05;
  double kappa = 0.23;
  double kappa_hat = 0.03;
};

struct Violation {
  std::string id;           ///< machine-readable condition identifier
  std::string description;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  void fail(std::string id, std::string description);
  bool has(const std::string& id) const;
  std::string summary() const;
};

/// Checks 1/2 < alpha < 1, 0 < beta < 1, beta + 1 < 2 alpha, the extra d = 1
/// restriction (alpha - beta < 1/2 or alpha < 3/4), sigma_i > 0 and shapes.
ValidationReport validate_model(const ModelParams& p);

/// Checks the admissibility window for (delta, rho, kappa, kappa_hat).
/// Reports "kappa_interval_empty" when delta (1 + rho) d >= d / (d + 3).
ValidationReport validate_scaling(const ScalingParams& s);

struct DerivedScales {
  double kappa_N;
  double kappa_hat_N;
  double delta_N;
};

/// kappa_N = N^{kappa/d}, kappa_hat_N = N^{kappa_hat/d}, delta_N = N^{-delta}.
/// Throws std::invalid_argument if `s` is not admissible.
DerivedScales derived_scales(const ScalingParams& s);

}  // namespace fraclab
