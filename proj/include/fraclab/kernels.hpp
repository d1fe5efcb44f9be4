#pragma once

#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/grid.hpp"
#include "fraclab/params.hpp"

namespace fraclab {

/// Thrown when a kernel is narrower than the grid can represent.
class UnderResolvedError : public std::runtime_error {
 public:
  UnderResolvedError(const std::string& what, int required_points)
      : std::runtime_error(what), required_points_(required_points) {}
  int required_points() const { return required_points_; }

 private:
  int required_points_;
};

enum class KernelKind { W, W_hat, V_hat };

/// W_N = kappa_N^d W_1(kappa_N x), W_hat_N = kappa_hat_N^d W_1(kappa_hat_N x) and
/// V_hat_N = W_N * W_hat_N for the standard Gaussian W_1.
class MollifierFamily {
 public:
  static constexpr const char* kGaussian = "gaussian";

  explicit MollifierFamily(const ScalingParams& s);
  MollifierFamily(int d, double kappa_N, double kappa_hat_N);

  int dim() const { return d_; }
  double kappa_N() const { return kappa_N_; }
  double kappa_hat_N() const { return kappa_hat_N_; }
  const std::string& w1_kind() const { return w1_kind_; }

  double w1(std::span<const double> x) const;
  /// Fourier transform of W_1, int W_1(x) e^{-i xi.x} dx = exp(-|xi|^2 / 2).
  double w1_fourier(double abs_xi) const;

  double eval(std::span<const double> x, KernelKind which) const;
  double fourier(double abs_xi, KernelKind which) const;
  /// Per-axis standard deviation of the kernel.
  double std_dev(KernelKind which) const;

 private:
  int d_;
  double kappa_N_;
  double kappa_hat_N_;
  std::string w1_kind_ = kGaussian;
};

inline double w_n_eval(const MollifierFamily& fam, std::span<const double> x, KernelKind which) {
  return fam.eval(x, which);
}

/// Radial profile of grad^beta V_hat_N on R^d: grad^beta V_hat_N(x) = P(|x|) x/|x|.
/// Closed form through the confluent hypergeometric function.
double free_space_force_profile(const MollifierFamily& fam, double beta, double r);

/// Tabulated interaction force grad^beta V_hat_N on the torus [-L/2, L/2)^d,
/// i.e. the periodized kernel whose Fourier coefficients are
/// i xi |xi|^{beta-1} F(W_N)(xi) F(W_hat_N)(xi). Displacements are reduced by the
/// minimum-image convention.
class InteractionForce {
 public:
  /// `samples` is the number of table intervals on [0, L/2] per axis.
  InteractionForce(const MollifierFamily& fam, double beta, double L, int samples = 4096);

  int dim() const { return table_grid_.dim(); }
  double length() const { return table_grid_.length(); }
  double beta() const { return beta_; }
  const PeriodicGrid& table_grid() const { return table_grid_; }

  /// Force at displacement dx (d entries) written to out (d entries).
  void operator()(std::span<const double> dx, std::span<double> out) const;
  /// d = 1 only: signed profile, odd in x.
  double eval_1d(double dx) const;
  /// Radius beyond which the tabulated profile is below 1e-12 of its peak and
  /// the force is reported as zero.
  double cutoff_radius() const { return cutoff_; }
  double peak() const { return peak_; }

  /// CSV with columns r, profile (d = 1: r in [0, L/2]; d >= 2: along axis 0).
  void write_csv(std::ostream& os) const;

 private:
  PeriodicGrid table_grid_;
  double beta_;
  std::vector<std::vector<double>> components_;
  double peak_ = 0.0;
  double cutoff_ = 0.0;
};

/// Spectral convolution of a gridded field with W_N, W_hat_N or V_hat_N.
std::vector<double> mollify(const MollifierFamily& fam, KernelKind which, const PeriodicGrid& grid,
                            std::span<const double> field);

/// Deposits point masses of equal weight and convolves spectrally with the
/// kernel: returns (weight * sum_j delta_{X_j}) * K on the grid nodes.
/// Throws UnderResolvedError when the kernel has fewer than 4 nodes per
/// standard deviation.
std::vector<double> mollify_points(const MollifierFamily& fam, KernelKind which, const PeriodicGrid& grid,
                                   std::span<const double> positions, double weight);

/// Throws UnderResolvedError unless std_dev(which) >= 4 h.
void require_resolved(const MollifierFamily& fam, KernelKind which, const PeriodicGrid& grid);

struct MollifierRateRow {
  std::uint64_t N;
  double kappa_hat_N;
  double error;        ///< ||f * W_hat_N - f||_2
  double bound_scale;  ///< kappa_hat_N^{-1} ||grad f||_2
  double ratio() const { return bound_scale > 0.0 ? error / bound_scale : 0.0; }
};

/// Measures ||f * W_hat_N - f||_2 against kappa_hat_N^{-1} ||grad f||_2 for each N.
std::vector<MollifierRateRow> mollifier_rate_check(const PeriodicGrid& grid, std::span<const double> f,
                                                   const ScalingParams& scaling_template,
                                                   std::span<const std::uint64_t> N_list);

}  // namespace fraclab
