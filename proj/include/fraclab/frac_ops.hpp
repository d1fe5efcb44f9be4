#pragma once

#include <array>
#include <span>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Precomputed wavevectors for Fourier-multiplier operators on one grid.
/// Odd (derivative-type) multipliers use xi_odd(), which is zero on the
/// Nyquist plane of the axis so that real fields map to real fields.
class SpectralOperators {
 public:
  explicit SpectralOperators(const PeriodicGrid& grid);

  const PeriodicGrid& grid() const { return fft_.grid(); }
  const FourierTransform& fft() const { return fft_; }

  std::span<const double> abs_xi() const { return abs_xi_; }
  std::span<const double> xi_odd(int axis) const {
    return std::span<const double>(xi_odd_).subspan(static_cast<std::size_t>(axis) * size_, size_);
  }
  /// Largest |k|, per axis, kept by the 2/3 dealiasing rule.
  int dealias_cutoff() const { return grid().points() / 3; }
  std::span<const unsigned char> dealias_mask() const { return dealias_mask_; }

  Spectrum forward(std::span<const double> f) const { return fft_.forward(f); }
  std::vector<double> inverse(std::span<const Complex> s) const { return fft_.inverse(s); }

  /// Multiplies every coefficient by |xi|^p (the zero mode is set to 0 when p <= 0).
  void scale_by_power(Spectrum& s, double p) const;
  /// Zeroes every coefficient with |k_a| > M/3 on some axis.
  void dealias(Spectrum& s) const;

  /// sum over the full (Hermitian) spectrum of w(idx) |X_idx|^2.
  template <class Weight>
  double weighted_energy(std::span<const Complex> s, Weight&& w) const;

 private:
  FourierTransform fft_;
  std::size_t size_;
  std::vector<double> abs_xi_;
  std::vector<double> xi_odd_;
  std::vector<double> hermitian_weight_;
  std::vector<unsigned char> dealias_mask_;
};

template <class Weight>
double SpectralOperators::weighted_energy(std::span<const Complex> s, Weight&& w) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size_; ++i) acc += hermitian_weight_[i] * w(i) * std::norm(s[i]);
  return acc;
}

/// (-Delta)^s f, Fourier symbol |xi|^{2s}. Requires s > 0 and finite f.
std::vector<double> frac_laplacian(const PeriodicGrid& grid, std::span<const double> f, double s);

/// grad^beta f = grad (-Delta)^{(beta-1)/2} f, symbol i xi |xi|^{beta-1}; one
/// output vector per axis.
std::vector<std::vector<double>> frac_gradient(const PeriodicGrid& grid, std::span<const double> f,
                                               double beta);

/// (-Delta)^{-kappa} f, symbol |xi|^{-2 kappa}. The zero mode is discarded, so
/// the result is the potential of f - mean(f). Requires 0 < 2 kappa < d.
std::vector<double> riesz_potential(const PeriodicGrid& grid, std::span<const double> f, double kappa);

/// ||(-Delta)^{alpha/2} f||_2 by Parseval. This is the Fourier form of the
/// H^alpha seminorm; it differs from the Gagliardo double integral by a
/// dimensional constant.
double h_alpha_seminorm(const PeriodicGrid& grid, std::span<const double> f, double alpha);

/// Trapezoidal L2 norm (exact for trigonometric polynomials on the grid).
double l2_norm(const PeriodicGrid& grid, std::span<const double> f);
/// Root of the sum over species of squared L2 norms.
double l2_norm(const Field& f);
/// The same L2 norm evaluated on the spectral side.
double spectral_l2_norm(const PeriodicGrid& grid, std::span<const double> f);

/// Integral of f over the torus (trapezoidal rule).
double integrate(const PeriodicGrid& grid, std::span<const double> f);

/// Throws std::invalid_argument if any value is NaN or infinite.
void require_finite(std::span<const double> f, const char* what);

}  // namespace fraclab
