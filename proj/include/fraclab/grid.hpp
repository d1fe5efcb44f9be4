#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fraclab {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

/// Uniform periodic grid on the torus [-L/2, L/2)^d with M nodes per axis.
/// Nodes are x_m = -L/2 + m h with h = L / M. Supported dimensions: 1, 2, 3.
class PeriodicGrid {
 public:
  static constexpr int kMaxDim = 3;

  PeriodicGrid(int d, double L, int M);

  int dim() const { return d_; }
  double length() const { return L_; }
  int points() const { return M_; }
  double spacing() const { return L_ / M_; }
  double cell_volume() const;
  double volume() const;

  /// Number of real nodes, M^d.
  std::size_t size() const { return size_; }
  /// Number of r2c coefficients, M^{d-1} (M/2 + 1).
  std::size_t spectral_size() const { return spectral_size_; }

  double node(int m) const { return -0.5 * L_ + m * spacing(); }
  /// Physical angular wavenumber of integer mode k.
  double xi(int k) const;
  /// Wraps a coordinate into [-L/2, L/2).
  double wrap(double x) const;
  /// Minimum-image displacement in [-L/2, L/2).
  double min_image(double dx) const { return wrap(dx); }

  /// Integer wavenumbers of the spectral coefficient at `index`.
  std::array<int, kMaxDim> wavenumbers(std::size_t index) const;
  bool is_nyquist(int k) const { return k == M_ / 2 || k == -M_ / 2; }

  /// Calls fn(index, k) for every r2c coefficient, k the integer wavevector.
  template <class Fn>
  void for_each_mode(Fn&& fn) const;

  bool operator==(const PeriodicGrid& o) const { return d_ == o.d_ && M_ == o.M_ && L_ == o.L_; }
  bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }

 private:
  int d_;
  double L_;
  int M_;
  std::size_t size_;
  std::size_t spectral_size_;

  int signed_k(int i) const { return i <= M_ / 2 ? i : i - M_; }
};

template <class Fn>
void PeriodicGrid::for_each_mode(Fn&& fn) const {
  const int half = M_ / 2 + 1;
  std::array<int, kMaxDim> k{0, 0, 0};
  std::size_t idx = 0;
  if (d_ == 1) {
    for (int j = 0; j < half; ++j, ++idx) {
      k[0] = j;
      fn(idx, k);
    }
  } else if (d_ == 2) {
    for (int i0 = 0; i0 < M_; ++i0) {
      k[0] = signed_k(i0);
      for (int j = 0; j < half; ++j, ++idx) {
        k[1] = j;
        fn(idx, k);
      }
    }
  } else {
    for (int i0 = 0; i0 < M_; ++i0) {
      k[0] = signed_k(i0);
      for (int i1 = 0; i1 < M_; ++i1) {
        k[1] = signed_k(i1);
        for (int j = 0; j < half; ++j, ++idx) {
          k[2] = j;
          fn(idx, k);
        }
      }
    }
  }
}

/// Real-to-complex FFT on a PeriodicGrid. forward() is the unnormalized DFT
/// X_k = sum_m f_m exp(-2 pi i k.m / M); inverse() includes the 1/M^d factor.
/// Plans are shared per (d, M) and execution is thread-safe.
class FourierTransform {
 public:
  explicit FourierTransform(const PeriodicGrid& grid);

  Spectrum forward(std::span<const double> f) const;
  std::vector<double> inverse(std::span<const Complex> spectrum) const;

  const PeriodicGrid& grid() const { return grid_; }

  struct Plans;

 private:
  PeriodicGrid grid_;
  std::shared_ptr<const Plans> plans_;
};

/// Per-species gridded real fields, stored species-major (n blocks of M^d).
class Field {
 public:
  Field(const PeriodicGrid& grid, int n);
  Field(const PeriodicGrid& grid, int n, std::vector<double> values);

  const PeriodicGrid& grid() const { return grid_; }
  int species() const { return n_; }

  std::span<double> component(int i);
  std::span<const double> component(int i) const;
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const;

 private:
  PeriodicGrid grid_;
  int n_;
  std::vector<double> values_;
};

Field operator-(const Field& a, const Field& b);

}  // namespace fraclab

namespace fraclab {

/// Periodic tensor-product cubic (4-point Lagrange) interpolation of nodal
/// values at an arbitrary point.
double interpolate_cubic(const PeriodicGrid& grid, std::span<const double> values, std::span<const double> x);

}  // namespace fraclab
