#include "fraclab/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace fraclab {

PeriodicGrid::PeriodicGrid(int d, double L, int M) : d_(d), L_(L), M_(M) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("PeriodicGrid: dimension must be 1, 2 or 3");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("PeriodicGrid: L must be positive");
  if (M < 4 || M % 2 != 0) throw std::invalid_argument("PeriodicGrid: M must be even and >= 4");
  size_ = 1;
  for (int a = 0; a < d; ++a) size_ *= static_cast<std::size_t>(M);
  spectral_size_ = size_ / static_cast<std::size_t>(M) * static_cast<std::size_t>(M / 2 + 1);
}

double PeriodicGrid::cell_volume() const { return std::pow(spacing(), d_); }
double PeriodicGrid::volume() const { return std::pow(L_, d_); }

double PeriodicGrid::xi(int k) const { return 2.0 * std::numbers::pi * k / L_; }

double PeriodicGrid::wrap(double x) const {
  double y = x + 0.5 * L_;
  y -= L_ * std::floor(y / L_);
  if (y >= L_) y -= L_;  // floor round-off
  return y - 0.5 * L_;
}

std::array<int, PeriodicGrid::kMaxDim> PeriodicGrid::wavenumbers(std::size_t index) const {
  const std::size_t half = static_cast<std::size_t>(M_ / 2 + 1);
  std::array<int, kMaxDim> k{0, 0, 0};
  k[d_ - 1] = static_cast<int>(index % half);
  index /= half;
  for (int a = d_ - 2; a >= 0; --a) {
    k[a] = signed_k(static_cast<int>(index % static_cast<std::size_t>(M_)));
    index /= static_cast<std::size_t>(M_);
  }
  return k;
}

// ---------------------------------------------------------------------------

struct FourierTransform::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const FourierTransform::Plans> shared_plans(int d, int M) {
  static std::map<std::pair<int, int>, std::shared_ptr<const FourierTransform::Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(d, M);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  int dims[PeriodicGrid::kMaxDim] = {M, M, M};
  std::size_t n_real = 1;
  for (int a = 0; a < d; ++a) n_real *= static_cast<std::size_t>(M);
  const std::size_t n_cplx = n_real / static_cast<std::size_t>(M) * static_cast<std::size_t>(M / 2 + 1);

  double* r = fftw_alloc_real(n_real);
  fftw_complex* c = fftw_alloc_complex(n_cplx);
  auto plans = std::make_shared<FourierTransform::Plans>();
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans->r2c = fftw_plan_dft_r2c(d, dims, r, c, flags);
  plans->c2r = fftw_plan_dft_c2r(d, dims, c, r, flags | FFTW_DESTROY_INPUT);
  fftw_free(r);
  fftw_free(c);
  if (!plans->r2c || !plans->c2r) throw std::runtime_error("FFTW planning failed");
  cache.emplace(key, plans);
  return plans;
}

}  // namespace

FourierTransform::FourierTransform(const PeriodicGrid& grid)
    : grid_(grid), plans_(shared_plans(grid.dim(), grid.points())) {}

Spectrum FourierTransform::forward(std::span<const double> f) const {
  if (f.size() != grid_.size()) throw std::invalid_argument("FourierTransform::forward: size mismatch");
  std::vector<double> in(f.begin(), f.end());
  Spectrum out(grid_.spectral_size());
  fftw_execute_dft_r2c(plans_->r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> FourierTransform::inverse(std::span<const Complex> spectrum) const {
  if (spectrum.size() != grid_.spectral_size()) {
    throw std::invalid_argument("FourierTransform::inverse: size mismatch");
  }
  Spectrum in(spectrum.begin(), spectrum.end());
  std::vector<double> out(grid_.size());
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (double& v : out) v *= scale;
  return out;
}

// ---------------------------------------------------------------------------

Field::Field(const PeriodicGrid& grid, int n) : grid_(grid), n_(n), values_(grid.size() * static_cast<std::size_t>(n), 0.0) {
  if (n < 1) throw std::invalid_argument("Field: species count must be positive");
}

Field::Field(const PeriodicGrid& grid, int n, std::vector<double> values)
    : grid_(grid), n_(n), values_(std::move(values)) {
  if (n < 1) throw std::invalid_argument("Field: species count must be positive");
  if (values_.size() != grid.size() * static_cast<std::size_t>(n)) {
    throw std::invalid_argument("Field: value count does not match n * M^d");
  }
}

std::span<double> Field::component(int i) {
  return std::span<double>(values_).subspan(static_cast<std::size_t>(i) * grid_.size(), grid_.size());
}

std::span<const double> Field::component(int i) const {
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(i) * grid_.size(), grid_.size());
}

bool Field::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Field operator-(const Field& a, const Field& b) {
  if (a.grid() != b.grid() || a.species() != b.species()) {
    throw std::invalid_argument("Field difference: mismatched grids or species counts");
  }
  std::vector<double> v(a.values().size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a.values()[k] - b.values()[k];
  return Field(a.grid(), a.species(), std::move(v));
}

}  // namespace fraclab

namespace fraclab {

namespace {

// Lagrange weights for nodes at offsets -1, 0, 1, 2 and fractional position t in [0,1).
inline std::array<double, 4> cubic_weights(double t) {
  return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
          -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

}  // namespace

double interpolate_cubic(const PeriodicGrid& grid, std::span<const double> values, std::span<const double> x) {
  const int d = grid.dim();
  const int M = grid.points();
  const double h = grid.spacing();
  std::array<std::array<double, 4>, PeriodicGrid::kMaxDim> w{};
  std::array<std::array<int, 4>, PeriodicGrid::kMaxDim> idx{};
  for (int a = 0; a < d; ++a) {
    const double s = (grid.wrap(x[a]) + 0.5 * grid.length()) / h;
    double base = std::floor(s);
    const double t = s - base;
    const int b = static_cast<int>(base);
    w[a] = cubic_weights(t);
    for (int q = 0; q < 4; ++q) idx[a][q] = ((b - 1 + q) % M + M) % M;
  }
  const std::size_t Ms = static_cast<std::size_t>(M);
  if (d == 1) {
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) acc += w[0][q] * values[idx[0][q]];
    return acc;
  }
  if (d == 2) {
    double acc = 0.0;
    for (int p = 0; p < 4; ++p) {
      double row = 0.0;
      for (int q = 0; q < 4; ++q) row += w[1][q] * values[idx[0][p] * Ms + idx[1][q]];
      acc += w[0][p] * row;
    }
    return acc;
  }
  double acc = 0.0;
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      double row = 0.0;
      for (int r = 0; r < 4; ++r) row += w[2][r] * values[(idx[0][p] * Ms + idx[1][q]) * Ms + idx[2][r]];
      acc += w[0][p] * w[1][q] * row;
    }
  }
  return acc;
}

}  // namespace fraclab
