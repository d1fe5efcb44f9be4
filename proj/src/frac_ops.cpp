#include "fraclab/frac_ops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fraclab {

SpectralOperators::SpectralOperators(const PeriodicGrid& grid)
    : fft_(grid), size_(grid.spectral_size()) {
  const int d = grid.dim();
  const int M = grid.points();
  abs_xi_.resize(size_);
  xi_odd_.assign(size_ * static_cast<std::size_t>(d), 0.0);
  hermitian_weight_.resize(size_);
  dealias_mask_.resize(size_);
  const int cutoff = M / 3;
  grid.for_each_mode([&](std::size_t idx, const std::array<int, PeriodicGrid::kMaxDim>& k) {
    double r2 = 0.0;
    bool keep = true;
    for (int a = 0; a < d; ++a) {
      const double x = grid.xi(k[a]);
      r2 += x * x;
      if (!grid.is_nyquist(k[a])) xi_odd_[static_cast<std::size_t>(a) * size_ + idx] = x;
      if (std::abs(k[a]) > cutoff) keep = false;
    }
    abs_xi_[idx] = std::sqrt(r2);
    const int j = k[d - 1];
    hermitian_weight_[idx] = (j == 0 || j == M / 2) ? 1.0 : 2.0;
    dealias_mask_[idx] = keep ? 1 : 0;
  });
}

void SpectralOperators::scale_by_power(Spectrum& s, double p) const {
  for (std::size_t i = 0; i < size_; ++i) {
    const double r = abs_xi_[i];
    s[i] *= (r > 0.0) ? std::pow(r, p) : 0.0;
  }
}

void SpectralOperators::dealias(Spectrum& s) const {
  for (std::size_t i = 0; i < size_; ++i) {
    if (!dealias_mask_[i]) s[i] = 0.0;
  }
}

void require_finite(std::span<const double> f, const char* what) {
  for (double v : f) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input");
  }
}

namespace {

void check_size(const PeriodicGrid& grid, std::span<const double> f, const char* what) {
  if (f.size() != grid.size()) throw std::invalid_argument(std::string(what) + ": size does not match grid");
}

}  // namespace

std::vector<double> frac_laplacian(const PeriodicGrid& grid, std::span<const double> f, double s) {
  check_size(grid, f, "frac_laplacian");
  if (!(s > 0.0)) throw std::invalid_argument("frac_laplacian: order s must be positive");
  require_finite(f, "frac_laplacian");
  SpectralOperators ops(grid);
  auto spec = ops.forward(f);
  ops.scale_by_power(spec, 2.0 * s);
  return ops.inverse(spec);
}

std::vector<std::vector<double>> frac_gradient(const PeriodicGrid& grid, std::span<const double> f,
                                               double beta) {
  check_size(grid, f, "frac_gradient");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("frac_gradient: beta must lie in (0,1)");
  require_finite(f, "frac_gradient");
  SpectralOperators ops(grid);
  auto spec = ops.forward(f);
  ops.scale_by_power(spec, beta - 1.0);
  std::vector<std::vector<double>> out;
  const Complex I(0.0, 1.0);
  for (int a = 0; a < grid.dim(); ++a) {
    Spectrum comp(spec.size());
    const auto xi = ops.xi_odd(a);
    for (std::size_t i = 0; i < spec.size(); ++i) comp[i] = I * xi[i] * spec[i];
    out.push_back(ops.inverse(comp));
  }
  return out;
}

std::vector<double> riesz_potential(const PeriodicGrid& grid, std::span<const double> f, double kappa) {
  check_size(grid, f, "riesz_potential");
  if (!(kappa > 0.0)) throw std::invalid_argument("riesz_potential: kappa must be positive");
  if (!(grid.dim() > 2.0 * kappa)) throw std::invalid_argument("riesz_potential: requires d > 2 kappa");
  require_finite(f, "riesz_potential");
  SpectralOperators ops(grid);
  auto spec = ops.forward(f);
  ops.scale_by_power(spec, -2.0 * kappa);
  return ops.inverse(spec);
}

double h_alpha_seminorm(const PeriodicGrid& grid, std::span<const double> f, double alpha) {
  check_size(grid, f, "h_alpha_seminorm");
  SpectralOperators ops(grid);
  const auto spec = ops.forward(f);
  const auto r = ops.abs_xi();
  const double e = ops.weighted_energy(spec, [&](std::size_t i) { return r[i] > 0.0 ? std::pow(r[i], 2.0 * alpha) : 0.0; });
  return std::sqrt(e * grid.cell_volume() / static_cast<double>(grid.size()));
}

double l2_norm(const PeriodicGrid& grid, std::span<const double> f) {
  check_size(grid, f, "l2_norm");
  double acc = 0.0;
  for (double v : f) acc += v * v;
  return std::sqrt(acc * grid.cell_volume());
}

double l2_norm(const Field& f) {
  double acc = 0.0;
  for (int i = 0; i < f.species(); ++i) {
    const double n = l2_norm(f.grid(), f.component(i));
    acc += n * n;
  }
  return std::sqrt(acc);
}

double spectral_l2_norm(const PeriodicGrid& grid, std::span<const double> f) {
  check_size(grid, f, "spectral_l2_norm");
  SpectralOperators ops(grid);
  const auto spec = ops.forward(f);
  const double e = ops.weighted_energy(spec, [](std::size_t) { return 1.0; });
  return std::sqrt(e * grid.cell_volume() / static_cast<double>(grid.size()));
}

double integrate(const PeriodicGrid& grid, std::span<const double> f) {
  check_size(grid, f, "integrate");
  double acc = 0.0;
  for (double v : f) acc += v;
  return acc * grid.cell_volume();
}

}  // namespace fraclab
