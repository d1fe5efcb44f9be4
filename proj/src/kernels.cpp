#include "fraclab/kernels.hpp"

#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "fraclab/frac_ops.hpp"
#include "fraclab/nufft.hpp"

namespace fraclab {

MollifierFamily::MollifierFamily(const ScalingParams& s) : d_(s.d) {
  const auto scales = derived_scales(s);
  kappa_N_ = scales.kappa_N;
  kappa_hat_N_ = scales.kappa_hat_N;
}

MollifierFamily::MollifierFamily(int d, double kappa_N, double kappa_hat_N)
    : d_(d), kappa_N_(kappa_N), kappa_hat_N_(kappa_hat_N) {
  if (d < 1) throw std::invalid_argument("MollifierFamily: d must be positive");
  if (!(kappa_N > 0.0) || !(kappa_hat_N > 0.0)) {
    throw std::invalid_argument("MollifierFamily: kernel scales must be positive");
  }
}

double MollifierFamily::w1(std::span<const double> x) const {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::pow(2.0 * std::numbers::pi, -0.5 * d_) * std::exp(-0.5 * r2);
}

double MollifierFamily::w1_fourier(double abs_xi) const { return std::exp(-0.5 * abs_xi * abs_xi); }

double MollifierFamily::std_dev(KernelKind which) const {
  switch (which) {
    case KernelKind::W:
      return 1.0 / kappa_N_;
    case KernelKind::W_hat:
      return 1.0 / kappa_hat_N_;
    case KernelKind::V_hat:
      return std::sqrt(1.0 / (kappa_N_ * kappa_N_) + 1.0 / (kappa_hat_N_ * kappa_hat_N_));
  }
  return 0.0;
}

double MollifierFamily::eval(std::span<const double> x, KernelKind which) const {
  // All three kernels are centred Gaussians; V_hat_N has the summed variance.
  const double sd = std_dev(which);
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::pow(2.0 * std::numbers::pi * sd * sd, -0.5 * d_) * std::exp(-0.5 * r2 / (sd * sd));
}

double MollifierFamily::fourier(double abs_xi, KernelKind which) const {
  const double sd = std_dev(which);
  return std::exp(-0.5 * sd * sd * abs_xi * abs_xi);
}

double free_space_force_profile(const MollifierFamily& fam, double beta, double r) {
  if (r == 0.0) return 0.0;
  r = std::abs(r);
  const double d = fam.dim();
  const double s = std::pow(fam.std_dev(KernelKind::V_hat), 2);
  const double nu = 0.5 * d;
  const double a = 0.5 * (d + beta + 1.0);
  // P(r) = -(2 pi)^{-d/2} r^{1-d/2} int_0^inf k^{d/2+beta} J_{d/2}(k r) e^{-s k^2/2} dk
  const double pref = std::pow(2.0 * std::numbers::pi, -nu) * std::tgamma(a) /
                      (std::pow(2.0, nu + 1.0) * std::pow(0.5 * s, a) * std::tgamma(nu + 1.0));
  const double hyp = boost::math::hypergeometric_1F1(a, nu + 1.0, -r * r / (2.0 * s));
  return -pref * r * hyp;
}

namespace {

int next_pow2(double x) {
  const auto v = static_cast<unsigned long>(std::max(4.0, std::ceil(x)));
  return static_cast<int>(std::bit_ceil(v));
}

}  // namespace

InteractionForce::InteractionForce(const MollifierFamily& fam, double beta, double L, int samples)
    : table_grid_(fam.dim(), L, 4), beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("InteractionForce: beta must lie in (0,1)");
  const int d = fam.dim();
  const double sd = fam.std_dev(KernelKind::V_hat);
  // Spectral support: exp(-sd^2 xi^2 / 2) < e^-50 beyond xi = 10/sd.
  int M = next_pow2(10.0 * L / (std::numbers::pi * sd));
  if (d == 1) {
    M = std::max(M, 2 * samples);
  } else {
    const int cap = d == 2 ? 1024 : 128;
    M = std::clamp(std::max(M, next_pow2(8.0 * L / sd)), 64, cap);
  }
  table_grid_ = PeriodicGrid(d, L, M);

  SpectralOperators ops(table_grid_);
  const double inv_cell = 1.0 / table_grid_.cell_volume();
  const auto r = ops.abs_xi();
  const Complex I(0.0, 1.0);
  for (int a = 0; a < d; ++a) {
    const auto xi = ops.xi_odd(a);
    Spectrum spec(table_grid_.spectral_size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
      spec[i] = r[i] > 0.0 ? I * xi[i] * std::pow(r[i], beta - 1.0) * fam.fourier(r[i], KernelKind::V_hat) * inv_cell
                           : Complex(0.0);
    }
    // Slot m of the inverse transform holds the displacement m h.
    components_.push_back(ops.inverse(spec));
  }

  // The kernel is odd; symmetrize away round-off so the self term is exactly 0.
  {
    const std::size_t Ms = static_cast<std::size_t>(M);
    for (auto& c : components_) {
      std::vector<double> odd(c.size());
      for (std::size_t idx = 0; idx < c.size(); ++idx) {
        std::size_t rest = idx, neg = 0, stride = 1;
        for (int a = 0; a < d; ++a) {
          const std::size_t m = rest % Ms;
          rest /= Ms;
          neg += ((Ms - m) % Ms) * stride;
          stride *= Ms;
        }
        odd[idx] = 0.5 * (c[idx] - c[neg]);
      }
      c = std::move(odd);
    }
  }

  for (const auto& c : components_) {
    for (double v : c) peak_ = std::max(peak_, std::abs(v));
  }
  const double h = table_grid_.spacing();
  const std::size_t Ms = static_cast<std::size_t>(M);
  cutoff_ = 0.0;
  for (std::size_t idx = 0; idx < table_grid_.size(); ++idx) {
    double mag2 = 0.0;
    for (const auto& c : components_) mag2 += c[idx] * c[idx];
    if (std::sqrt(mag2) < 1e-12 * peak_) continue;
    double r2 = 0.0;
    std::size_t rest = idx;
    for (int a = d - 1; a >= 0; --a) {
      const auto m = static_cast<long>(rest % Ms);
      rest /= Ms;
      const double x = (m <= M / 2 ? m : m - M) * h;
      r2 += x * x;
    }
    cutoff_ = std::max(cutoff_, std::sqrt(r2));
  }
}

void InteractionForce::operator()(std::span<const double> dx, std::span<double> out) const {
  const int d = table_grid_.dim();
  const double half = 0.5 * table_grid_.length();
  std::array<double, PeriodicGrid::kMaxDim> w{};
  double r2 = 0.0;
  for (int a = 0; a < d; ++a) {
    w[a] = table_grid_.wrap(dx[a]);
    r2 += w[a] * w[a];
  }
  if (std::sqrt(r2) > cutoff_) {
    for (int a = 0; a < d; ++a) out[a] = 0.0;
    return;
  }
  // Evaluate on one half-space and reflect, so F(-x) = -F(x) holds bit for bit.
  double sign = 1.0;
  for (int a = 0; a < d; ++a) {
    if (w[a] != 0.0) {
      sign = w[a] < 0.0 ? -1.0 : 1.0;
      break;
    }
  }
  std::array<double, PeriodicGrid::kMaxDim> p{};
  for (int a = 0; a < d; ++a) p[a] = sign * w[a] - half;  // node(m) = -L/2 + m h stores displacement m h
  for (int a = 0; a < d; ++a) {
    out[a] = sign * interpolate_cubic(table_grid_, components_[a], std::span<const double>(p.data(), d));
  }
}

double InteractionForce::eval_1d(double dx) const {
  if (table_grid_.dim() != 1) throw std::logic_error("InteractionForce::eval_1d requires d = 1");
  double out = 0.0;
  (*this)(std::span<const double>(&dx, 1), std::span<double>(&out, 1));
  return out;
}

void InteractionForce::write_csv(std::ostream& os) const {
  os << "r,profile\n";
  os.precision(17);
  const int M = table_grid_.points();
  const double h = table_grid_.spacing();
  const std::size_t stride = table_grid_.size() / static_cast<std::size_t>(M);
  for (int m = 0; m <= M / 2; ++m) {
    os << m * h << ',' << components_[0][static_cast<std::size_t>(m) * stride] << '\n';
  }
}

// ---------------------------------------------------------------------------

void require_resolved(const MollifierFamily& fam, KernelKind which, const PeriodicGrid& grid) {
  const double sd = fam.std_dev(which);
  const double h = grid.spacing();
  if (sd < 4.0 * h) {
    const int need = next_pow2(4.0 * grid.length() / sd);
    throw UnderResolvedError("kernel standard deviation " + std::to_string(sd) + " is below 4 grid spacings (h = " +
                                 std::to_string(h) + "); need M >= " + std::to_string(need),
                             need);
  }
}

std::vector<double> mollify(const MollifierFamily& fam, KernelKind which, const PeriodicGrid& grid,
                            std::span<const double> field) {
  if (field.size() != grid.size()) throw std::invalid_argument("mollify: field size does not match grid");
  // A Fourier multiplier is exact at any kernel width, so no resolution check here.
  SpectralOperators ops(grid);
  auto spec = ops.forward(field);
  const auto r = ops.abs_xi();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= fam.fourier(r[i], which);
  return ops.inverse(spec);
}

std::vector<double> mollify_points(const MollifierFamily& fam, KernelKind which, const PeriodicGrid& grid,
                                   std::span<const double> positions, double weight) {
  require_resolved(fam, which, grid);
  if (positions.empty()) return std::vector<double>(grid.size(), 0.0);
  SpectralOperators ops(grid);
  auto spec = point_measure_spectrum(grid, positions);
  const auto r = ops.abs_xi();
  const double scale = weight / grid.cell_volume();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= scale * fam.fourier(r[i], which);
  return ops.inverse(spec);
}

std::vector<MollifierRateRow> mollifier_rate_check(const PeriodicGrid& grid, std::span<const double> f,
                                                   const ScalingParams& scaling_template,
                                                   std::span<const std::uint64_t> N_list) {
  SpectralOperators ops(grid);
  const auto spec = ops.forward(f);
  const auto r = ops.abs_xi();
  const double grad_l2 = std::sqrt(ops.weighted_energy(spec, [&](std::size_t i) { return r[i] * r[i]; }) *
                                   grid.cell_volume() / static_cast<double>(grid.size()));
  std::vector<MollifierRateRow> rows;
  for (auto N : N_list) {
    ScalingParams s = scaling_template;
    s.N = N;
    s.d = grid.dim();
    const MollifierFamily fam(s);
    auto smoothed = mollify(fam, KernelKind::W_hat, grid, f);
    for (std::size_t k = 0; k < smoothed.size(); ++k) smoothed[k] -= f[k];
    rows.push_back({N, fam.kappa_hat_N(), l2_norm(grid, smoothed), grad_l2 / fam.kappa_hat_N()});
  }
  return rows;
}

}  // namespace fraclab
