#include "fraclab/nufft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fraclab {

namespace {

constexpr int kSpread = 12;          // nodes on each side of a point
constexpr int kOversample = 2;

}  // namespace

Spectrum point_measure_spectrum(const PeriodicGrid& grid, std::span<const double> positions,
                                std::span<const double> weights) {
  const int d = grid.dim();
  const int M = grid.points();
  const int Mr = kOversample * M;
  if (positions.size() % static_cast<std::size_t>(d) != 0) {
    throw std::invalid_argument("point_measure_spectrum: positions size not a multiple of d");
  }
  const std::size_t npts = positions.size() / static_cast<std::size_t>(d);
  if (!weights.empty() && weights.size() != npts) {
    throw std::invalid_argument("point_measure_spectrum: weight count mismatch");
  }

  const double two_pi = 2.0 * std::numbers::pi;
  const double tau = std::numbers::pi * kSpread / (static_cast<double>(M) * M * kOversample * (kOversample - 0.5));
  const double hr = two_pi / Mr;
  const double L = grid.length();

  const PeriodicGrid fine(d, L, Mr);
  const std::size_t Ms = static_cast<std::size_t>(Mr);
  std::vector<double> spread(fine.size(), 0.0);

  std::array<double, 2 * kSpread> ramp{};
  for (int q = 0; q < 2 * kSpread; ++q) {
    const double off = q - (kSpread - 1);
    ramp[q] = std::exp(-off * off * hr * hr / (4.0 * tau));
  }

  std::array<std::array<double, 2 * kSpread>, PeriodicGrid::kMaxDim> w{};
  std::array<std::array<std::size_t, 2 * kSpread>, PeriodicGrid::kMaxDim> idx{};
  for (std::size_t j = 0; j < npts; ++j) {
    const double wj = weights.empty() ? 1.0 : weights[j];
    for (int a = 0; a < d; ++a) {
      const double x = grid.wrap(positions[j * d + a]);
      double theta = two_pi * (x + 0.5 * L) / L;
      if (theta >= two_pi) theta -= two_pi;
      const int c = static_cast<int>(std::floor(theta / hr));
      const double delta = theta - c * hr;  // in [0, hr)
      // exp(-(delta - off hr)^2 / 4tau) = exp(-delta^2/4tau) exp(off delta hr / 2tau) ramp(off)
      const double e0 = std::exp(-delta * delta / (4.0 * tau));
      const double step = std::exp(delta * hr / (2.0 * tau));
      double geo = std::pow(step, -(kSpread - 1));
      for (int q = 0; q < 2 * kSpread; ++q) {
        w[a][q] = e0 * geo * ramp[q];
        geo *= step;
        idx[a][q] = static_cast<std::size_t>(((c - (kSpread - 1) + q) % Mr + Mr) % Mr);
      }
    }
    if (d == 1) {
      for (int q = 0; q < 2 * kSpread; ++q) spread[idx[0][q]] += wj * w[0][q];
    } else if (d == 2) {
      for (int p = 0; p < 2 * kSpread; ++p) {
        const double wp = wj * w[0][p];
        double* row = spread.data() + idx[0][p] * Ms;
        for (int q = 0; q < 2 * kSpread; ++q) row[idx[1][q]] += wp * w[1][q];
      }
    } else {
      for (int p = 0; p < 2 * kSpread; ++p) {
        for (int q = 0; q < 2 * kSpread; ++q) {
          const double wpq = wj * w[0][p] * w[1][q];
          double* row = spread.data() + (idx[0][p] * Ms + idx[1][q]) * Ms;
          for (int r = 0; r < 2 * kSpread; ++r) row[idx[2][r]] += wpq * w[2][r];
        }
      }
    }
  }

  const FourierTransform fft(fine);
  const Spectrum big = fft.forward(spread);

  // Per-axis deconvolution: (2 pi / Mr) e^{k^2 tau} / sqrt(4 pi tau).
  const double pref = hr / std::sqrt(4.0 * std::numbers::pi * tau);
  Spectrum out(grid.spectral_size());
  const std::size_t half_big = static_cast<std::size_t>(Mr / 2 + 1);
  grid.for_each_mode([&](std::size_t i, const std::array<int, PeriodicGrid::kMaxDim>& k) {
    double factor = 1.0;
    std::size_t bi = 0;
    for (int a = 0; a < d; ++a) {
      factor *= pref * std::exp(static_cast<double>(k[a]) * k[a] * tau);
      if (a < d - 1) {
        bi = bi * Ms + static_cast<std::size_t>(k[a] < 0 ? k[a] + Mr : k[a]);
      } else {
        bi = bi * half_big + static_cast<std::size_t>(k[a]);
      }
    }
    out[i] = factor * big[bi];
  });
  return out;
}

}  // namespace fraclab
