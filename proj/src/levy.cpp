#include "fraclab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fraclab {

void validate(const StableParams& p) {
  if (!(p.alpha > 0.5 && p.alpha < 1.0)) throw std::invalid_argument("StableParams: alpha must lie in (1/2, 1)");
  if (p.d < 1) throw std::invalid_argument("StableParams: d must be positive");
  if (!(p.sigma > 0.0)) throw std::invalid_argument("StableParams: sigma must be positive");
  if (!(p.dt > 0.0)) throw std::invalid_argument("StableParams: dt must be positive");
  if (p.jump_cap < 0.0) throw std::invalid_argument("StableParams: jump_cap must be >= 0");
}

double sample_symmetric_stable(double a, RngStream& rng) {
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  if (a == 2.0) return 2.0 * std::sqrt(w) * std::sin(v);
  return std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) * std::pow(std::cos(v - a * v) / w, (1.0 - a) / a);
}

double sample_positive_stable(double a, RngStream& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  return std::sin(a * u) / std::pow(std::sin(u), 1.0 / a) * std::pow(std::sin((1.0 - a) * u) / e, (1.0 - a) / a);
}

namespace {

void apply_cap(double cap, std::span<double> out) {
  if (cap <= 0.0) return;
  double r2 = 0.0;
  for (double v : out) r2 += v * v;
  const double r = std::sqrt(r2);
  if (r > cap) {
    for (double& v : out) v *= cap / r;
  }
}

}  // namespace

void sample_increment_subordinated(const StableParams& p, RngStream& rng, std::span<double> out) {
  const double S = std::pow(p.sigma * p.dt, 1.0 / p.alpha) * sample_positive_stable(p.alpha, rng);
  const double scale = std::sqrt(2.0 * S);
  for (int a = 0; a < p.d; ++a) out[a] = scale * rng.normal();
  apply_cap(p.jump_cap, out);
}

void sample_increment(const StableParams& p, RngStream& rng, std::span<double> out) {
  if (p.d == 1) {
    const double index = 2.0 * p.alpha;
    out[0] = std::pow(p.sigma * p.dt, 1.0 / index) * sample_symmetric_stable(index, rng);
    apply_cap(p.jump_cap, out);
    return;
  }
  sample_increment_subordinated(p, rng, out);
}

CharFunctionEstimate empirical_char_function(std::span<const double> samples, std::span<const double> xi) {
  if (samples.empty()) throw std::invalid_argument("empirical_char_function: no samples");
  CharFunctionEstimate est;
  const double n = static_cast<double>(samples.size());
  for (double x : xi) {
    double sc = 0.0, sc2 = 0.0, ss = 0.0;
    for (double s : samples) {
      const double c = std::cos(x * s);
      sc += c;
      sc2 += c * c;
      ss += std::sin(x * s);
    }
    const double mean = sc / n;
    const double var = n > 1.0 ? std::max(0.0, (sc2 - n * mean * mean) / (n - 1.0)) : 0.0;
    est.xi.push_back(x);
    est.real.push_back(mean);
    est.imag.push_back(ss / n);
    est.std_err.push_back(std::sqrt(var / n));
  }
  return est;
}

TailFit tail_slope(std::span<const double> samples, double r_lo, double r_hi, int points) {
  if (!(r_lo > 0.0 && r_hi > r_lo) || points < 2) throw std::invalid_argument("tail_slope: bad radius range");
  std::vector<double> mags(samples.size());
  std::transform(samples.begin(), samples.end(), mags.begin(), [](double v) { return std::abs(v); });
  std::sort(mags.begin(), mags.end());
  TailFit fit;
  const double n = static_cast<double>(mags.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (int k = 0; k < points; ++k) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(k) / (points - 1));
    const auto above = static_cast<double>(mags.end() - std::upper_bound(mags.begin(), mags.end(), r));
    const double p = above / n;
    fit.r.push_back(r);
    fit.survival.push_back(p);
    if (p <= 0.0) continue;
    const double x = std::log(r), y = std::log(p);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2) throw std::runtime_error("tail_slope: not enough tail samples");
  fit.slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  return fit;
}

}  // namespace fraclab
