#include "fraclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fraclab/frac_ops.hpp"
#include "fraclab/nufft.hpp"
#include "fraclab/parallel.hpp"

namespace fraclab {

PairedTrajectory::PairedTrajectory(std::vector<double> times, std::vector<Field> first, std::vector<Field> second)
    : times_(std::move(times)), first_(std::move(first)), second_(std::move(second)) {
  if (first_.size() != times_.size() || second_.size() != times_.size())
    throw std::invalid_argument("PairedTrajectory: snapshot counts differ");
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (first_[k].grid() != second_[k].grid() || first_[k].species() != second_[k].species())
      throw std::invalid_argument("PairedTrajectory: snapshots live on different grids");
    if (k > 0 && !(times_[k] > times_[k - 1])) throw std::invalid_argument("PairedTrajectory: times must increase");
  }
}

double trajectory_norm(std::span<const double> times, std::span<const Field> diffs, double alpha) {
  if (times.size() != diffs.size() || times.empty())
    throw std::invalid_argument("trajectory_norm: need one difference per time");
  double sup = 0.0, integral = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < diffs.size(); ++k) {
    const auto& f = diffs[k];
    double l2 = 0.0, semi = 0.0;
    for (int i = 0; i < f.species(); ++i) {
      const double n2 = l2_norm(f.grid(), f.component(i));
      const double s2 = h_alpha_seminorm(f.grid(), f.component(i), alpha);
      l2 += n2 * n2;
      semi += s2 * s2;
    }
    sup = std::max(sup, l2);
    if (k > 0) integral += 0.5 * (times[k] - times[k - 1]) * (semi + prev);
    prev = semi;
  }
  return sup + integral;
}

double trajectory_norm(const PairedTrajectory& p, double alpha) {
  std::vector<Field> diffs;
  for (std::size_t k = 0; k < p.size(); ++k) diffs.push_back(p.difference(k));
  return trajectory_norm(p.times(), diffs, alpha);
}

// ---------------------------------------------------------------------------

Measure Measure::from_points(int d, double L, std::span<const double> points, double weight) {
  std::vector<double> w(points.size() / static_cast<std::size_t>(d), weight);
  return from_points(d, L, points, w);
}

Measure Measure::from_points(int d, double L, std::span<const double> points, std::span<const double> weights) {
  if (d < 1 || d > PeriodicGrid::kMaxDim) throw std::invalid_argument("Measure: bad dimension");
  if (points.size() != weights.size() * static_cast<std::size_t>(d))
    throw std::invalid_argument("Measure: one weight per point required");
  Measure m(d, L);
  const PeriodicGrid torus(d, L, 4);
  m.points_.reserve(points.size());
  for (double x : points) m.points_.push_back(torus.wrap(x));
  m.weights_.assign(weights.begin(), weights.end());
  for (double w : m.weights_)
    if (!std::isfinite(w)) throw std::invalid_argument("Measure: weights must be finite");
  return m;
}

Measure Measure::from_density(const PeriodicGrid& grid, std::span<const double> density) {
  if (density.size() != grid.size()) throw std::invalid_argument("Measure: density size does not match grid");
  const int d = grid.dim();
  const auto M = static_cast<std::size_t>(grid.points());
  std::vector<double> pts(grid.size() * static_cast<std::size_t>(d));
  std::vector<double> w(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    std::size_t rest = idx;
    for (int a = d - 1; a >= 0; --a) {
      pts[idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] = grid.node(static_cast<int>(rest % M));
      rest /= M;
    }
    w[idx] = density[idx] * grid.cell_volume();
  }
  return from_points(d, grid.length(), pts, w);
}

double Measure::total_mass() const {
  double s = 0.0;
  for (double w : weights_) s += std::abs(w);
  return s;
}

BlDictionary BlDictionary::standard(int d) {
  BlDictionary b;
  if (d == 2) {
    b.max_mode = 16;
    b.max_tents = 64;
  } else if (d == 3) {
    b.max_mode = 8;
    b.max_tents = 16;
    b.offsets = 8;
  }
  return b;
}

std::vector<int> BlDictionary::tent_ladder() const {
  std::set<int> ms;
  for (double m = 1.0; m <= max_tents + 0.5; m *= ladder_ratio) ms.insert(static_cast<int>(std::lround(m)));
  ms.insert(max_tents);
  return {ms.begin(), ms.end()};
}

namespace {

double mode_value(const Measure& nu1, const Measure& nu2, int K) {
  const int d = nu1.dim();
  // Even grid with M/2 > K carries every mode |k_a| <= K.
  const int M = 2 * (K + 2);
  const PeriodicGrid g(d, nu1.length(), M);
  const auto s1 = point_measure_spectrum(g, nu1.points(), nu1.weights());
  const auto s2 = point_measure_spectrum(g, nu2.points(), nu2.weights());
  double best = 0.0;
  g.for_each_mode([&](std::size_t idx, const std::array<int, 3>& k) {
    double xi2 = 0.0;
    for (int a = 0; a < d; ++a) {
      if (std::abs(k[static_cast<std::size_t>(a)]) > K) return;
      xi2 += g.xi(k[static_cast<std::size_t>(a)]) * g.xi(k[static_cast<std::size_t>(a)]);
    }
    const double c = 1.0 / (1.0 + std::sqrt(xi2));
    best = std::max(best, c * std::abs(s1[idx] - s2[idx]));
  });
  return best;
}

// sum over the lattice of |<nu1 - nu2, T_a>|, each pyramid of height 1.
double lattice_sum(const Measure& nu1, const Measure& nu2, int m, double shift, std::vector<double>& bins) {
  const int d = nu1.dim();
  const double L = nu1.length();
  const double spacing = L / m;
  std::size_t nb = 1;
  for (int a = 0; a < d; ++a) nb *= static_cast<std::size_t>(m);
  bins.assign(nb, 0.0);
  auto deposit = [&](const Measure& nu, double sign) {
    const auto pts = nu.points();
    const auto w = nu.weights();
    for (std::size_t k = 0; k < w.size(); ++k) {
      double far = 0.0;
      std::size_t bin = 0;
      for (int a = 0; a < d; ++a) {
        const double u = (pts[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] + 0.5 * L - shift) / spacing;
        const double j = std::round(u);
        far = std::max(far, std::abs(u - j));
        const long jm = ((static_cast<long>(j) % m) + m) % m;
        bin = bin * static_cast<std::size_t>(m) + static_cast<std::size_t>(jm);
      }
      // far is in units of the spacing 2w; the pyramid reaches 0 at w.
      const double tent = 1.0 - 2.0 * far;
      if (tent > 0.0) bins[bin] += sign * w[k] * tent;
    }
  };
  deposit(nu1, 1.0);
  deposit(nu2, -1.0);
  double s = 0.0;
  for (double b : bins) s += std::abs(b);
  return s;
}

}  // namespace

BlEstimate bl_metric_detail(const Measure& nu1, const Measure& nu2, const BlDictionary& dict) {
  if (nu1.dim() != nu2.dim() || nu1.length() != nu2.length())
    throw std::invalid_argument("bl_metric: measures live on different tori");
  BlEstimate est{0.0, 0.0, 0.0};
  est.best_mode = mode_value(nu1, nu2, dict.max_mode);

  const auto ladder = dict.tent_ladder();
  const std::size_t jobs = ladder.size() * static_cast<std::size_t>(dict.offsets);
  std::vector<double> values(jobs, 0.0);
  parallel_for(jobs, [&](std::size_t job) {
    const int m = ladder[job / static_cast<std::size_t>(dict.offsets)];
    const int o = static_cast<int>(job % static_cast<std::size_t>(dict.offsets));
    const double spacing = nu1.length() / m;
    const double w = 0.5 * spacing;
    std::vector<double> bins;
    values[job] = w / (1.0 + w) * lattice_sum(nu1, nu2, m, spacing * o / dict.offsets, bins);
  });
  for (double v : values) est.best_tents = std::max(est.best_tents, v);
  est.value = std::max(est.best_mode, est.best_tents);
  return est;
}

double bl_metric(const Measure& nu1, const Measure& nu2, const BlDictionary& dict) {
  return bl_metric_detail(nu1, nu2, dict).value;
}

double bl_metric(const Measure& nu1, const Measure& nu2) {
  return bl_metric(nu1, nu2, BlDictionary::standard(nu1.dim()));
}

}  // namespace fraclab
