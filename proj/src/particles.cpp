#include "fraclab/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fraclab/frac_ops.hpp"
#include "fraclab/nufft.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/rng.hpp"

namespace fraclab {

ParticleEnsemble::ParticleEnsemble(int d, double L, std::uint64_t N, std::vector<std::vector<double>> positions)
    : d_(d), L_(L), N_(N), positions_(std::move(positions)) {
  if (d < 1 || d > PeriodicGrid::kMaxDim) throw std::invalid_argument("ParticleEnsemble: bad dimension");
  if (N == 0) throw std::invalid_argument("ParticleEnsemble: N must be positive");
  const PeriodicGrid torus(d, L, 4);
  const auto du = static_cast<std::size_t>(d);
  for (auto& p : positions_) {
    if (p.size() % du != 0) throw std::invalid_argument("ParticleEnsemble: coordinate count not a multiple of d");
    for (double& x : p) {
      if (!std::isfinite(x)) throw std::invalid_argument("ParticleEnsemble: non-finite position");
      x = torus.wrap(x);
    }
    // Canonical order: lexicographic in the coordinates.
    const std::size_t n = p.size() / du;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(p.begin() + a * du, p.begin() + (a + 1) * du, p.begin() + b * du,
                                          p.begin() + (b + 1) * du);
    });
    std::vector<double> sorted(p.size());
    for (std::size_t k = 0; k < n; ++k) std::copy_n(p.begin() + order[k] * du, du, sorted.begin() + k * du);
    p = std::move(sorted);
  }
}

std::vector<std::size_t> counts_from_mass(const Field& u0, std::uint64_t N) {
  std::vector<std::size_t> counts;
  for (int i = 0; i < u0.species(); ++i) {
    const double m = integrate(u0.grid(), u0.component(i));
    counts.push_back(static_cast<std::size_t>(std::llround(std::max(0.0, m) * static_cast<double>(N))));
  }
  return counts;
}

ParticleEnsemble init_from_density(const Field& u0, std::uint64_t N, std::span<const std::size_t> counts,
                                   std::uint64_t seed) {
  const auto& grid = u0.grid();
  if (counts.size() != static_cast<std::size_t>(u0.species()))
    throw std::invalid_argument("init_from_density: one count per species required");
  const int d = grid.dim();
  const auto M = static_cast<std::size_t>(grid.points());
  const double h = grid.spacing();
  std::vector<std::vector<double>> positions(counts.size());
  for (int i = 0; i < u0.species(); ++i) {
    const auto u = u0.component(i);
    std::vector<double> cdf(u.size());
    double acc = 0.0;
    for (std::size_t m = 0; m < u.size(); ++m) {
      if (!(u[m] >= 0.0)) throw std::invalid_argument("init_from_density: density must be non-negative and finite");
      acc += u[m];
      cdf[m] = acc;
    }
    const std::size_t count = counts[static_cast<std::size_t>(i)];
    if (count > 0 && !(acc > 0.0)) throw std::invalid_argument("init_from_density: species has zero mass");
    auto& out = positions[static_cast<std::size_t>(i)];
    out.resize(count * static_cast<std::size_t>(d));
    for (std::size_t k = 0; k < count; ++k) {
      RngStream rng(seed, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k), 0, StreamPurpose::Initialization});
      const double target = rng.uniform() * acc;
      std::size_t cell = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
      cell = std::min(cell, cdf.size() - 1);
      // Row-major: axis 0 is the slowest index.
      std::size_t rest = cell;
      for (int a = d - 1; a >= 0; --a) {
        const auto m = static_cast<int>(rest % M);
        rest /= M;
        out[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] = grid.node(m) + (rng.uniform() - 0.5) * h;
      }
    }
  }
  return ParticleEnsemble(d, grid.length(), N, std::move(positions));
}

namespace {

void check_model(const ParticleEnsemble& e, const ModelParams& model) {
  if (e.species() != model.n) throw std::invalid_argument("particle ensemble and model disagree on species count");
  if (e.dim() != model.d) throw std::invalid_argument("particle ensemble and model disagree on dimension");
}

}  // namespace

Forces drift_direct(const ParticleEnsemble& e, const ModelParams& model, const InteractionForce& force) {
  check_model(e, model);
  const int d = e.dim();
  const auto du = static_cast<std::size_t>(d);
  const double w = e.weight();
  Forces out(static_cast<std::size_t>(e.species()));
  for (int i = 0; i < e.species(); ++i) {
    auto& fi = out[static_cast<std::size_t>(i)];
    fi.assign(e.count(i) * du, 0.0);
    parallel_for(e.count(i), [&](std::size_t k) {
      const auto xk = e.particle(i, k);
      std::array<double, PeriodicGrid::kMaxDim> dx{}, f{};
      for (int j = 0; j < e.species(); ++j) {
        const double coef = -model.a_ij(i, j) * w;
        if (coef == 0.0) continue;
        std::array<double, PeriodicGrid::kMaxDim> sum{};
        for (std::size_t l = 0; l < e.count(j); ++l) {
          const auto yl = e.particle(j, l);
          for (int a = 0; a < d; ++a) dx[a] = xk[a] - yl[a];
          force(std::span<const double>(dx.data(), du), std::span<double>(f.data(), du));
          for (int a = 0; a < d; ++a) sum[a] += f[a];
        }
        for (int a = 0; a < d; ++a) fi[k * du + a] += coef * sum[a];
      }
    });
  }
  return out;
}

Forces drift_grid(const ParticleEnsemble& e, const PeriodicGrid& grid, const ModelParams& model,
                  const MollifierFamily& fam) {
  check_model(e, model);
  if (grid.dim() != e.dim() || grid.length() != e.length())
    throw std::invalid_argument("drift_grid: grid does not match the ensemble torus");
  require_resolved(fam, KernelKind::W, grid);
  const int d = e.dim();
  const auto du = static_cast<std::size_t>(d);
  const int n = e.species();
  SpectralOperators ops(grid);
  const auto r = ops.abs_xi();
  const double scale = e.weight() / grid.cell_volume();

  std::vector<Spectrum> s_hat(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto& s = s_hat[static_cast<std::size_t>(j)];
    if (e.count(j) == 0) {
      s.assign(grid.spectral_size(), Complex(0.0));
      continue;
    }
    s = point_measure_spectrum(grid, e.positions(j));
    for (std::size_t m = 0; m < s.size(); ++m) s[m] *= scale * fam.fourier(r[m], KernelKind::V_hat);
  }

  const Complex I(0.0, 1.0);
  Forces out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& fi = out[static_cast<std::size_t>(i)];
    fi.assign(e.count(i) * du, 0.0);
    if (e.count(i) == 0) continue;
    for (int a = 0; a < d; ++a) {
      const auto xi = ops.xi_odd(a);
      Spectrum g(grid.spectral_size(), Complex(0.0));
      for (int j = 0; j < n; ++j) {
        const double coef = -model.a_ij(i, j);
        if (coef == 0.0) continue;
        const auto& s = s_hat[static_cast<std::size_t>(j)];
        for (std::size_t m = 0; m < g.size(); ++m) g[m] += coef * s[m];
      }
      for (std::size_t m = 0; m < g.size(); ++m) {
        g[m] = r[m] > 0.0 ? g[m] * I * xi[m] * std::pow(r[m], model.beta - 1.0) : Complex(0.0);
      }
      const auto field = ops.inverse(g);
      parallel_for(e.count(i), [&](std::size_t k) {
        fi[k * du + static_cast<std::size_t>(a)] = interpolate_cubic(grid, field, e.particle(i, k));
      });
    }
  }
  return out;
}

StepRecord em_step(ParticleEnsemble& e, const Forces& forces, double dt, double t_new, std::uint32_t step_index,
                   const ModelParams& model, const NoiseConfig& noise) {
  check_model(e, model);
  if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be positive");
  const int d = e.dim();
  const auto du = static_cast<std::size_t>(d);
  const PeriodicGrid torus(d, e.length(), 4);
  StepRecord rec;
  rec.time = t_new;
  rec.jump_cap_active = noise.enabled && noise.jump_cap > 0.0;
  for (int i = 0; i < e.species(); ++i) {
    auto pos = e.positions(i);
    const auto& f = forces[static_cast<std::size_t>(i)];
    if (f.size() != pos.size()) throw std::invalid_argument("em_step: force vector has the wrong size");
    StableParams sp{model.alpha, d, model.sigma[static_cast<std::size_t>(i)], dt, noise.jump_cap};
    const std::size_t count = e.count(i);
    std::vector<double> disp2(count, 0.0);
    std::vector<unsigned char> long_jump(count, 0);
    parallel_for(count, [&](std::size_t k) {
      std::array<double, PeriodicGrid::kMaxDim> jump{};
      if (noise.enabled) {
        RngStream rng(noise.seed, {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k), step_index,
                                   StreamPurpose::Dynamics});
        sample_increment(sp, rng, std::span<double>(jump.data(), du));
      }
      double j2 = 0.0, m2 = 0.0;
      for (std::size_t a = 0; a < du; ++a) {
        const double step = f[k * du + a] * dt + jump[a];
        j2 += jump[a] * jump[a];
        m2 += step * step;
        pos[k * du + a] = torus.wrap(pos[k * du + a] + step);
      }
      disp2[k] = m2;
      long_jump[k] = noise.kernel_width > 0.0 && std::sqrt(j2) > 0.5 * noise.kernel_width;
    });
    double mx = 0.0;
    std::size_t jumps = 0;
    for (std::size_t k = 0; k < count; ++k) {
      mx = std::max(mx, disp2[k]);
      jumps += long_jump[k];
    }
    rec.max_displacement.push_back(std::sqrt(mx));
    rec.long_jumps.push_back(jumps);
  }
  return rec;
}

// ---------------------------------------------------------------------------

ParticleStepper::ParticleStepper(const ModelParams& model, const MollifierFamily& fam, const PeriodicGrid& grid,
                                 DriftMethod method, NoiseConfig noise)
    : model_(model), fam_(fam), grid_(grid), method_(method), noise_(noise) {
  if (noise_.kernel_width <= 0.0) noise_.kernel_width = fam.std_dev(KernelKind::V_hat);
  if (method_ == DriftMethod::Direct) table_.emplace(fam, model.beta, grid.length());
}

Forces ParticleStepper::forces(const ParticleEnsemble& e) const {
  if (method_ == DriftMethod::Direct) return drift_direct(e, model_, *table_);
  return drift_grid(e, grid_, model_, fam_);
}

StepRecord ParticleStepper::step(ParticleEnsemble& e, double dt, double t_new, std::uint32_t step_index,
                                 std::uint64_t seed) const {
  return step(e, forces(e), dt, t_new, step_index, seed);
}

StepRecord ParticleStepper::step(ParticleEnsemble& e, const Forces& f, double dt, double t_new,
                                 std::uint32_t step_index, std::uint64_t seed) const {
  NoiseConfig nc = noise_;
  nc.seed = seed;
  return em_step(e, f, dt, t_new, step_index, model_, nc);
}

// ---------------------------------------------------------------------------

namespace {

Field deposit(const ParticleEnsemble& e, const PeriodicGrid& grid, const MollifierFamily& fam, KernelKind which) {
  if (grid.dim() != e.dim() || grid.length() != e.length())
    throw std::invalid_argument("deposit: grid does not match the ensemble torus");
  Field out(grid, e.species());
  for (int i = 0; i < e.species(); ++i) {
    auto v = mollify_points(fam, which, grid, e.positions(i), e.weight());
    std::copy(v.begin(), v.end(), out.component(i).begin());
  }
  return out;
}

}  // namespace

Field deposit_h(const ParticleEnsemble& e, const PeriodicGrid& grid, const MollifierFamily& fam) {
  return deposit(e, grid, fam, KernelKind::W);
}

Field deposit_s_hat(const ParticleEnsemble& e, const PeriodicGrid& grid, const MollifierFamily& fam) {
  return deposit(e, grid, fam, KernelKind::V_hat);
}

// ---------------------------------------------------------------------------

double TrigTestFunction::xi(int a) const { return 2.0 * std::numbers::pi * k[static_cast<std::size_t>(a)] / L; }

double TrigTestFunction::abs_xi() const {
  double s = 0.0;
  for (int a = 0; a < 3; ++a) s += xi(a) * xi(a);
  return std::sqrt(s);
}

namespace {
double phase(const TrigTestFunction& p, std::span<const double> x) {
  double ph = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) ph += p.xi(static_cast<int>(a)) * x[a];
  return ph;
}
}  // namespace

double TrigTestFunction::value(std::span<const double> x) const {
  const double ph = phase(*this, x);
  return cosine ? std::cos(ph) : std::sin(ph);
}

void TrigTestFunction::gradient(std::span<const double> x, std::span<double> out) const {
  const double ph = phase(*this, x);
  const double dv = cosine ? -std::sin(ph) : std::cos(ph);
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = xi(static_cast<int>(a)) * dv;
}

double TrigTestFunction::frac_laplacian(std::span<const double> x, double alpha) const {
  return std::pow(abs_xi(), 2.0 * alpha) * value(x);
}

GeneratorAccumulator::GeneratorAccumulator(const TrigTestFunction& psi, int species, const ModelParams& model)
    : psi_(psi), species_(species), alpha_(model.alpha), sigma_(model.sigma.at(static_cast<std::size_t>(species))) {}

void GeneratorAccumulator::observe(double t, const ParticleEnsemble& e, const Forces& forces) {
  const auto du = static_cast<std::size_t>(e.dim());
  const auto& f = forces.at(static_cast<std::size_t>(species_));
  double pairing = 0.0, integrand = 0.0;
  std::array<double, PeriodicGrid::kMaxDim> g{};
  for (std::size_t k = 0; k < e.count(species_); ++k) {
    const auto x = e.particle(species_, k);
    pairing += psi_.value(x);
    psi_.gradient(x, std::span<double>(g.data(), du));
    double drift = 0.0;
    for (std::size_t a = 0; a < du; ++a) drift += f[k * du + a] * g[a];
    integrand += drift - sigma_ * psi_.frac_laplacian(x, alpha_);
  }
  pairing *= e.weight();
  integrand *= e.weight();
  if (!started_) {
    first_pairing_ = pairing;
    started_ = true;
  } else {
    const double dt = t - last_t_;
    integral_ += 0.5 * dt * (integrand + last_integrand_);
    const double decay = std::exp(-sigma_ * std::pow(psi_.abs_xi(), 2.0 * alpha_) * dt);
    double predicted = 0.0;
    std::array<double, PeriodicGrid::kMaxDim> y{};
    const std::size_t count = last_positions_.size() / du;
    for (std::size_t k = 0; k < count; ++k) {
      for (std::size_t a = 0; a < du; ++a) y[a] = last_positions_[k * du + a] + last_forces_[k * du + a] * dt;
      predicted += decay * psi_.value(std::span<const double>(y.data(), du));
    }
    martingale_ += pairing - predicted * e.weight();
  }
  last_pairing_ = pairing;
  last_integrand_ = integrand;
  last_t_ = t;
  last_positions_.assign(e.positions(species_).begin(), e.positions(species_).end());
  last_forces_ = f;
}

GeneratorCheckResult generator_check(const ParticleStepper& stepper, const Field& u0, std::uint64_t N,
                                     const TrigTestFunction& psi, int species, double T, double dt, int seeds,
                                     std::uint64_t master_seed) {
  if (seeds < 2) throw std::invalid_argument("generator_check: need at least 2 seeds");
  const int steps = static_cast<int>(std::llround(T / dt));
  if (steps < 1) throw std::invalid_argument("generator_check: T must cover at least one step");
  const auto counts = counts_from_mass(u0, N);
  std::vector<double> lhs(static_cast<std::size_t>(seeds)), rhs(static_cast<std::size_t>(seeds));
  std::vector<double> mart(static_cast<std::size_t>(seeds));
  parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t s) {
    const std::uint64_t seed = derive_seed(master_seed, s);
    auto e = init_from_density(u0, N, counts, seed);
    GeneratorAccumulator acc(psi, species, stepper.model());
    auto f = stepper.forces(e);
    acc.observe(0.0, e, f);
    for (int n = 0; n < steps; ++n) {
      const double t = (n + 1) * dt;
      stepper.step(e, f, dt, t, static_cast<std::uint32_t>(n), seed);
      f = stepper.forces(e);
      acc.observe(t, e, f);
    }
    lhs[s] = acc.lhs();
    rhs[s] = acc.rhs();
    mart[s] = acc.martingale();
  });
  GeneratorCheckResult res{0.0, 0.0, 0.0, {}};
  for (int s = 0; s < seeds; ++s) {
    res.lhs += lhs[static_cast<std::size_t>(s)];
    res.rhs += rhs[static_cast<std::size_t>(s)];
    res.residuals.push_back(lhs[static_cast<std::size_t>(s)] - rhs[static_cast<std::size_t>(s)]);
  }
  res.lhs /= seeds;
  res.rhs /= seeds;
  const double mean = res.lhs - res.rhs;
  double var = 0.0;
  for (double r : res.residuals) var += (r - mean) * (r - mean);
  var /= (seeds - 1);
  res.std_err = std::sqrt(var / seeds);

  std::vector<double> comp(static_cast<std::size_t>(seeds));
  for (std::size_t s = 0; s < comp.size(); ++s) comp[s] = lhs[s] - mart[s] - rhs[s];
  double cm = 0.0;
  for (double c : comp) cm += c;
  cm /= seeds;
  double cv = 0.0;
  for (double c : comp) cv += (c - cm) * (c - cm);
  cv /= (seeds - 1);
  res.compensated_residual = cm;
  res.compensated_std_err = std::sqrt(cv / seeds);
  return res;
}

std::vector<ForceVarianceRow> empirical_force_variance(const ModelParams& model, const ScalingParams& scaling_template,
                                                       std::span<const std::uint64_t> N_list, const Field& u0,
                                                       std::span<const double> probe, int species, int seeds,
                                                       std::uint64_t master_seed) {
  if (seeds < 2) throw std::invalid_argument("empirical_force_variance: need at least 2 seeds");
  const int d = model.d;
  const auto du = static_cast<std::size_t>(d);
  if (probe.size() < du) throw std::invalid_argument("empirical_force_variance: probe needs d coordinates");
  std::vector<ForceVarianceRow> rows;
  for (auto N : N_list) {
    ScalingParams s = scaling_template;
    s.N = N;
    s.d = d;
    const MollifierFamily fam(s);
    const InteractionForce table(fam, model.beta, u0.grid().length());
    const auto counts = counts_from_mass(u0, N);
    std::vector<double> values(static_cast<std::size_t>(seeds) * du, 0.0);
    parallel_for(static_cast<std::size_t>(seeds), [&](std::size_t r) {
      const auto e = init_from_density(u0, N, counts, derive_seed(master_seed, r));
      std::array<double, PeriodicGrid::kMaxDim> dx{}, f{};
      for (int j = 0; j < e.species(); ++j) {
        const double coef = -model.a_ij(species, j) * e.weight();
        for (std::size_t l = 0; l < e.count(j); ++l) {
          const auto y = e.particle(j, l);
          for (std::size_t a = 0; a < du; ++a) dx[a] = probe[a] - y[a];
          table(std::span<const double>(dx.data(), du), std::span<double>(f.data(), du));
          for (std::size_t a = 0; a < du; ++a) values[r * du + a] += coef * f[a];
        }
      }
    });
    std::array<double, PeriodicGrid::kMaxDim> mean{};
    for (int r = 0; r < seeds; ++r)
      for (std::size_t a = 0; a < du; ++a) mean[a] += values[static_cast<std::size_t>(r) * du + a] / seeds;
    double var = 0.0;
    for (int r = 0; r < seeds; ++r)
      for (std::size_t a = 0; a < du; ++a) {
        const double c = values[static_cast<std::size_t>(r) * du + a] - mean[a];
        var += c * c;
      }
    var /= (seeds - 1);
    rows.push_back({N, fam.kappa_N(), mean[0], var});
  }
  return rows;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace fraclab
