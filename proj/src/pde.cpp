#include "fraclab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclab {

PdeSolver::PdeSolver(const ModelParams& model, const PeriodicGrid& grid, SolverMode mode,
                     std::optional<MollifierFamily> fam, bool dealias)
    : model_(model), ops_(grid), mode_(mode), fam_(std::move(fam)), dealias_(dealias) {
  if (model.d != grid.dim()) throw std::invalid_argument("PdeSolver: model and grid dimensions differ");
  if (mode == SolverMode::Regularized && !fam_)
    throw std::invalid_argument("PdeSolver: the regularized mode needs a mollifier family");
  const auto r = ops_.abs_xi();
  mollifier_.assign(r.size(), 1.0);
  if (mode == SolverMode::Regularized) {
    require_resolved(*fam_, KernelKind::W_hat, grid);
    for (std::size_t m = 0; m < r.size(); ++m) mollifier_[m] = fam_->fourier(r[m], KernelKind::W_hat);
  }
  max_xi_ = 0.0;
  const auto mask = ops_.dealias_mask();
  for (std::size_t m = 0; m < r.size(); ++m) {
    if (!dealias_ || mask[m]) max_xi_ = std::max(max_xi_, r[m]);
  }
}

PdeSolver::Spectra PdeSolver::to_spectra(const Field& u) const {
  if (u.grid() != grid() || u.species() != model_.n) throw std::invalid_argument("PdeSolver: field shape mismatch");
  Spectra s;
  for (int i = 0; i < u.species(); ++i) s.push_back(ops_.forward(u.component(i)));
  return s;
}

Field PdeSolver::to_field(const Spectra& s) const {
  Field out(grid(), model_.n);
  for (int i = 0; i < model_.n; ++i) {
    auto v = ops_.inverse(s[static_cast<std::size_t>(i)]);
    std::copy(v.begin(), v.end(), out.component(i).begin());
  }
  return out;
}

PdeSolver::Spectra PdeSolver::nonlinear_spectra(const Spectra& u, double* max_drift) const {
  const int n = model_.n;
  const int d = model_.d;
  const auto r = ops_.abs_xi();
  const std::size_t ns = grid().spectral_size();
  const Complex I(0.0, 1.0);
  const double bm1 = model_.beta - 1.0;

  std::vector<double> symbol(ns);  // |xi|^{beta-1} F(W_hat)
  for (std::size_t m = 0; m < ns; ++m) symbol[m] = r[m] > 0.0 ? std::pow(r[m], bm1) * mollifier_[m] : 0.0;

  Spectra out(static_cast<std::size_t>(n), Spectrum(ns, Complex(0.0)));
  double drift_max = 0.0;
  for (int i = 0; i < n; ++i) {
    Spectrum ui = u[static_cast<std::size_t>(i)];
    if (dealias_) ops_.dealias(ui);
    const auto ui_x = ops_.inverse(ui);
    auto& acc = out[static_cast<std::size_t>(i)];
    std::vector<double> drift_sq(grid().size(), 0.0);
    for (int a = 0; a < d; ++a) {
      const auto xi = ops_.xi_odd(a);
      Spectrum g(ns, Complex(0.0));
      for (int j = 0; j < n; ++j) {
        const double aij = model_.a_ij(i, j);
        if (aij == 0.0) continue;
        const auto& uj = u[static_cast<std::size_t>(j)];
        for (std::size_t m = 0; m < ns; ++m) g[m] += aij * uj[m];
      }
      for (std::size_t m = 0; m < ns; ++m) g[m] *= I * xi[m] * symbol[m];
      if (dealias_) ops_.dealias(g);
      auto flux = ops_.inverse(g);
      for (std::size_t k = 0; k < flux.size(); ++k) {
        drift_sq[k] += flux[k] * flux[k];
        flux[k] *= ui_x[k];
      }
      auto fhat = ops_.forward(flux);
      if (dealias_) ops_.dealias(fhat);
      for (std::size_t m = 0; m < ns; ++m) acc[m] += I * xi[m] * fhat[m];
    }
    for (double v : drift_sq) drift_max = std::max(drift_max, std::sqrt(v));
  }
  if (max_drift) *max_drift = drift_max;
  return out;
}

Field PdeSolver::nonlinear(const Field& u) const { return to_field(nonlinear_spectra(to_spectra(u))); }

Field PdeSolver::rhs(const Field& u) const {
  auto s = to_spectra(u);
  auto nl = nonlinear_spectra(s);
  const auto r = ops_.abs_xi();
  for (int i = 0; i < model_.n; ++i) {
    const double sig = model_.sigma[static_cast<std::size_t>(i)];
    auto& si = s[static_cast<std::size_t>(i)];
    const auto& ni = nl[static_cast<std::size_t>(i)];
    for (std::size_t m = 0; m < si.size(); ++m) si[m] = -sig * std::pow(r[m], 2.0 * model_.alpha) * si[m] + ni[m];
  }
  return to_field(s);
}

namespace {

std::vector<std::vector<double>> integrating_factors(const SpectralOperators& ops, const ModelParams& model,
                                                     double dt) {
  const auto r = ops.abs_xi();
  std::vector<std::vector<double>> E;
  for (int i = 0; i < model.n; ++i) {
    std::vector<double> e(r.size());
    const double sig = model.sigma[static_cast<std::size_t>(i)];
    for (std::size_t m = 0; m < r.size(); ++m) e[m] = std::exp(-sig * std::pow(r[m], 2.0 * model.alpha) * dt);
    E.push_back(std::move(e));
  }
  return E;
}

}  // namespace

Field PdeSolver::step(const Field& u, double dt) const {
  const auto E = integrating_factors(ops_, model_, dt);
  auto un = to_spectra(u);
  const auto k1 = nonlinear_spectra(un);
  Spectra mid = un;
  for (std::size_t i = 0; i < mid.size(); ++i)
    for (std::size_t m = 0; m < mid[i].size(); ++m) mid[i][m] = E[i][m] * (un[i][m] + dt * k1[i][m]);
  const auto k2 = nonlinear_spectra(mid);
  for (std::size_t i = 0; i < un.size(); ++i)
    for (std::size_t m = 0; m < un[i].size(); ++m)
      un[i][m] = E[i][m] * un[i][m] + 0.5 * dt * (E[i][m] * k1[i][m] + k2[i][m]);
  return to_field(un);
}

double PdeSolver::hs_norm(std::span<const double> f, double s) const {
  const auto spec = ops_.forward(f);
  const auto r = ops_.abs_xi();
  const double e = ops_.weighted_energy(spec, [&](std::size_t m) { return std::pow(1.0 + r[m] * r[m], s); });
  return std::sqrt(e * grid().cell_volume() / static_cast<double>(grid().size()));
}

Trajectory PdeSolver::solve(const Field& u0, const SolverConfig& cfg) const {
  if (!(cfg.dt > 0.0) || !(cfg.T > 0.0)) throw std::invalid_argument("PdeSolver::solve: dt and T must be positive");
  if (!u0.all_finite()) throw std::invalid_argument("PdeSolver::solve: initial data is not finite");
  const long steps = std::lround(cfg.T / cfg.dt);
  if (steps < 1 || std::abs(steps * cfg.dt - cfg.T) > 1e-9 * cfg.T)
    throw std::invalid_argument("PdeSolver::solve: T must be a multiple of dt");

  std::vector<long> snap_steps;
  const std::vector<double> snap_times = cfg.snapshot_times.empty() ? std::vector<double>{0.0, cfg.T}
                                                                    : cfg.snapshot_times;
  for (double t : snap_times) {
    const long k = std::lround(t / cfg.dt);
    if (k < 0 || k > steps || std::abs(k * cfg.dt - t) > 1e-9 * std::max(1.0, cfg.T))
      throw std::invalid_argument("PdeSolver::solve: snapshot time is not on the step grid");
    snap_steps.push_back(k);
  }

  const int n = model_.n;
  const auto E = integrating_factors(ops_, model_, cfg.dt);
  const double s_order = 0.5 * model_.d + 2.5;
  const double norm_factor = grid().cell_volume() / static_cast<double>(grid().size());
  const auto r = ops_.abs_xi();

  Trajectory traj;
  traj.sup_l2_sq.assign(static_cast<std::size_t>(n), 0.0);
  traj.int_seminorm_sq.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double> prev_semi(static_cast<std::size_t>(n), 0.0);

  auto un = to_spectra(u0);
  double prev_l2 = 0.0;

  auto record = [&](long k, const Spectra& s, const Field& f, double max_drift) {
    const double t = k * cfg.dt;
    MonitorSample mon{t, {}, {}, {}, cfg.dt * max_drift * max_xi_};
    double l2_total = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto comp = f.component(i);
      const auto& si = s[static_cast<std::size_t>(i)];
      mon.mass.push_back(integrate(grid(), comp));
      mon.min.push_back(*std::min_element(comp.begin(), comp.end()));
      const double hs = ops_.weighted_energy(si, [&](std::size_t m) { return std::pow(1.0 + r[m] * r[m], s_order); });
      mon.hs_proxy.push_back(std::sqrt(hs * norm_factor));
      const double l2 = ops_.weighted_energy(si, [](std::size_t) { return 1.0; }) * norm_factor;
      const double semi =
          ops_.weighted_energy(si, [&](std::size_t m) { return std::pow(r[m], 2.0 * model_.alpha); }) * norm_factor;
      l2_total += l2;
      auto& sup = traj.sup_l2_sq[static_cast<std::size_t>(i)];
      sup = std::max(sup, l2);
      if (k > 0) traj.int_seminorm_sq[static_cast<std::size_t>(i)] += 0.5 * cfg.dt * (semi + prev_semi[static_cast<std::size_t>(i)]);
      prev_semi[static_cast<std::size_t>(i)] = semi;
    }
    if (mon.cfl > 0.5) ++traj.cfl_warnings;
    traj.monitors.push_back(std::move(mon));
    for (std::size_t q = 0; q < snap_steps.size(); ++q) {
      if (snap_steps[q] == k) {
        traj.times.push_back(snap_times[q]);
        traj.snapshots.push_back(f);
      }
    }
    return std::sqrt(l2_total);
  };

  double max_drift = 0.0;
  auto k1 = nonlinear_spectra(un, &max_drift);
  prev_l2 = record(0, un, to_field(un), max_drift);

  for (long k = 1; k <= steps; ++k) {
    Spectra mid = un;
    for (std::size_t i = 0; i < mid.size(); ++i)
      for (std::size_t m = 0; m < mid[i].size(); ++m) mid[i][m] = E[i][m] * (un[i][m] + cfg.dt * k1[i][m]);
    const auto k2 = nonlinear_spectra(mid);
    for (std::size_t i = 0; i < un.size(); ++i)
      for (std::size_t m = 0; m < un[i].size(); ++m)
        un[i][m] = E[i][m] * un[i][m] + 0.5 * cfg.dt * (E[i][m] * k1[i][m] + k2[i][m]);

    const Field f = to_field(un);
    const double t = k * cfg.dt;
    std::string problem;
    if (!f.all_finite()) problem = "non-finite values";
    double l2 = 0.0;
    if (problem.empty()) {
      l2 = l2_norm(f);
      if (prev_l2 > 0.0 && l2 > 10.0 * prev_l2) problem = "L2 norm grew more than tenfold in one step";
    }
    if (!problem.empty()) {
      traj.failure = problem;
      traj.failure_time = t;
      if (cfg.throw_on_blowup) throw SolverBlowup("PDE solver blow-up at t = " + std::to_string(t) + ": " + problem, t);
      return traj;
    }
    k1 = nonlinear_spectra(un, &max_drift);
    record(k, un, f, max_drift);
    prev_l2 = l2;
  }
  traj.completed = true;
  return traj;
}

Field rhs_regularized(const Field& u, const ModelParams& model, const MollifierFamily& fam) {
  return PdeSolver(model, u.grid(), SolverMode::Regularized, fam).rhs(u);
}

Field rhs_limit(const Field& u, const ModelParams& model) {
  return PdeSolver(model, u.grid(), SolverMode::Limit).rhs(u);
}

Field fractional_heat(const Field& u0, const ModelParams& model, double t) {
  const SpectralOperators ops(u0.grid());
  const auto r = ops.abs_xi();
  Field out(u0.grid(), u0.species());
  for (int i = 0; i < u0.species(); ++i) {
    auto s = ops.forward(u0.component(i));
    const double sig = model.sigma.at(static_cast<std::size_t>(i));
    for (std::size_t m = 0; m < s.size(); ++m) s[m] *= std::exp(-sig * std::pow(r[m], 2.0 * model.alpha) * t);
    auto v = ops.inverse(s);
    std::copy(v.begin(), v.end(), out.component(i).begin());
  }
  return out;
}

}  // namespace fraclab
