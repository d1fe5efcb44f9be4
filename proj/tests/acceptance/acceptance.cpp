// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/config.hpp"
#include "fraclab/experiments.hpp"
#include "fraclab/frac_ops.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/particles.hpp"
#include "fraclab/pde.hpp"
#include "fraclab/pv_quadrature.hpp"

using namespace fraclab;
using std::numbers::pi;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v[k]);
  return s + "]";
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return !v.empty();
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] <= v[k - 1])) return false;
  return true;
}

std::size_t column(const Report& r, const std::string& name) {
  const auto it = std::find(r.columns.begin(), r.columns.end(), name);
  if (it == r.columns.end()) throw std::runtime_error("missing column " + name);
  return static_cast<std::size_t>(it - r.columns.begin());
}

// Median of `value` per distinct N, in N-list order; rows with a non-ok status count as failures.
std::vector<double> medians_by_n(const Report& r, const std::vector<std::uint64_t>& Ns, const std::string& value,
                                 bool* all_ok) {
  const auto cN = column(r, "N"), cv = column(r, value), cs = column(r, "status");
  std::vector<double> out;
  for (auto N : Ns) {
    std::vector<double> v;
    for (const auto& row : r.rows) {
      if (row[cN] != std::to_string(N)) continue;
      if (row[cs] != "ok") *all_ok = false;
      else v.push_back(std::stod(row[cv]));
    }
    out.push_back(median(v));
  }
  return out;
}

// Random real field without Nyquist content.
std::vector<double> random_field(const PeriodicGrid& g, std::mt19937_64& rng) {
  SpectralOperators ops(g);
  std::normal_distribution<double> nd;
  Spectrum s(g.spectral_size());
  g.for_each_mode([&](std::size_t idx, const std::array<int, 3>& k) {
    bool nyq = false;
    for (int a = 0; a < g.dim(); ++a) nyq = nyq || g.is_nyquist(k[static_cast<std::size_t>(a)]);
    double decay = 0.0;
    for (int a = 0; a < g.dim(); ++a) decay += k[static_cast<std::size_t>(a)] * k[static_cast<std::size_t>(a)];
    const double amp = 1.0 / (1.0 + 0.01 * decay);
    s[idx] = nyq ? Complex(0.0) : amp * Complex(nd(rng), nd(rng));
  });
  return ops.inverse(s);
}

// ---------------------------------------------------------------------------

Outcome spectral_identity() {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 2;
    const PeriodicGrid g(d, 5.0 + trial * 0.1, d == 1 ? 512 : 64);
    const auto f = random_field(g, rng);
    const double alpha = 0.85;
    double lhs2 = 0.0;
    for (const auto& c : frac_gradient(g, f, alpha)) lhs2 += std::pow(l2_norm(g, c), 2);
    const double rhs = h_alpha_seminorm(g, f, alpha);
    worst = std::max(worst, std::abs(std::sqrt(lhs2) - rhs) / rhs);
  }
  return {worst < 1e-12, "max relative error " + num(worst) + " over 100 fields"};
}

Outcome operator_oracle() {
  const PeriodicGrid g(1, 2 * pi, 64);
  std::vector<double> s(g.size());
  for (int m = 0; m < g.points(); ++m) s[static_cast<std::size_t>(m)] = std::sin(g.node(m));
  const auto spectral = frac_laplacian(g, s, 0.85);
  const ScalarFunction f = [](std::span<const double> y) { return std::sin(y[0]); };
  double worst = 0.0;
  for (int j = 0; j < 8; ++j) {
    const int m = 3 + 8 * j;
    const double x = g.node(m);
    const double v = pv_frac_laplacian_point(f, std::span<const double>(&x, 1), 0.85, 1.0, 1e3, 1e-7);
    worst = std::max(worst, std::abs(v - spectral[static_cast<std::size_t>(m)]));
  }
  return {worst < 1e-4, "max |pv - spectral| = " + num(worst) + " at 8 points"};
}

Outcome psi_bound(const std::string& fixture_dir) {
  std::ifstream is(fixture_dir + "/psi_bound.txt");
  double fixture = 0.0;
  if (!(is >> fixture)) return {false, "cannot read fixture psi_bound.txt"};
  const ScalarFunction psi = [](std::span<const double> y) { return std::log(2.0 + y[0] * y[0]); };
  std::vector<double> ratios;
  for (double x : {0.0, 1.0, 10.0, 100.0}) {
    const double v = pv_frac_laplacian_point(psi, std::span<const double>(&x, 1), 0.85, 1.0, 1e7, 1e-7);
    ratios.push_back(std::abs(v) / std::log(2.0 + x * x));
  }
  const double C = *std::max_element(ratios.begin(), ratios.end());
  const double rel = std::abs(C - fixture) / fixture;
  return {rel <= 0.01, "ratios " + list(ratios) + ", constant " + num(C) + " vs fixture " + num(fixture) +
                           " (rel " + num(rel) + ")"};
}

Outcome sampler() {
  const auto r = run_sampler_validation(default_config());
  const double z = r.summary["max_z_score"], slope = r.summary["tail_slope"];
  return {z <= 3.0 && std::abs(slope + 1.7) <= 0.1, "max |z| " + num(z) + ", tail slope " + num(slope)};
}

Outcome drift_oracle() {
  const auto cfg = default_config();
  const double L = cfg.L;
  const auto& model = cfg.model;

  // Brute force on 128 particles, written independently of drift_direct.
  ScalingParams s = cfg.scaling;
  s.N = 128;
  const MollifierFamily small(s);
  const InteractionForce F(small, model.beta, L);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5 * L, 0.5 * L);
  std::vector<std::vector<double>> pos(2, std::vector<double>(64));
  for (auto& p : pos)
    for (double& x : p) x = u(rng);
  const ParticleEnsemble e(1, L, 128, pos);
  const auto fd = drift_direct(e, model, F);
  double num2 = 0.0, den2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto pi_ = e.positions(i);
    for (std::size_t k = 0; k < pi_.size(); ++k) {
      double acc = 0.0;
      for (int j = 0; j < 2; ++j) {
        double sum = 0.0;
        for (double y : e.positions(j)) sum += F.eval_1d(pi_[k] - y);
        acc -= model.a_ij(i, j) * sum / 128.0;
      }
      const double got = fd[static_cast<std::size_t>(i)][k];
      num2 += (got - acc) * (got - acc);
      den2 += acc * acc;
    }
  }
  const double brute = std::sqrt(num2 / den2);

  // Direct against grid at N = 2000, M = 4096.
  s.N = 2000;
  const MollifierFamily fam(s);
  const PeriodicGrid grid(1, L, 4096);
  const Field u0 = cfg.initial.evaluate(grid);
  const auto e2 = init_from_density(u0, 2000, counts_from_mass(u0, 2000), 11);
  const auto a = drift_direct(e2, model, InteractionForce(fam, model.beta, L));
  const auto b = drift_grid(e2, grid, model, fam);
  num2 = den2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      num2 += (a[i][k] - b[i][k]) * (a[i][k] - b[i][k]);
      den2 += a[i][k] * a[i][k];
    }
  }
  const double cross = std::sqrt(num2 / den2);
  return {brute < 1e-12 && cross < 1e-3, "brute-force rel " + num(brute) + ", direct vs grid rel " + num(cross)};
}

Outcome pde_solver() {
  const auto cfg = default_config();
  std::string detail;
  bool ok = true;

  // (a) and (d) on the default regularized run.
  {
    const auto grid = cfg.grid();
    const Field u0 = cfg.initial.evaluate(grid);
    ScalingParams s = cfg.scaling;
    s.N = cfg.N_list.back();
    SolverConfig sc;
    sc.dt = cfg.pde_dt;
    sc.T = cfg.T;
    const auto traj = PdeSolver(cfg.model, grid, SolverMode::Regularized, MollifierFamily(s)).solve(u0, sc);
    double drift = 0.0, lowest = 1e300, peak = 0.0;
    for (double v : u0.values()) peak = std::max(peak, v);
    for (const auto& m : traj.monitors) {
      for (std::size_t i = 0; i < m.mass.size(); ++i) {
        drift = std::max(drift, std::abs(m.mass[i] - traj.monitors[0].mass[i]) / traj.monitors[0].mass[i]);
        lowest = std::min(lowest, m.min[i]);
      }
    }
    const bool a = traj.completed && drift < 1e-10;
    const bool d = lowest >= -1e-6 * peak;
    ok = ok && a && d;
    detail += "(a) mass drift " + num(drift) + (a ? " ok" : " FAIL") + "; (d) min " + num(lowest) + " vs -1e-6*" +
              num(peak) + (d ? " ok" : " FAIL");
  }
  // (b) single mode with a = 0.
  {
    const PeriodicGrid g(1, 2 * pi, 64);
    ModelParams m;
    m.n = 1;
    m.sigma = {1.0};
    m.a = {0.0};
    Field u0(g, 1);
    for (int k = 0; k < g.points(); ++k) u0.values()[static_cast<std::size_t>(k)] = 1.0 + 0.5 * std::cos(g.node(k));
    SolverConfig sc;
    sc.dt = 1e-3;
    sc.T = 1.0;
    const auto traj = PdeSolver(m, g, SolverMode::Limit).solve(u0, sc);
    double err = 0.0;
    for (int k = 0; k < g.points(); ++k)
      err = std::max(err, std::abs(traj.snapshots.back().values()[static_cast<std::size_t>(k)] -
                                   (1.0 + 0.5 * std::exp(-1.0) * std::cos(g.node(k)))));
    const bool b = err < 1e-8;
    ok = ok && b;
    detail += "; (b) single-mode error " + num(err) + (b ? " ok" : " FAIL");
  }
  // (c) dt self-convergence on the full nonlinear system.
  {
    const PeriodicGrid g(1, cfg.L, 512);
    const Field u0 = cfg.initial.evaluate(g);
    ScalingParams s = cfg.scaling;
    s.N = 2000;
    const PdeSolver solver(cfg.model, g, SolverMode::Regularized, MollifierFamily(s));
    auto run = [&](double dt) {
      SolverConfig sc;
      sc.dt = dt;
      sc.T = 1.0;
      return solver.solve(u0, sc).snapshots.back();
    };
    const std::vector<double> dts = {0.04, 0.02, 0.01};
    const Field ref = run(dts.back() / 64);
    std::vector<double> errs, orders;
    for (double dt : dts) errs.push_back(l2_norm(run(dt) - ref));
    for (std::size_t k = 1; k < errs.size(); ++k) orders.push_back(std::log2(errs[k - 1] / errs[k]));
    bool c = true;
    for (double o : orders) c = c && std::abs(o - 2.0) <= 0.2;
    ok = ok && c;
    detail += "; (c) errors " + list(errs) + " orders " + list(orders) + (c ? " ok" : " FAIL");
  }
  return {ok, detail};
}

Outcome regularization_trend() {
  auto cfg = default_config();
  cfg.N_list = {64, 256, 1024, 4096};
  const auto r = run_converge_reg(cfg);
  std::vector<double> norms, logk, logn;
  bool ok = true;
  for (const auto& row : r.rows) {
    ok = ok && row[column(r, "status")] == "ok";
    const double n2 = std::stod(row[column(r, "norm2")]);
    norms.push_back(n2);
    logk.push_back(std::log(std::stod(row[column(r, "kappa_hat_N")])));
    logn.push_back(std::log(n2));
  }
  const double slope = fit_slope(logk, logn);
  // Decay in N is decay as a positive power of kappa_hat_N^-1; the slope against
  // log kappa_hat_N is the negative of the slope against log kappa_hat_N^-1.
  const bool pass = ok && strictly_decreasing(norms) && slope < 0.0;
  return {pass, "norm2 " + list(norms) + ", slope vs kappa_hat_N " + num(slope) + ", vs kappa_hat_N^-1 " + num(-slope)};
}

Outcome particle_trend() {
  const auto cfg = default_config();
  const auto r = run_converge_n(cfg);
  bool ok = true;
  const auto med = medians_by_n(r, cfg.N_list, "norm2", &ok);
  std::vector<double> frac;
  const auto cN = column(r, "N"), ce = column(r, "exceeds_delta");
  for (auto N : cfg.N_list) {
    double count = 0, ex = 0;
    for (const auto& row : r.rows)
      if (row[cN] == std::to_string(N)) {
        ++count;
        ex += std::stod(row[ce]);
      }
    frac.push_back(ex / count);
  }
  return {ok && strictly_decreasing(med) && non_increasing(frac),
          "medians " + list(med) + ", exceedance " + list(frac)};
}

Outcome empirical_measure_trend() {
  const auto cfg = default_config();
  const auto r = run_theorem2_probe(cfg);
  bool ok = true;
  const auto med = medians_by_n(r, cfg.N_list, "sup_bl_sum", &ok);
  return {ok && strictly_decreasing(med), "medians " + list(med)};
}

Outcome variance_trend() {
  const auto cfg = default_config();
  const auto r = run_variance_study(cfg);
  std::vector<double> logN, logV, vars;
  for (const auto& row : r.rows) {
    const double v = std::stod(row[column(r, "variance")]);
    vars.push_back(v);
    logN.push_back(std::log(std::stod(row[column(r, "N")])));
    logV.push_back(std::log(v));
  }
  const double slope = fit_slope(logN, logV);
  const int d = cfg.model.d;
  const double threshold = -(1.0 - cfg.scaling.kappa * (d + 2.0 * cfg.model.beta) / d) + 0.15;
  return {strictly_decreasing(vars) && slope <= threshold,
          "variance " + list(vars) + ", slope " + num(slope) + " threshold " + num(threshold)};
}

Outcome mollifier_rate() {
  const auto cfg = default_config();
  const auto grid = cfg.grid();
  std::vector<double> f(grid.size());
  for (int m = 0; m < grid.points(); ++m) f[static_cast<std::size_t>(m)] = std::exp(-0.5 * grid.node(m) * grid.node(m));
  std::vector<std::uint64_t> Ns;
  for (int p = 6; p <= 12; ++p) Ns.push_back(1ULL << p);
  std::vector<double> ratios;
  for (const auto& row : mollifier_rate_check(grid, f, cfg.scaling, Ns)) ratios.push_back(row.ratio());
  // Minkowski: ||f(. - y) - f|| <= |y| ||f'||, averaged over the kernel gives E|Z| = sqrt(2/pi).
  const double bound = std::sqrt(2.0 / pi);
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  return {worst <= bound, "ratios " + list(ratios) + " all <= " + num(bound)};
}

Outcome generator() {
  std::string detail;
  bool ok = true;
  // (a) free dynamics on a 2 pi torus with psi = cos x.
  {
    const PeriodicGrid g(1, 2 * pi, 256);
    Field u0(g, 1);
    for (int m = 0; m < g.points(); ++m)
      u0.values()[static_cast<std::size_t>(m)] = (1.0 + 0.5 * std::cos(g.node(m))) / (2 * pi);
    ModelParams model;
    model.n = 1;
    model.sigma = {1.0};
    model.a = {0.0};
    ScalingParams s;
    s.N = 2000;
    const ParticleStepper stepper(model, MollifierFamily(s), g, DriftMethod::Grid, NoiseConfig{});
    const auto r = generator_check(stepper, u0, 2000, TrigTestFunction{{1, 0, 0}, true, 2 * pi}, 0, 1.0, 0.01, 64,
                                   derive_seed(20240601, 1));
    const bool a = std::abs(r.residual()) <= 3.0 * r.std_err;
    ok = ok && a;
    detail += "(a) |lhs-rhs| " + num(std::abs(r.residual())) + " vs 3 SE " + num(3.0 * r.std_err) + (a ? " ok" : " FAIL");
  }
  // (b) full model: the bias-dominated compensated residual shrinks with dt.
  {
    const auto cfg = default_config();
    const auto grid = cfg.grid();
    const Field u0 = cfg.initial.evaluate(grid);
    ScalingParams s = cfg.scaling;
    s.N = 2000;
    const ParticleStepper stepper(cfg.model, MollifierFamily(s), grid, DriftMethod::Grid, NoiseConfig{});
    const TrigTestFunction psi{{8, 0, 0}, true, cfg.L};
    std::vector<double> res, se;
    for (double dt : {0.2, 0.1, 0.05}) {
      const auto r = generator_check(stepper, u0, 2000, psi, 0, 1.0, dt, 64, derive_seed(20240601, 2));
      res.push_back(std::abs(r.compensated_residual));
      se.push_back(r.compensated_std_err);
    }
    const bool b = strictly_decreasing(res);
    ok = ok && b;
    detail += "; (b) |residual| at dt 0.2/0.1/0.05 " + list(res) + " (SE " + list(se) + ")" + (b ? " ok" : " FAIL");
  }
  return {ok, detail};
}

Outcome reproducibility() {
  // Small versions of every experiment, run at 1, 4 and 8 threads and once more at 1.
  std::istringstream small(R"(
[scaling]
N_list = 200, 400
[grid]
M = 1024
[solver]
dt = 0.005
T = 0.1
snapshots = 3
[particles]
dt = 0.005
[seeds]
count = 3
[variance]
N_list = 256, 512, 1024
seeds = 20
[sampler]
samples = 200000
tail_samples = 300000
)");
  const auto cfg = parse_config(small);
  std::vector<std::string> mismatched;
  for (const auto& name : experiment_names()) {
    std::string reference;
    bool same = true;
    for (int threads : {1, 4, 8, 1}) {
      set_default_threads(threads);
      const auto csv = run_experiment(name, cfg).csv();
      if (reference.empty()) reference = csv;
      else same = same && csv == reference;
    }
    if (!same) mismatched.push_back(name);
  }
  set_default_threads(1);
  std::string detail = std::to_string(experiment_names().size()) + " experiments at 1/4/8/1 threads";
  for (const auto& m : mismatched) detail += "; differs: " + m;
  return {mismatched.empty(), detail};
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::string fixtures = FRACLAB_FIXTURE_DIR;
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::stoi(argv[k]));

  const std::vector<Criterion> criteria = {
      {1, "spectral identity", 1, spectral_identity},
      {2, "principal-value operator oracle", 10, operator_oracle},
      {3, "log test function bound", 30, [&] { return psi_bound(fixtures); }},
      {4, "stable sampler", 120, sampler},
      {5, "drift equivalence", 60, drift_oracle},
      {6, "PDE solver", 300, pde_solver},
      {7, "regularized-to-limit trend", 600, regularization_trend},
      {8, "particle-to-regularized trend", 1800, particle_trend},
      {9, "empirical measure trend", 600, empirical_measure_trend},
      {10, "force variance trend", 300, variance_trend},
      {11, "mollifier rate", 60, mollifier_rate},
      {12, "generator check", 600, generator},
      {13, "thread-count reproducibility", 1800, reproducibility},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.passed && in_time;
    failures += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
              << num(secs) << " s of " << num(c.budget_seconds) << " s" << (in_time ? "" : ", over budget") << "]"
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
