#include "fraclab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fraclab/field_io.hpp"
#include "fraclab/frac_ops.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/levy.hpp"
#include "fraclab/metrics.hpp"
#include "fraclab/parallel.hpp"
#include "fraclab/particles.hpp"
#include "fraclab/pde.hpp"
#include "fraclab/rng.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// Report

bool Report::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

nlohmann::json Report::verdict() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["config_hash"] = config_hash;
  j["master_seed"] = master_seed;
  j["verdict"] = passed() ? "PASS" : "FAIL";
  j["assertions"] = nlohmann::json::array();
  for (const auto& a : assertions)
    j["assertions"].push_back({{"name", a.name}, {"result", a.passed ? "PASS" : "FAIL"}, {"detail", a.detail}});
  j["summary"] = summary;
  return j;
}

std::string Report::csv() const {
  std::ostringstream os;
  os << "experiment,config_hash,master_seed";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (const auto& r : rows) {
    os << experiment << ',' << config_hash << ',' << master_seed;
    for (const auto& v : r) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

void write_report(const Report& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write_text = [&](const std::string& name, const std::string& text) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << text;
  };
  write_text("results.csv", r.csv());
  write_text("verdict.json", r.verdict().dump(2) + "\n");
  std::ostringstream t;
  t << "task,seconds\n";
  for (const auto& [name, s] : r.timings) t << name << ',' << format_double(s) << '\n';
  write_text("timings.csv", t.str());
  for (const auto& d : r.dat) write_dat(dir / d.name, d.columns, d.rows, d.comment);
  for (const auto& [name, f] : r.fields) write_field(dir / name, f);
  for (const auto& [name, text] : r.text_files) write_text(name, text);
}

// ---------------------------------------------------------------------------
// helpers

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nan("");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
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

std::string list_text(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
  return s + "]";
}

Report make_report(const std::string& name, const ExperimentConfig& cfg) {
  Report r;
  r.experiment = name;
  r.config_hash = cfg.hash();
  r.master_seed = cfg.master_seed;
  r.text_files.emplace_back("config.ini", cfg.canonical());
  return r;
}

ScalingParams scaling_for(const ExperimentConfig& cfg, std::uint64_t N) {
  ScalingParams s = cfg.scaling;
  s.N = N;
  s.d = cfg.model.d;
  return s;
}

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig sc;
  sc.dt = cfg.pde_dt;
  sc.T = cfg.T;
  sc.snapshot_times = cfg.snapshot_times();
  sc.dealias = cfg.dealias;
  return sc;
}

Trajectory solve_mode(const ExperimentConfig& cfg, const ModelParams& model, const Field& u0, SolverMode mode,
                      std::optional<MollifierFamily> fam) {
  const PdeSolver solver(model, u0.grid(), mode, std::move(fam), cfg.dealias);
  return solver.solve(u0, solver_config(cfg));
}

struct ParticleRun {
  std::size_t long_jumps = 0;
  double max_displacement = 0.0;
  bool jump_cap_active = false;
};

// Steps the ensemble to T, calling on_snapshot(k, e) at each snapshot time.
ParticleRun run_particles(const ExperimentConfig& cfg, const ParticleStepper& stepper, ParticleEnsemble& e,
                          std::uint64_t seed, const std::function<void(std::size_t, const ParticleEnsemble&)>& on_snapshot) {
  const auto times = cfg.snapshot_times();
  const long steps = std::lround(cfg.T / cfg.particle_dt);
  std::vector<long> snap_steps;
  for (double t : times) snap_steps.push_back(std::lround(t / cfg.particle_dt));
  ParticleRun run;
  std::size_t next = 0;
  auto emit = [&](long s) {
    while (next < snap_steps.size() && snap_steps[next] == s) on_snapshot(next++, e);
  };
  emit(0);
  for (long s = 1; s <= steps; ++s) {
    const auto rec = stepper.step(e, cfg.particle_dt, s * cfg.particle_dt, static_cast<std::uint32_t>(s - 1), seed);
    for (auto j : rec.long_jumps) run.long_jumps += j;
    for (double m : rec.max_displacement) run.max_displacement = std::max(run.max_displacement, m);
    run.jump_cap_active = rec.jump_cap_active;
    emit(s);
  }
  return run;
}

struct SeedTask {
  std::size_t n_index;
  int seed_index;
};

std::vector<SeedTask> seed_tasks(std::size_t n_count, int seeds) {
  std::vector<SeedTask> tasks;
  for (std::size_t i = 0; i < n_count; ++i)
    for (int s = 0; s < seeds; ++s) tasks.push_back({i, s});
  return tasks;
}

void require_valid(const ExperimentConfig& cfg) {
  const auto rep = validate_config(cfg);
  if (!rep.ok) throw ConfigError("invalid configuration: " + rep.summary());
}

// Particle-vs-field experiment shared by converge-n and pure-diffusion.
// `reference(n_index)` returns the snapshot fields to compare against.
struct FieldComparison {
  std::vector<std::vector<std::string>> rows;
  std::vector<double> medians;
  std::vector<double> exceed_fraction;
  std::vector<std::pair<std::string, double>> timings;
  bool all_ok = true;
  std::size_t init_exceed = 0;
};

FieldComparison compare_with_fields(const ExperimentConfig& cfg, const ModelParams& model, const Field& u0,
                                    const std::vector<std::optional<std::vector<Field>>>& reference,
                                    const std::vector<std::string>& reference_errors) {
  const auto grid = cfg.grid();
  const auto times = cfg.snapshot_times();
  const auto tasks = seed_tasks(cfg.N_list.size(), cfg.seed_count);
  struct Out {
    std::vector<std::string> row;
    double norm2 = std::nan("");
    bool exceeds = false;
    bool init_exceeds = false;
    bool ok = false;
    double seconds = 0.0;
  };
  std::vector<Out> out(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const auto t0 = Clock::now();
    const auto& task = tasks[t];
    const std::uint64_t N = cfg.N_list[task.n_index];
    const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(task.seed_index));
    const auto sc = derived_scales(scaling_for(cfg, N));
    auto& o = out[t];
    std::string status = "ok";
    double init_err2 = std::nan("");
    const double init_bound = std::pow(sc.delta_N, 1.0 + cfg.scaling.rho);
    ParticleRun run;
    try {
      if (!reference[task.n_index]) throw std::runtime_error(reference_errors[task.n_index]);
      const auto& ref = *reference[task.n_index];
      const MollifierFamily fam(scaling_for(cfg, N));
      require_resolved(fam, KernelKind::W, grid);
      const ParticleStepper stepper(model, fam, grid, cfg.drift,
                                    NoiseConfig{0, cfg.jump_cap, 0.0, true});
      auto e = init_from_density(u0, N, counts_from_mass(u0, N), seed);
      std::vector<Field> diffs;
      run = run_particles(cfg, stepper, e, seed, [&](std::size_t k, const ParticleEnsemble& ens) {
        diffs.push_back(deposit_h(ens, grid, fam) - ref[k]);
        if (k == 0) {
          const auto d0 = deposit_h(ens, grid, fam) - u0;
          const double n = l2_norm(d0);
          init_err2 = n * n;
        }
      });
      o.norm2 = trajectory_norm(times, diffs, model.alpha);
      o.ok = true;
    } catch (const std::exception& ex) {
      status = "failed: " + csv_safe(ex.what());
    }
    o.exceeds = o.ok && o.norm2 >= sc.delta_N;
    o.init_exceeds = o.ok && init_err2 >= init_bound;
    o.row = {std::to_string(N),
             std::to_string(task.seed_index),
             std::to_string(seed),
             fmt(sc.kappa_N),
             fmt(sc.kappa_hat_N),
             fmt(sc.delta_N),
             fmt(o.norm2),
             o.exceeds ? "1" : "0",
             fmt(init_err2),
             fmt(init_bound),
             o.init_exceeds ? "1" : "0",
             std::to_string(run.long_jumps),
             run.jump_cap_active ? "1" : "0",
             status};
    o.seconds = seconds_since(t0);
  });

  FieldComparison res;
  for (std::size_t i = 0; i < cfg.N_list.size(); ++i) {
    std::vector<double> norms;
    std::size_t exceed = 0, count = 0;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].n_index != i) continue;
      ++count;
      if (out[t].ok) norms.push_back(out[t].norm2);
      exceed += out[t].exceeds;
    }
    res.medians.push_back(median(norms));
    res.exceed_fraction.push_back(count ? static_cast<double>(exceed) / static_cast<double>(count) : 0.0);
  }
  // tasks are generated in (N, seed) order already.
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    res.rows.push_back(out[t].row);
    res.all_ok = res.all_ok && out[t].ok;
    res.init_exceed += out[t].init_exceeds;
    res.timings.emplace_back("N=" + std::to_string(cfg.N_list[tasks[t].n_index]) +
                                 " seed=" + std::to_string(tasks[t].seed_index),
                             out[t].seconds);
  }
  return res;
}

const std::vector<std::string> kComparisonColumns = {
    "N",        "seed_index", "seed",          "kappa_N",     "kappa_hat_N",  "delta_N",         "norm2",
    "exceeds_delta", "init_err2", "init_bound", "init_exceeds", "long_jumps", "jump_cap_active", "status"};

}  // namespace

// ---------------------------------------------------------------------------

Report run_converge_n(const ExperimentConfig& cfg) {
  require_valid(cfg);
  Report r = make_report("converge-n", cfg);
  const auto grid = cfg.grid();
  const Field u0 = cfg.initial.evaluate(grid);

  const auto t0 = Clock::now();
  std::vector<std::optional<std::vector<Field>>> ref(cfg.N_list.size());
  std::vector<std::string> errors(cfg.N_list.size());
  parallel_for(cfg.N_list.size(), [&](std::size_t i) {
    try {
      ref[i] = solve_mode(cfg, cfg.model, u0, SolverMode::Regularized,
                          MollifierFamily(scaling_for(cfg, cfg.N_list[i]))).snapshots;
    } catch (const std::exception& ex) {
      errors[i] = std::string("PDE: ") + ex.what();
    }
  });
  r.timings.emplace_back("pde", seconds_since(t0));

  auto cmp = compare_with_fields(cfg, cfg.model, u0, ref, errors);
  r.columns = kComparisonColumns;
  r.rows = std::move(cmp.rows);
  r.timings.insert(r.timings.end(), cmp.timings.begin(), cmp.timings.end());

  DatFile dat{"converge_n.dat", "median trajectory norm^2 and exceedance fraction per N",
              {"N", "median_norm2", "delta_N", "exceed_fraction"}, {}};
  for (std::size_t i = 0; i < cfg.N_list.size(); ++i) {
    const double N = static_cast<double>(cfg.N_list[i]);
    dat.rows.push_back({N, cmp.medians[i], std::pow(N, -cfg.scaling.delta), cmp.exceed_fraction[i]});
  }
  r.dat.push_back(dat);
  r.summary["N"] = cfg.N_list;
  r.summary["median_norm2"] = cmp.medians;
  r.summary["exceed_fraction"] = cmp.exceed_fraction;
  r.summary["init_exceed_count"] = cmp.init_exceed;
  r.assertions.push_back({"all_runs_completed", cmp.all_ok, "every (N, seed) run finished without error"});
  r.assertions.push_back({"median_norm2_strictly_decreasing", strictly_decreasing(cmp.medians),
                          "medians " + list_text(cmp.medians)});
  r.assertions.push_back({"exceedance_fraction_non_increasing", non_increasing(cmp.exceed_fraction),
                          "fractions " + list_text(cmp.exceed_fraction)});
  return r;
}

Report run_pure_diffusion(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  std::fill(cfg.model.a.begin(), cfg.model.a.end(), 0.0);
  require_valid(cfg);
  Report r = make_report("pure-diffusion", cfg);
  const auto grid = cfg.grid();
  const Field u0 = cfg.initial.evaluate(grid);
  std::vector<Field> exact;
  for (double t : cfg.snapshot_times()) exact.push_back(fractional_heat(u0, cfg.model, t));
  std::vector<std::optional<std::vector<Field>>> ref(cfg.N_list.size(), exact);
  std::vector<std::string> errors(cfg.N_list.size());

  auto cmp = compare_with_fields(cfg, cfg.model, u0, ref, errors);
  r.columns = kComparisonColumns;
  r.rows = std::move(cmp.rows);
  r.timings = std::move(cmp.timings);
  DatFile dat{"pure_diffusion.dat", "median trajectory norm^2 of h^N against the fractional heat solution",
              {"N", "median_norm2"}, {}};
  for (std::size_t i = 0; i < cfg.N_list.size(); ++i)
    dat.rows.push_back({static_cast<double>(cfg.N_list[i]), cmp.medians[i]});
  r.dat.push_back(dat);
  r.summary["N"] = cfg.N_list;
  r.summary["median_norm2"] = cmp.medians;
  r.assertions.push_back({"all_runs_completed", cmp.all_ok, "every (N, seed) run finished without error"});
  r.assertions.push_back({"median_norm2_strictly_decreasing", strictly_decreasing(cmp.medians),
                          "medians " + list_text(cmp.medians)});
  return r;
}

Report run_converge_reg(const ExperimentConfig& cfg) {
  require_valid(cfg);
  Report r = make_report("converge-reg", cfg);
  const auto grid = cfg.grid();
  const Field u0 = cfg.initial.evaluate(grid);
  const auto times = cfg.snapshot_times();

  auto t0 = Clock::now();
  std::optional<Trajectory> limit;
  std::string limit_error;
  try {
    limit = solve_mode(cfg, cfg.model, u0, SolverMode::Limit, std::nullopt);
  } catch (const std::exception& ex) {
    limit_error = ex.what();
  }
  r.timings.emplace_back("limit", seconds_since(t0));

  const std::size_t nN = cfg.N_list.size();
  std::vector<double> norms(nN, std::nan("")), seconds(nN, 0.0);
  std::vector<std::string> status(nN, "ok");
  parallel_for(nN, [&](std::size_t i) {
    const auto t1 = Clock::now();
    try {
      if (!limit) throw std::runtime_error("limit PDE: " + limit_error);
      const auto reg = solve_mode(cfg, cfg.model, u0, SolverMode::Regularized,
                                  MollifierFamily(scaling_for(cfg, cfg.N_list[i])));
      norms[i] = trajectory_norm(PairedTrajectory(times, reg.snapshots, limit->snapshots), cfg.model.alpha);
    } catch (const std::exception& ex) {
      status[i] = "failed: " + csv_safe(ex.what());
    }
    seconds[i] = seconds_since(t1);
  });

  r.columns = {"N", "kappa_hat_N", "norm2", "status"};
  std::vector<double> log_k, log_n;
  bool all_ok = limit.has_value();
  DatFile dat{"converge_reg.dat", "||u_hat^N - u||^2 over [0,T] against kappa_hat_N", {"kappa_hat_N", "norm2"}, {}};
  for (std::size_t i = 0; i < nN; ++i) {
    const double kh = derived_scales(scaling_for(cfg, cfg.N_list[i])).kappa_hat_N;
    r.rows.push_back({std::to_string(cfg.N_list[i]), fmt(kh), fmt(norms[i]), status[i]});
    r.timings.emplace_back("N=" + std::to_string(cfg.N_list[i]), seconds[i]);
    all_ok = all_ok && status[i] == "ok";
    if (status[i] == "ok" && norms[i] > 0.0) {
      log_k.push_back(std::log(kh));
      log_n.push_back(std::log(norms[i]));
      dat.rows.push_back({kh, norms[i]});
    }
  }
  r.dat.push_back(dat);
  const double slope = fit_slope(log_k, log_n);
  r.summary["N"] = cfg.N_list;
  r.summary["norm2"] = norms;
  r.summary["slope_vs_kappa_hat"] = slope;
  r.summary["slope_vs_inverse_kappa_hat"] = -slope;
  r.assertions.push_back({"all_runs_completed", all_ok, limit ? "all solves finished" : "limit solve failed"});
  r.assertions.push_back({"norm2_strictly_decreasing", strictly_decreasing(norms), "norm2 " + list_text(norms)});
  r.assertions.push_back({"loglog_slope_vs_kappa_hat_negative", std::isfinite(slope) && slope < 0.0,
                          "slope " + fmt(slope) + " (against log kappa_hat_N^-1: " + fmt(-slope) + ")"});
  return r;
}

Report run_theorem2_probe(const ExperimentConfig& cfg) {
  require_valid(cfg);
  Report r = make_report("theorem2-probe", cfg);
  const auto grid = cfg.grid();
  const Field u0 = cfg.initial.evaluate(grid);
  const int n = cfg.model.n;

  auto t0 = Clock::now();
  std::optional<Trajectory> limit;
  std::string limit_error;
  try {
    limit = solve_mode(cfg, cfg.model, u0, SolverMode::Limit, std::nullopt);
  } catch (const std::exception& ex) {
    limit_error = ex.what();
  }
  r.timings.emplace_back("limit", seconds_since(t0));

  // Densities as weighted atoms, built once per snapshot.
  std::vector<std::vector<Measure>> density;
  if (limit) {
    for (const auto& f : limit->snapshots) {
      std::vector<Measure> per;
      for (int i = 0; i < n; ++i) per.push_back(Measure::from_density(grid, f.component(i)));
      density.push_back(std::move(per));
    }
  }
  const auto dict = BlDictionary::standard(cfg.model.d);

  const auto tasks = seed_tasks(cfg.N_list.size(), cfg.seed_count);
  struct Out {
    std::vector<double> sup;
    double total = std::nan("");
    bool ok = false;
    std::string status = "ok";
    double seconds = 0.0;
  };
  std::vector<Out> out(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const auto t1 = Clock::now();
    const auto& task = tasks[t];
    const std::uint64_t N = cfg.N_list[task.n_index];
    const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(task.seed_index));
    auto& o = out[t];
    o.sup.assign(static_cast<std::size_t>(n), 0.0);
    try {
      if (!limit) throw std::runtime_error("limit PDE: " + limit_error);
      const MollifierFamily fam(scaling_for(cfg, N));
      const ParticleStepper stepper(cfg.model, fam, grid, cfg.drift, NoiseConfig{0, cfg.jump_cap, 0.0, true});
      auto e = init_from_density(u0, N, counts_from_mass(u0, N), seed);
      run_particles(cfg, stepper, e, seed, [&](std::size_t k, const ParticleEnsemble& ens) {
        for (int i = 0; i < n; ++i) {
          const auto pts = Measure::from_points(ens.dim(), ens.length(), ens.positions(i), ens.weight());
          o.sup[static_cast<std::size_t>(i)] =
              std::max(o.sup[static_cast<std::size_t>(i)], bl_metric(pts, density[k][static_cast<std::size_t>(i)], dict));
        }
      });
      o.total = 0.0;
      for (double s : o.sup) o.total += s;
      o.ok = true;
    } catch (const std::exception& ex) {
      o.status = "failed: " + csv_safe(ex.what());
    }
    o.seconds = seconds_since(t1);
  });

  r.columns = {"N", "seed_index", "seed"};
  for (int i = 0; i < n; ++i) r.columns.push_back("sup_bl_species" + std::to_string(i + 1));
  r.columns.push_back("sup_bl_sum");
  r.columns.push_back("status");
  bool all_ok = limit.has_value();
  std::vector<double> medians;
  for (std::size_t i = 0; i < cfg.N_list.size(); ++i) {
    std::vector<double> v;
    for (std::size_t t = 0; t < tasks.size(); ++t)
      if (tasks[t].n_index == i && out[t].ok) v.push_back(out[t].total);
    medians.push_back(median(v));
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const std::uint64_t N = cfg.N_list[tasks[t].n_index];
    std::vector<std::string> row{std::to_string(N), std::to_string(tasks[t].seed_index),
                                 std::to_string(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(tasks[t].seed_index)))};
    for (double s : out[t].sup) row.push_back(fmt(out[t].ok ? s : std::nan("")));
    row.push_back(fmt(out[t].total));
    row.push_back(out[t].status);
    r.rows.push_back(std::move(row));
    all_ok = all_ok && out[t].ok;
    r.timings.emplace_back("N=" + std::to_string(N) + " seed=" + std::to_string(tasks[t].seed_index), out[t].seconds);
  }
  DatFile dat{"bl_distance.dat", "median over seeds of sum_i sup_t d(S_i^N, u_i)", {"N", "median_sup_bl"}, {}};
  for (std::size_t i = 0; i < cfg.N_list.size(); ++i) dat.rows.push_back({static_cast<double>(cfg.N_list[i]), medians[i]});
  r.dat.push_back(dat);
  r.summary["N"] = cfg.N_list;
  r.summary["median_sup_bl"] = medians;
  r.assertions.push_back({"all_runs_completed", all_ok, "every (N, seed) run finished without error"});
  r.assertions.push_back({"median_sup_bl_strictly_decreasing", strictly_decreasing(medians), "medians " + list_text(medians)});
  return r;
}

Report run_variance_study(const ExperimentConfig& cfg) {
  require_valid(cfg);
  Report r = make_report("variance-study", cfg);
  const auto grid = cfg.grid();
  const Field u0 = cfg.initial.evaluate(grid);
  const auto t0 = Clock::now();
  const auto rows = empirical_force_variance(cfg.model, cfg.scaling, cfg.variance_N_list, u0, cfg.probe, 0,
                                             cfg.variance_seeds, cfg.master_seed);
  r.timings.emplace_back("variance", seconds_since(t0));
  const int d = cfg.model.d;
  r.columns = {"N", "kappa_N", "mean_force", "variance", "bound_scale"};
  std::vector<double> logN, logV, vars;
  DatFile dat{"variance.dat", "across-seed force variance at the probe point", {"N", "variance"}, {}};
  for (const auto& row : rows) {
    const double scale = std::pow(row.kappa_N, d + 2.0 * cfg.model.beta) / static_cast<double>(row.N);
    r.rows.push_back({std::to_string(row.N), fmt(row.kappa_N), fmt(row.mean), fmt(row.variance), fmt(scale)});
    logN.push_back(std::log(static_cast<double>(row.N)));
    logV.push_back(std::log(row.variance));
    vars.push_back(row.variance);
    dat.rows.push_back({static_cast<double>(row.N), row.variance});
  }
  r.dat.push_back(dat);
  const double slope = fit_slope(logN, logV);
  const double threshold = -(1.0 - cfg.scaling.kappa * (d + 2.0 * cfg.model.beta) / d) + 0.15;
  r.summary["N"] = cfg.variance_N_list;
  r.summary["variance"] = vars;
  r.summary["slope"] = slope;
  r.summary["slope_threshold"] = threshold;
  r.assertions.push_back({"variance_strictly_decreasing", strictly_decreasing(vars), "variance " + list_text(vars)});
  r.assertions.push_back({"loglog_slope_below_threshold", std::isfinite(slope) && slope <= threshold,
                          "slope " + fmt(slope) + " threshold " + fmt(threshold)});
  return r;
}

namespace {

std::vector<double> draw_increments(const StableParams& p, std::uint64_t count, std::uint64_t seed,
                                    std::uint32_t tag) {
  constexpr std::uint64_t kChunk = 1 << 16;
  std::vector<double> out(count);
  const std::uint64_t chunks = (count + kChunk - 1) / kChunk;
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    RngStream rng(seed, {tag, static_cast<std::uint32_t>(c), 0, StreamPurpose::SamplerValidation});
    const std::uint64_t lo = c * kChunk, hi = std::min<std::uint64_t>(count, lo + kChunk);
    for (std::uint64_t k = lo; k < hi; ++k) sample_increment(p, rng, std::span<double>(&out[k], 1));
  });
  return out;
}

}  // namespace

Report run_sampler_validation(const ExperimentConfig& cfg) {
  require_valid(cfg);
  Report r = make_report("validate-sampler", cfg);
  const StableParams p{cfg.model.alpha, 1, cfg.sampler_sigma, cfg.sampler_dt, 0.0};
  validate(p);
  auto t0 = Clock::now();
  const auto samples = draw_increments(p, cfg.sampler_samples, cfg.master_seed, 0);
  const auto cf = empirical_char_function(samples, cfg.sampler_xi);
  r.timings.emplace_back("char_function", seconds_since(t0));

  r.columns = {"xi", "target", "empirical", "stderr"};
  bool within = true;
  double worst = 0.0;
  DatFile cf_dat{"char_function.dat", "empirical vs target characteristic function", {"xi", "target", "empirical", "stderr"}, {}};
  for (std::size_t k = 0; k < cf.xi.size(); ++k) {
    const double target = std::exp(-p.sigma * p.dt * std::pow(std::abs(cf.xi[k]), 2.0 * p.alpha));
    const double z = std::abs(cf.real[k] - target) / cf.std_err[k];
    worst = std::max(worst, z);
    within = within && z <= 3.0;
    r.rows.push_back({fmt(cf.xi[k]), fmt(target), fmt(cf.real[k]), fmt(cf.std_err[k])});
    cf_dat.rows.push_back({cf.xi[k], target, cf.real[k], cf.std_err[k]});
  }
  r.dat.push_back(cf_dat);

  t0 = Clock::now();
  const auto tail_samples = draw_increments(p, cfg.sampler_tail_samples, cfg.master_seed, 1);
  // Radii are in units of the increment scale (sigma dt)^{1/(2 alpha)}.
  const double scale = std::pow(p.sigma * p.dt, 1.0 / (2.0 * p.alpha));
  const auto tail = tail_slope(tail_samples, cfg.tail_r_lo * scale, cfg.tail_r_hi * scale);
  r.timings.emplace_back("tail", seconds_since(t0));
  DatFile tail_dat{"tail.dat", "empirical survival function P(|X| > r)", {"r", "survival"}, {}};
  for (std::size_t k = 0; k < tail.r.size(); ++k) tail_dat.rows.push_back({tail.r[k], tail.survival[k]});
  r.dat.push_back(tail_dat);

  const double expected = -2.0 * p.alpha;
  r.summary["max_z_score"] = worst;
  r.summary["tail_slope"] = tail.slope;
  r.summary["expected_tail_slope"] = expected;
  r.assertions.push_back({"char_function_within_3_stderr", within, "max |z| = " + fmt(worst)});
  r.assertions.push_back({"tail_slope_within_0.1", std::abs(tail.slope - expected) <= 0.1,
                          "slope " + fmt(tail.slope) + " expected " + fmt(expected)});
  return r;
}

Report run_simulate_particles(const ExperimentConfig& cfg) {
  require_valid(cfg);
  Report r = make_report("simulate-particles", cfg);
  const auto grid = cfg.grid();
  const Field u0 = cfg.initial.evaluate(grid);
  const std::uint64_t N = cfg.N_list.front();
  const std::uint64_t seed = derive_seed(cfg.master_seed, 0);
  const MollifierFamily fam(scaling_for(cfg, N));
  require_resolved(fam, KernelKind::W, grid);
  const ParticleStepper stepper(cfg.model, fam, grid, cfg.drift, NoiseConfig{0, cfg.jump_cap, 0.0, true});
  auto e = init_from_density(u0, N, counts_from_mass(u0, N), seed);
  const auto times = cfg.snapshot_times();

  r.columns = {"snapshot", "t", "species", "particles", "h_mass", "h_min", "h_max"};
  double worst_mass = 0.0;
  const auto t0 = Clock::now();
  const auto run = run_particles(cfg, stepper, e, seed, [&](std::size_t k, const ParticleEnsemble& ens) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%04zu", k);
    std::ostringstream pos;
    write_positions_csv(pos, ens);
    r.text_files.emplace_back(std::string("positions_") + tag + ".csv", pos.str());
    const Field h = deposit_h(ens, grid, fam);
    r.fields.emplace_back(std::string("h_") + tag + ".bin", h);
    for (int i = 0; i < ens.species(); ++i) {
      const auto c = h.component(i);
      const double mass = integrate(grid, c);
      worst_mass = std::max(worst_mass, std::abs(mass - ens.mass(i)));
      r.rows.push_back({std::to_string(k), fmt(times[k]), std::to_string(i + 1), std::to_string(ens.count(i)),
                        fmt(mass), fmt(*std::min_element(c.begin(), c.end())),
                        fmt(*std::max_element(c.begin(), c.end()))});
    }
  });
  r.timings.emplace_back("simulate", seconds_since(t0));
  r.summary["N"] = N;
  r.summary["long_jumps"] = run.long_jumps;
  r.summary["max_displacement"] = run.max_displacement;
  r.summary["jump_cap_active"] = run.jump_cap_active;
  r.assertions.push_back({"deposited_mass_matches", worst_mass <= 1e-10, "max |mass(h_i) - N_i/N| = " + fmt(worst_mass)});
  return r;
}

Report run_solve_pde(const ExperimentConfig& cfg) {
  require_valid(cfg);
  Report r = make_report("solve-pde", cfg);
  const auto grid = cfg.grid();
  const Field u0 = cfg.initial.evaluate(grid);
  const int n = cfg.model.n;
  std::optional<MollifierFamily> fam;
  if (cfg.pde_mode == SolverMode::Regularized) fam.emplace(scaling_for(cfg, cfg.N_list.front()));
  const PdeSolver solver(cfg.model, grid, cfg.pde_mode, fam, cfg.dealias);
  SolverConfig sc = solver_config(cfg);
  sc.throw_on_blowup = false;
  const auto t0 = Clock::now();
  const auto traj = solver.solve(u0, sc);
  r.timings.emplace_back("solve", seconds_since(t0));

  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%04zu", k);
    r.fields.emplace_back(std::string("u_") + tag + ".bin", traj.snapshots[k]);
    if (grid.dim() == 1) {
      std::ostringstream os;
      write_field_csv(os, traj.snapshots[k]);
      r.text_files.emplace_back(std::string("u_") + tag + ".csv", os.str());
    }
  }

  std::ostringstream mon;
  mon << 't';
  for (const char* what : {"mass", "min", "hs_proxy"})
    for (int i = 0; i < n; ++i) mon << ',' << what << '_' << (i + 1);
  mon << ",cfl\n";
  nlohmann::json series = nlohmann::json::array();
  for (const auto& m : traj.monitors) {
    mon << fmt(m.t);
    for (double v : m.mass) mon << ',' << fmt(v);
    for (double v : m.min) mon << ',' << fmt(v);
    for (double v : m.hs_proxy) mon << ',' << fmt(v);
    mon << ',' << fmt(m.cfl) << '\n';
    series.push_back({{"t", m.t}, {"mass", m.mass}, {"min", m.min}, {"hs_proxy", m.hs_proxy}, {"cfl", m.cfl}});
  }
  r.text_files.emplace_back("monitors.csv", mon.str());
  nlohmann::json meta;
  meta["config"] = cfg.canonical();
  meta["config_hash"] = cfg.hash();
  meta["mode"] = cfg.pde_mode == SolverMode::Regularized ? "regularized" : "limit";
  meta["completed"] = traj.completed;
  meta["failure"] = traj.failure;
  meta["failure_time"] = traj.failure_time;
  meta["cfl_warnings"] = traj.cfl_warnings;
  meta["sup_l2_sq"] = traj.sup_l2_sq;
  meta["int_seminorm_sq"] = traj.int_seminorm_sq;
  meta["monitors"] = series;
  r.text_files.emplace_back("metadata.json", meta.dump(2) + "\n");

  r.columns = {"snapshot", "t", "species", "mass", "min", "hs_proxy"};
  const auto& first = traj.monitors.front();
  double mass_drift = 0.0, worst_min = 0.0, u0_max = 0.0;
  for (double v : u0.values()) u0_max = std::max(u0_max, v);
  for (const auto& m : traj.monitors) {
    for (int i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const double ref = std::max(std::abs(first.mass[ii]), 1e-300);
      mass_drift = std::max(mass_drift, std::abs(m.mass[ii] - first.mass[ii]) / ref);
      worst_min = std::min(worst_min, m.min[ii]);
    }
  }
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    // Monitors are per step; find the sample at the snapshot time.
    const auto it = std::min_element(traj.monitors.begin(), traj.monitors.end(), [&](const auto& a, const auto& b) {
      return std::abs(a.t - traj.times[k]) < std::abs(b.t - traj.times[k]);
    });
    for (int i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      r.rows.push_back({std::to_string(k), fmt(traj.times[k]), std::to_string(i + 1), fmt(it->mass[ii]),
                        fmt(it->min[ii]), fmt(it->hs_proxy[ii])});
    }
  }
  r.summary["completed"] = traj.completed;
  r.summary["relative_mass_drift"] = mass_drift;
  r.summary["min_value"] = worst_min;
  r.summary["cfl_warnings"] = traj.cfl_warnings;
  r.assertions.push_back({"completed", traj.completed, traj.completed ? "reached T" : traj.failure});
  r.assertions.push_back({"mass_conserved", mass_drift <= 1e-10, "relative drift " + fmt(mass_drift)});
  r.assertions.push_back({"min_above_tolerance", worst_min >= -1e-6 * u0_max,
                          "min " + fmt(worst_min) + " vs -1e-6 max(u0) = " + fmt(-1e-6 * u0_max)});
  return r;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"simulate-particles", "solve-pde",      "converge-n",
                                                 "converge-reg",       "theorem2-probe", "variance-study",
                                                 "validate-sampler",   "pure-diffusion"};
  return names;
}

Report run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "simulate-particles") return run_simulate_particles(cfg);
  if (name == "solve-pde") return run_solve_pde(cfg);
  if (name == "converge-n") return run_converge_n(cfg);
  if (name == "converge-reg") return run_converge_reg(cfg);
  if (name == "theorem2-probe") return run_theorem2_probe(cfg);
  if (name == "variance-study") return run_variance_study(cfg);
  if (name == "validate-sampler") return run_sampler_validation(cfg);
  if (name == "pure-diffusion") return run_pure_diffusion(cfg);
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

}  // namespace fraclab
