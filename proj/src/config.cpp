#include "fraclab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "fraclab/field_io.hpp"

namespace fraclab {

namespace pt = boost::property_tree;

Field InitialCondition::evaluate(const PeriodicGrid& grid) const {
  const int d = grid.dim();
  const double L = grid.length();
  const auto M = static_cast<std::size_t>(grid.points());
  Field u(grid, static_cast<int>(species.size()));
  for (std::size_t i = 0; i < species.size(); ++i) {
    auto comp = u.component(static_cast<int>(i));
    for (const auto& b : species[i]) {
      // Per-axis periodized 1D Gaussians, then the tensor product.
      std::vector<std::vector<double>> axis(static_cast<std::size_t>(d), std::vector<double>(M, 0.0));
      const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * b.width);
      const int images = 1 + static_cast<int>(std::ceil(8.0 * b.width / L));
      for (int a = 0; a < d; ++a) {
        for (std::size_t m = 0; m < M; ++m) {
          double s = 0.0;
          for (int q = -images; q <= images; ++q) {
            const double z = (grid.node(static_cast<int>(m)) - b.center[static_cast<std::size_t>(a)] + q * L) / b.width;
            s += std::exp(-0.5 * z * z);
          }
          axis[static_cast<std::size_t>(a)][m] = norm * s;
        }
      }
      for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        std::size_t rest = idx;
        double v = b.amplitude;
        for (int a = d - 1; a >= 0; --a) {
          v *= axis[static_cast<std::size_t>(a)][rest % M];
          rest /= M;
        }
        comp[idx] += v;
      }
    }
  }
  return u;
}

std::vector<double> ExperimentConfig::snapshot_times() const {
  std::vector<double> t;
  const int n = std::max(2, snapshots);
  const long steps = std::lround(T / pde_dt);
  for (int k = 0; k < n; ++k) {
    // Snap to the PDE step grid.
    const long s = std::lround(static_cast<double>(steps) * k / (n - 1));
    t.push_back(static_cast<double>(s) * pde_dt);
  }
  return t;
}

namespace {

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    if constexpr (std::is_floating_point_v<T>)
      s += format_double(v[k]);
    else
      s += std::to_string(v[k]);
  }
  return s;
}

std::string trim(std::string s) {
  auto ns = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), ns));
  s.erase(std::find_if(s.rbegin(), s.rend(), ns).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

// Accepts plain numbers and multiples of pi: "pi", "16pi", "16*pi", "-0.5 pi".
double parse_real(const std::string& key, const std::string& raw) {
  std::string s = lower(trim(raw));
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (!s.empty() && s.back() == '*') s = trim(s.substr(0, s.size() - 1));
    if (s.empty() || s == "+") return factor;
    if (s == "-") return -factor;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
    return v * factor;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as a number");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty() || s[0] == '-') throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + raw + "'");
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + raw + "'");
  }
}

int parse_int(const std::string& key, const std::string& raw) {
  const auto v = parse_uint(key, raw);
  if (v > 1000000000ULL) throw ConfigError("key '" + key + "': value too large");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = lower(trim(raw));
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + raw + "'");
}

std::vector<double> parse_reals(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& t : split(raw, ",")) out.push_back(parse_real(key, t));
  return out;
}

std::vector<std::uint64_t> parse_uints(const std::string& key, const std::string& raw) {
  std::vector<std::uint64_t> out;
  for (const auto& t : split(raw, ",")) out.push_back(parse_uint(key, t));
  return out;
}

// "c_1 .. c_d width amplitude; ..." with whitespace or comma separators.
std::vector<Bump> parse_bumps(const std::string& key, const std::string& raw, int d) {
  std::vector<Bump> out;
  for (const auto& part : split(raw, ";")) {
    const auto fields = split(part, ", \t");
    if (fields.size() != static_cast<std::size_t>(d + 2))
      throw ConfigError("key '" + key + "': each bump needs " + std::to_string(d) +
                        " center coordinate(s), a width and an amplitude");
    Bump b;
    for (int a = 0; a < d; ++a) b.center.push_back(parse_real(key, fields[static_cast<std::size_t>(a)]));
    b.width = parse_real(key, fields[static_cast<std::size_t>(d)]);
    b.amplitude = parse_real(key, fields[static_cast<std::size_t>(d + 1)]);
    out.push_back(std::move(b));
  }
  return out;
}

std::string bumps_text(const std::vector<Bump>& bumps) {
  std::string s;
  for (std::size_t k = 0; k < bumps.size(); ++k) {
    if (k) s += "; ";
    for (double c : bumps[k].center) s += format_double(c) + " ";
    s += format_double(bumps[k].width) + " " + format_double(bumps[k].amplitude);
  }
  return s;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.model.n = 2;
  c.model.d = 1;
  c.model.alpha = 0.85;
  c.model.beta = 0.5;
  c.model.sigma = {1.0, 1.0};
  c.model.a = {0.5, -0.3, 0.2, 0.4};
  c.scaling = ScalingParams{};
  c.N_list = {500, 2000, 8000};
  c.L = 16.0 * std::numbers::pi;
  c.M = 4096;
  c.initial.species = {
      {Bump{{-3.0}, 1.2, 0.6}, Bump{{2.0}, 1.5, 0.4}},
      {Bump{{0.5}, 2.0, 1.0}},
  };
  c.variance_N_list = {256, 512, 1024, 2048, 4096, 8192, 16384};
  c.probe = {0.0};
  c.sampler_xi = {0.5, 1.0, 2.0, 4.0};
  return c;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << "[model]\n"
     << "n = " << model.n << "\nd = " << model.d << "\nalpha = " << format_double(model.alpha)
     << "\nbeta = " << format_double(model.beta) << "\nsigma = " << join(model.sigma) << "\na = " << join(model.a)
     << "\n[scaling]\n"
     << "delta = " << format_double(scaling.delta) << "\nrho = " << format_double(scaling.rho)
     << "\nkappa = " << format_double(scaling.kappa) << "\nkappa_hat = " << format_double(scaling.kappa_hat)
     << "\nN_list = " << join(N_list) << "\n[grid]\nL = " << format_double(L) << "\nM = " << M
     << "\n[solver]\ndt = " << format_double(pde_dt) << "\nT = " << format_double(T) << "\nsnapshots = " << snapshots
     << "\ndealias = " << (dealias ? "true" : "false")
     << "\nmode = " << (pde_mode == SolverMode::Regularized ? "regularized" : "limit") << "\n[particles]\ndt = "
     << format_double(particle_dt) << "\ndrift = " << (drift == DriftMethod::Grid ? "grid" : "direct")
     << "\njump_cap = " << format_double(jump_cap) << "\n[seeds]\ncount = " << seed_count << "\n[initial]\n";
  for (std::size_t i = 0; i < initial.species.size(); ++i)
    os << "species" << (i + 1) << " = " << bumps_text(initial.species[i]) << '\n';
  os << "[variance]\nN_list = " << join(variance_N_list) << "\nseeds = " << variance_seeds
     << "\nprobe = " << join(probe) << "\n[sampler]\nsamples = " << sampler_samples
     << "\ntail_samples = " << sampler_tail_samples << "\nxi = " << join(sampler_xi)
     << "\ndt = " << format_double(sampler_dt) << "\nsigma = " << format_double(sampler_sigma)
     << "\ntail_r_lo = " << format_double(tail_r_lo) << "\ntail_r_hi = " << format_double(tail_r_hi) << '\n';
  return os.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  ExperimentConfig c = default_config();
  std::set<std::string> used;

  auto value = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
      used.insert(path);
      // Trailing "# ..." is a comment.
      return v->substr(0, v->find('#'));
    }
    return std::nullopt;
  };

  if (auto v = value("model.n")) c.model.n = parse_int("model.n", *v);
  if (auto v = value("model.d")) c.model.d = parse_int("model.d", *v);
  if (auto v = value("model.alpha")) c.model.alpha = parse_real("model.alpha", *v);
  if (auto v = value("model.beta")) c.model.beta = parse_real("model.beta", *v);
  if (auto v = value("model.sigma")) c.model.sigma = parse_reals("model.sigma", *v);
  if (auto v = value("model.a")) c.model.a = parse_reals("model.a", *v);

  if (auto v = value("scaling.delta")) c.scaling.delta = parse_real("scaling.delta", *v);
  if (auto v = value("scaling.rho")) c.scaling.rho = parse_real("scaling.rho", *v);
  if (auto v = value("scaling.kappa")) c.scaling.kappa = parse_real("scaling.kappa", *v);
  if (auto v = value("scaling.kappa_hat")) c.scaling.kappa_hat = parse_real("scaling.kappa_hat", *v);
  if (auto v = value("scaling.N_list")) c.N_list = parse_uints("scaling.N_list", *v);

  if (auto v = value("grid.L")) c.L = parse_real("grid.L", *v);
  if (auto v = value("grid.M")) c.M = parse_int("grid.M", *v);

  if (auto v = value("solver.dt")) c.pde_dt = parse_real("solver.dt", *v);
  if (auto v = value("solver.T")) c.T = parse_real("solver.T", *v);
  if (auto v = value("solver.snapshots")) c.snapshots = parse_int("solver.snapshots", *v);
  if (auto v = value("solver.dealias")) c.dealias = parse_bool("solver.dealias", *v);
  if (auto v = value("solver.mode")) {
    const auto m = lower(trim(*v));
    if (m == "regularized") c.pde_mode = SolverMode::Regularized;
    else if (m == "limit") c.pde_mode = SolverMode::Limit;
    else throw ConfigError("key 'solver.mode': expected regularized or limit");
  }

  if (auto v = value("particles.dt")) c.particle_dt = parse_real("particles.dt", *v);
  if (auto v = value("particles.drift")) {
    const auto m = lower(trim(*v));
    if (m == "grid") c.drift = DriftMethod::Grid;
    else if (m == "direct") c.drift = DriftMethod::Direct;
    else throw ConfigError("key 'particles.drift': expected grid or direct");
  }
  if (auto v = value("particles.jump_cap")) c.jump_cap = parse_real("particles.jump_cap", *v);

  if (auto v = value("seeds.master")) c.master_seed = parse_uint("seeds.master", *v);
  if (auto v = value("seeds.count")) c.seed_count = parse_int("seeds.count", *v);

  if (tree.get_child_optional("initial")) {
    c.initial.species.clear();
    for (int i = 1;; ++i) {
      const std::string key = "initial.species" + std::to_string(i);
      auto v = value(key);
      if (!v) break;
      c.initial.species.push_back(parse_bumps(key, *v, c.model.d));
    }
  } else if (c.model.d != 1 || c.model.n != 2) {
    throw ConfigError("an [initial] section is required unless d = 1 and n = 2");
  }

  if (auto v = value("variance.N_list")) c.variance_N_list = parse_uints("variance.N_list", *v);
  if (auto v = value("variance.seeds")) c.variance_seeds = parse_int("variance.seeds", *v);
  if (auto v = value("variance.probe")) c.probe = parse_reals("variance.probe", *v);

  if (auto v = value("sampler.samples")) c.sampler_samples = parse_uint("sampler.samples", *v);
  if (auto v = value("sampler.tail_samples")) c.sampler_tail_samples = parse_uint("sampler.tail_samples", *v);
  if (auto v = value("sampler.xi")) c.sampler_xi = parse_reals("sampler.xi", *v);
  if (auto v = value("sampler.dt")) c.sampler_dt = parse_real("sampler.dt", *v);
  if (auto v = value("sampler.sigma")) c.sampler_sigma = parse_real("sampler.sigma", *v);
  if (auto v = value("sampler.tail_r_lo")) c.tail_r_lo = parse_real("sampler.tail_r_lo", *v);
  if (auto v = value("sampler.tail_r_hi")) c.tail_r_hi = parse_real("sampler.tail_r_hi", *v);

  if (c.probe.size() < static_cast<std::size_t>(c.model.d)) c.probe.resize(static_cast<std::size_t>(c.model.d), 0.0);

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' must live in a [section]");
    for (const auto& [key, _] : body) {
      const std::string full = section + "." + key;
      if (!used.count(full)) throw ConfigError("unknown config key '" + full + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  return parse_config(is);
}

ValidationReport validate_config(const ExperimentConfig& c) {
  ValidationReport r = validate_model(c.model);
  ScalingParams s = c.scaling;
  s.d = c.model.d;
  s.N = c.N_list.empty() ? 1 : c.N_list.front();
  const auto sr = validate_scaling(s);
  for (const auto& v : sr.violations) r.fail(v.id, v.description);
  if (c.N_list.empty()) r.fail("N_list_empty", "scaling.N_list must name at least one N");
  for (auto N : c.N_list)
    if (N == 0) r.fail("N_positive", "every N in scaling.N_list must be positive");
  if (!(c.L > 0.0)) r.fail("grid_length", "grid.L must be positive");
  if (c.M < 4 || c.M % 2 != 0) r.fail("grid_points", "grid.M must be even and at least 4");
  if (!(c.pde_dt > 0.0) || !(c.T > 0.0)) r.fail("solver_times", "solver.dt and solver.T must be positive");
  else if (std::abs(std::lround(c.T / c.pde_dt) * c.pde_dt - c.T) > 1e-9 * c.T)
    r.fail("solver_times", "solver.T must be a multiple of solver.dt");
  if (c.snapshots < 2) r.fail("snapshots", "solver.snapshots must be at least 2");
  if (!(c.particle_dt > 0.0)) r.fail("particle_dt", "particles.dt must be positive");
  else if (c.T > 0.0 && c.snapshots >= 2) {
    // Every snapshot time must be reachable by whole particle steps.
    for (double t : c.snapshot_times()) {
      const double steps = t / c.particle_dt;
      if (std::abs(steps - std::round(steps)) > 1e-6) {
        r.fail("particle_dt", "snapshot times must be multiples of particles.dt");
        break;
      }
    }
  }
  if (c.jump_cap < 0.0) r.fail("jump_cap", "particles.jump_cap must be >= 0");
  if (c.seed_count < 1) r.fail("seed_count", "seeds.count must be at least 1");
  if (c.initial.species.size() != static_cast<std::size_t>(c.model.n))
    r.fail("initial_species", "the initial condition must list one bump set per species");
  for (const auto& sp : c.initial.species) {
    if (sp.empty()) r.fail("initial_species", "every species needs at least one bump");
    for (const auto& b : sp) {
      if (!(b.width > 0.0)) r.fail("initial_width", "bump widths must be positive");
      if (!(b.amplitude >= 0.0)) r.fail("initial_amplitude", "bump amplitudes must be non-negative");
    }
  }
  if (c.variance_seeds < 2) r.fail("variance_seeds", "variance.seeds must be at least 2");
  if (c.sampler_samples < 100 || c.sampler_tail_samples < 100)
    r.fail("sampler_samples", "sampler sample counts must be at least 100");
  if (!(c.sampler_dt > 0.0) || !(c.sampler_sigma > 0.0))
    r.fail("sampler_scale", "sampler.dt and sampler.sigma must be positive");
  if (!(c.tail_r_lo > 0.0) || !(c.tail_r_hi > c.tail_r_lo))
    r.fail("sampler_tail_range", "need 0 < tail_r_lo < tail_r_hi");
  return r;
}

}  // namespace fraclab
