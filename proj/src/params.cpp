#include "fraclab/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fraclab {

void ValidationReport::fail(std::string id, std::string description) {
  ok = false;
  violations.push_back({std::move(id), std::move(description)});
}

bool ValidationReport::has(const std::string& id) const {
  for (const auto& v : violations) {
    if (v.id == id) return true;
  }
  return false;
}

std::string ValidationReport::summary() const {
  if (ok) return "ok";
  std::ostringstream os;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) os << "; ";
    os << violations[k].id << ": " << violations[k].description;
  }
  return os.str();
}

ValidationReport validate_model(const ModelParams& p) {
  ValidationReport r;
  if (p.n < 1) r.fail("species_count", "n must be a positive integer");
  if (p.d < 1) r.fail("dimension", "d must be a positive integer");
  if (!(p.alpha > 0.5 && p.alpha < 1.0)) r.fail("alpha_range", "1/2 < alpha < 1 fails");
  if (!(p.beta > 0.0 && p.beta < 1.0)) r.fail("beta_range", "0 < beta < 1 fails");
  if (!(p.beta + 1.0 < 2.0 * p.alpha)) {
    std::ostringstream os;
    os << "beta+1 < 2alpha fails (" << p.beta + 1.0 << " >= " << 2.0 * p.alpha << ")";
    r.fail("self_diffusion_dominance", os.str());
  }
  if (p.d == 1 && !(p.alpha - p.beta < 0.5 || p.alpha < 0.75)) {
    r.fail("d1_restriction", "for d = 1 need alpha - beta < 1/2 or alpha < 3/4");
  }
  if (p.n >= 1) {
    if (p.sigma.size() != static_cast<std::size_t>(p.n)) {
      r.fail("sigma_shape", "sigma must have n entries");
    } else {
      for (double s : p.sigma) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          r.fail("sigma_positive", "all sigma_i must be positive and finite");
          break;
        }
      }
    }
    if (p.a.size() != static_cast<std::size_t>(p.n * p.n)) {
      r.fail("a_shape", "interaction matrix must be n x n");
    } else {
      for (double v : p.a) {
        if (!std::isfinite(v)) {
          r.fail("a_finite", "interaction matrix entries must be finite");
          break;
        }
      }
    }
  }
  return r;
}

ValidationReport validate_scaling(const ScalingParams& s) {
  ValidationReport r;
  if (s.N < 1) r.fail("N_positive", "N must be a positive integer");
  if (s.d < 1) {
    r.fail("dimension", "d must be a positive integer");
    return r;
  }
  const double d = s.d;
  if (!(s.delta > 0.0 && s.delta < 1.0)) r.fail("delta_range", "0 < delta < 1 fails");
  if (!(s.rho > 0.0)) r.fail("rho_positive", "rho must be positive");

  const double kappa_lo = s.delta * (1.0 + s.rho) * d;
  const double kappa_hi = d / (d + 3.0);
  const double kappa_hat_hi = s.delta * d / (d + 4.0);
  if (!(kappa_lo < kappa_hi)) {
    std::ostringstream os;
    os << "kappa-interval empty (" << kappa_lo << " >= " << kappa_hi << ")";
    r.fail("kappa_interval_empty", os.str());
  }
  if (!(s.kappa > kappa_lo && s.kappa < kappa_hi)) {
    std::ostringstream os;
    os << "delta(1+rho)d < kappa < d/(d+3) fails (interval (" << kappa_lo << ", " << kappa_hi
       << "), kappa = " << s.kappa << ")";
    r.fail("kappa_range", os.str());
  }
  if (!(s.kappa_hat > 0.0 && s.kappa_hat < kappa_hat_hi)) {
    std::ostringstream os;
    os << "kappa_hat < delta d/(d+4) fails (bound " << kappa_hat_hi
       << ", kappa_hat = " << s.kappa_hat << ")";
    r.fail("kappa_hat_range", os.str());
  }
  if (!(s.kappa > s.kappa_hat)) r.fail("kappa_order", "kappa > kappa_hat fails");
  return r;
}

DerivedScales derived_scales(const ScalingParams& s) {
  const auto report = validate_scaling(s);
  if (!report.ok) throw std::invalid_argument("inadmissible scaling: " + report.summary());
  const double N = static_cast<double>(s.N);
  const double d = s.d;
  return {std::pow(N, s.kappa / d), std::pow(N, s.kappa_hat / d), std::pow(N, -s.delta)};
}

}  // namespace fraclab
