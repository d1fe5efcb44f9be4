#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fraclab/params.hpp"

using namespace fraclab;

namespace {
ModelParams model(int d, double alpha, double beta) {
  ModelParams p;
  p.n = 2;
  p.d = d;
  p.alpha = alpha;
  p.beta = beta;
  p.sigma = {1.0, 1.0};
  p.a = {0.5, -0.3, 0.2, 0.4};
  return p;
}

ScalingParams scaling(double delta, double rho, double kappa, double kappa_hat) {
  ScalingParams s;
  s.delta = delta;
  s.rho = rho;
  s.kappa = kappa;
  s.kappa_hat = kappa_hat;
  return s;
}
}  // namespace

TEST_CASE("default model is admissible") {
  const auto r = validate_model(model(1, 0.85, 0.5));
  CHECK(r.ok);
  CHECK(r.violations.empty());
}

TEST_CASE("beta + 1 < 2 alpha is enforced") {
  const auto r = validate_model(model(1, 0.8, 0.7));
  CHECK_FALSE(r.ok);
  CHECK(r.has("self_diffusion_dominance"));
  CHECK(r.summary().find("beta+1 < 2alpha fails") != std::string::npos);
}

TEST_CASE("extra one-dimensional restriction is vacuous for d = 2") {
  CHECK(validate_model(model(2, 0.6, 0.1)).ok);
  // alpha = 0.8, beta = 0.25: alpha - beta = 0.55 and alpha >= 3/4
  CHECK(validate_model(model(1, 0.8, 0.25)).has("d1_restriction"));
  CHECK(validate_model(model(2, 0.8, 0.25)).ok);
}

TEST_CASE("model shape and sign checks") {
  auto p = model(1, 0.85, 0.5);
  p.sigma = {1.0, -1.0};
  CHECK(validate_model(p).has("sigma_positive"));
  p.sigma = {1.0};
  CHECK(validate_model(p).has("sigma_shape"));
  p = model(1, 0.85, 0.5);
  p.a = {1.0, 2.0};
  CHECK(validate_model(p).has("a_shape"));
  p = model(1, 0.45, 0.5);
  CHECK(validate_model(p).has("alpha_range"));
  p = model(1, 0.85, 0.0);
  CHECK(validate_model(p).has("beta_range"));
}

TEST_CASE("default scaling is admissible") {
  CHECK(validate_scaling(scaling(0.2, 0.05, 0.23, 0.03)).ok);
}

TEST_CASE("empty kappa interval is reported") {
  const auto r = validate_scaling(scaling(0.5, 0.01, 0.23, 0.03));
  CHECK_FALSE(r.ok);
  CHECK(r.has("kappa_interval_empty"));
}

TEST_CASE("kappa_hat upper bound") {
  const auto r = validate_scaling(scaling(0.2, 0.05, 0.23, 0.05));
  CHECK_FALSE(r.ok);
  CHECK(r.has("kappa_hat_range"));
}

TEST_CASE("kappa outside its window") {
  CHECK(validate_scaling(scaling(0.2, 0.05, 0.20, 0.03)).has("kappa_range"));
  CHECK(validate_scaling(scaling(0.2, 0.05, 0.26, 0.03)).has("kappa_range"));
}

TEST_CASE("derived scales") {
  auto s = scaling(0.2, 0.05, 0.23, 0.03);
  s.N = 1;
  auto ds = derived_scales(s);
  CHECK(ds.kappa_N == 1.0);
  CHECK(ds.kappa_hat_N == 1.0);
  CHECK(ds.delta_N == 1.0);

  s.N = 1024;
  ds = derived_scales(s);
  CHECK(ds.kappa_N == doctest::Approx(std::pow(1024.0, 0.23)).epsilon(1e-15));
  CHECK(ds.kappa_hat_N == doctest::Approx(std::pow(1024.0, 0.03)).epsilon(1e-15));
  CHECK(ds.delta_N == doctest::Approx(std::pow(1024.0, -0.2)).epsilon(1e-15));

  s.kappa_hat = 0.05;
  CHECK_THROWS_AS(derived_scales(s), std::invalid_argument);
}

TEST_CASE("ordering of derived scales and monotone delta_N") {
  for (int d = 1; d <= 3; ++d) {
    // Midpoint of each admissible window.
    ScalingParams s;
    s.d = d;
    s.delta = 0.2 / d;
    s.rho = 0.05;
    const double lo = s.delta * (1 + s.rho) * d, hi = static_cast<double>(d) / (d + 3);
    s.kappa = 0.5 * (lo + hi);
    s.kappa_hat = 0.5 * s.delta * d / (d + 4);
    REQUIRE(validate_scaling(s).ok);
    double prev = 2.0;
    for (std::uint64_t N = 2; N < 100000; N *= 3) {
      s.N = N;
      const auto ds = derived_scales(s);
      CHECK(ds.kappa_N > ds.kappa_hat_N);
      CHECK(ds.kappa_hat_N > 1.0);
      CHECK(ds.delta_N < prev);
      prev = ds.delta_N;
    }
  }
}
