#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fraclab/pv_quadrature.hpp"

using namespace fraclab;

TEST_CASE("normalization constant") {
  // Independent closed form evaluated in extended precision.
  CHECK(frac_laplacian_constant(1, 0.85) == doctest::Approx(0.223222033033784523).epsilon(1e-13));
  // alpha = 1/2 in d = 1 gives 1/pi.
  CHECK(frac_laplacian_constant(1, 0.5) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("constants are annihilated") {
  const ScalarFunction one = [](std::span<const double>) { return 1.0; };
  const double x = 0.3;
  CHECK(std::abs(pv_frac_laplacian_point(one, std::span<const double>(&x, 1), 0.85, 1.0, 1e3, 1e-8)) < 1e-12);
}

TEST_CASE("sine is an eigenfunction") {
  const ScalarFunction s = [](std::span<const double> y) { return std::sin(y[0]); };
  for (double x : {0.0, 0.7, 1.5707963267948966, 2.9}) {
    const auto r = pv_frac_laplacian(s, std::span<const double>(&x, 1), 0.85, 1.0, 1e3, 1e-6);
    CHECK(r.value == doctest::Approx(std::sin(x)).epsilon(1e-4));
  }
}

TEST_CASE("two-dimensional plane wave") {
  const ScalarFunction s = [](std::span<const double> y) { return std::cos(y[0] + y[1]); };
  const double x[2] = {0.2, -0.4};
  const double expect = std::pow(2.0, 0.7) * std::cos(x[0] + x[1]);
  const auto r = pv_frac_laplacian(s, x, 0.7, 1.0, 200.0, 1e-4);
  CHECK(r.value == doctest::Approx(expect).epsilon(2e-3));
}

TEST_CASE("logarithmic test function against the high precision oracle") {
  const ScalarFunction psi = [](std::span<const double> y) { return std::log(2.0 + y[0] * y[0]); };
  struct Row {
    double x, value;
  };
  // Oracle: 40-digit quadrature with a series near the singularity.
  const Row rows[] = {{0.0, -1.0081977991124211}, {1.0, -0.35768522185507354}, {10.0, 0.027037151602444296}};
  for (const auto& row : rows) {
    const double v = pv_frac_laplacian_point(psi, std::span<const double>(&row.x, 1), 0.85, 1.0, 1e7, 1e-6);
    CHECK(v == doctest::Approx(row.value).epsilon(1e-5));
  }
}

TEST_CASE("quadrature failure is reported") {
  const ScalarFunction wild = [](std::span<const double> y) { return std::sin(1e4 * y[0] * y[0]); };
  const double x = 0.1;
  CHECK_THROWS_AS(pv_frac_laplacian(wild, std::span<const double>(&x, 1), 0.85, 1.0, 1e3, 1e-14), QuadratureError);
}
