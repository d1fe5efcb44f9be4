#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fraclab/frac_ops.hpp"

using namespace fraclab;
using std::numbers::pi;

namespace {

std::vector<double> sample(const PeriodicGrid& g, double (*f)(double)) {
  std::vector<double> v(g.size());
  for (int m = 0; m < g.points(); ++m) v[static_cast<std::size_t>(m)] = f(g.node(m));
  return v;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e;
}

// Random real field with modes strictly below the Nyquist frequency.
std::vector<double> random_field(const PeriodicGrid& g, std::mt19937_64& rng) {
  SpectralOperators ops(g);
  std::normal_distribution<double> nd;
  Spectrum s(g.spectral_size());
  g.for_each_mode([&](std::size_t idx, const std::array<int, 3>& k) {
    bool nyq = false;
    for (int a = 0; a < g.dim(); ++a) nyq = nyq || g.is_nyquist(k[static_cast<std::size_t>(a)]);
    s[idx] = nyq ? Complex(0.0) : Complex(nd(rng), nd(rng));
  });
  s[0] = Complex(s[0].real(), 0.0);
  // Round trip through physical space makes the spectrum exactly Hermitian.
  return ops.inverse(s);
}

}  // namespace

TEST_CASE("grid geometry") {
  const PeriodicGrid g(1, 2 * pi, 8);
  CHECK(g.spacing() == doctest::Approx(pi / 4));
  CHECK(g.node(0) == doctest::Approx(-pi));
  CHECK(g.wrap(pi) == doctest::Approx(-pi));
  CHECK(g.wrap(-pi - 0.1) == doctest::Approx(pi - 0.1));
  CHECK(g.spectral_size() == 5);
  CHECK_THROWS(PeriodicGrid(1, 1.0, 7));
  CHECK_THROWS(PeriodicGrid(4, 1.0, 8));
  const PeriodicGrid g2(2, 1.0, 8);
  CHECK(g2.wavenumbers(5) == std::array<int, 3>{1, 0, 0});
  CHECK(g2.wavenumbers(5 * 7) == std::array<int, 3>{-1, 0, 0});
}

TEST_CASE("FFT round trip") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int d = 1; d <= 3; ++d) {
    const PeriodicGrid g(d, 3.0, 16);
    std::vector<double> f(g.size());
    for (double& v : f) v = u(rng);
    FourierTransform ft(g);
    const auto back = ft.inverse(ft.forward(f));
    CHECK(max_abs_diff(f, back) < 1e-14);
  }
}

TEST_CASE("fractional Laplacian multipliers") {
  const PeriodicGrid g(1, 2 * pi, 64);
  const auto c = std::vector<double>(g.size(), 3.0);
  for (double v : frac_laplacian(g, c, 0.85)) CHECK(std::abs(v) < 1e-14);

  const auto s = sample(g, [](double x) { return std::sin(x); });
  CHECK(max_abs_diff(frac_laplacian(g, s, 0.85), s) < 1e-13);

  const auto c2 = sample(g, [](double x) { return std::cos(2 * x); });
  auto expect = c2;
  for (double& v : expect) v *= std::pow(2.0, 1.7);
  CHECK(max_abs_diff(frac_laplacian(g, c2, 0.85), expect) < 1e-12);

  std::vector<double> bad(g.size(), 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(frac_laplacian(g, bad, 0.5), std::invalid_argument);
}

TEST_CASE("fractional gradient multipliers") {
  const PeriodicGrid g(1, 2 * pi, 64);
  const auto s = sample(g, [](double x) { return std::sin(x); });
  const auto c = sample(g, [](double x) { return std::cos(x); });
  CHECK(max_abs_diff(frac_gradient(g, s, 0.3)[0], c) < 1e-13);

  const auto c2 = sample(g, [](double x) { return std::cos(2 * x); });
  auto expect = sample(g, [](double x) { return std::sin(2 * x); });
  for (double& v : expect) v *= -std::pow(2.0, 0.4);
  CHECK(max_abs_diff(frac_gradient(g, c2, 0.4)[0], expect) < 1e-13);

  const std::vector<double> k(g.size(), 1.5);
  const auto gk = frac_gradient(g, k, 0.5);
  for (double v : gk[0]) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("Riesz potential") {
  const PeriodicGrid g(1, 2 * pi, 64);
  const auto s = sample(g, [](double x) { return std::sin(x); });
  CHECK(max_abs_diff(riesz_potential(g, s, 0.3), s) < 1e-13);
  const auto c2 = sample(g, [](double x) { return std::cos(2 * x); });
  auto expect = c2;
  for (double& v : expect) v *= std::pow(2.0, -0.6);
  CHECK(max_abs_diff(riesz_potential(g, c2, 0.3), expect) < 1e-13);
  CHECK_THROWS(riesz_potential(g, s, 0.0));
  CHECK_THROWS(riesz_potential(g, s, 0.6));  // needs d > 2 kappa

  std::mt19937_64 rng(7);
  auto f = random_field(g, rng);
  const double mean = integrate(g, f) / g.volume();
  const auto back = frac_laplacian(g, riesz_potential(g, f, 0.3), 0.3);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(back[k] == doctest::Approx(f[k] - mean).epsilon(1e-10));
}

TEST_CASE("norms") {
  const PeriodicGrid g(1, 2 * pi, 64);
  const auto s = sample(g, [](double x) { return std::sin(x); });
  CHECK(l2_norm(g, s) == doctest::Approx(std::sqrt(pi)).epsilon(1e-14));
  CHECK(h_alpha_seminorm(g, s, 0.85) == doctest::Approx(std::sqrt(pi)).epsilon(1e-14));
  CHECK(h_alpha_seminorm(g, std::vector<double>(g.size(), 2.0), 0.85) < 1e-14);
  CHECK(l2_norm(g, std::vector<double>(g.size(), 0.0)) == 0.0);

  std::mt19937_64 rng(3);
  for (int d = 1; d <= 3; ++d) {
    const PeriodicGrid gd(d, 5.0, d == 3 ? 16 : 32);
    const auto f = random_field(gd, rng);
    CHECK(spectral_l2_norm(gd, f) == doctest::Approx(l2_norm(gd, f)).epsilon(1e-12));
  }
  Field multi(g, 2);
  std::copy(s.begin(), s.end(), multi.component(0).begin());
  std::copy(s.begin(), s.end(), multi.component(1).begin());
  CHECK(l2_norm(multi) == doctest::Approx(std::sqrt(2 * pi)).epsilon(1e-14));
}

TEST_CASE("spectral equivalence identity on random fields") {
  std::mt19937_64 rng(11);
  for (int d = 1; d <= 2; ++d) {
    const PeriodicGrid g(d, 7.0, d == 1 ? 256 : 32);
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = random_field(g, rng);
      const double alpha = 0.55 + 0.04 * trial;
      double lhs2 = 0.0;
      for (const auto& comp : frac_gradient(g, f, alpha)) lhs2 += std::pow(l2_norm(g, comp), 2);
      CHECK(std::sqrt(lhs2) == doctest::Approx(h_alpha_seminorm(g, f, alpha)).epsilon(1e-12));
    }
  }
}

TEST_CASE("multipliers compose and commute with translation") {
  std::mt19937_64 rng(5);
  const PeriodicGrid g(1, 4.0, 128);
  const auto f = random_field(g, rng);
  const auto two = frac_laplacian(g, frac_laplacian(g, f, 0.3), 0.4);
  const auto one = frac_laplacian(g, f, 0.7);
  double scale = 0.0;
  for (double v : one) scale = std::max(scale, std::abs(v));
  CHECK(max_abs_diff(two, one) < 1e-12 * scale);

  std::vector<double> shifted(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) shifted[(k + 1) % f.size()] = f[k];
  const auto a = frac_laplacian(g, shifted, 0.85);
  const auto b = frac_laplacian(g, f, 0.85);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(a[(k + 1) % f.size()] == doctest::Approx(b[k]).epsilon(1e-12).scale(scale));
}

TEST_CASE("real output and 2/3 rule") {
  const PeriodicGrid g(2, 3.0, 12);
  SpectralOperators ops(g);
  Spectrum s(g.spectral_size(), Complex(1.0, 0.5));
  ops.dealias(s);
  g.for_each_mode([&](std::size_t idx, const std::array<int, 3>& k) {
    const bool keep = std::abs(k[0]) <= 4 && std::abs(k[1]) <= 4;
    CHECK((std::abs(s[idx]) > 0.0) == keep);
  });
}

TEST_CASE("cubic interpolation is exact for cubics away from the seam") {
  const PeriodicGrid g(1, 10.0, 64);
  std::vector<double> v(g.size());
  auto p = [](double x) { return 0.1 * x * x * x - x * x + 2 * x - 1; };
  for (int m = 0; m < g.points(); ++m) v[static_cast<std::size_t>(m)] = p(g.node(m));
  for (double x : {-3.3, -0.01, 0.0, 1.234, 4.0}) {
    CHECK(interpolate_cubic(g, v, std::span<const double>(&x, 1)) == doctest::Approx(p(x)).epsilon(1e-12));
  }
}
