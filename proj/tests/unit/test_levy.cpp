#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fraclab/levy.hpp"
#include "fraclab/rng.hpp"

using namespace fraclab;

TEST_CASE("Philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(42, {0, 1, 2, StreamPurpose::Dynamics});
  RngStream b(42, {0, 1, 2, StreamPurpose::Dynamics});
  RngStream c(42, {0, 1, 3, StreamPurpose::Dynamics});
  RngStream d(42, {0, 1, 2, StreamPurpose::Initialization});
  RngStream e(43, {0, 1, 2, StreamPurpose::Dynamics});
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    const auto y = c.next_u64(), z = d.next_u64(), w = e.next_u64();
    CHECK(x != y);
    CHECK(x != z);
    CHECK(x != w);
  }
}

TEST_CASE("uniform, normal and exponential moments") {
  RngStream r(7, {0, 0, 0, StreamPurpose::Test});
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, se = 0;
  for (int k = 0; k < n; ++k) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    se += r.exponential();
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(se / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("parameter validation") {
  StableParams p;
  CHECK_NOTHROW(validate(p));
  p.alpha = 1.2;
  CHECK_THROWS(validate(p));
  p = StableParams{};
  p.dt = 0.0;
  CHECK_THROWS(validate(p));
  p = StableParams{};
  p.sigma = -1.0;
  CHECK_THROWS(validate(p));
}

namespace {

std::vector<double> draw(const StableParams& p, int n, bool subordinated, std::uint64_t seed, int axis = 0) {
  std::vector<double> out(static_cast<std::size_t>(n));
  std::vector<double> buf(static_cast<std::size_t>(p.d));
  RngStream r(seed, {0, 0, 0, StreamPurpose::Test});
  for (int k = 0; k < n; ++k) {
    if (subordinated)
      sample_increment_subordinated(p, r, buf);
    else
      sample_increment(p, r, buf);
    out[static_cast<std::size_t>(k)] = buf[static_cast<std::size_t>(axis)];
  }
  return out;
}

}  // namespace

TEST_CASE("characteristic function of increments") {
  const std::vector<double> xi = {0.5, 1.0, 2.0};
  for (int d = 1; d <= 3; ++d) {
    for (bool sub : {false, true}) {
      StableParams p;
      p.d = d;
      p.dt = 0.5;
      p.sigma = 1.3;
      const auto s = draw(p, 200000, sub, 11 + static_cast<std::uint64_t>(d));
      const auto est = empirical_char_function(s, xi);
      for (std::size_t k = 0; k < xi.size(); ++k) {
        const double expect = std::exp(-p.sigma * p.dt * std::pow(xi[k], 2 * p.alpha));
        CHECK(std::abs(est.real[k] - expect) < 5.0 * est.std_err[k] + 1e-3);
        CHECK(std::abs(est.imag[k]) < 0.01);
      }
    }
  }
}

TEST_CASE("tail index") {
  StableParams p;
  p.dt = 1.0;
  const auto s = draw(p, 1000000, false, 99);
  const auto fit = tail_slope(s, 10.0, 100.0);
  CHECK(fit.slope == doctest::Approx(-2 * p.alpha).epsilon(0.08));
}

TEST_CASE("jump cap bounds every increment") {
  StableParams p;
  p.d = 2;
  p.jump_cap = 0.5;
  RngStream r(5, {0, 0, 0, StreamPurpose::Test});
  std::vector<double> buf(2);
  for (int k = 0; k < 10000; ++k) {
    sample_increment(p, r, buf);
    CHECK(std::hypot(buf[0], buf[1]) <= 0.5 + 1e-12);
  }
}

TEST_CASE("one-sided stable Laplace transform") {
  RngStream r(3, {0, 0, 0, StreamPurpose::Test});
  const double a = 0.85;
  const int n = 200000;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = sample_positive_stable(a, r);
    REQUIRE(s > 0.0);
    acc += std::exp(-s);
  }
  CHECK(acc / n == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
}

TEST_CASE("increments shrink with sigma dt") {
  // A fixed stream gives (sigma dt)^{1/(2 alpha)} times the same unit draw.
  double unit = 0.0;
  for (double dt : {1.0, 1e-2, 1e-4, 1e-6}) {
    StableParams p;
    p.dt = dt;
    auto s = draw(p, 20001, false, 31);
    for (double& v : s) v = std::abs(v);
    std::nth_element(s.begin(), s.begin() + 10000, s.end());
    const double scaled = s[10000] / std::pow(dt, 1.0 / 1.7);
    if (dt == 1.0) unit = scaled;
    CHECK(scaled == doctest::Approx(unit).epsilon(1e-9));
  }
}

TEST_CASE("increments are symmetric") {
  StableParams p;
  p.d = 2;
  const int n = 100000;
  for (int axis = 0; axis < 2; ++axis) {
    const auto s = draw(p, n, false, 41, axis);
    double sgn = 0.0;
    for (double v : s) sgn += v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
    CHECK(std::abs(sgn / n) < 3.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("characteristic function at a short step") {
  StableParams p;
  p.dt = 0.01;
  const auto s = draw(p, 1000000, false, 51);
  const std::vector<double> xi = {0.5, 1.0, 2.0, 4.0};
  const auto est = empirical_char_function(s, xi);
  for (std::size_t k = 0; k < xi.size(); ++k)
    CHECK(std::abs(est.real[k] - std::exp(-0.01 * std::pow(xi[k], 1.7))) <= 3.0 * est.std_err[k]);
}

TEST_CASE("empirical characteristic function edge cases") {
  const std::vector<double> zeros(100, 0.0);
  const std::vector<double> xi = {0.0, 1.0, 3.0};
  const auto z = empirical_char_function(zeros, xi);
  for (std::size_t k = 0; k < xi.size(); ++k) {
    CHECK(z.real[k] == 1.0);
    CHECK(z.std_err[k] == 0.0);
  }
  RngStream r(9, {0, 0, 0, StreamPurpose::Test});
  std::vector<double> g(200000);
  for (double& v : g) v = r.normal();
  const auto e = empirical_char_function(g, xi);
  CHECK(e.real[0] == 1.0);
  for (std::size_t k = 0; k < xi.size(); ++k) CHECK(std::abs(e.real[k] - std::exp(-0.5 * xi[k] * xi[k])) <= 3.0 * e.std_err[k] + 1e-15);
}
