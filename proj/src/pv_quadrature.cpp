#include "fraclab/pv_quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace fraclab {

double frac_laplacian_constant(int d, double alpha) {
  const double half_d = 0.5 * d;
  return std::pow(4.0, alpha) * std::tgamma(half_d + alpha) /
         (std::pow(std::numbers::pi, half_d) * std::abs(std::tgamma(-alpha)));
}

namespace {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Jacobi rule for the weight (1+x)^b on [-1,1] via Golub-Welsch.
GaussRule gauss_jacobi(int n, double b) {
  static std::mutex mutex;
  static std::map<std::pair<int, double>, GaussRule> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(n, b);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const double a = 0.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1.0;
      const double t = 2.0 * m + a + b;
      const double beta = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + 1.0) * (t - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) /
                     std::tgamma(a + b + 2.0);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  cache.emplace(key, rule);
  return rule;
}

// Symmetrized second difference integrated over the half sphere of directions:
//   d = 1: 2 f(x) - f(x+t) - f(x-t)
//   d = 2: int_0^pi [2 f(x) - f(x + t e_th) - f(x - t e_th)] d th
class SecondDifference {
 public:
  SecondDifference(const ScalarFunction& f, std::span<const double> x) : f_(f), x_(x.begin(), x.end()) {
    fx_ = f_(x_);
  }

  double operator()(double t) const {
    if (x_.size() == 1) {
      const double p[1] = {x_[0] + t};
      const double m[1] = {x_[0] - t};
      return 2.0 * fx_ - f_(p) - f_(m);
    }
    return angular(t);
  }

 private:
  double angular_sum(double t, int K) const {
    double acc = 0.0;
    for (int k = 0; k < K; ++k) {
      const double th = std::numbers::pi * k / K;
      const double c = std::cos(th) * t;
      const double s = std::sin(th) * t;
      const double p[2] = {x_[0] + c, x_[1] + s};
      const double m[2] = {x_[0] - c, x_[1] - s};
      acc += 2.0 * fx_ - f_(p) - f_(m);
    }
    return acc * std::numbers::pi / K;
  }

  // Trapezoid rule on the pi-periodic angular integrand, doubled until stable.
  double angular(double t) const {
    int K = 16;
    double prev = angular_sum(t, K);
    while (K < 8192) {
      K *= 2;
      const double cur = angular_sum(t, K);
      if (std::abs(cur - prev) <= 1e-14 * (std::abs(cur) + std::abs(fx_) * t * t + 1e-300)) return cur;
      prev = cur;
    }
    return prev;
  }

  const ScalarFunction& f_;
  std::vector<double> x_;
  double fx_;
};

}  // namespace

PvQuadratureResult pv_frac_laplacian(const ScalarFunction& f, std::span<const double> x, double alpha,
                                     double r_split, double tail_R, double quad_tol) {
  const int d = static_cast<int>(x.size());
  if (d < 1 || d > 2) throw std::invalid_argument("pv_frac_laplacian: only d = 1, 2 are supported");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("pv_frac_laplacian: alpha must lie in (0,1)");
  if (!(r_split > 0.0) || !(tail_R >= r_split)) {
    throw std::invalid_argument("pv_frac_laplacian: need 0 < r_split <= tail_R");
  }
  if (!(quad_tol > 0.0)) throw std::invalid_argument("pv_frac_laplacian: quad_tol must be positive");

  const SecondDifference D(f, x);
  const double c = frac_laplacian_constant(d, alpha);

  // Near field: int_0^r t^{1-2alpha} [D(t)/t^2] dt; t = r (1+s)/2.
  const double b = 1.0 - 2.0 * alpha;
  const double jac = std::pow(0.5 * r_split, 2.0 - 2.0 * alpha);
  auto near_with = [&](int n) {
    const auto rule = gauss_jacobi(n, b);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = 0.5 * r_split * (1.0 + rule.nodes[k]);
      acc += rule.weights[k] * D(t) / (t * t);
    }
    return jac * acc;
  };
  int n = 16;
  double near = near_with(n);
  double near_err = std::numeric_limits<double>::infinity();
  while (n < 512) {
    n *= 2;
    const double next = near_with(n);
    near_err = std::abs(next - near);
    near = next;
    if (near_err <= 0.1 * quad_tol / c) break;
  }

  // Far field: panels growing geometrically, adaptive Gauss-Kronrod in each.
  double far = 0.0;
  double far_err = 0.0;
  const double p = 1.0 + 2.0 * alpha;
  auto integrand = [&](double t) { return D(t) / std::pow(t, p); };
  double lo = r_split;
  while (lo < tail_R) {
    const double width = std::max(r_split, 0.05 * lo);
    const double hi = std::min(tail_R, lo + width);
    double err = 0.0;
    far += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 12, 1e-13, &err);
    far_err += err;
    lo = hi;
  }

  PvQuadratureResult out;
  out.near_field = near;
  out.far_field = far;
  out.value = c * (near + far);
  out.error_estimate = c * (near_err + far_err);
  if (!(out.error_estimate <= quad_tol) || !std::isfinite(out.value)) {
    throw QuadratureError("pv_frac_laplacian: quadrature did not reach the requested tolerance",
                          out.error_estimate);
  }
  return out;
}

}  // namespace fraclab
