#pragma once

#include <functional>
#include <span>
#include <stdexcept>

namespace fraclab {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const { return error_estimate_; }

 private:
  double error_estimate_;
};

using ScalarFunction = std::function<double(std::span<const double>)>;

/// c_{d,alpha} = 4^alpha Gamma(d/2 + alpha) / (pi^{d/2} |Gamma(-alpha)|), the
/// normalization for which the singular-integral form of (-Delta)^alpha has
/// Fourier symbol |xi|^{2 alpha}.
double frac_laplacian_constant(int d, double alpha);

struct PvQuadratureResult {
  double value;
  double near_field;   ///< unnormalized integral over |y - x| < r_split
  double far_field;    ///< unnormalized integral over r_split < |y - x| < tail_R
  double error_estimate;
};

/// Pointwise (-Delta)^alpha f(x) from the principal-value integral, split at
/// r_split. The near field uses the symmetrized second difference (gradient
/// term cancels) with Gauss-Jacobi nodes for the t^{1-2alpha} weight; the far
/// field is truncated at tail_R and integrated with adaptive Gauss-Kronrod
/// panels. Supports d = 1 and d = 2. Throws QuadratureError when the combined
/// error estimate exceeds quad_tol.
PvQuadratureResult pv_frac_laplacian(const ScalarFunction& f, std::span<const double> x, double alpha,
                                     double r_split, double tail_R, double quad_tol);

inline double pv_frac_laplacian_point(const ScalarFunction& f, std::span<const double> x, double alpha,
                                      double r_split, double tail_R, double quad_tol) {
  return pv_frac_laplacian(f, x, alpha, r_split, tail_R, quad_tol).value;
}

}  // namespace fraclab
