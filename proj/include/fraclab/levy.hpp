#pragma once

#include <span>
#include <vector>

#include "fraclab/rng.hpp"

namespace fraclab {

/// One increment of an isotropic 2alpha-stable process over a step dt, with
/// E exp(i xi . dL) = exp(-sigma dt |xi|^{2 alpha}), i.e. generator
/// -sigma (-Delta)^alpha.
struct StableParams {
  double alpha = 0.85;
  int d = 1;
  double sigma = 1.0;
  double dt = 0.01;
  /// Optional cap on the jump length (0 = off). A capped sampler no longer
  /// has the stable generator; outputs that use it are flagged.
  double jump_cap = 0.0;
};

void validate(const StableParams& p);

/// Symmetric stable variable of index a in (0, 2] with E exp(i xi X) = exp(-|xi|^a)
/// (Chambers-Mallows-Stuck).
double sample_symmetric_stable(double index, RngStream& rng);

/// Positive stable variable with E exp(-lambda S) = exp(-lambda^a), a in (0,1)
/// (one-sided Chambers-Mallows-Stuck / Kanter representation).
double sample_positive_stable(double index, RngStream& rng);

/// Writes one increment into out (p.d entries). d = 1 uses the symmetric CMS
/// sampler; d >= 2 uses Gaussian subordination sqrt(2 S) Z.
void sample_increment(const StableParams& p, RngStream& rng, std::span<double> out);

/// Subordination route in any dimension (also valid for d = 1).
void sample_increment_subordinated(const StableParams& p, RngStream& rng, std::span<double> out);

struct CharFunctionEstimate {
  std::vector<double> xi;
  std::vector<double> real;     ///< mean cos(xi X)
  std::vector<double> imag;     ///< mean sin(xi X), expected 0 for symmetric laws
  std::vector<double> std_err;  ///< standard error of the real part
};

/// Empirical characteristic function of scalar samples.
CharFunctionEstimate empirical_char_function(std::span<const double> samples, std::span<const double> xi);

struct TailFit {
  std::vector<double> r;
  std::vector<double> survival;  ///< empirical P(|X| > r)
  double slope;                  ///< least-squares slope of log P vs log r
};

/// Log-log tail slope of P(|X| > r) over `points` log-spaced radii in [r_lo, r_hi].
TailFit tail_slope(std::span<const double> samples, double r_lo, double r_hi, int points = 11);

}  // namespace fraclab
