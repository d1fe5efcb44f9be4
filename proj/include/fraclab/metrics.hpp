#pragma once

#include <span>
#include <vector>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Two time-aligned sequences of fields on one grid (e.g. deposited particle
/// fields and a PDE trajectory).
class PairedTrajectory {
 public:
  PairedTrajectory(std::vector<double> times, std::vector<Field> first, std::vector<Field> second);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  /// first(t_k) - second(t_k)
  Field difference(std::size_t k) const { return first_[k] - second_[k]; }

 private:
  std::vector<double> times_;
  std::vector<Field> first_;
  std::vector<Field> second_;
};

/// Squared trajectory norm of the difference, summed over species:
///   sup_k ||f(t_k)||_2^2 + trapezoid over k of ||(-Delta)^{alpha/2} f(t_k)||_2^2.
double trajectory_norm(const PairedTrajectory& p, double alpha);

/// Same functional for an already formed difference sequence.
double trajectory_norm(std::span<const double> times, std::span<const Field> diffs, double alpha);

/// Finite weighted point set on the torus. A gridded density is represented
/// by one atom per node with weight rho(x_m) h^d.
class Measure {
 public:
  static Measure from_points(int d, double L, std::span<const double> points, double weight);
  static Measure from_points(int d, double L, std::span<const double> points, std::span<const double> weights);
  static Measure from_density(const PeriodicGrid& grid, std::span<const double> density);

  int dim() const { return d_; }
  double length() const { return L_; }
  std::size_t atoms() const { return weights_.size(); }
  std::span<const double> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  double total_mass() const;  ///< sum of |weights|

 private:
  Measure(int d, double L) : d_(d), L_(L) {}
  int d_;
  double L_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// Test functions with ||psi||_inf + ||grad psi||_inf <= 1 used to bound the
/// bounded-Lipschitz distance from below.
///  * Fourier modes c cos(xi.x + phase) for |k_a| <= max_mode, c = 1/(1+|xi|),
///    phase chosen optimally.
///  * Tent lattices: m^d pyramids of half-width w = L/(2m) on a lattice of
///    spacing 2w (disjoint supports), shifted by `offsets` sub-lattice
///    offsets, each pyramid scaled by c = w/(1+w) and signed optimally. m runs
///    over a geometric ladder from 1 to max_tents with ratio `ladder_ratio`.
struct BlDictionary {
  int max_mode = 32;
  int max_tents = 1024;
  double ladder_ratio = 1.05;
  int offsets = 16;

  /// Defaults scaled to the dimension (fewer tents in d = 2, 3).
  static BlDictionary standard(int d);
  /// Lattice sizes m on the ladder.
  std::vector<int> tent_ladder() const;
};

struct BlEstimate {
  double value;       ///< dictionary maximum
  double best_mode;   ///< best Fourier-mode value
  double best_tents;  ///< best tent-lattice value
};

/// Lower bound of the bounded-Lipschitz distance between two measures on the
/// same torus.
BlEstimate bl_metric_detail(const Measure& nu1, const Measure& nu2, const BlDictionary& dict);
double bl_metric(const Measure& nu1, const Measure& nu2, const BlDictionary& dict);
double bl_metric(const Measure& nu1, const Measure& nu2);

}  // namespace fraclab
