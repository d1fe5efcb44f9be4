#pragma once

#include <span>

#include "fraclab/grid.hpp"

namespace fraclab {

/// Fourier coefficients of a weighted point measure on the torus,
///   S(k) = sum_j w_j exp(-i xi_k . (X_j + L/2)),
/// for every r2c mode of `grid` (type-1 non-uniform FFT by Gaussian gridding on
/// a 2x oversampled grid; relative accuracy about 1e-12).
/// `positions` holds d coordinates per point; `weights` is either empty (unit
/// weights) or one weight per point. Points are summed in the given order.
Spectrum point_measure_spectrum(const PeriodicGrid& grid, std::span<const double> positions,
                                std::span<const double> weights = {});

}  // namespace fraclab
