#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gnls/numerics.hpp"

namespace gnls {

// Explicit Fourier recovery of q2 when q0 = q1 = 0, so that u1 = e^{-ikx} and K = K0.

/// Which third-order coefficient is supplied.
enum class SpecialCoefficient { A3, B3 };

struct SpecialReconstruction {
  std::vector<double> q;
  /// max |Im| of the raw reconstruction
  double imag_residual = 0.0;
};

/// q2(x) = (4i/pi) int k A3(k) e^{4ikx} dk  or  -(2i/pi) int k B3(k) e^{2ikx} dk over [-k_cutoff, k_cutoff].
/// `coefficient` is evaluated on both half-axes; Gauss-Legendre panels keep k = 0 off the node set.
SpecialReconstruction fourier_invert_integral(const std::function<cplx(double)>& coefficient,
                                              SpecialCoefficient which, double k_cutoff, const SpatialGrid& grid,
                                              double panel_width = 0.5);

/// Discrete contour sum over |m| <= M. For A3 the contour is k_m = m pi/(2b) + i xi; for B3 it is
/// k_m = m pi / b + i xi with the E-route weighting.
SpecialReconstruction fourier_invert_series(const std::function<cplx(cplx)>& coefficient, SpecialCoefficient which,
                                            double xi, std::size_t M, const SpatialGrid& grid);

/// Extends real-axis data from k > 0 to k < 0 via c(-k) = conj(c(k)) (real potential).
std::function<cplx(double)> conjugate_extension(std::function<cplx(double)> positive_axis);

}  // namespace gnls
