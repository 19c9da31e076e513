#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace thinfilm {

/// d^order/dx^order of a periodic sample vector on [0, length) by FFT.
/// Odd derivatives drop the Nyquist mode.
std::vector<double> spectral_derivative(const std::vector<double>& ys, double length, int order);

/// Periodic trapezoid rule (spectrally accurate for smooth periodic data).
double periodic_integral(const std::vector<double>& ys, double length);

/// Closed-interval trapezoid rule on a uniform grid.
double interval_integral(const std::vector<double>& ys, double length);

/// Samples of y(x - shift) for a periodic function, by Fourier phase rotation.
std::vector<double> fourier_shift(const std::vector<double>& ys, double length, double shift);

/// Dense Fourier pseudo-spectral second-derivative matrix on N points of [0, length).
Eigen::MatrixXd spectral_d2_matrix(std::size_t n, double length);

/// Second-order centred periodic second-difference matrix.
Eigen::MatrixXd fd_d2_matrix(std::size_t n, double length);

}  // namespace thinfilm
