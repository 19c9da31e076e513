#include "thinfilm/spectral.hpp"

#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

constexpr double kPi = std::numbers::pi;

/// Signed wavenumber index of FFT bin j.
double wave_index(std::size_t j, std::size_t n) {
    return j <= n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
}

}  // namespace

std::vector<double> spectral_derivative(const std::vector<double>& ys, double length, int order) {
    const std::size_t n = ys.size();
    if (n < 2) throw ValidationError("spectral derivative needs at least 2 samples");
    if (order < 0) throw ValidationError("negative derivative order");
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> c;
    fft.fwd(c, ys);
    const std::complex<double> I(0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const bool nyquist = (n % 2 == 0) && j == n / 2;
        if (nyquist && order % 2 == 1) {
            c[j] = 0.0;
            continue;
        }
        const double kw = 2.0 * kPi * wave_index(j, n) / length;
        c[j] *= std::pow(I * kw, order);
    }
    std::vector<double> out;
    fft.inv(out, c);
    return out;
}

double periodic_integral(const std::vector<double>& ys, double length) {
    double s = 0.0;
    for (double v : ys) s += v;
    return s * length / static_cast<double>(ys.size());
}

double interval_integral(const std::vector<double>& ys, double length) {
    if (ys.size() < 2) return 0.0;
    double s = 0.5 * (ys.front() + ys.back());
    for (std::size_t j = 1; j + 1 < ys.size(); ++j) s += ys[j];
    return s * length / static_cast<double>(ys.size() - 1);
}

std::vector<double> fourier_shift(const std::vector<double>& ys, double length, double shift) {
    const std::size_t n = ys.size();
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> c;
    fft.fwd(c, ys);
    for (std::size_t j = 0; j < n; ++j) {
        const double kw = 2.0 * kPi * wave_index(j, n) / length;
        if ((n % 2 == 0) && j == n / 2) {
            // keep the Nyquist mode real
            c[j] *= std::cos(kw * shift);
            continue;
        }
        c[j] *= std::polar(1.0, -kw * shift);
    }
    std::vector<double> out;
    fft.inv(out, c);
    return out;
}

Eigen::MatrixXd spectral_d2_matrix(std::size_t n, double length) {
    if (n < 4 || n % 2 != 0) throw ValidationError("spectral matrix needs an even N >= 4");
    const double h = 2.0 * kPi / static_cast<double>(n);
    const double scale = std::pow(2.0 * kPi / length, 2);
    Eigen::MatrixXd d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                d(i, j) = -kPi * kPi / (3.0 * h * h) - 1.0 / 6.0;
            } else {
                const long diff = static_cast<long>(i) - static_cast<long>(j);
                const double s = std::sin(0.5 * static_cast<double>(diff) * h);
                d(i, j) = -((diff % 2 == 0) ? 1.0 : -1.0) / (2.0 * s * s);
            }
        }
    }
    return scale * d;
}

Eigen::MatrixXd fd_d2_matrix(std::size_t n, double length) {
    if (n < 3) throw ValidationError("difference matrix needs N >= 3");
    const double dx = length / static_cast<double>(n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        d(i, i) = -2.0;
        d(i, (i + 1) % n) += 1.0;
        d(i, (i + n - 1) % n) += 1.0;
    }
    return d / (dx * dx);
}

}  // namespace thinfilm
