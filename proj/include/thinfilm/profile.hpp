#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace thinfilm {

/// Uniformly sampled height profile.
///
/// Periodic profiles hold N samples x_j = x0 + j L / N, j < N, over one period L.
/// Interval profiles (droplets) hold N + 1 samples including both endpoints.
/// `dys` carries exact derivative samples when the generator knows them; it is
/// empty otherwise.
struct Profile {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> dys;
    double length = 0.0;
    bool periodic = true;
    std::string meta;

    std::size_t size() const { return ys.size(); }
    double spacing() const {
        return periodic ? length / static_cast<double>(ys.size())
                        : length / static_cast<double>(ys.size() - 1);
    }
    double min() const;
    double max() const;
    double mean() const;

    static Profile periodic_grid(double length, std::size_t n, std::string meta = {});
    static Profile interval_grid(double length, std::size_t n_intervals, std::string meta = {});
};

}  // namespace thinfilm
