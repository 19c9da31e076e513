#include "thinfilm/profile.hpp"

#include <algorithm>
#include <numeric>

#include "thinfilm/errors.hpp"

namespace thinfilm {

double Profile::min() const {
    if (ys.empty()) throw ValidationError("empty profile");
    return *std::min_element(ys.begin(), ys.end());
}

double Profile::max() const {
    if (ys.empty()) throw ValidationError("empty profile");
    return *std::max_element(ys.begin(), ys.end());
}

double Profile::mean() const {
    if (ys.empty()) throw ValidationError("empty profile");
    if (periodic) return std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    // trapezoid over the closed interval
    double s = 0.5 * (ys.front() + ys.back());
    for (std::size_t j = 1; j + 1 < ys.size(); ++j) s += ys[j];
    return s / static_cast<double>(ys.size() - 1);
}

Profile Profile::periodic_grid(double length, std::size_t n, std::string meta) {
    if (!(length > 0.0) || n == 0) throw ValidationError("periodic grid needs length > 0 and n > 0");
    Profile p;
    p.length = length;
    p.periodic = true;
    p.meta = std::move(meta);
    p.xs.resize(n);
    p.ys.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) p.xs[j] = length * static_cast<double>(j) / static_cast<double>(n);
    return p;
}

Profile Profile::interval_grid(double length, std::size_t n_intervals, std::string meta) {
    if (!(length > 0.0) || n_intervals == 0) throw ValidationError("interval grid needs length > 0 and n > 0");
    Profile p;
    p.length = length;
    p.periodic = false;
    p.meta = std::move(meta);
    p.xs.resize(n_intervals + 1);
    p.ys.assign(n_intervals + 1, 0.0);
    for (std::size_t j = 0; j <= n_intervals; ++j)
        p.xs[j] = length * static_cast<double>(j) / static_cast<double>(n_intervals);
    return p;
}

}  // namespace thinfilm
