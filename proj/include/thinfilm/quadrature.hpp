#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace thinfilm {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Nodes and weights by Newton iteration on the Legendre recurrence. Cached per order.
const GaussLegendreRule& gauss_legendre(int order);

struct QuadratureOptions {
    double rel_tol = 1e-12;
    int order = 20;
    int max_level = 9;
    double grading = 0.15;
    /// Results whose last refinement changed by more than this are rejected.
    double accept_tol = 1e-9;
};

template <std::size_t K>
struct QuadratureResult {
    std::array<double, K> values{};
    double achieved_rel_change = 0.0;
    int level = 0;
    bool converged = false;
};

/// Panel breakpoints for refinement level `level` on [a, b]: geometric grading
/// toward both endpoints plus uniform interior panels. Each level adds two
/// graded layers per end and doubles the interior panel count.
std::vector<double> graded_breakpoints(double a, double b, int level, double grading);

/// Composite Gauss-Legendre on graded panels, refined until every component
/// changes by less than rel_tol (relative to the component's magnitude).
/// Handles integrable algebraic and logarithmic endpoint behaviour.
template <std::size_t K, class F>
QuadratureResult<K> integrate_graded(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    const GaussLegendreRule& rule = gauss_legendre(opt.order);
    auto sweep = [&](int level) {
        std::array<double, K> acc{};
        const std::vector<double> bp = graded_breakpoints(a, b, level, opt.grading);
        for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
            const double mid = 0.5 * (bp[p] + bp[p + 1]);
            const double half = 0.5 * (bp[p + 1] - bp[p]);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const std::array<double, K> v = f(mid + half * rule.nodes[i]);
                for (std::size_t c = 0; c < K; ++c) acc[c] += half * rule.weights[i] * v[c];
            }
        }
        return acc;
    };

    QuadratureResult<K> out;
    std::array<double, K> prev = sweep(0);
    for (int level = 1; level <= opt.max_level; ++level) {
        const std::array<double, K> cur = sweep(level);
        double change = 0.0;
        for (std::size_t c = 0; c < K; ++c) {
            const double scale = std::max(std::abs(cur[c]), 1e-300);
            change = std::max(change, std::abs(cur[c] - prev[c]) / scale);
        }
        out.values = cur;
        out.level = level;
        out.achieved_rel_change = change;
        if (change < opt.rel_tol) {
            out.converged = true;
            return out;
        }
        prev = cur;
    }
    return out;
}

}  // namespace thinfilm
