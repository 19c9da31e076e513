#include "thinfilm/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

GaussLegendreRule build_rule(int order) {
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_order.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
    if (order < 1 || order > 200) throw ValidationError("Gauss-Legendre order out of range");
    static std::mutex mu;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
    return it->second;
}

std::vector<double> graded_breakpoints(double a, double b, int level, double grading) {
    const double w = 0.25 * (b - a);
    const int layers = 3 + 2 * level;
    const int interior = 2 << level;

    std::vector<double> bp;
    bp.reserve(2 * layers + interior + 3);
    bp.push_back(a);
    for (int j = layers; j >= 1; --j) bp.push_back(a + w * std::pow(grading, j));
    for (int j = 0; j < interior; ++j) bp.push_back(a + w + (b - a - 2.0 * w) * j / interior);
    bp.push_back(b - w);
    for (int j = 1; j <= layers; ++j) bp.push_back(b - w * std::pow(grading, j));
    bp.push_back(b);
    return bp;
}

}  // namespace thinfilm
