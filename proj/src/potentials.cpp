#include "thinfilm/potentials.hpp"

#include <cmath>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

constexpr double kBranchTol = 1e-12;

void check_domain(double y, double q) {
    if (!(y >= 0.0)) throw DomainError("potential evaluated at negative height");
    if (y == 0.0 && q <= -1.0 + kBranchTol) {
        throw DomainError("potential is singular at y = 0 for q <= -1");
    }
}

}  // namespace

Branch branch_of(double q) {
    if (std::abs(q) < kBranchTol) return Branch::Log;
    if (std::abs(q + 1.0) < kBranchTol) return Branch::InverseLog;
    return Branch::Power;
}

double eval_H(double y, double q) {
    check_domain(y, q);
    switch (branch_of(q)) {
    case Branch::Log:
        return y == 0.0 ? 0.0 : y * std::log(y) - y;
    case Branch::InverseLog:
        return y - std::log(y);
    case Branch::Power:
        break;
    }
    if (y == 0.0) return 0.0;
    // y (expm1(q log y)/q - 1)/(q + 1): no 1/q cancellation for small q
    return y * (std::expm1(q * std::log(y)) / q - 1.0) / (q + 1.0);
}

double eval_H_prime(double y, double q) {
    check_domain(y, q);
    switch (branch_of(q)) {
    case Branch::Log:
        return std::log(y);
    case Branch::InverseLog:
        return 1.0 - 1.0 / y;
    case Branch::Power:
        break;
    }
    // (y^q - 1)/q without cancellation near y = 1
    return std::expm1(q * std::log(y)) / q;
}

double eval_G(double y, double q) {
    check_domain(y, q);
    switch (branch_of(q)) {
    case Branch::Log:
        return y == 0.0 ? 0.0 : y * std::log(y) - y;
    case Branch::InverseLog:
        return -std::log(y);
    case Branch::Power:
        break;
    }
    return std::pow(y, q + 1.0) / (q * (q + 1.0));
}

double eval_G_prime(double y, double q) {
    check_domain(y, q);
    switch (branch_of(q)) {
    case Branch::Log:
        return std::log(y);
    case Branch::InverseLog:
        return -1.0 / y;
    case Branch::Power:
        break;
    }
    return std::pow(y, q) / q;
}

PotentialValue potential(double y, double q) {
    return {eval_H(y, q), eval_G(y, q), eval_r(y, q)};
}

double eval_r(double y, double q) {
    if (!(y > 0.0) && q < 1.0) throw DomainError("r(y) = y^(q-1) requires y > 0 for q < 1");
    return std::pow(y, q - 1.0);
}

double eval_r_prime(double y, double q) {
    if (q == 1.0) return 0.0;
    if (!(y > 0.0) && q < 2.0) throw DomainError("r'(y) requires y > 0 for q < 2");
    return (q - 1.0) * std::pow(y, q - 2.0);
}

double eval_r_second(double y, double q) {
    if (q == 1.0 || q == 2.0) return 0.0;
    if (!(y > 0.0) && q < 3.0) throw DomainError("r''(y) requires y > 0 for q < 3");
    return (q - 1.0) * (q - 2.0) * std::pow(y, q - 3.0);
}

double potential_drop(double a, double d, double q) {
    if (!(a >= 0.0) || !(d >= 0.0)) throw DomainError("potential_drop requires a, d >= 0");
    if (d == 0.0) return 0.0;
    check_domain(a, q);
    switch (branch_of(q)) {
    case Branch::Log:
        // a log a - a - (a+d) log(a+d) + (a+d)
        if (a == 0.0) return d - d * std::log(d);
        return d - a * std::log1p(d / a) - d * std::log(a + d);
    case Branch::InverseLog:
        return std::log1p(d / a) - d;
    case Branch::Power:
        break;
    }
    if (std::abs(q) < 0.1) {
        // Regrouped so every 1/q multiplies an expm1 of a q-sized argument.
        const double b = a + d;
        double n = d - d * std::expm1(q * std::log(b)) / q;
        if (a > 0.0) n -= a * std::exp(q * std::log(a)) * std::expm1(q * std::log1p(d / a)) / q;
        return n / (q + 1.0);
    }
    // [d - ((a+d)^(q+1) - a^(q+1)) / (q+1)] / q
    double growth;
    if (a == 0.0) {
        growth = std::pow(d, q + 1.0);
    } else {
        growth = std::pow(a, q + 1.0) * std::expm1((q + 1.0) * std::log1p(d / a));
    }
    return (d - growth / (q + 1.0)) / q;
}

}  // namespace thinfilm
