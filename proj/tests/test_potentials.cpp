#include <doctest.h>

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "thinfilm/errors.hpp"
#include "thinfilm/potentials.hpp"

using namespace thinfilm;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// 50-digit reference H(y) for the power branch
Big big_H(double y, double q) {
    const Big Y = y, Q = q;
    if (y == 0.0) return Big(0);
    return (pow(Y, Q + 1) / (Q + 1) - Y) / Q;
}

}  // namespace

TEST_CASE("second derivatives of H and G equal y^(q-1)") {
    for (double q : {-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.5}) {
        for (double y : {0.3, 1.0, 2.7}) {
            const double h = 1e-4;
            const double Hpp = (eval_H(y + h, q) - 2.0 * eval_H(y, q) + eval_H(y - h, q)) / (h * h);
            const double Gpp = (eval_G(y + h, q) - 2.0 * eval_G(y, q) + eval_G(y - h, q)) / (h * h);
            CHECK(Hpp == doctest::Approx(std::pow(y, q - 1.0)).epsilon(1e-6));
            CHECK(Gpp == doctest::Approx(std::pow(y, q - 1.0)).epsilon(1e-6));
            CHECK(eval_r(y, q) == doctest::Approx(std::pow(y, q - 1.0)));
        }
    }
}

TEST_CASE("H and G differ by a linear function") {
    for (double q : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
        auto diff = [q](double y) { return eval_H(y, q) - eval_G(y, q); };
        const double a = diff(0.5), b = diff(1.5), c = diff(2.5);
        CHECK(a - 2.0 * b + c == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("logarithmic branches") {
    CHECK(eval_H(2.0, 0.0) == doctest::Approx(2.0 * std::log(2.0) - 2.0));
    CHECK(eval_G(2.0, 0.0) == doctest::Approx(2.0 * std::log(2.0) - 2.0));
    CHECK(eval_H(2.0, -1.0) == doctest::Approx(2.0 - std::log(2.0)));
    CHECK(eval_G(2.0, -1.0) == doctest::Approx(-std::log(2.0)));
    CHECK(branch_of(1e-13) == Branch::Log);
    CHECK(branch_of(-1.0 + 1e-13) == Branch::InverseLog);
    // the power branch tends to the log branch
    CHECK(eval_H(2.0, 1e-9) == doctest::Approx(eval_H(2.0, 0.0)).epsilon(1e-8));
}

TEST_CASE("power-branch H against a 50-digit reference, including small q") {
    for (double q : {1e-9, -1e-7, 0.01, 0.5, 2.5, -3.0}) {
        for (double y : {0.1, 0.9, 1.0, 1.1, 4.0}) {
            const double ref = static_cast<double>(big_H(y, q));
            CHECK(eval_H(y, q) == doctest::Approx(ref).epsilon(1e-13));
        }
    }
}

TEST_CASE("potential_drop matches H(a) - H(a + d) without cancellation") {
    for (double q : {0.09, 0.01, 1e-5, -1e-5, -0.05, 0.2, 1.5, 2.0, -3.0, 0.0, -1.0}) {
        for (double a : {0.0, 0.3, 2.0}) {
            if (a == 0.0 && q <= -1.0) continue;
            for (double d : {1e-9, 1e-3, 1.5}) {
                double ref;
                if (q == 0.0 || q == -1.0) {
                    const Big A = a, D = d;
                    auto H = [q](const Big& y) -> Big {
                        if (q == 0.0) return y == 0 ? Big(0) : Big(y * log(y) - y);
                        return y - log(y);
                    };
                    ref = static_cast<double>(H(A) - H(A + D));
                } else {
                    ref = static_cast<double>(big_H(a, q) - big_H(a + d, q));
                }
                CHECK(potential_drop(a, d, q) == doctest::Approx(ref).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(eval_H(-1.0, 2.0), DomainError);
    CHECK_THROWS_AS(eval_H(0.0, -1.0), DomainError);
    CHECK_THROWS_AS(eval_G(0.0, -3.0), DomainError);
    CHECK(eval_H(0.0, 0.5) == 0.0);
    CHECK(eval_G(0.0, 0.5) == 0.0);
}
