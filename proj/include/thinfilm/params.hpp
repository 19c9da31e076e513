#pragma once

#include <cmath>
#include <string>

#include "thinfilm/errors.hpp"

namespace thinfilm {

/// Power-law coefficients f(y) = y^n, g(y) = bond * y^m of
///   h_t = -(h^n h_xxx)_x - bond (h^m h_x)_x.
/// The steady states depend on n and m only through q = m - n + 1.
struct OscillatorParams {
    double q = 2.0;
    double bond = 1.0;
    double n = 1.0;
    double m = 2.0;

    static OscillatorParams from_exponents(double n, double m, double bond) {
        OscillatorParams p{m - n + 1.0, bond, n, m};
        p.validate();
        return p;
    }

    /// Mobility exponent n = 1, so m = q.
    static OscillatorParams canonical(double q, double bond = 1.0) {
        OscillatorParams p{q, bond, 1.0, q};
        p.validate();
        return p;
    }

    void validate() const {
        if (!(bond > 0.0) || !std::isfinite(bond)) {
            throw ValidationError("bond coefficient must be positive and finite");
        }
        if (!std::isfinite(q) || !std::isfinite(n) || !std::isfinite(m)) {
            throw ValidationError("exponents must be finite");
        }
        if (q != m - n + 1.0) {
            throw ValidationError("inconsistent exponents: q must equal m - n + 1");
        }
    }
};

}  // namespace thinfilm
