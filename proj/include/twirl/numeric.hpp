#pragma once

#include <cmath>
#include <string>

#include "twirl/errors.hpp"

namespace twirl {

inline constexpr double pi = 3.14159265358979323846;

// acos that absorbs round-off: arguments within 1e-12 of [-1, 1] are
// clamped to the boundary, anything further out is rejected.
inline double acos_clamped(double x) {
    constexpr double slack = 1e-12;
    if (x > 1.0) {
        if (x > 1.0 + slack) {
            throw InvalidParameter("acos argument " + std::to_string(x) + " outside [-1, 1]");
        }
        x = 1.0;
    } else if (x < -1.0) {
        if (x < -1.0 - slack) {
            throw InvalidParameter("acos argument " + std::to_string(x) + " outside [-1, 1]");
        }
        x = -1.0;
    }
    return std::acos(x);
}

// Wrap an angle to [-pi, pi].
inline double wrap_pi(double x) { return std::remainder(x, 2.0 * pi); }

}  // namespace twirl
