#pragma once

// First-order approximations for elliptic excitation. Two regimes:
// moderate amplitude and damping with small ellipticity eps (the
// first-order solution with coefficients C, D), and small amplitudes
// where clockwise and counterclockwise rotations coexist.

#include <cmath>
#include <string>

#include "twirl/errors.hpp"
#include "twirl/model.hpp"
#include "twirl/numeric.hpp"

namespace twirl::perturb {

struct Coefficients {
    double C;  // in-phase correction
    double D;  // quadrature correction
};

// First-order rotating solution phi = tau + phi0 + eps*phi1(tau).
struct FirstOrderSolution {
    double phi0;
    double C;
    double D;
    double gamma;
    double eps;
    double mu;
};

// Small-amplitude rotating solution with direction rho = +1 (clockwise,
// with the excitation) or -1 (counterclockwise, against it). vib_amp is
// the amplitude of the 2*tau vibration term: for rho = +1 it multiplies
// eps, for rho = -1 it is the full amplitude mu/4.
struct SmallAmpSolution {
    int rho;
    double phi0;
    double vib_amp;
    double gamma;
    double eps;
    double mu;
};

struct BoundCheck {
    bool ok;
    double bound;
};

namespace detail {

// mu = 0 is only meaningful where the formulas stay finite (gamma = 0);
// the zero-order phase itself needs mu > 0.
inline void require_damped_window(double gamma, double mu, const char* op, bool mu_positive) {
    if (!std::isfinite(gamma) || !std::isfinite(mu) || (mu_positive ? !(mu > 0.0) : mu < 0.0)) {
        throw InvalidParameter(std::string(op) + " requires finite gamma and mu " +
                               (mu_positive ? "> 0" : ">= 0"));
    }
    if (gamma < 0.0) {
        throw InvalidParameter(std::string(op) + " requires gamma >= 0, got " + std::to_string(gamma));
    }
    if (gamma > mu) {
        throw NoRotatingSolution(std::string(op) + " requires gamma <= mu, got gamma = " +
                                 std::to_string(gamma) + ", mu = " + std::to_string(mu));
    }
}

}  // namespace detail

// Phase of the stable zero-order rotation, cos(phi0) = -gamma/mu.
inline double phi0_stable(double gamma, double mu) {
    detail::require_damped_window(gamma, mu, "phi0_stable", true);
    return -acos_clamped(-gamma / mu);
}

inline Coefficients cd_coefficients(double gamma, double mu) {
    detail::require_damped_window(gamma, mu, "cd_coefficients", false);
    const double p = std::sqrt(mu * mu - gamma * gamma);
    const double den = mu * mu + 3.0 * gamma * gamma - 8.0 * p + 16.0;
    if (std::abs(den) < 1e-12) {
        throw DegenerateDenominator("correction denominator vanished at gamma = " +
                                    std::to_string(gamma) + ", mu = " + std::to_string(mu));
    }
    return Coefficients{2.0 * gamma / den, (-4.0 + p) / den};
}

inline FirstOrderSolution first_order_solution(double gamma, double mu, double eps) {
    const double phi0 = phi0_stable(gamma, mu);
    const auto cd = cd_coefficients(gamma, mu);
    return FirstOrderSolution{phi0, cd.C, cd.D, gamma, eps, mu};
}

inline model::State eval_first_order(double tau, const FirstOrderSolution& s) {
    const double theta = 2.0 * tau + s.phi0;
    return model::State{tau + s.phi0 + s.eps * (s.C * std::sin(theta) + s.D * std::cos(theta)),
                        1.0 + s.eps * (2.0 * s.C * std::cos(theta) - 2.0 * s.D * std::sin(theta))};
}

inline double first_order_accel(double tau, const FirstOrderSolution& s) {
    const double theta = 2.0 * tau + s.phi0;
    return s.eps * (-4.0 * s.C * std::sin(theta) - 4.0 * s.D * std::cos(theta));
}

// Residual of the full equation of motion at the first-order solution;
// decays as eps^2, which is the order check used in the tests.
inline double first_order_residual(double tau, const FirstOrderSolution& s) {
    const auto st = eval_first_order(tau, s);
    return first_order_accel(tau, s) + s.gamma * st.phi_dot + s.mu * std::cos(st.phi - tau) -
           s.eps * std::cos(st.phi + tau);
}

// Largest ellipticity free of parametric resonance at any frequency of
// the variational problem. Zero damping admits none.
inline double stability_bound_eps(double gamma, double mu) {
    const auto cd = cd_coefficients(gamma, mu);
    const double gc = gamma * cd.C + 1.0;
    const double gd = gamma * cd.D;
    return 2.0 * gamma / std::sqrt(gc * gc + gd * gd);
}

// Largest ellipticity that keeps contact along the first-order solution.
inline double contact_bound_eps(double gamma, double mu) {
    detail::require_damped_window(gamma, mu, "contact_bound_eps", false);
    const double p = std::sqrt(mu * mu - gamma * gamma);
    const double num = mu * mu + 3.0 * gamma * gamma - 8.0 * p + 16.0;
    const double den = mu * mu + 8.0 * gamma * gamma - 12.0 * p + 36.0;
    return 0.5 * (1.0 + 2.0 * p) * std::sqrt(num / den);
}

inline SmallAmpSolution small_amp_solution(int rho, double gamma, double eps, double mu) {
    if (rho != 1 && rho != -1) {
        throw InvalidParameter("rho must be +1 or -1, got " + std::to_string(rho));
    }
    if (rho == 1) {
        if (!(gamma > 0.0) || !(gamma < mu)) {
            throw NoRotatingSolution("clockwise rotation exists for 0 < gamma < mu, got gamma = " +
                                     std::to_string(gamma) + ", mu = " + std::to_string(mu));
        }
        return SmallAmpSolution{1, -acos_clamped(-gamma / mu), 0.25, gamma, eps, mu};
    }
    if (!(gamma > 0.0) || !(gamma < eps)) {
        throw NoRotatingSolution("counterclockwise rotation exists for 0 < gamma < eps, got gamma = " +
                                 std::to_string(gamma) + ", eps = " + std::to_string(eps));
    }
    return SmallAmpSolution{-1, acos_clamped(-gamma / eps), 0.25 * mu, gamma, eps, mu};
}

inline model::State eval_small_amp(double tau, const SmallAmpSolution& s) {
    if (s.rho == 1) {
        const double theta = 2.0 * tau + s.phi0;
        return model::State{tau + s.phi0 + s.eps * (-0.25 * std::cos(theta)),
                            1.0 + s.eps * (0.5 * std::sin(theta))};
    }
    const double theta = s.phi0 - 2.0 * tau;
    return model::State{-tau + s.phi0 + 0.25 * s.mu * std::cos(theta),
                        -1.0 + 0.5 * s.mu * std::sin(theta)};
}

inline double small_amp_accel(double tau, const SmallAmpSolution& s) {
    if (s.rho == 1) return s.eps * std::cos(2.0 * tau + s.phi0);
    return -s.mu * std::cos(s.phi0 - 2.0 * tau);
}

// Contact condition for the small-amplitude branches. For clockwise
// rotation it bounds eps, for counterclockwise it bounds mu.
inline BoundCheck small_amp_contact_bound(int rho, double gamma, double eps, double mu) {
    if (rho != 1 && rho != -1) {
        throw InvalidParameter("rho must be +1 or -1, got " + std::to_string(rho));
    }
    if (rho == 1) {
        if (gamma > mu) {
            throw NoRotatingSolution("clockwise contact bound needs gamma <= mu");
        }
        const double bound = (1.0 + 2.0 * std::sqrt(mu * mu - gamma * gamma)) / 3.0;
        return BoundCheck{eps < bound, bound};
    }
    if (gamma > eps) {
        throw NoRotatingSolution("counterclockwise contact bound needs gamma <= eps");
    }
    const double bound = (1.0 + 2.0 * std::sqrt(eps * eps - gamma * gamma)) / 3.0;
    return BoundCheck{mu < bound, bound};
}

}  // namespace twirl::perturb
