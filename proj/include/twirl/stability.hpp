#pragma once

// Damped Mathieu-Hill machinery for the variational equation about the
// first-order rotating solution:
//
//     u'' + gamma u' + [p + eps Phi(2 tau)] u = 0,
//     Phi(2 tau) = (gamma C + 1) sin(2 tau + phi0) + gamma D cos(2 tau + phi0).
//
// Phi has period pi in tau, so the monodromy map is taken over pi; using
// 2 pi would silently square every multiplier.

#include <cmath>
#include <complex>
#include <string>

#include "twirl/errors.hpp"
#include "twirl/numeric.hpp"
#include "twirl/perturb.hpp"

namespace twirl::stability {

struct MathieuHill {
    double gamma;  // damping
    double p;      // mean stiffness
    double eps;    // modulation amplitude
    double phi0;   // modulation phase
    double C;
    double D;

    double modulation(double tau) const {
        const double theta = 2.0 * tau + phi0;
        return (gamma * C + 1.0) * std::sin(theta) + gamma * D * std::cos(theta);
    }

    // u'' at (u, u').
    double accel(double tau, double u, double u_dot) const {
        return -gamma * u_dot - (p + eps * modulation(tau)) * u;
    }
};

// Row-major 2x2 real matrix.
struct Mat2 {
    double a11, a12;
    double a21, a22;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
};

enum class Verdict { Stable, Unstable, Marginal };

struct FloquetReport {
    std::complex<double> m1;
    std::complex<double> m2;
    double determinant;
    Verdict verdict;
};

// Variational problem at the stable first-order solution of (gamma, mu),
// with stiffness sqrt(mu^2 - gamma^2).
inline MathieuHill assemble_hill(double gamma, double mu, double eps) {
    const double phi0 = perturb::phi0_stable(gamma, mu);
    const auto cd = perturb::cd_coefficients(gamma, mu);
    return MathieuHill{gamma, std::sqrt(mu * mu - gamma * gamma), eps, phi0, cd.C, cd.D};
}

// Fundamental solution matrix after one modulation period pi, columns
// integrated from (1,0) and (0,1) with the same fixed-step RK4 scheme
// the simulator uses.
inline Mat2 monodromy(const MathieuHill& h, double step = 1e-3) {
    if (!(step > 0.0)) throw InvalidParameter("monodromy step must be positive");
    const long long n = static_cast<long long>(std::ceil(pi / step));
    if (n < 1000) {
        throw InvalidParameter("monodromy step must divide the period into at least 1000 substeps");
    }
    const double dt = pi / static_cast<double>(n);

    Mat2 m{};
    double* cols[2][2] = {{&m.a11, &m.a21}, {&m.a12, &m.a22}};
    for (int c = 0; c < 2; ++c) {
        double u = (c == 0) ? 1.0 : 0.0;
        double v = (c == 0) ? 0.0 : 1.0;
        for (long long k = 0; k < n; ++k) {
            const double tau = static_cast<double>(k) * dt;
            const double k1u = v, k1v = h.accel(tau, u, v);
            const double k2u = v + 0.5 * dt * k1v, k2v = h.accel(tau + 0.5 * dt, u + 0.5 * dt * k1u, k2u);
            const double k3u = v + 0.5 * dt * k2v, k3v = h.accel(tau + 0.5 * dt, u + 0.5 * dt * k2u, k3u);
            const double k4u = v + dt * k3v, k4v = h.accel(tau + dt, u + dt * k3u, k4u);
            u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        *cols[c][0] = u;
        *cols[c][1] = v;
    }
    return m;
}

// Multipliers and verdict from a monodromy matrix. The determinant must
// match exp(-gamma*pi); a drift beyond 1e-6 means the matrix was not
// produced by a correctly configured integration.
inline FloquetReport floquet_classify(const Mat2& m, double gamma) {
    constexpr double magnitude_tol = 1e-9;
    const double det = m.det();
    const double expected = std::exp(-gamma * pi);
    if (std::abs(det - expected) > 1e-6) {
        throw DeterminantDrift("monodromy determinant " + std::to_string(det) +
                               " deviates from exp(-gamma*pi) = " + std::to_string(expected));
    }
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * det;
    std::complex<double> m1, m2;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        m1 = {0.5 * (tr + root), 0.0};
        m2 = {0.5 * (tr - root), 0.0};
    } else {
        const double root = std::sqrt(-disc);
        m1 = {0.5 * tr, 0.5 * root};
        m2 = {0.5 * tr, -0.5 * root};
    }
    const double big = std::max(std::abs(m1), std::abs(m2));
    Verdict verdict = Verdict::Marginal;
    if (big < 1.0 - magnitude_tol) {
        verdict = Verdict::Stable;
    } else if (big > 1.0 + magnitude_tol) {
        verdict = Verdict::Unstable;
    }
    return FloquetReport{m1, m2, det, verdict};
}

namespace detail {

// True when some stiffness in the principal-resonance band is unstable
// at this modulation amplitude. The modulation carries a single harmonic
// at frequency 2, so the band around p = 1 is where instability opens
// first; away from it the multipliers sit at exp(-gamma*pi/2) and give
// no gradient to search on, hence a flat scan.
inline bool resonance_band_unstable(double gamma, double phi0, double C, double D, double eps,
                                    double step) {
    constexpr int grid = 161;
    constexpr double p_lo = 0.5, p_hi = 1.5;
    for (int i = 0; i < grid; ++i) {
        const double p = p_lo + (p_hi - p_lo) * static_cast<double>(i) / (grid - 1);
        const MathieuHill h{gamma, p, eps, phi0, C, D};
        if (floquet_classify(monodromy(h, step), gamma).verdict == Verdict::Unstable) {
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Smallest modulation amplitude that destabilizes the variational
// problem at its most dangerous stiffness, located by bisection to the
// given absolute tolerance. Independent of the analytic bound, which it
// exists to cross-check.
inline double numeric_eps_critical(double gamma, double mu, double tolerance, double step = 1e-3) {
    if (!(gamma > 0.0) || !(gamma < mu)) {
        throw InvalidParameter("numeric_eps_critical requires 0 < gamma < mu");
    }
    if (!(tolerance > 0.0)) throw InvalidParameter("tolerance must be positive");
    const double phi0 = perturb::phi0_stable(gamma, mu);
    const auto cd = perturb::cd_coefficients(gamma, mu);
    const double analytic = perturb::stability_bound_eps(gamma, mu);

    double lo = 0.0;  // stable: constant coefficients with gamma > 0
    double hi = 4.0 * analytic;
    if (!detail::resonance_band_unstable(gamma, phi0, cd.C, cd.D, hi, step)) {
        throw BracketFailure("no instability found up to eps = " + std::to_string(hi));
    }
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (detail::resonance_band_unstable(gamma, phi0, cd.C, cd.D, mid, step)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace twirl::stability
