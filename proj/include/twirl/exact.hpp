#pragma once

// Closed-form rotating solutions phi = tau + psi for circular excitation
// (alpha = beta), their linearized stability, and the contact condition.

#include <cmath>
#include <complex>
#include <string>

#include "twirl/errors.hpp"
#include "twirl/numeric.hpp"

namespace twirl::exact {

enum class Branch { Stable, Unstable };

// One member of the constant-phase family. k_offset selects the 2*pi*k
// sheet; all sheets are physically identical, so it defaults to 0.
struct Phase {
    double psi;
    Branch branch;
    int k_offset = 0;
};

struct PhasePair {
    Phase stable;
    Phase unstable;
};

enum class Verdict { AsymptoticallyStable, Unstable, Marginal };

// Roots of the linearized variational equation about a rotating solution.
struct Spectrum {
    std::complex<double> lambda1;
    std::complex<double> lambda2;
    Verdict verdict;
};

struct Contact {
    bool ok;
    double margin;
};

// Both constant phases satisfying cos(psi) = -gamma/alpha. The labels
// apply for gamma > 0; linearized_stability gives the verdict in general.
inline PhasePair phases(double gamma, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(gamma)) {
        throw InvalidParameter("phases requires finite gamma and alpha > 0 (normalize first)");
    }
    if (std::abs(gamma) > alpha) {
        throw NoRotatingSolution("rotating solutions require |gamma| <= alpha, got gamma = " +
                                 std::to_string(gamma) + ", alpha = " + std::to_string(alpha));
    }
    const double a = acos_clamped(-gamma / alpha);
    return PhasePair{Phase{-a, Branch::Stable}, Phase{a, Branch::Unstable}};
}

// Eigenvalues of lambda^2 + gamma*lambda - alpha*sin(psi) = 0 and the
// stability verdict of the rotating solution with phase psi. Marginal
// covers gamma = 0 and sin(psi) = 0, where the linearization decides
// nothing.
inline Spectrum linearized_stability(double gamma, double alpha, double psi) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw InvalidParameter("linearized_stability requires alpha > 0");
    }
    if (std::abs(std::cos(psi) + gamma / alpha) > 1e-9) {
        throw NotASolution("psi = " + std::to_string(psi) +
                           " does not satisfy cos(psi) = -gamma/alpha at gamma = " +
                           std::to_string(gamma) + ", alpha = " + std::to_string(alpha));
    }
    const double sin_psi = std::sin(psi);
    const double q = -alpha * sin_psi;  // lambda^2 + gamma*lambda + q = 0
    const double disc = gamma * gamma - 4.0 * q;
    std::complex<double> l1, l2;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        l1 = {0.5 * (-gamma + root), 0.0};
        l2 = {0.5 * (-gamma - root), 0.0};
    } else {
        const double root = std::sqrt(-disc);
        l1 = {-0.5 * gamma, 0.5 * root};
        l2 = {-0.5 * gamma, -0.5 * root};
    }

    constexpr double sin_zero_tol = 1e-12;
    Verdict verdict = Verdict::Marginal;
    if (gamma > 0.0 && sin_psi < -sin_zero_tol) {
        verdict = Verdict::AsymptoticallyStable;
    } else if (sin_psi > sin_zero_tol || gamma < 0.0) {
        verdict = Verdict::Unstable;
    }
    return Spectrum{l1, l2, verdict};
}

// Contact margin 1 - 2*alpha*sin(psi) of a rotating solution; positive
// means the hoop stays on the waist for all tau.
inline Contact contact(double alpha, double psi) {
    const double margin = 1.0 - 2.0 * alpha * std::sin(psi);
    return Contact{margin > 0.0, margin};
}

}  // namespace twirl::exact
