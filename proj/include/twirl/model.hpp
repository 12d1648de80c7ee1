#pragma once

// Physical model of a hoop twirled around a circular waist whose center
// traces the ellipse x = a sin(omega t), y = b cos(omega t). The hoop
// rolls on the waist without slipping; phi is the angle between the x
// axis and the line from hoop center to waist center, kept unwrapped so
// rotations can be counted. All analysis and integration run on the
// nondimensional form (time tau = omega t); the dimensional form is kept
// only for parameter conversion and force reconstruction.

#include <cmath>
#include <string>

#include "twirl/errors.hpp"
#include "twirl/numeric.hpp"

namespace twirl::model {

// Physical constants of the hoop/waist system.
struct DimensionalParams {
    double mass;          // hoop mass m [kg], > 0
    double hoop_radius;   // R [m], > waist_radius
    double waist_radius;  // r [m], > 0
    double damping;       // viscous friction coefficient k [N m s], >= 0
    double amp_x;         // waist-center amplitude a along x [m]
    double amp_y;         // waist-center amplitude b along y [m]
    double omega;         // excitation frequency [rad/s], > 0

    void validate() const {
        if (!(mass > 0.0) || !std::isfinite(mass)) {
            throw InvalidParameter("mass must be positive and finite, got " + std::to_string(mass));
        }
        if (!std::isfinite(hoop_radius) || !std::isfinite(waist_radius) || !(waist_radius > 0.0)) {
            throw InvalidParameter("waist_radius must be positive and finite");
        }
        if (!(hoop_radius > waist_radius)) {
            throw InvalidParameter("hoop_radius must exceed waist_radius, got R = " +
                                   std::to_string(hoop_radius) + ", r = " + std::to_string(waist_radius));
        }
        if (!(omega > 0.0) || !std::isfinite(omega)) {
            throw InvalidParameter("omega must be positive and finite, got " + std::to_string(omega));
        }
        if (!(damping >= 0.0) || !std::isfinite(damping)) {
            throw InvalidParameter("damping must be nonnegative and finite, got " + std::to_string(damping));
        }
        if (!std::isfinite(amp_x) || !std::isfinite(amp_y)) {
            throw InvalidParameter("excitation amplitudes must be finite");
        }
    }
};

// Nondimensional parameter triple. eps (ellipticity) and mu (mean
// amplitude) are derived views used by the rotating-frame form.
struct Params {
    double gamma;  // damping
    double alpha;  // excitation amplitude along x
    double beta;   // excitation amplitude along y

    double eps() const { return 0.5 * (alpha - beta); }
    double mu() const { return 0.5 * (alpha + beta); }

    void validate() const {
        if (!std::isfinite(gamma)) throw InvalidParameter("gamma must be finite");
        if (!std::isfinite(alpha)) throw InvalidParameter("alpha must be finite");
        if (!std::isfinite(beta)) throw InvalidParameter("beta must be finite");
    }
};

// Hoop angle and its rate in nondimensional time. phi is unwrapped.
struct State {
    double phi;
    double phi_dot;
};

// Dimensional contact forces; theta_dot is the hoop spin rate fixed by
// the no-slip constraint.
struct Forces {
    double normal;     // N [N]
    double friction;   // F_T [N]
    double theta_dot;  // [rad/s]
};

inline Params nondimensionalize(const DimensionalParams& p) {
    p.validate();
    const double dr = p.hoop_radius - p.waist_radius;
    return Params{p.damping / (2.0 * p.mass * p.hoop_radius * p.hoop_radius * p.omega),
                  p.amp_x / (2.0 * dr), p.amp_y / (2.0 * dr)};
}

// Angular acceleration phi'' in nondimensional time.
inline double rhs(double tau, const State& s, const Params& p) {
    return -p.gamma * s.phi_dot - p.alpha * std::sin(tau) * std::sin(s.phi) -
           p.beta * std::cos(tau) * std::cos(s.phi);
}

// Same field written against the co-/counter-rotating phases; identical
// to rhs when eps = (alpha-beta)/2 and mu = (alpha+beta)/2.
inline double rhs_rotating(double tau, const State& s, double gamma, double eps, double mu) {
    return -gamma * s.phi_dot - mu * std::cos(s.phi - tau) + eps * std::cos(s.phi + tau);
}

// Dimensionless normal-force proxy; the hoop keeps contact with the
// waist while this is positive.
inline double contact_margin(double tau, const State& s, const Params& p) {
    return s.phi_dot * s.phi_dot + 2.0 * (p.alpha * std::sin(tau) * std::cos(s.phi) -
                                          p.beta * std::cos(tau) * std::sin(s.phi));
}

// Contact forces at time t for a state with phi_dot measured in rad/s.
// The angular acceleration is taken from the equation of motion, so the
// returned friction is the one consistent with the modeled dynamics.
inline Forces dimensional_forces(double t, const State& s, const DimensionalParams& p) {
    p.validate();
    const double dr = p.hoop_radius - p.waist_radius;
    const double w = p.omega;
    const double xdd = -p.amp_x * w * w * std::sin(w * t);
    const double ydd = -p.amp_y * w * w * std::cos(w * t);
    const double cos_phi = std::cos(s.phi);
    const double sin_phi = std::sin(s.phi);

    const double normal = p.mass * dr * s.phi_dot * s.phi_dot - p.mass * (xdd * cos_phi - ydd * sin_phi);

    const double phi_dd = -p.damping / (2.0 * p.mass * p.hoop_radius * p.hoop_radius) * s.phi_dot -
                          w * w *
                              (p.amp_x * std::sin(w * t) * sin_phi + p.amp_y * std::cos(w * t) * cos_phi) /
                              (2.0 * dr);
    const double friction = p.mass * dr * phi_dd - p.mass * (xdd * sin_phi + ydd * cos_phi);

    return Forces{normal, friction, dr * s.phi_dot / p.hoop_radius};
}

// Excitation with alpha < 0 is the alpha > 0 system observed half a
// period later; callers evaluate the returned params at tau + tau_shift.
struct Normalized {
    Params params;
    double tau_shift;
};

inline Normalized normalize(const Params& p) {
    p.validate();
    if (p.alpha < 0.0) return {Params{p.gamma, -p.alpha, -p.beta}, pi};
    return {p, 0.0};
}

}  // namespace twirl::model
