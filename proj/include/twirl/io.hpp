#pragma once

// Serialization: CSV writers with reproducible 17-significant-digit
// formatting and JSON views of the report types.

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "twirl/exact.hpp"
#include "twirl/model.hpp"
#include "twirl/sim.hpp"
#include "twirl/stability.hpp"

namespace twirl::io {

// Full-precision round-trippable decimal form.
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Human-readable 6-significant-digit form.
inline std::string g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline const char* name(sim::Regime r) {
    switch (r) {
        case sim::Regime::CW: return "CW";
        case sim::Regime::CCW: return "CCW";
        case sim::Regime::Both: return "Both";
        case sim::Regime::ContactLoss: return "ContactLoss";
        case sim::Regime::None: break;
    }
    return "None";
}

inline const char* name(exact::Verdict v) {
    switch (v) {
        case exact::Verdict::AsymptoticallyStable: return "AsymptoticallyStable";
        case exact::Verdict::Unstable: return "Unstable";
        case exact::Verdict::Marginal: break;
    }
    return "Marginal";
}

inline const char* name(stability::Verdict v) {
    switch (v) {
        case stability::Verdict::Stable: return "Stable";
        case stability::Verdict::Unstable: return "Unstable";
        case stability::Verdict::Marginal: break;
    }
    return "Marginal";
}

inline void write_trajectory_csv(std::ostream& os, const sim::Trajectory& t) {
    os << "tau,phi,phi_dot,margin\n";
    for (const auto& s : t.samples) {
        os << g17(s.tau) << ',' << g17(s.phi) << ',' << g17(s.phi_dot) << ',' << g17(s.margin)
           << '\n';
    }
}

// One row per cell in axis1-major order; contact_loss_tau is empty when
// contact held.
inline void write_regime_map_csv(std::ostream& os, const sim::RegimeMap& m) {
    os << m.axis1.name << ',' << m.axis2.name << ",verdict,psi_cw,psi_ccw,contact_loss_tau\n";
    for (std::size_t i = 0; i < m.axis1.values.size(); ++i) {
        for (std::size_t j = 0; j < m.axis2.values.size(); ++j) {
            const auto& c = m.at(i, j);
            os << g17(m.axis1.values[i]) << ',' << g17(m.axis2.values[j]) << ',' << name(c.verdict)
               << ',' << g17(c.psi_cw) << ',' << g17(c.psi_ccw) << ','
               << (c.contact_loss_tau ? g17(*c.contact_loss_tau) : "") << '\n';
        }
    }
}

inline nlohmann::json to_json(const model::Params& p) {
    return {{"gamma", p.gamma}, {"alpha", p.alpha}, {"beta", p.beta}, {"eps", p.eps()}, {"mu", p.mu()}};
}

inline nlohmann::json to_json(const sim::CaptureReport& r) {
    nlohmann::json j{{"rho_hat", r.rho_hat},
                     {"rho_int", r.rho_int},
                     {"psi_hat", r.psi_hat},
                     {"residual_sd", r.residual_sd},
                     {"converged", r.converged},
                     {"transient_discarded", r.transient_discarded}};
    j["contact_lost_at"] = r.contact_lost_at ? nlohmann::json(*r.contact_lost_at) : nlohmann::json();
    return j;
}

inline nlohmann::json to_json(const sim::ErrorMetrics& m) {
    return {{"max_abs_phase_error", m.max_abs_phase_error},
            {"rms_phase_error", m.rms_phase_error},
            {"residual_max", m.residual_max}};
}

inline nlohmann::json to_json(const stability::FloquetReport& r) {
    return {{"multipliers",
             {{{"re", r.m1.real()}, {"im", r.m1.imag()}, {"abs", std::abs(r.m1)}},
              {{"re", r.m2.real()}, {"im", r.m2.imag()}, {"abs", std::abs(r.m2)}}}},
            {"determinant", r.determinant},
            {"verdict", name(r.verdict)}};
}

inline nlohmann::json to_json(const sim::RegimeMap& m) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t i = 0; i < m.axis1.values.size(); ++i) {
        for (std::size_t j = 0; j < m.axis2.values.size(); ++j) {
            const auto& c = m.at(i, j);
            nlohmann::json jc{{m.axis1.name, m.axis1.values[i]},
                              {m.axis2.name, m.axis2.values[j]},
                              {"verdict", name(c.verdict)}};
            jc["psi_cw"] = std::isnan(c.psi_cw) ? nlohmann::json() : nlohmann::json(c.psi_cw);
            jc["psi_ccw"] = std::isnan(c.psi_ccw) ? nlohmann::json() : nlohmann::json(c.psi_ccw);
            jc["contact_loss_tau"] =
                c.contact_loss_tau ? nlohmann::json(*c.contact_loss_tau) : nlohmann::json();
            if (!c.error.empty()) jc["error"] = c.error;
            cells.push_back(std::move(jc));
        }
    }
    return {{"axis1", {{"name", m.axis1.name}, {"values", m.axis1.values}}},
            {"axis2", {{"name", m.axis2.name}, {"values", m.axis2.values}}},
            {"base", to_json(m.base)},
            {"cells", std::move(cells)}};
}

}  // namespace twirl::io
