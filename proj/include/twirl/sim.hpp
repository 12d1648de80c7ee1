#pragma once

// Deterministic fixed-step integration of the full nonlinear equation,
// rotational-capture detection, contact-loss location, comparison with
// the analytic solutions, and two-parameter regime sweeps.
//
// Everything here is classical 4th-order Runge-Kutta with a fixed step:
// the same inputs give bit-identical trajectories on one platform, and
// step-halving quarters-squared the error, which the tests lean on.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/exact.hpp"
#include "twirl/model.hpp"
#include "twirl/numeric.hpp"
#include "twirl/perturb.hpp"

namespace twirl::sim {

struct Sample {
    double tau;
    double phi;
    double phi_dot;
    double margin;  // model::contact_margin at this state
};

struct Trajectory {
    std::vector<Sample> samples;
    model::Params params{};
    double step = 1e-3;
    int stride = 1;

    double duration() const { return samples.back().tau - samples.front().tau; }
};

struct CaptureReport {
    double rho_hat = 0.0;   // mean rotation rate over the final window
    int rho_int = 0;        // rho_hat rounded to the nearest integer
    double psi_hat = 0.0;   // circular mean of phi - rho_int*tau, in [-pi, pi]
    double residual_sd = 0.0;
    bool converged = false;
    std::optional<double> contact_lost_at;
    double transient_discarded = 0.0;
};

enum class Regime { CW, CCW, Both, None, ContactLoss };

struct RegimeCell {
    Regime verdict = Regime::None;
    double psi_cw = std::numeric_limits<double>::quiet_NaN();
    double psi_ccw = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> contact_loss_tau;
    std::string error;  // nonempty when the cell aborted; verdict stays None
};

struct Axis {
    std::string name;  // gamma | alpha | beta | eps | mu
    std::vector<double> values;

    static Axis linspace(std::string name, double start, double stop, int count) {
        if (count < 1) throw InvalidParameter("axis count must be >= 1");
        if (!std::isfinite(start) || !std::isfinite(stop)) {
            throw InvalidParameter("axis range must be finite");
        }
        Axis a{std::move(name), {}};
        a.values.reserve(count);
        if (count == 1) {
            a.values.push_back(start);
        } else {
            for (int i = 0; i < count; ++i) {
                a.values.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
            }
        }
        return a;
    }
};

struct SweepOptions {
    double tau_end = 600.0;
    double step = 1e-3;
    int stride = 10;
    double window = 20.0 * pi;
};

struct RegimeMap {
    Axis axis1;  // outer (row) axis
    Axis axis2;  // inner (column) axis
    model::Params base{};
    SweepOptions options{};
    std::vector<RegimeCell> cells;  // axis1-major

    const RegimeCell& at(std::size_t i, std::size_t j) const {
        return cells[i * axis2.values.size() + j];
    }
};

namespace detail {

inline model::State rk4_step(const model::Params& p, const model::State& s, double tau, double h) {
    const double k1x = s.phi_dot;
    const double k1v = model::rhs(tau, s, p);
    const model::State s2{s.phi + 0.5 * h * k1x, s.phi_dot + 0.5 * h * k1v};
    const double k2x = s2.phi_dot;
    const double k2v = model::rhs(tau + 0.5 * h, s2, p);
    const model::State s3{s.phi + 0.5 * h * k2x, s.phi_dot + 0.5 * h * k2v};
    const double k3x = s3.phi_dot;
    const double k3v = model::rhs(tau + 0.5 * h, s3, p);
    const model::State s4{s.phi + h * k3x, s.phi_dot + h * k3v};
    const double k4x = s4.phi_dot;
    const double k4v = model::rhs(tau + h, s4, p);
    return model::State{s.phi + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
                        s.phi_dot + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

// March a state from tau_from to tau_to in substeps of at most max_step.
inline model::State advance(const model::Params& p, model::State s, double tau_from, double tau_to,
                            double max_step) {
    double tau = tau_from;
    while (tau < tau_to) {
        const double h = std::min(max_step, tau_to - tau);
        if (!(h > 0.0)) break;
        s = rk4_step(p, s, tau, h);
        tau += h;
    }
    return s;
}

// Solve the 3x3 normal equations for r ~ c0 + c1 sin(2 tau) + c2 cos(2 tau)
// and return the standard deviation of the de-trended residual.
inline double harmonic_detrended_sd(const std::vector<double>& taus, const std::vector<double>& r) {
    const std::size_t n = taus.size();
    double ata[3][3] = {};
    double atb[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const double b[3] = {1.0, std::sin(2.0 * taus[i]), std::cos(2.0 * taus[i])};
        for (int j = 0; j < 3; ++j) {
            for (int k = j; k < 3; ++k) ata[j][k] += b[j] * b[k];
            atb[j] += b[j] * r[i];
        }
    }
    ata[1][0] = ata[0][1];
    ata[2][0] = ata[0][2];
    ata[2][1] = ata[1][2];

    // Gaussian elimination with partial pivoting.
    double a[3][4];
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) a[j][k] = ata[j][k];
        a[j][3] = atb[j];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
        }
        std::swap(a[col], a[piv]);
        if (std::abs(a[col][col]) < 1e-300) continue;  // degenerate basis, keep zero coefficient
        for (int row = col + 1; row < 3; ++row) {
            const double f = a[row][col] / a[col][col];
            for (int k = col; k < 4; ++k) a[row][k] -= f * a[col][k];
        }
    }
    double c[3] = {};
    for (int row = 2; row >= 0; --row) {
        double rhs_val = a[row][3];
        for (int k = row + 1; k < 3; ++k) rhs_val -= a[row][k] * c[k];
        c[row] = (std::abs(a[row][row]) < 1e-300) ? 0.0 : rhs_val / a[row][row];
    }

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = c[0] + c[1] * std::sin(2.0 * taus[i]) + c[2] * std::cos(2.0 * taus[i]);
        const double d = r[i] - fit;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n));
}

}  // namespace detail

// Integrate from s0 to tau_end with the given step, recording every
// stride-th step (plus the endpoint). Contact loss does not stop the
// integration; the equation stays defined and loss is reported
// separately.
inline Trajectory integrate(const model::Params& p, const model::State& s0, double tau_end,
                            double step, int stride = 1) {
    p.validate();
    if (!(step > 0.0) || !std::isfinite(step)) throw InvalidParameter("step must be positive");
    if (!(tau_end > 0.0) || !std::isfinite(tau_end)) throw InvalidParameter("tau_end must be positive");
    if (stride < 1) throw InvalidParameter("stride must be >= 1");
    if (!std::isfinite(s0.phi) || !std::isfinite(s0.phi_dot)) {
        throw InvalidParameter("initial state must be finite");
    }
    const long long n = std::llround(tau_end / step);
    if (n < 1) throw InvalidParameter("tau_end must cover at least one step");

    Trajectory t;
    t.params = p;
    t.step = step;
    t.stride = stride;
    t.samples.reserve(static_cast<std::size_t>(n / stride) + 2);

    model::State s = s0;
    t.samples.push_back({0.0, s.phi, s.phi_dot, model::contact_margin(0.0, s, p)});
    for (long long k = 0; k < n; ++k) {
        const double tau = static_cast<double>(k) * step;
        s = detail::rk4_step(p, s, tau, step);
        if (!std::isfinite(s.phi) || !std::isfinite(s.phi_dot)) {
            throw NonFinite("state left finite range; last good tau = " + std::to_string(tau), tau);
        }
        if ((k + 1) % stride == 0 || k + 1 == n) {
            const double tau_next = static_cast<double>(k + 1) * step;
            t.samples.push_back({tau_next, s.phi, s.phi_dot, model::contact_margin(tau_next, s, p)});
        }
    }
    return t;
}

// Earliest tau where the contact margin crosses to <= 0, refined to 1e-8
// by bisection on states re-integrated from the preceding sample. A
// margin that only touches zero at the very first sample and then turns
// positive is not a loss. Returns nothing when contact holds throughout;
// crossings are bracketed at the recorded samples, so dips shorter than
// one output interval require stride 1 to be seen.
inline std::optional<double> first_contact_loss(const Trajectory& t) {
    const auto& s = t.samples;
    if (s.empty()) return std::nullopt;
    if (s.front().margin <= 0.0) {
        if (s.size() == 1 || s[1].margin <= 0.0) return s.front().tau;
    }
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (!(s[i].margin > 0.0) || !(s[i + 1].margin <= 0.0)) continue;
        const model::State left{s[i].phi, s[i].phi_dot};
        double lo = s[i].tau, hi = s[i + 1].tau;
        while (hi - lo > 1e-8) {
            const double mid = 0.5 * (lo + hi);
            const model::State sm = detail::advance(t.params, left, s[i].tau, mid, t.step);
            if (model::contact_margin(mid, sm, t.params) <= 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi;
    }
    return std::nullopt;
}

// Measure the mean rotation rate and locked phase over the final window.
// The 2*tau vibration harmonic of the first-order solutions is removed
// by least squares before thresholding the residual spread, so a locked
// rotation with its O(eps) wobble still counts as converged.
inline CaptureReport detect_capture(const Trajectory& t, double window = 20.0 * pi) {
    if (!(window > 0.0)) throw InvalidParameter("window must be positive");
    if (t.samples.size() < 4 || t.duration() < 2.0 * window) {
        throw TooShort("trajectory must cover at least twice the window (" +
                       std::to_string(2.0 * window) + ")");
    }
    const auto& s = t.samples;
    const double tau_end = s.back().tau;
    const auto from = std::lower_bound(s.begin(), s.end(), tau_end - window,
                                       [](const Sample& a, double v) { return a.tau < v; });
    const std::size_t iw = static_cast<std::size_t>(from - s.begin());

    CaptureReport rep;
    rep.contact_lost_at = first_contact_loss(t);
    rep.transient_discarded = tau_end - window - s.front().tau;
    rep.rho_hat = (s.back().phi - s[iw].phi) / (tau_end - s[iw].tau);
    rep.rho_int = static_cast<int>(std::llround(rep.rho_hat));

    std::vector<double> taus, resid;
    taus.reserve(s.size() - iw);
    resid.reserve(s.size() - iw);
    double sum_sin = 0.0, sum_cos = 0.0;
    for (std::size_t i = iw; i < s.size(); ++i) {
        const double r = s[i].phi - static_cast<double>(rep.rho_int) * s[i].tau;
        taus.push_back(s[i].tau);
        resid.push_back(r);
        sum_sin += std::sin(r);
        sum_cos += std::cos(r);
    }
    rep.psi_hat = std::atan2(sum_sin, sum_cos);
    rep.residual_sd = detail::harmonic_detrended_sd(taus, resid);
    rep.converged = std::abs(rep.rho_hat - rep.rho_int) < 0.05 && std::abs(rep.rho_int) <= 1 &&
                    rep.residual_sd < 0.02;
    return rep;
}

// Analytic rotating solutions a trajectory can be compared against.
struct ExactRotation {
    double psi;  // phi = tau + psi
};

using AnalyticBranch = std::variant<ExactRotation, perturb::FirstOrderSolution, perturb::SmallAmpSolution>;

inline int branch_rho(const AnalyticBranch& b) {
    if (const auto* sa = std::get_if<perturb::SmallAmpSolution>(&b)) return sa->rho;
    return 1;
}

inline model::State branch_eval(double tau, const AnalyticBranch& b) {
    return std::visit(
        [tau](const auto& v) -> model::State {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ExactRotation>) {
                return model::State{tau + v.psi, 1.0};
            } else if constexpr (std::is_same_v<T, perturb::FirstOrderSolution>) {
                return perturb::eval_first_order(tau, v);
            } else {
                return perturb::eval_small_amp(tau, v);
            }
        },
        b);
}

inline double branch_accel(double tau, const AnalyticBranch& b) {
    return std::visit(
        [tau](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ExactRotation>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, perturb::FirstOrderSolution>) {
                return perturb::first_order_accel(tau, v);
            } else {
                return perturb::small_amp_accel(tau, v);
            }
        },
        b);
}

struct ErrorMetrics {
    double max_abs_phase_error;
    double rms_phase_error;
    double residual_max;  // equation-of-motion residual of the analytic branch
};

// Phase error of the trajectory against an analytic branch over the
// post-transient tail (the larger of half the run and 100 time units is
// discarded). A whole number of turns between the two is not an error,
// so the comparison is done modulo 2*pi*k with k fixed from the mean.
inline ErrorMetrics compare_to_analytic(const Trajectory& t, const AnalyticBranch& b) {
    const CaptureReport rep = detect_capture(t);
    if (!rep.converged || rep.rho_int != branch_rho(b)) {
        throw BranchMismatch("trajectory rotation rho_hat = " + std::to_string(rep.rho_hat) +
                             (rep.converged ? "" : " (not converged)") +
                             " does not match the branch rho = " + std::to_string(branch_rho(b)));
    }
    const auto& s = t.samples;
    const double discard = std::max(0.5 * t.duration(), 100.0);
    const double tail_from = s.front().tau + discard;
    if (!(tail_from < s.back().tau)) {
        throw TooShort("no samples remain after discarding the transient");
    }
    const auto from = std::lower_bound(s.begin(), s.end(), tail_from,
                                       [](const Sample& a, double v) { return a.tau < v; });

    double mean_diff = 0.0;
    std::size_t count = 0;
    for (auto it = from; it != s.end(); ++it) {
        mean_diff += it->phi - branch_eval(it->tau, b).phi;
        ++count;
    }
    mean_diff /= static_cast<double>(count);
    const double turns = 2.0 * pi * static_cast<double>(std::llround(mean_diff / (2.0 * pi)));

    const auto [gamma, eps, mu] =
        std::array{t.params.gamma, t.params.eps(), t.params.mu()};
    ErrorMetrics m{0.0, 0.0, 0.0};
    for (auto it = from; it != s.end(); ++it) {
        const model::State sa = branch_eval(it->tau, b);
        const double e = it->phi - sa.phi - turns;
        m.max_abs_phase_error = std::max(m.max_abs_phase_error, std::abs(e));
        m.rms_phase_error += e * e;
        const double res = branch_accel(it->tau, b) - model::rhs_rotating(it->tau, sa, gamma, eps, mu);
        m.residual_max = std::max(m.residual_max, std::abs(res));
    }
    m.rms_phase_error = std::sqrt(m.rms_phase_error / static_cast<double>(count));
    return m;
}

namespace detail {

inline void apply_axis(model::Params& p, const std::string& name, double value) {
    if (name == "gamma") {
        p.gamma = value;
    } else if (name == "alpha") {
        p.alpha = value;
    } else if (name == "beta") {
        p.beta = value;
    } else if (name == "eps") {
        const double mu = p.mu();
        p.alpha = mu + value;
        p.beta = mu - value;
    } else if (name == "mu") {
        const double eps = p.eps();
        p.alpha = value + eps;
        p.beta = value - eps;
    } else {
        throw InvalidParameter("unknown axis name '" + name +
                               "' (expected gamma, alpha, beta, eps or mu)");
    }
}

// Seeds near the two small-amplitude branches; when a branch's existence
// window is closed, fall back to the corresponding quadrature phase.
inline std::pair<model::State, model::State> sweep_seeds(const model::Params& p) {
    model::State cw{-0.5 * pi, 1.0};
    model::State ccw{0.5 * pi, -1.0};
    try {
        cw.phi = perturb::small_amp_solution(1, p.gamma, p.eps(), p.mu()).phi0;
    } catch (const Error&) {
    }
    try {
        ccw.phi = perturb::small_amp_solution(-1, p.gamma, p.eps(), p.mu()).phi0;
    } catch (const Error&) {
    }
    return {cw, ccw};
}

inline RegimeCell evaluate_cell(const model::Params& p, const SweepOptions& o) {
    RegimeCell cell;
    try {
        p.validate();
        const auto [seed_cw, seed_ccw] = sweep_seeds(p);
        const CaptureReport cw = detect_capture(integrate(p, seed_cw, o.tau_end, o.step, o.stride), o.window);
        const CaptureReport ccw =
            detect_capture(integrate(p, seed_ccw, o.tau_end, o.step, o.stride), o.window);

        if (cw.converged && cw.rho_int == 1) cell.psi_cw = cw.psi_hat;
        if (ccw.converged && ccw.rho_int == -1) cell.psi_ccw = ccw.psi_hat;
        for (const auto& lost : {cw.contact_lost_at, ccw.contact_lost_at}) {
            if (lost && (!cell.contact_loss_tau || *lost < *cell.contact_loss_tau)) {
                cell.contact_loss_tau = lost;
            }
        }
        const bool cw_ok = cw.converged && cw.rho_int == 1 && !cw.contact_lost_at;
        const bool ccw_ok = ccw.converged && ccw.rho_int == -1 && !ccw.contact_lost_at;
        if (cw_ok && ccw_ok) {
            cell.verdict = Regime::Both;
        } else if (cw_ok) {
            cell.verdict = Regime::CW;
        } else if (ccw_ok) {
            cell.verdict = Regime::CCW;
        } else if (cell.contact_loss_tau) {
            cell.verdict = Regime::ContactLoss;
        } else {
            cell.verdict = Regime::None;
        }
    } catch (const Error& e) {
        cell.error = e.name() + ": " + e.what();
        cell.verdict = Regime::None;
    }
    return cell;
}

}  // namespace detail

// Classify the captured regime over a two-axis parameter grid. Each cell
// runs the two seeded integrations; a cell failure is recorded in the
// cell and never aborts the sweep. Cells are stored and written in
// axis1-major order.
inline RegimeMap sweep(const model::Params& base, const Axis& axis1, const Axis& axis2,
                       const SweepOptions& options = {}) {
    base.validate();
    if (axis1.values.empty() || axis2.values.empty()) {
        throw InvalidParameter("axes must contain at least one value");
    }
    if (axis1.name == axis2.name) throw InvalidParameter("axes must differ");
    if (axis1.values.size() * axis2.values.size() > 10000) {
        throw InvalidParameter("sweep grid exceeds 10000 cells");
    }
    {
        model::Params probe = base;  // validate axis names before running
        detail::apply_axis(probe, axis1.name, axis1.values.front());
        detail::apply_axis(probe, axis2.name, axis2.values.front());
    }

    RegimeMap map{axis1, axis2, base, options, {}};
    map.cells.reserve(axis1.values.size() * axis2.values.size());
    for (const double v1 : axis1.values) {
        for (const double v2 : axis2.values) {
            model::Params p = base;
            detail::apply_axis(p, axis1.name, v1);
            detail::apply_axis(p, axis2.name, v2);
            map.cells.push_back(detail::evaluate_cell(p, options));
        }
    }
    return map;
}

}  // namespace twirl::sim
