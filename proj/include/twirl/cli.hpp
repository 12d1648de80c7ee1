#pragma once

// Command-line front end. Subcommands cover every analysis surface:
//
//   exact     closed-form rotating solutions for circular excitation
//   approx    first-order solution record {phi0, C, D, bounds}
//   bounds    every ellipticity/amplitude bound in one report
//   stability Floquet classification and the numeric critical amplitude
//   simulate  one integration -> trajectory CSV + capture report JSON
//   compare   integration vs analytic branch -> error metrics
//   sweep     two-axis regime map -> CSV/JSON
//
// Exit codes: 0 success, 1 runtime error (reported by name), 2 validation
// or usage error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twirl/errors.hpp"
#include "twirl/exact.hpp"
#include "twirl/io.hpp"
#include "twirl/model.hpp"
#include "twirl/numeric.hpp"
#include "twirl/perturb.hpp"
#include "twirl/sim.hpp"
#include "twirl/stability.hpp"

namespace twirl::cli {

namespace detail {

inline const double nan = std::numeric_limits<double>::quiet_NaN();

// Everything a run needs, resolved from config file and/or flags.
struct RunConfig {
    model::Params params{};
    model::State initial{-0.5 * pi, 1.0};
    bool initial_given = false;
    double tau_end = 600.0;
    double step = 1e-3;
    int stride = 10;
    double window = 20.0 * pi;
    std::string seed_branch;  // "", "cw" or "ccw"
};

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParameter("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

inline double require_number(const nlohmann::json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw InvalidParameter(where + "." + key + " is required");
    if (!j[key].is_number()) throw InvalidParameter(where + "." + key + " must be a number");
    const double v = j[key].get<double>();
    if (!std::isfinite(v)) throw InvalidParameter(where + "." + key + " must be finite");
    return v;
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw InvalidParameter(where + ": unknown key '" + key + "'");
        }
    }
}

// Parse and validate a config document. Exactly one of "dimensional" and
// "params" must be present; every violation is reported by field name.
inline RunConfig load_config(const nlohmann::json& j) {
    reject_unknown_keys(j, {"dimensional", "params", "initial", "tau_end", "step", "stride",
                            "window", "seed_branch"},
                        "config");
    const bool has_dim = j.contains("dimensional");
    const bool has_nd = j.contains("params");
    if (has_dim == has_nd) {
        throw InvalidParameter("config must contain exactly one of 'dimensional' and 'params'");
    }

    RunConfig cfg;
    if (has_dim) {
        const auto& d = j["dimensional"];
        reject_unknown_keys(d, {"m_kg", "R_m", "r_m", "k_Nms", "a_m", "b_m", "omega_rad_s"},
                            "config.dimensional");
        model::DimensionalParams dp{};
        dp.mass = require_number(d, "m_kg", "config.dimensional");
        dp.hoop_radius = require_number(d, "R_m", "config.dimensional");
        dp.waist_radius = require_number(d, "r_m", "config.dimensional");
        dp.damping = require_number(d, "k_Nms", "config.dimensional");
        dp.amp_x = require_number(d, "a_m", "config.dimensional");
        dp.amp_y = require_number(d, "b_m", "config.dimensional");
        dp.omega = require_number(d, "omega_rad_s", "config.dimensional");
        if (!(dp.mass > 0.0)) throw InvalidParameter("config.dimensional.m_kg must be positive");
        if (!(dp.waist_radius > 0.0)) throw InvalidParameter("config.dimensional.r_m must be positive");
        if (!(dp.hoop_radius > dp.waist_radius)) {
            throw InvalidParameter("config.dimensional.R_m must exceed r_m");
        }
        if (!(dp.omega > 0.0)) throw InvalidParameter("config.dimensional.omega_rad_s must be positive");
        if (!(dp.damping >= 0.0)) throw InvalidParameter("config.dimensional.k_Nms must be nonnegative");
        cfg.params = model::nondimensionalize(dp);
    } else {
        const auto& p = j["params"];
        reject_unknown_keys(p, {"gamma", "alpha", "beta"}, "config.params");
        cfg.params = model::Params{require_number(p, "gamma", "config.params"),
                                   require_number(p, "alpha", "config.params"),
                                   require_number(p, "beta", "config.params")};
    }

    if (j.contains("initial")) {
        const auto& s = j["initial"];
        reject_unknown_keys(s, {"phi", "phi_dot"}, "config.initial");
        cfg.initial = model::State{require_number(s, "phi", "config.initial"),
                                   require_number(s, "phi_dot", "config.initial")};
        cfg.initial_given = true;
    }
    if (j.contains("tau_end")) {
        cfg.tau_end = require_number(j, "tau_end", "config");
        if (!(cfg.tau_end > 0.0)) throw InvalidParameter("config.tau_end must be positive");
    }
    if (j.contains("step")) {
        cfg.step = require_number(j, "step", "config");
        if (!(cfg.step > 0.0)) throw InvalidParameter("config.step must be positive");
    }
    if (j.contains("stride")) {
        if (!j["stride"].is_number_integer()) throw InvalidParameter("config.stride must be an integer");
        cfg.stride = j["stride"].get<int>();
        if (cfg.stride < 1) throw InvalidParameter("config.stride must be >= 1");
    }
    if (j.contains("window")) {
        cfg.window = require_number(j, "window", "config");
        if (!(cfg.window > 0.0)) throw InvalidParameter("config.window must be positive");
    }
    if (j.contains("seed_branch")) {
        if (!j["seed_branch"].is_string()) throw InvalidParameter("config.seed_branch must be a string");
        cfg.seed_branch = j["seed_branch"].get<std::string>();
        if (cfg.seed_branch != "cw" && cfg.seed_branch != "ccw") {
            throw InvalidParameter("config.seed_branch must be 'cw' or 'ccw'");
        }
    }
    return cfg;
}

// Flags shared by the analysis subcommands.
struct ParamArgs {
    std::string config_path;
    double gamma = nan;
    double alpha = nan;
    double beta = nan;

    void add_to(CLI::App* cmd, bool with_beta = true) {
        auto* c = cmd->add_option("--config", config_path, "JSON config file");
        auto* g = cmd->add_option("--gamma", gamma, "damping coefficient");
        auto* a = cmd->add_option("--alpha", alpha, "excitation amplitude along x");
        c->excludes(g)->excludes(a);
        if (with_beta) {
            auto* b = cmd->add_option("--beta", beta, "excitation amplitude along y");
            c->excludes(b);
        }
    }

    // Resolve to a RunConfig; flags and config are mutually exclusive.
    RunConfig resolve(bool need_beta = true) const {
        if (!config_path.empty()) return load_config(read_json_file(config_path));
        RunConfig cfg;
        if (std::isnan(gamma)) throw InvalidParameter("--gamma is required (or use --config)");
        if (std::isnan(alpha)) throw InvalidParameter("--alpha is required (or use --config)");
        if (need_beta && std::isnan(beta)) {
            throw InvalidParameter("--beta is required (or use --config)");
        }
        cfg.params = model::Params{gamma, alpha, need_beta ? beta : alpha};
        cfg.params.validate();
        return cfg;
    }
};

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidParameter("output path '" + path + "' is not writable");
    return out;
}

inline std::string fmt_complex(const std::complex<double>& z) {
    std::string s = io::g6(z.real());
    if (z.imag() != 0.0) {
        s += (z.imag() > 0 ? " + " : " - ") + io::g6(std::abs(z.imag())) + "i";
    }
    return s;
}

inline sim::Axis parse_axis(const std::string& spec, const char* flag) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4) {
        throw InvalidParameter(std::string(flag) + " must be name:start:stop:count, got '" + spec + "'");
    }
    double start = 0, stop = 0;
    int count = 0;
    try {
        start = std::stod(parts[1]);
        stop = std::stod(parts[2]);
        count = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw InvalidParameter(std::string(flag) + ": cannot parse '" + spec + "'");
    }
    return sim::Axis::linspace(parts[0], start, stop, count);
}

inline model::State resolve_initial(const RunConfig& cfg, const std::string& seed_branch,
                                    std::optional<double> phi, std::optional<double> phi_dot) {
    if (phi || phi_dot) {
        return model::State{phi.value_or(cfg.initial.phi), phi_dot.value_or(cfg.initial.phi_dot)};
    }
    const std::string branch = !seed_branch.empty() ? seed_branch : cfg.seed_branch;
    if (!branch.empty()) {
        const int rho = branch == "cw" ? 1 : -1;
        const auto sol =
            perturb::small_amp_solution(rho, cfg.params.gamma, cfg.params.eps(), cfg.params.mu());
        return model::State{sol.phi0, static_cast<double>(rho)};
    }
    return cfg.initial;
}

// ---- subcommand handlers ---------------------------------------------

inline void run_exact(const RunConfig& cfg, bool json, std::ostream& out) {
    const auto& p = cfg.params;
    if (p.alpha != p.beta) {
        throw InvalidParameter("exact analysis needs circular excitation (alpha == beta), got alpha = " +
                               io::g17(p.alpha) + ", beta = " + io::g17(p.beta));
    }
    const auto pair = exact::phases(p.gamma, p.alpha);
    auto report = [&](const exact::Phase& ph) {
        const auto spec = exact::linearized_stability(p.gamma, p.alpha, ph.psi);
        const auto con = exact::contact(p.alpha, ph.psi);
        nlohmann::json j{{"psi", ph.psi},
                         {"eigenvalues",
                          {{{"re", spec.lambda1.real()}, {"im", spec.lambda1.imag()}},
                           {{"re", spec.lambda2.real()}, {"im", spec.lambda2.imag()}}}},
                         {"verdict", io::name(spec.verdict)},
                         {"contact_margin", con.margin},
                         {"contact_ok", con.ok}};
        return std::pair{j, spec};
    };
    auto [js, ss] = report(pair.stable);
    auto [ju, su] = report(pair.unstable);
    if (json) {
        out << nlohmann::json{{"params", io::to_json(p)}, {"stable", js}, {"unstable", ju}}.dump(2)
            << '\n';
        return;
    }
    out << "gamma = " << io::g6(p.gamma) << ", alpha = beta = " << io::g6(p.alpha) << "\n";
    auto line = [&](const char* label, const exact::Phase& ph, const nlohmann::json& j,
                    const exact::Spectrum& spec) {
        out << label << ": psi = " << io::g6(ph.psi) << "  eigenvalues = " << fmt_complex(spec.lambda1)
            << ", " << fmt_complex(spec.lambda2) << "  verdict = " << j["verdict"].get<std::string>()
            << "  contact margin = " << io::g6(j["contact_margin"].get<double>())
            << (j["contact_ok"].get<bool>() ? " (contact ok)" : " (contact lost)") << "\n";
    };
    line("stable  ", pair.stable, js, ss);
    line("unstable", pair.unstable, ju, su);
}

inline void run_approx(const RunConfig& cfg, bool json, std::ostream& out) {
    const auto& p = cfg.params;
    const double gamma = p.gamma, eps = p.eps(), mu = p.mu();
    const double phi0 = perturb::phi0_stable(gamma, mu);
    const auto cd = perturb::cd_coefficients(gamma, mu);
    const double eps_max_stab = perturb::stability_bound_eps(gamma, mu);
    const double eps_max_contact = perturb::contact_bound_eps(gamma, mu);
    if (json) {
        out << nlohmann::json{{"params", io::to_json(p)},
                              {"phi0", phi0},
                              {"C", cd.C},
                              {"D", cd.D},
                              {"eps_max_stability", eps_max_stab},
                              {"eps_max_contact", eps_max_contact}}
                   .dump(2)
            << '\n';
        return;
    }
    out << "gamma = " << io::g6(gamma) << ", eps = " << io::g6(eps) << ", mu = " << io::g6(mu) << "\n"
        << "phi0 = " << io::g6(phi0) << "\n"
        << "C = " << io::g6(cd.C) << ", D = " << io::g6(cd.D) << "\n"
        << "eps_max (parametric resonance) = " << io::g6(eps_max_stab) << "\n"
        << "eps_max (contact)              = " << io::g6(eps_max_contact) << "\n";
}

inline void run_bounds(const RunConfig& cfg, bool json, std::ostream& out) {
    const auto& p = cfg.params;
    const double gamma = p.gamma, eps = p.eps(), mu = p.mu();

    nlohmann::json j{{"params", io::to_json(p)}};
    const double eps_max_stab = perturb::stability_bound_eps(gamma, mu);
    const double eps_max_contact = perturb::contact_bound_eps(gamma, mu);
    j["first_order"] = {{"eps_max_stability", eps_max_stab},
                        {"eps_max_contact", eps_max_contact},
                        {"stability_ok", eps < eps_max_stab},
                        {"contact_ok", eps < eps_max_contact}};

    const bool cw_exists = gamma > 0.0 && gamma < mu;
    nlohmann::json jcw{{"exists", cw_exists}};
    if (gamma <= mu) {
        const auto b = perturb::small_amp_contact_bound(1, gamma, eps, mu);
        jcw["eps_max_contact"] = b.bound;
        jcw["contact_ok"] = b.ok;
    }
    j["small_amp_cw"] = jcw;

    const bool ccw_exists = gamma > 0.0 && gamma < eps;
    nlohmann::json jccw{{"exists", ccw_exists}};
    if (gamma <= eps) {
        const auto b = perturb::small_amp_contact_bound(-1, gamma, eps, mu);
        jccw["mu_max_contact"] = b.bound;
        jccw["contact_ok"] = b.ok;
    }
    j["small_amp_ccw"] = jccw;

    if (json) {
        out << j.dump(2) << '\n';
        return;
    }
    out << "gamma = " << io::g6(gamma) << ", eps = " << io::g6(eps) << ", mu = " << io::g6(mu) << "\n"
        << "first-order: eps_max stability = " << io::g6(eps_max_stab)
        << (eps < eps_max_stab ? " (ok)" : " (violated)")
        << ", eps_max contact = " << io::g6(eps_max_contact)
        << (eps < eps_max_contact ? " (ok)" : " (violated)") << "\n";
    out << "small-amplitude cw:  " << (cw_exists ? "exists" : "window closed (needs 0 < gamma < mu)");
    if (jcw.contains("eps_max_contact")) {
        out << ", eps bound = " << io::g6(jcw["eps_max_contact"].get<double>())
            << (jcw["contact_ok"].get<bool>() ? " (ok)" : " (violated)");
    }
    out << "\n";
    out << "small-amplitude ccw: " << (ccw_exists ? "exists" : "window closed (needs 0 < gamma < eps)");
    if (jccw.contains("mu_max_contact")) {
        out << ", mu bound = " << io::g6(jccw["mu_max_contact"].get<double>())
            << (jccw["contact_ok"].get<bool>() ? " (ok)" : " (violated)");
    }
    out << "\n";
}

struct StabilityArgs {
    double mu = nan;
    double eps = nan;
    double step = 1e-3;
    bool critical = false;
    double tolerance = 1e-4;
};

inline void run_stability(const RunConfig& cfg, const StabilityArgs& args, bool json,
                          std::ostream& out) {
    const double gamma = cfg.params.gamma;
    const double mu = std::isnan(args.mu) ? cfg.params.mu() : args.mu;
    const double eps = std::isnan(args.eps) ? cfg.params.eps() : args.eps;

    const auto hill = stability::assemble_hill(gamma, mu, eps);
    const auto rep = stability::floquet_classify(stability::monodromy(hill, args.step), gamma);

    nlohmann::json j{{"gamma", gamma}, {"mu", mu},           {"eps", eps},
                     {"p", hill.p},    {"phi0", hill.phi0},  {"C", hill.C},
                     {"D", hill.D},    {"floquet", io::to_json(rep)}};
    if (args.critical) {
        j["eps_critical_numeric"] = stability::numeric_eps_critical(gamma, mu, args.tolerance, args.step);
        j["eps_critical_analytic"] = perturb::stability_bound_eps(gamma, mu);
    }
    if (json) {
        out << j.dump(2) << '\n';
        return;
    }
    out << "gamma = " << io::g6(gamma) << ", mu = " << io::g6(mu) << ", eps = " << io::g6(eps)
        << ", p = " << io::g6(hill.p) << "\n"
        << "multipliers = " << fmt_complex(rep.m1) << " (|.| = " << io::g6(std::abs(rep.m1)) << "), "
        << fmt_complex(rep.m2) << " (|.| = " << io::g6(std::abs(rep.m2)) << ")\n"
        << "determinant = " << io::g6(rep.determinant) << ", verdict = " << io::name(rep.verdict)
        << "\n";
    if (args.critical) {
        out << "eps critical: numeric = " << io::g6(j["eps_critical_numeric"].get<double>())
            << ", analytic = " << io::g6(j["eps_critical_analytic"].get<double>()) << "\n";
    }
}

struct SimArgs {
    std::string out_path;
    std::string report_path;
    std::string seed_branch;
    std::optional<double> phi;
    std::optional<double> phi_dot;
    std::optional<double> tau_end;
    std::optional<double> step;
    std::optional<int> stride;
};

inline void run_simulate(RunConfig cfg, const SimArgs& args, bool json, std::ostream& out) {
    if (args.tau_end) cfg.tau_end = *args.tau_end;
    if (args.step) cfg.step = *args.step;
    if (args.stride) cfg.stride = *args.stride;
    if (args.out_path.empty()) throw InvalidParameter("--out is required for simulate");

    const model::State s0 = resolve_initial(cfg, args.seed_branch, args.phi, args.phi_dot);
    auto csv = open_output(args.out_path);
    std::optional<std::ofstream> report_file;
    if (!args.report_path.empty()) report_file.emplace(open_output(args.report_path));

    const auto traj = sim::integrate(cfg.params, s0, cfg.tau_end, cfg.step, cfg.stride);
    io::write_trajectory_csv(csv, traj);

    nlohmann::json j{{"params", io::to_json(cfg.params)},
                     {"initial", {{"phi", s0.phi}, {"phi_dot", s0.phi_dot}}},
                     {"tau_end", cfg.tau_end},
                     {"step", cfg.step},
                     {"stride", cfg.stride},
                     {"samples", traj.samples.size()},
                     {"trajectory", args.out_path}};
    try {
        j["capture"] = io::to_json(sim::detect_capture(traj, cfg.window));
    } catch (const TooShort&) {
        j["capture"] = nullptr;
        const auto lost = sim::first_contact_loss(traj);
        j["contact_lost_at"] = lost ? nlohmann::json(*lost) : nlohmann::json();
    }
    if (report_file) *report_file << j.dump(2) << '\n';
    if (json) {
        out << j.dump(2) << '\n';
    } else {
        out << "wrote " << traj.samples.size() << " samples to " << args.out_path << "\n";
        if (j["capture"].is_object()) {
            const auto& c = j["capture"];
            out << "capture: rho_hat = " << io::g6(c["rho_hat"].get<double>())
                << ", psi_hat = " << io::g6(c["psi_hat"].get<double>())
                << ", converged = " << (c["converged"].get<bool>() ? "yes" : "no");
            if (!c["contact_lost_at"].is_null()) {
                out << ", contact lost at tau = " << io::g6(c["contact_lost_at"].get<double>());
            }
            out << "\n";
        }
    }
}

struct CompareArgs {
    std::string branch = "first-order";
    std::string out_path;
    std::optional<double> phi;
    std::optional<double> phi_dot;
    std::optional<double> tau_end;
    std::optional<double> step;
    std::optional<int> stride;
};

inline void run_compare(RunConfig cfg, const CompareArgs& args, bool json, std::ostream& out) {
    if (args.tau_end) cfg.tau_end = *args.tau_end;
    if (args.step) cfg.step = *args.step;
    if (args.stride) cfg.stride = *args.stride;
    const auto& p = cfg.params;

    sim::AnalyticBranch branch = [&]() -> sim::AnalyticBranch {
        if (args.branch == "exact") return sim::ExactRotation{exact::phases(p.gamma, p.mu()).stable.psi};
        if (args.branch == "first-order") return perturb::first_order_solution(p.gamma, p.mu(), p.eps());
        if (args.branch == "small-amp-cw") return perturb::small_amp_solution(1, p.gamma, p.eps(), p.mu());
        if (args.branch == "small-amp-ccw") {
            return perturb::small_amp_solution(-1, p.gamma, p.eps(), p.mu());
        }
        throw InvalidParameter("--branch must be exact, first-order, small-amp-cw or small-amp-ccw");
    }();

    model::State s0 = sim::branch_eval(0.0, branch);
    if (args.phi) s0.phi = *args.phi;
    if (args.phi_dot) s0.phi_dot = *args.phi_dot;

    const auto traj = sim::integrate(p, s0, cfg.tau_end, cfg.step, cfg.stride);
    if (!args.out_path.empty()) {
        auto csv = open_output(args.out_path);
        io::write_trajectory_csv(csv, traj);
    }
    const auto metrics = sim::compare_to_analytic(traj, branch);
    nlohmann::json j{{"params", io::to_json(p)},
                     {"branch", args.branch},
                     {"metrics", io::to_json(metrics)},
                     {"capture", io::to_json(sim::detect_capture(traj, cfg.window))}};
    if (json) {
        out << j.dump(2) << '\n';
        return;
    }
    out << "branch = " << args.branch << "\n"
        << "max |phase error| = " << io::g6(metrics.max_abs_phase_error)
        << ", rms = " << io::g6(metrics.rms_phase_error)
        << ", max |residual| = " << io::g6(metrics.residual_max) << "\n";
}

struct SweepArgs {
    std::string axis1;
    std::string axis2;
    std::string out_path;
    std::optional<double> tau_end;
    std::optional<double> step;
    std::optional<int> stride;
    std::optional<double> window;
};

inline void run_sweep(const RunConfig& cfg, const SweepArgs& args, bool json, std::ostream& out) {
    sim::SweepOptions opts;
    opts.tau_end = args.tau_end.value_or(cfg.tau_end);
    opts.step = args.step.value_or(cfg.step);
    opts.stride = args.stride.value_or(cfg.stride);
    opts.window = args.window.value_or(cfg.window);

    const auto axis1 = parse_axis(args.axis1, "--axis1");
    const auto axis2 = parse_axis(args.axis2, "--axis2");
    std::optional<std::ofstream> csv;
    if (!args.out_path.empty()) csv.emplace(open_output(args.out_path));

    const auto map = sim::sweep(cfg.params, axis1, axis2, opts);
    if (csv) io::write_regime_map_csv(*csv, map);

    if (json) {
        out << io::to_json(map).dump(2) << '\n';
        return;
    }
    std::size_t counts[5] = {};
    for (const auto& c : map.cells) counts[static_cast<int>(c.verdict)]++;
    out << map.cells.size() << " cells: " << counts[static_cast<int>(sim::Regime::Both)] << " Both, "
        << counts[static_cast<int>(sim::Regime::CW)] << " CW, "
        << counts[static_cast<int>(sim::Regime::CCW)] << " CCW, "
        << counts[static_cast<int>(sim::Regime::None)] << " None, "
        << counts[static_cast<int>(sim::Regime::ContactLoss)] << " ContactLoss\n";
    if (!csv) io::write_regime_map_csv(out, map);
}

}  // namespace detail

// Parse and execute. Returns the process exit code; output and error
// streams are injectable for testing.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"hula-hoop twirling dynamics: exact solutions, perturbation bounds,\n"
                 "Floquet stability, deterministic simulation and regime sweeps"};
    app.require_subcommand(1);
    bool json = false;

    detail::ParamArgs exact_params, approx_params, bounds_params, stab_params, sim_params,
        cmp_params, sweep_params;
    detail::StabilityArgs stab_args;
    detail::SimArgs sim_args;
    detail::CompareArgs cmp_args;
    detail::SweepArgs sweep_args;

    auto add_json = [&json](CLI::App* cmd) {
        cmd->add_flag("--json", json, "machine-readable JSON output");
    };

    auto* c_exact = app.add_subcommand("exact", "rotating solutions for circular excitation");
    exact_params.add_to(c_exact, false);
    add_json(c_exact);

    auto* c_approx = app.add_subcommand("approx", "first-order solution and its bounds");
    approx_params.add_to(c_approx);
    add_json(c_approx);

    auto* c_bounds = app.add_subcommand("bounds", "all twirlability bounds in one report");
    bounds_params.add_to(c_bounds);
    add_json(c_bounds);

    auto* c_stab = app.add_subcommand("stability", "Floquet classification of the variational problem");
    stab_params.add_to(c_stab);
    add_json(c_stab);
    c_stab->add_option("--mu", stab_args.mu, "mean amplitude (overrides params)");
    c_stab->add_option("--eps", stab_args.eps, "modulation amplitude (overrides params)");
    c_stab->add_option("--step", stab_args.step, "monodromy integration step");
    c_stab->add_flag("--critical", stab_args.critical, "bisect the numeric critical amplitude");
    c_stab->add_option("--tolerance", stab_args.tolerance, "bisection tolerance");

    auto* c_sim = app.add_subcommand("simulate", "integrate one trajectory");
    sim_params.add_to(c_sim);
    add_json(c_sim);
    c_sim->add_option("--out", sim_args.out_path, "trajectory CSV path")->required();
    c_sim->add_option("--report", sim_args.report_path, "capture report JSON path");
    c_sim->add_option("--seed-branch", sim_args.seed_branch, "seed on an analytic branch: cw|ccw")
        ->check(CLI::IsMember({"cw", "ccw"}));
    c_sim->add_option("--phi", sim_args.phi, "initial angle");
    c_sim->add_option("--phi-dot", sim_args.phi_dot, "initial rate");
    c_sim->add_option("--tau-end", sim_args.tau_end, "integration end time");
    c_sim->add_option("--step", sim_args.step, "integration step");
    c_sim->add_option("--stride", sim_args.stride, "output every n-th step");

    auto* c_cmp = app.add_subcommand("compare", "numeric trajectory vs analytic branch");
    cmp_params.add_to(c_cmp);
    add_json(c_cmp);
    c_cmp->add_option("--branch", cmp_args.branch,
                      "exact | first-order | small-amp-cw | small-amp-ccw");
    c_cmp->add_option("--out", cmp_args.out_path, "also write the trajectory CSV here");
    c_cmp->add_option("--phi", cmp_args.phi, "initial angle (default: on the branch)");
    c_cmp->add_option("--phi-dot", cmp_args.phi_dot, "initial rate (default: on the branch)");
    c_cmp->add_option("--tau-end", cmp_args.tau_end, "integration end time");
    c_cmp->add_option("--step", cmp_args.step, "integration step");
    c_cmp->add_option("--stride", cmp_args.stride, "output every n-th step");

    auto* c_sweep = app.add_subcommand("sweep", "two-axis regime map");
    sweep_params.add_to(c_sweep);
    add_json(c_sweep);
    c_sweep->add_option("--axis1", sweep_args.axis1, "outer axis as name:start:stop:count")->required();
    c_sweep->add_option("--axis2", sweep_args.axis2, "inner axis as name:start:stop:count")->required();
    c_sweep->add_option("--out", sweep_args.out_path, "regime map CSV path");
    c_sweep->add_option("--tau-end", sweep_args.tau_end, "integration end time per cell");
    c_sweep->add_option("--step", sweep_args.step, "integration step");
    c_sweep->add_option("--stride", sweep_args.stride, "output every n-th step");
    c_sweep->add_option("--window", sweep_args.window, "capture window length");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("twirl");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return 2;
    }

    try {
        if (app.got_subcommand(c_exact)) {
            detail::run_exact(exact_params.resolve(false), json, out);
        } else if (app.got_subcommand(c_approx)) {
            detail::run_approx(approx_params.resolve(), json, out);
        } else if (app.got_subcommand(c_bounds)) {
            detail::run_bounds(bounds_params.resolve(), json, out);
        } else if (app.got_subcommand(c_stab)) {
            // --mu alone is enough; fall back to a placeholder params block
            detail::RunConfig cfg;
            if (!stab_params.config_path.empty() || !std::isnan(stab_params.alpha)) {
                cfg = stab_params.resolve();
            } else if (!std::isnan(stab_params.gamma) && !std::isnan(stab_args.mu)) {
                cfg.params = model::Params{stab_params.gamma, stab_args.mu, stab_args.mu};
            } else {
                cfg = stab_params.resolve();
            }
            detail::run_stability(cfg, stab_args, json, out);
        } else if (app.got_subcommand(c_sim)) {
            detail::run_simulate(sim_params.resolve(), sim_args, json, out);
        } else if (app.got_subcommand(c_cmp)) {
            detail::run_compare(cmp_params.resolve(), cmp_args, json, out);
        } else if (app.got_subcommand(c_sweep)) {
            detail::run_sweep(sweep_params.resolve(), sweep_args, json, out);
        }
    } catch (const InvalidParameter& e) {
        err << e.name() << ": " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << e.name() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace twirl::cli
