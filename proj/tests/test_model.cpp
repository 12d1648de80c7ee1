#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "twirl/model.hpp"

using namespace twirl;
using model::DimensionalParams;
using model::Params;
using model::State;

TEST_CASE("nondimensionalize maps the dimensional constants") {
    SECTION("zero damping, direct substitution") {
        const auto p = model::nondimensionalize({1.0, 0.5, 0.1, 0.0, 0.4, 0.4, 1.0});
        REQUIRE(p.gamma == 0.0);
        REQUIRE(p.alpha == Catch::Approx(0.5).margin(1e-15));
        REQUIRE(p.beta == Catch::Approx(0.5).margin(1e-15));
    }
    SECTION("independent of mass, damping and frequency for the amplitudes") {
        for (const double m : {0.3, 1.0, 2.5}) {
            for (const double w : {1.0, 3.0, 12.0}) {
                const auto p = model::nondimensionalize({m, 0.50, 0.10, 0.02, 0.15, 0.10, w});
                REQUIRE(p.alpha == Catch::Approx(0.1875).margin(1e-15));
                REQUIRE(p.beta == Catch::Approx(0.125).margin(1e-15));
            }
        }
    }
    SECTION("rejects degenerate geometry and invalid constants") {
        REQUIRE_THROWS_AS(model::nondimensionalize({1.0, 0.1, 0.1, 0.0, 0.1, 0.1, 1.0}),
                          InvalidParameter);
        REQUIRE_THROWS_AS(model::nondimensionalize({1.0, 0.5, 0.1, 0.0, 0.1, 0.1, 0.0}),
                          InvalidParameter);
        REQUIRE_THROWS_AS(model::nondimensionalize({-1.0, 0.5, 0.1, 0.0, 0.1, 0.1, 1.0}),
                          InvalidParameter);
        REQUIRE_THROWS_AS(model::nondimensionalize({1.0, 0.5, 0.1, -0.1, 0.1, 0.1, 1.0}),
                          InvalidParameter);
    }
    SECTION("scale covariance: a, b and the radius gap scale out") {
        const DimensionalParams base{1.0, 0.5, 0.1, 0.3, 0.17, 0.09, 2.0};
        const auto p0 = model::nondimensionalize(base);
        for (const double c : {0.5, 2.0, 7.0}) {
            DimensionalParams scaled = base;
            scaled.amp_x *= c;
            scaled.amp_y *= c;
            scaled.hoop_radius = scaled.waist_radius + c * (base.hoop_radius - base.waist_radius);
            const auto p1 = model::nondimensionalize(scaled);
            REQUIRE(p1.alpha == Catch::Approx(p0.alpha).epsilon(1e-14));
            REQUIRE(p1.beta == Catch::Approx(p0.beta).epsilon(1e-14));
        }
    }
}

TEST_CASE("eps and mu recombine to alpha and beta") {
    std::mt19937 rng(91);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Params p{0.0, dist(rng), dist(rng)};
        REQUIRE(p.eps() + p.mu() == Catch::Approx(p.alpha).margin(1e-15));
        REQUIRE(p.mu() - p.eps() == Catch::Approx(p.beta).margin(1e-15));
    }
    const Params exactly_representable{0.0, 0.1875, 0.125};
    REQUIRE(exactly_representable.eps() == 0.03125);
    REQUIRE(exactly_representable.mu() == 0.15625);
}

TEST_CASE("rhs values") {
    const Params p{0.7, 0.3, 0.5};
    SECTION("both trig products vanish at tau = 0, phi = pi/2") {
        REQUIRE(std::abs(model::rhs(0.0, {0.5 * pi, 0.0}, p)) < 1e-15);
    }
    SECTION("only the beta term survives at tau = 0, phi = 0") {
        REQUIRE(model::rhs(0.0, {0.0, 0.0}, Params{0.1, 0.2, 0.5}) == -0.5);
    }
}

TEST_CASE("rhs agrees with the rotating form on random inputs") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Params p{amp(rng), amp(rng), amp(rng)};
        const State s{angle(rng), amp(rng) * 3.0};
        const double tau = angle(rng);
        const double a = model::rhs(tau, s, p);
        const double b = model::rhs_rotating(tau, s, p.gamma, p.eps(), p.mu());
        REQUIRE(a == Catch::Approx(b).margin(1e-14));
    }
}

TEST_CASE("rhs_rotating reductions") {
    SECTION("eps = 0 leaves the circular-excitation form") {
        REQUIRE(model::rhs_rotating(0.3, {0.3, 1.0}, 0.0, 0.0, 0.25) ==
                Catch::Approx(-0.25 * std::cos(0.0)).margin(1e-15));
    }
    SECTION("co-rotating state feels -mu") {
        const double tau = 1.7;
        REQUIRE(model::rhs_rotating(tau, {tau, 1.0}, 0.0, 0.0, 0.25) ==
                Catch::Approx(-0.25).margin(1e-15));
    }
}

TEST_CASE("contact margin") {
    SECTION("co-rotating zero-phase circular case is exactly 1") {
        const Params p{0.0, 0.4, 0.4};
        for (const double tau : {0.0, 0.3, 1.9, 4.4}) {
            REQUIRE(model::contact_margin(tau, {tau, 1.0}, p) == 1.0);
        }
    }
    SECTION("constant along the exact stable rotation") {
        const double gamma = 0.1, alpha = 0.2;
        const Params p{gamma, alpha, alpha};
        const double psi = -std::acos(-gamma / alpha);
        const double expected = 1.0 - 2.0 * alpha * std::sin(psi);
        for (int i = 0; i <= 2000; ++i) {
            const double tau = 20.0 * pi * i / 2000.0;
            const double m = model::contact_margin(tau, {tau + psi, 1.0}, p);
            REQUIRE(m == Catch::Approx(expected).margin(1e-12));
        }
    }
    SECTION("rest with no excitation sits on the boundary") {
        REQUIRE(model::contact_margin(0.7, {0.2, 0.0}, Params{0.3, 0.0, 0.0}) == 0.0);
    }
}

TEST_CASE("dimensional forces") {
    const DimensionalParams p{1.0, 0.5, 0.1, 0.0, 0.0, 0.0, 2.0};
    SECTION("pure rotation without excitation") {
        const double w0 = 3.0;
        const auto f = model::dimensional_forces(0.0, {0.4, w0}, p);
        REQUIRE(f.normal == Catch::Approx(1.0 * 0.4 * w0 * w0).epsilon(1e-14));
        REQUIRE(f.friction == Catch::Approx(0.0).margin(1e-14));
        REQUIRE(f.theta_dot == Catch::Approx(0.4 * w0 / 0.5).epsilon(1e-14));
    }
    SECTION("rest gives zero forces") {
        const auto f = model::dimensional_forces(0.0, {0.0, 0.0}, p);
        REQUIRE(f.normal == 0.0);
        REQUIRE(f.friction == 0.0);
        REQUIRE(f.theta_dot == 0.0);
    }
    SECTION("torque balance with damping") {
        // friction from the longitudinal equation must satisfy the spin
        // equation I_c theta'' + k theta' = -F_T R as well
        DimensionalParams pd = p;
        pd.damping = 0.13;
        pd.amp_x = 0.11;
        pd.amp_y = 0.07;
        const double t = 0.37;
        const State s{0.9, 2.1};
        const auto f = model::dimensional_forces(t, s, pd);
        const double dr = pd.hoop_radius - pd.waist_radius;
        const double ic = pd.mass * pd.hoop_radius * pd.hoop_radius;
        const double w = pd.omega;
        const double phi_dd = -pd.damping / (2.0 * pd.mass * pd.hoop_radius * pd.hoop_radius) * s.phi_dot -
                              w * w *
                                  (pd.amp_x * std::sin(w * t) * std::sin(s.phi) +
                                   pd.amp_y * std::cos(w * t) * std::cos(s.phi)) /
                                  (2.0 * dr);
        const double theta_dd = dr * phi_dd / pd.hoop_radius;
        REQUIRE(ic * theta_dd + pd.damping * f.theta_dot ==
                Catch::Approx(-f.friction * pd.hoop_radius).margin(1e-12));
    }
    SECTION("sign of N matches the nondimensional margin") {
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int checked = 0;
        for (int i = 0; i < 1000; ++i) {
            DimensionalParams pd{0.5 + u(rng), 0.0, 0.05 + 0.3 * u(rng), u(rng),
                                 0.4 * u(rng) - 0.2,  0.4 * u(rng) - 0.2, 0.5 + 3.0 * u(rng)};
            pd.hoop_radius = pd.waist_radius + 0.1 + 0.5 * u(rng);
            const double t = 10.0 * u(rng);
            const State s_dim{20.0 * u(rng) - 10.0, 8.0 * u(rng) - 4.0};
            const auto f = model::dimensional_forces(t, s_dim, pd);
            const auto nd = model::nondimensionalize(pd);
            const State s_nd{s_dim.phi, s_dim.phi_dot / pd.omega};
            const double margin = model::contact_margin(pd.omega * t, s_nd, nd);
            if (std::abs(f.normal) < 1e-12) continue;  // too close to the boundary to sign
            REQUIRE((f.normal > 0.0) == (margin > 0.0));
            ++checked;
        }
        REQUIRE(checked > 900);
    }
    SECTION("rejects degenerate geometry") {
        REQUIRE_THROWS_AS(model::dimensional_forces(0.0, {0.0, 0.0},
                                                    DimensionalParams{1.0, 0.1, 0.1, 0.0, 0.0, 0.0, 1.0}),
                          InvalidParameter);
    }
}

TEST_CASE("normalize flips negative alpha onto the half-period shift") {
    const Params p{0.1, -0.3, 0.2};
    const auto n = model::normalize(p);
    REQUIRE(n.params.alpha == 0.3);
    REQUIRE(n.params.beta == -0.2);
    REQUIRE(n.tau_shift == pi);

    // same field: original at tau equals normalized at tau + pi
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const State s{dist(rng), dist(rng)};
        const double tau = dist(rng);
        REQUIRE(model::rhs(tau, s, p) ==
                Catch::Approx(model::rhs(tau + n.tau_shift, s, n.params)).margin(1e-12));
    }

    const auto id = model::normalize(Params{0.1, 0.3, -0.2});
    REQUIRE(id.params.alpha == 0.3);
    REQUIRE(id.tau_shift == 0.0);
}
