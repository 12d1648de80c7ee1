#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twirl/perturb.hpp"

using namespace twirl;

namespace {

// Independent harmonic-balance oracle: insert phi1 = C sin(2tau+phi0) +
// D cos(2tau+phi0) into the correction equation and balance the two
// harmonics, giving the 2x2 system
//   (p-4) C - 2 gamma D = 0
//   2 gamma C + (p-4) D = 1,    p = sqrt(mu^2 - gamma^2),
// solved here by Cramer's rule.
perturb::Coefficients harmonic_balance(double gamma, double mu) {
    const double p = std::sqrt(mu * mu - gamma * gamma);
    const double a = p - 4.0, b = -2.0 * gamma;
    const double det = a * a - b * (2.0 * gamma);
    return {(0.0 * a - b * 1.0) / det, (a * 1.0 - 2.0 * gamma * 0.0) / det};
}

}  // namespace

TEST_CASE("zero-order phase") {
    REQUIRE(perturb::phi0_stable(0.0, 0.3) == Catch::Approx(-0.5 * pi).margin(1e-15));
    REQUIRE(perturb::phi0_stable(0.1, 0.2) == Catch::Approx(-2.0943951023931953).margin(1e-12));
    REQUIRE_THROWS_AS(perturb::phi0_stable(0.4, 0.2), NoRotatingSolution);
    REQUIRE_THROWS_AS(perturb::phi0_stable(-0.1, 0.2), InvalidParameter);
    REQUIRE_THROWS_AS(perturb::phi0_stable(0.0, 0.0), InvalidParameter);
}

TEST_CASE("correction coefficients") {
    SECTION("origin limit") {
        const auto cd = perturb::cd_coefficients(0.0, 0.0);
        REQUIRE(cd.C == 0.0);
        REQUIRE(cd.D == -0.25);
    }
    SECTION("zero damping kills the in-phase part") {
        REQUIRE(perturb::cd_coefficients(0.0, 0.3).C == 0.0);
    }
    SECTION("reference point") {
        const auto cd = perturb::cd_coefficients(0.2, 0.3);
        REQUIRE(cd.C == Catch::Approx(0.02774).margin(5e-6));
        REQUIRE(cd.D == Catch::Approx(-0.26187).margin(2e-5));
    }
    SECTION("agrees with the harmonic-balance solve") {
        for (double mu = 0.05; mu <= 0.5; mu += 0.05) {
            for (int k = 0; k <= 10; ++k) {
                const double gamma = mu * (k / 10.0);
                const auto cd = perturb::cd_coefficients(gamma, mu);
                const auto hb = harmonic_balance(gamma, mu);
                REQUIRE(cd.C == Catch::Approx(hb.C).margin(1e-12));
                REQUIRE(cd.D == Catch::Approx(hb.D).margin(1e-12));
            }
        }
    }
    SECTION("window violations") {
        REQUIRE_THROWS_AS(perturb::cd_coefficients(0.4, 0.3), NoRotatingSolution);
        REQUIRE_THROWS_AS(perturb::cd_coefficients(-0.1, 0.3), InvalidParameter);
    }
}

TEST_CASE("correction solves its equation") {
    // phi1'' + gamma phi1' + sqrt(mu^2-gamma^2) phi1 = cos(2 tau + phi0)
    const double gamma = 0.2, mu = 0.3;
    const auto sol = perturb::first_order_solution(gamma, mu, 0.0);
    const double p = std::sqrt(mu * mu - gamma * gamma);
    for (int i = 0; i <= 400; ++i) {
        const double tau = 4.0 * pi * i / 400.0;
        const double th = 2.0 * tau + sol.phi0;
        const double phi1 = sol.C * std::sin(th) + sol.D * std::cos(th);
        const double dphi1 = 2.0 * sol.C * std::cos(th) - 2.0 * sol.D * std::sin(th);
        const double ddphi1 = -4.0 * sol.C * std::sin(th) - 4.0 * sol.D * std::cos(th);
        const double residual = ddphi1 + gamma * dphi1 + p * phi1 - std::cos(th);
        REQUIRE(std::abs(residual) < 1e-12);
    }
}

TEST_CASE("first-order evaluation") {
    SECTION("eps = 0 reduces to the rigid rotation") {
        const auto sol = perturb::first_order_solution(0.1, 0.2, 0.0);
        for (const double tau : {0.0, 1.3, 8.8}) {
            const auto s = perturb::eval_first_order(tau, sol);
            REQUIRE(s.phi == tau + sol.phi0);
            REQUIRE(s.phi_dot == 1.0);
        }
    }
    SECTION("quadrature correction vanishes at tau = 0 for phi0 = -pi/2") {
        const perturb::FirstOrderSolution sol{-0.5 * pi, 0.0, -0.25, 0.0, 0.03125, 0.0};
        const auto s = perturb::eval_first_order(0.0, sol);
        REQUIRE(s.phi == Catch::Approx(-0.5 * pi).margin(1e-15));
    }
}

TEST_CASE("first-order residual scales as eps squared") {
    const double gamma = 0.2, mu = 0.3;
    auto max_residual = [&](double eps) {
        const auto sol = perturb::first_order_solution(gamma, mu, eps);
        double worst = 0.0;
        for (int i = 0; i <= 25000; ++i) {
            const double tau = 40.0 * pi * i / 25000.0;
            worst = std::max(worst, std::abs(perturb::first_order_residual(tau, sol)));
        }
        return worst;
    };
    const double r4 = max_residual(0.04), r2 = max_residual(0.02), r1 = max_residual(0.01);
    REQUIRE(r4 / r2 > 3.5);
    REQUIRE(r4 / r2 < 4.5);
    REQUIRE(r2 / r1 > 3.5);
    REQUIRE(r2 / r1 < 4.5);
}

TEST_CASE("parametric-resonance bound on eps") {
    SECTION("vanishes with damping") {
        REQUIRE(perturb::stability_bound_eps(0.0, 0.3) == 0.0);
        REQUIRE(perturb::stability_bound_eps(1e-8, 0.3) < 1e-6);
    }
    SECTION("reference point") {
        REQUIRE(perturb::stability_bound_eps(0.2, 0.3) == Catch::Approx(0.39726).margin(1e-5));
    }
}

TEST_CASE("contact bound on eps") {
    SECTION("origin limit is 1/3") {
        REQUIRE(perturb::contact_bound_eps(0.0, 0.0) == Catch::Approx(1.0 / 3.0).margin(1e-15));
    }
    SECTION("grows with the mean amplitude") {
        REQUIRE(perturb::contact_bound_eps(0.0, 0.3) > 1.0 / 3.0);
        REQUIRE(perturb::contact_bound_eps(0.0, 0.3) ==
                Catch::Approx(0.5 * (1.0 + 0.6) * std::sqrt((0.09 + 16.0 - 8.0 * 0.3) /
                                                            (0.09 + 36.0 - 12.0 * 0.3)))
                    .margin(1e-13));
    }
    SECTION("boundary of the window") {
        REQUIRE(perturb::contact_bound_eps(0.2, 0.2) ==
                Catch::Approx(0.5 * std::sqrt((0.04 + 0.12 + 16.0) / (0.04 + 0.32 + 36.0)))
                    .margin(1e-13));
    }
}

TEST_CASE("small-amplitude branches") {
    const double gamma = 0.02, eps = 0.03125, mu = 0.15625;
    SECTION("clockwise solution") {
        const auto s = perturb::small_amp_solution(1, gamma, eps, mu);
        REQUIRE(s.phi0 == Catch::Approx(-1.6991484545239501).margin(1e-12));
        REQUIRE(s.vib_amp == 0.25);
        REQUIRE(std::cos(s.phi0) == Catch::Approx(-gamma / mu).margin(1e-12));
        REQUIRE(std::sin(s.phi0) < 0.0);
    }
    SECTION("counterclockwise solution") {
        const auto s = perturb::small_amp_solution(-1, gamma, eps, mu);
        REQUIRE(s.phi0 == Catch::Approx(2.2652945924214527).margin(1e-12));
        REQUIRE(s.vib_amp == Catch::Approx(0.0390625).margin(1e-15));
        REQUIRE(std::cos(s.phi0) == Catch::Approx(-gamma / eps).margin(1e-12));
        REQUIRE(std::sin(s.phi0) > 0.0);
    }
    SECTION("window violations") {
        REQUIRE_THROWS_AS(perturb::small_amp_solution(-1, 0.05, 0.03125, mu), NoRotatingSolution);
        REQUIRE_THROWS_AS(perturb::small_amp_solution(1, 0.2, eps, 0.15625), NoRotatingSolution);
        REQUIRE_THROWS_AS(perturb::small_amp_solution(1, 0.0, eps, mu), NoRotatingSolution);
        REQUIRE_THROWS_AS(perturb::small_amp_solution(2, gamma, eps, mu), InvalidParameter);
    }
    SECTION("phase quadrants") {
        for (double g = 0.002; g < eps; g += 0.004) {
            const auto cw = perturb::small_amp_solution(1, g, eps, mu);
            const auto ccw = perturb::small_amp_solution(-1, g, eps, mu);
            REQUIRE((cw.phi0 > -pi && cw.phi0 < -0.5 * pi));
            REQUIRE((ccw.phi0 > 0.5 * pi && ccw.phi0 < pi));
        }
    }
    SECTION("coexistence window is 0 < gamma < min(eps, mu)") {
        auto both_exist = [&](double g) {
            int count = 0;
            try {
                perturb::small_amp_solution(1, g, eps, mu);
                ++count;
            } catch (const NoRotatingSolution&) {
            }
            try {
                perturb::small_amp_solution(-1, g, eps, mu);
                ++count;
            } catch (const NoRotatingSolution&) {
            }
            return count == 2;
        };
        const double lo = std::min(eps, mu);
        REQUIRE(both_exist(0.5 * lo));
        REQUIRE(both_exist(0.95 * lo));
        REQUIRE_FALSE(both_exist(1.05 * lo));
        REQUIRE_FALSE(both_exist(0.0));
    }
}

TEST_CASE("clockwise small-amplitude solution is the origin limit of the first order") {
    const double gamma = 0.02, eps = 0.03125, mu = 0.15625;
    const auto sa = perturb::small_amp_solution(1, gamma, eps, mu);
    const auto cd0 = perturb::cd_coefficients(0.0, 0.0);
    const perturb::FirstOrderSolution fo{sa.phi0, cd0.C, cd0.D, gamma, eps, mu};
    for (int i = 0; i <= 100; ++i) {
        const double tau = 6.0 * pi * i / 100.0;
        const auto a = perturb::eval_small_amp(tau, sa);
        const auto b = perturb::eval_first_order(tau, fo);
        REQUIRE(a.phi == b.phi);
        REQUIRE(a.phi_dot == b.phi_dot);
    }
}

TEST_CASE("small-amplitude contact bounds") {
    SECTION("origin case") {
        const auto b = perturb::small_amp_contact_bound(1, 0.0, 0.3, 0.0);
        REQUIRE(b.bound == Catch::Approx(1.0 / 3.0).margin(1e-15));
        REQUIRE(b.ok);
    }
    SECTION("reference parameters, clockwise") {
        const auto b = perturb::small_amp_contact_bound(1, 0.02, 0.03125, 0.15625);
        REQUIRE(b.bound == Catch::Approx(0.43664).margin(5e-5));
        REQUIRE(b.ok);
    }
    SECTION("reference parameters, counterclockwise") {
        const auto b = perturb::small_amp_contact_bound(-1, 0.02, 0.03125, 0.15625);
        REQUIRE(b.bound == Catch::Approx(0.34934).margin(5e-5));
        REQUIRE(b.ok);
    }
}
