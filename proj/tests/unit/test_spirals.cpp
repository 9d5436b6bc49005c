#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "vsheet/concentration.hpp"
#include "vsheet/measure.hpp"
#include "vsheet/numerics.hpp"
#include "vsheet/spirals.hpp"

using namespace vsheet;

TEST_CASE("Prandtl point") {
    const PrandtlParams base{0.2, 0.5, 1.0, 0.0};
    const auto z = prandtl_point(base, 0.25);
    CHECK(norm(z) == doctest::Approx(0.5).epsilon(1e-14));

    const std::complex<double> oracle = std::exp(std::complex<double>(0.5, 0.2) * std::log(0.25));
    CHECK(std::atan2(z.y, z.x) == doctest::Approx(std::arg(oracle)).epsilon(1e-14));
    CHECK(std::atan2(z.y, z.x) == doctest::Approx(-0.2772588722239781).epsilon(1e-14));

    const auto real_axis = prandtl_point({0.0, 3.0, 1.0, 0.0}, 1.0);
    CHECK(real_axis.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(real_axis.y == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(prandtl_point(base, 0.0), Error);
    try {
        prandtl_point({0.2, 0.5, -1.0, 1.0}, 0.5);
        FAIL("expected the collapse regime");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::collapse_regime);
    }
}

TEST_CASE("Prandtl modulus law and point symmetry") {
    for (double t : {0.0, 0.5, 2.0}) {
        for (double p : {1.0, -0.3}) {
            const PrandtlParams par{0.2, 0.5, p, t};
            const double tau = par.tau();
            for (double g : {1e-6, 0.01, 0.3, 1.0, 7.5}) {
                const auto z = prandtl_point(par, g);
                CHECK(norm(z) == doctest::Approx(std::sqrt(tau * g)).epsilon(1e-12));
                const auto w = prandtl_point(par, -g);
                CHECK(w.x == doctest::Approx(-z.x).epsilon(1e-15));
                CHECK(w.y == doctest::Approx(-z.y).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("Prandtl curve") {
    const PrandtlParams par{0.2, 0.5, 1.0, 1.0};
    const auto mu = prandtl_curve(par, {2.0, 2048, 2.0});
    CHECK(total_variation(mu) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(mu.branch_count() == 2);
    CHECK(mu.info().family == "prandtl");
    CHECK(mu.info().parameters.at("gamma_max") == 2.0);

    const auto d = hahn_decompose(mu);
    CHECK(is_nonnegative(d.positive));
    CHECK(total_mass(d.positive) == doctest::Approx(2.0).epsilon(1e-12));

    const auto v = mu.branches()[0].vertices();
    const auto w = mu.branches()[1].vertices();
    for (std::size_t k = 0; k < v.size(); k += 97) {
        CHECK(w[k].x == doctest::Approx(-v[k].x).epsilon(1e-15));
        CHECK(w[k].y == doctest::Approx(-v[k].y).epsilon(1e-15));
    }

    CHECK_THROWS_AS(prandtl_curve(par, {1.0, 1, 2.0}), Error);
    CHECK_THROWS_AS(prandtl_curve(par, {-1.0, 64, 2.0}), Error);
    CHECK_THROWS_AS(prandtl_curve(par, {1.0, 64, 0.5}), Error);
}

TEST_CASE("Prandtl ball mass converges to the closed form") {
    const PrandtlParams par{0.2, 0.5, 1.0, 0.0};
    double prev_err = 1.0;
    for (std::size_t n : {256u, 1024u, 4096u}) {
        const auto pos = hahn_decompose(prandtl_curve(par, {1.0, n, 2.0})).positive;
        double err = 0.0;
        for (double r : {0.1, 0.3, 0.6, 0.9}) err = std::max(err, std::abs(ball_mass(pos, {0, 0}, r) - r * r));
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-3);
}

TEST_CASE("Prandtl closed-form ball mass") {
    CHECK(prandtl_ball_mass_exact({0.2, 0.5, 1.0, 0.0}, 0.3) == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(prandtl_ball_mass_exact({0.2, 0.5, 1.0, 1.0}, 0.3) == doctest::Approx(0.045).epsilon(1e-15));
    CHECK(prandtl_ball_mass_exact({0.2, 0.5, 1.0, 1.0}, 0.0) == 0.0);
    CHECK_THROWS_AS(prandtl_ball_mass_exact({0.2, 0.5, -1.0, 1.0}, 0.3), Error);
    CHECK(prandtl_support_radius({0.2, 0.5, -1.0, 0.75}, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("similitude exponent") {
    CHECK(similitude_exponent(2.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(similitude_exponent(1.0) == 1.0);
    CHECK(similitude_exponent(2.0) == 1.5);
    try {
        similitude_exponent(0.5);
        FAIL("expected degenerate exponent");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_exponent);
    }
}

TEST_CASE("self-similar curve") {
    SUBCASE("unit circle arc") {
        SelfSimilarParams sp{1.0, [](double) { return 1.0; }, [](double th) { return th; }, 1.0};
        const auto mu = self_similar_curve(sp, 0.0, std::numbers::pi, 200);
        for (const auto& br : mu.branches()) {
            for (const auto& v : br.vertices()) CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-14));
            const auto dens = br.densities();
            const double chord = 2.0 * std::sin(0.5 * std::numbers::pi / 199.0);
            const double dg = std::numbers::pi / 199.0;
            for (double d : dens) CHECK(d == doctest::Approx(dg / chord).epsilon(1e-12));
        }
    }
    SUBCASE("time scaling") {
        const double m = 0.8;
        auto f = [](double th) { return 1.0 / th; };
        auto g = [](double th) { return th; };
        const auto a = self_similar_curve({m, f, g, 1.0}, 1.0, 6.0, 50);
        const auto b = self_similar_curve({m, f, g, 2.0}, 1.0, 6.0, 50);
        const auto& ba = a.branches().back();
        const auto& bb = b.branches().back();
        for (std::size_t k = 0; k < ba.vertices().size(); ++k) {
            CHECK(bb.vertices()[k].x == doctest::Approx(std::pow(2.0, m) * ba.vertices()[k].x).epsilon(1e-13));
            CHECK(bb.cumulative()[k] == doctest::Approx(std::pow(2.0, 2 * m - 1) * ba.cumulative()[k]).epsilon(1e-13));
        }
    }
    SUBCASE("non-monotone profile") {
        SelfSimilarParams sp{1.0, [](double) { return 1.0; }, [](double th) { return std::sin(th); }, 1.0};
        try {
            self_similar_curve(sp, 0.1, 3.0, 100);
            FAIL("expected invalid profile");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::invalid_profile);
        }
    }
}

TEST_CASE("Kaden model obeys the similitude law") {
    const double c2 = 1.3, m = 2.0 / 3.0, r_min = 0.03, r_max = 1.0;
    const auto mu = kaden_model(c2, m, r_min, r_max, 2000);
    const double lambda = similitude_exponent(m);
    CHECK(is_nonnegative(mu));
    CHECK(total_variation(mu) == doctest::Approx(c2 * std::pow(r_max, lambda)).epsilon(1e-12));

    // circulation enclosed at each construction radius
    const auto v = mu.branches()[0].vertices();
    const auto c = mu.branches()[0].cumulative();
    for (std::size_t k = 1; k < v.size(); k += 111) {
        CHECK(c[k] == doctest::Approx(c2 * std::pow(norm(v[k]), lambda)).epsilon(1e-12));
    }
    for (double r : {0.05, 0.1, 0.5, 0.9}) {
        CHECK(ball_mass(mu, {0, 0}, r) == doctest::Approx(c2 * std::pow(r, lambda)).epsilon(2e-3));
    }
    const auto radii = log_space(0.05, 0.9, 30);
    CHECK(scaling_exponent_fit(mu, {0, 0}, radii).alpha_hat == doctest::Approx(0.5).epsilon(0.02));

    CHECK_THROWS_AS(kaden_model(c2, m, 0.5, 0.2, 100), Error);
    CHECK_THROWS_AS(kaden_model(-1.0, m, 0.1, 0.2, 100), Error);
}
