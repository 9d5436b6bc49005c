#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vsheet/birkhoff_rott.hpp"

using namespace vsheet;

namespace {

constexpr double kPi = std::numbers::pi;

SheetState pair(double d, double g1, double g2) {
    SheetState s;
    s.markers = {{-0.5 * d, 0.0}, {0.5 * d, 0.0}};
    s.d_gamma = {g1, g2};
    return s;
}

SheetState wavy_sheet(std::size_t n) {
    SheetState s;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = -1.0 + 2.0 * (j + 0.5) / n;
        s.markers.emplace_back(x, 0.1 * std::sin(kPi * x));
        s.d_gamma.push_back(2.0 / n * std::sqrt(1.0 - x * x));
    }
    return s;
}

double max_error(const SheetState& a, const SheetState& b) {
    double e = 0.0;
    for (std::size_t j = 0; j < a.markers.size(); ++j) e = std::max(e, std::abs(a.markers[j] - b.markers[j]));
    return e;
}

SheetState run(SheetState s, double dt, std::size_t steps, double delta) {
    const BRConfig cfg{delta, dt, 1};
    for (std::size_t k = 0; k < steps; ++k) s = br_step(s, cfg);
    return s;
}

}  // namespace

TEST_CASE("velocity of simple configurations") {
    SheetState one;
    one.markers = {{0.3, 0.4}};
    one.d_gamma = {1.0};
    CHECK(std::abs(br_velocity(one, 0.1)[0]) == 0.0);

    const double d = 0.8;
    const auto co = br_velocity(pair(d, 2 * kPi, 2 * kPi), 0.0);
    CHECK(std::abs(co[0]) == doctest::Approx(1.0 / d).epsilon(1e-14));
    CHECK(std::abs(co[1]) == doctest::Approx(1.0 / d).epsilon(1e-14));
    CHECK(std::abs(co[0] + co[1]) < 1e-14);
    CHECK(std::abs(co[0].real()) < 1e-15);  // perpendicular to the separation
    CHECK(co[1].imag() > 0.0);               // counterclockwise for positive circulation

    const auto counter = br_velocity(pair(d, 2 * kPi, -2 * kPi), 0.0);
    CHECK(std::abs(counter[0] - counter[1]) < 1e-14);
    CHECK(std::abs(counter[0]) == doctest::Approx(1.0 / d).epsilon(1e-14));

    SheetState same;
    same.markers = {{0.0, 0.0}, {0.0, 0.0}};
    same.d_gamma = {1.0, 1.0};
    try {
        br_velocity(same, 0.0);
        FAIL("expected singular configuration");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::singular_configuration);
    }
    CHECK(std::abs(br_velocity(same, 0.1)[0]) == 0.0);
}

TEST_CASE("pair contributions are antisymmetric") {
    const auto s = wavy_sheet(64);
    const auto v = br_velocity(s, 0.05);
    Complex weighted = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        weighted += s.d_gamma[j] * v[j];
        scale += std::abs(s.d_gamma[j] * v[j]);
    }
    CHECK(std::abs(weighted) < 1e-14 * scale);
}

TEST_CASE("co-rotating pair period") {
    // two vortices of circulation Γ at distance d orbit with period 2π²d²/Γ
    const double d = 1.0;
    const double period = 2.0 * kPi * kPi * d * d / (2.0 * kPi);
    const auto start = pair(d, 2 * kPi, 2 * kPi);
    const auto end = run(start, period / 2000.0, 2000, 0.0);
    CHECK(max_error(start, end) < 1e-6 * d);
    CHECK(end.time == doctest::Approx(period).epsilon(1e-12));
}

TEST_CASE("zero circulation leaves markers in place") {
    auto s = wavy_sheet(16);
    for (auto& g : s.d_gamma) g = 0.0;
    CHECK(max_error(s, run(s, 0.01, 5, 0.05)) == 0.0);
}

TEST_CASE("time reversal") {
    const auto s = wavy_sheet(40);
    for (double dt : {0.02, 0.01}) {
        const auto back = br_step(br_step(s, {0.05, dt, 1}), {0.05, -dt, 1});
        CHECK(max_error(s, back) < 50.0 * std::pow(dt, 5));
    }
}

TEST_CASE("conservation over a thousand steps") {
    // d = 1 would make the pair Hamiltonian vanish
    const double d = 0.8;
    const double period = kPi * d * d;
    const auto start = pair(d, 2 * kPi, 2 * kPi);
    const BRConfig cfg{0.0, period / 2000.0, 1000};
    const auto traj = evolve(start, cfg, 100);
    REQUIRE(traj.series.size() == 11);
    const auto& first = traj.series.front();
    for (const auto& o : traj.series) {
        CHECK(o.circulation == first.circulation);
        CHECK(std::abs(o.impulse - first.impulse) <= 1e-8 * std::max(1.0, std::abs(first.impulse)));
        CHECK(std::abs(o.hamiltonian - first.hamiltonian) <= 1e-6 * std::abs(first.hamiltonian));
    }

    const auto sheet = wavy_sheet(50);
    const auto t2 = evolve(sheet, {0.1, 1e-3, 1000}, 250);
    // the sheet is symmetric, so its impulse is zero up to roundoff; measure drift against Σ|ΔΓ z|
    double i0 = 0.0;
    for (std::size_t j = 0; j < sheet.markers.size(); ++j) i0 += std::abs(sheet.d_gamma[j] * sheet.markers[j]);
    const double h0 = std::abs(t2.series.front().hamiltonian);
    for (const auto& o : t2.series) {
        CHECK(o.circulation == t2.series.front().circulation);
        CHECK(std::abs(o.impulse - t2.series.front().impulse) <= 1e-8 * i0);
        CHECK(std::abs(o.hamiltonian - t2.series.front().hamiltonian) <= 1e-6 * h0);
    }
}

TEST_CASE("fourth-order convergence") {
    const double period = kPi;
    const auto start = pair(1.0, 2 * kPi, 2 * kPi);
    const double e1 = max_error(start, run(start, period / 100.0, 100, 0.0));
    const double e2 = max_error(start, run(start, period / 200.0, 200, 0.0));
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("rotation commutes with evolution") {
    const auto s = wavy_sheet(30);
    const Complex rot = std::polar(1.0, 0.7);
    SheetState r = s;
    for (auto& z : r.markers) z *= rot;
    const BRConfig cfg{0.05, 0.01, 10};
    auto a = evolve(s, cfg).final_state;
    const auto b = evolve(r, cfg).final_state;
    for (auto& z : a.markers) z *= rot;
    CHECK(max_error(a, b) < 1e-10);
}

TEST_CASE("evolve validates input and reports blow-up") {
    const auto s = pair(1.0, 1.0, 1.0);
    CHECK_THROWS_AS(evolve(s, {-1.0, 0.01, 1}), Error);
    CHECK_THROWS_AS(evolve(s, {0.1, 0.0, 1}), Error);
    CHECK_THROWS_AS(evolve(s, {0.1, 0.01, 1}, 0), Error);
    CHECK_THROWS_AS(evolve(wavy_sheet(5), {0.0, 0.01, 1}), Error);
    CHECK_NOTHROW(evolve(wavy_sheet(4), {0.0, 0.01, 1}));

    SheetState bad = s;
    bad.d_gamma = {1.0};
    CHECK_THROWS_AS(evolve(bad, {0.1, 0.01, 1}), Error);

    // a huge step flings markers to infinity
    SheetState close;
    close.markers = {{0.0, 0.0}, {1e-150, 0.0}};
    close.d_gamma = {1.0, 1.0};
    try {
        evolve(close, {0.0, 1e300, 3});
        FAIL("expected blow-up");
    } catch (const BlowUpError& e) {
        CHECK(e.kind() == ErrorKind::blow_up);
        CHECK(e.step() >= 1);
        CHECK(std::isfinite(e.last_valid().markers[0].real()));
    }
}

TEST_CASE("observers see every recorded state") {
    std::vector<std::size_t> steps;
    const auto traj = evolve(wavy_sheet(8), {0.05, 0.01, 7}, 3,
                             {[&](const SheetState&, const Observation& o) { steps.push_back(o.step); }});
    CHECK(steps == std::vector<std::size_t>{0, 3, 6, 7});
    CHECK(traj.series.back().max_spacing > 0.0);
}

TEST_CASE("sheet from a curve") {
    const auto seg = make_segment({0, 0}, {1, 0}, 2.0, 4);
    const auto s = sheet_from_curve(seg);
    REQUIRE(s.markers.size() == 5);
    CHECK(s.d_gamma[0] == doctest::Approx(0.25));
    CHECK(s.d_gamma[2] == doctest::Approx(0.5));
    CHECK(total_circulation(s) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("collapse diagnostic") {
    const PrandtlParams par{0.2, 0.5, -1.0, 0.0};
    std::vector<double> times;
    for (int k = 0; k < 10; ++k) times.push_back(0.99 * k / 9.0);
    CollapseOptions opts;
    opts.n_samples = 256;
    const auto rep = collapse_diagnostic(par, times, opts);
    REQUIRE(rep.series.size() == 10);
    CHECK(rep.radius_decreasing);
    CHECK(rep.h_minus1_increasing);
    for (const auto& p : rep.series) {
        CHECK(p.support_radius_exact == doctest::Approx(std::sqrt(1.0 - p.t)).epsilon(1e-12));
        CHECK(p.support_radius == doctest::Approx(p.support_radius_exact).epsilon(1e-12));
    }
    const auto at = collapse_diagnostic(par, {0.75}, opts);
    CHECK(at.series[0].support_radius == doctest::Approx(0.5).epsilon(1e-12));

    try {
        collapse_diagnostic(par, {0.5, 1.0}, opts);
        FAIL("expected collapse regime");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::collapse_regime);
    }
    CHECK_THROWS_AS(collapse_diagnostic({0.2, 0.5, 1.0, 0.0}, {0.5}, opts), Error);
}

TEST_CASE("Prandtl ball mass at t = 0.75 with p = -1") {
    const PrandtlParams par{0.2, 0.5, -1.0, 0.75};
    const auto pos = hahn_decompose(prandtl_curve(par, {1.0, 4096, 2.0})).positive;
    for (double r : {0.1, 0.3, 0.45}) CHECK(ball_mass(pos, {0, 0}, r) == doctest::Approx(4.0 * r * r).epsilon(5e-3));
}
