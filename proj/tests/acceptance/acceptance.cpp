// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vsheet/birkhoff_rott.hpp"
#include "vsheet/concentration.hpp"
#include "vsheet/energies.hpp"
#include "vsheet/numerics.hpp"
#include "vsheet/spirals.hpp"

using namespace vsheet;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

int run(int id, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    o.detail.precision(8);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.ok = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed >= budget_s) {
        o.ok = false;
        o.detail << " [over runtime budget " << budget_s << " s]";
    }
    std::printf("%s criterion %d (%.2f s):%s\n", o.ok ? "PASS" : "FAIL", id, elapsed, o.detail.str().c_str());
    std::fflush(stdout);
    return o.ok ? 0 : 1;
}

CurveMeasure prandtl_positive(double t, std::size_t n) {
    return hahn_decompose(prandtl_curve({0.2, 0.5, 1.0, t}, {1.0, n, 2.0})).positive;
}

// Raises the cutoff until the tail-corrected series settles below 0.5% per decade.
FrequencyIntegral settled_fourier(const CurveMeasure& mu, double s) {
    QuadratureGrid grid;
    FrequencyIntegral f;
    for (double k = 64.0; k <= 4096.0; k *= 2.0) {
        grid.cutoff = k;
        f = t_energy_fourier(mu, s, grid);
        if (std::abs(f.last_decade_increment) < 0.005) break;
    }
    return f;
}

SheetState vortex_pair(double d) {
    SheetState s;
    s.markers = {{-0.5 * d, 0.0}, {0.5 * d, 0.0}};
    s.d_gamma = {2 * kPi, 2 * kPi};
    return s;
}

double max_error(const SheetState& a, const SheetState& b) {
    double e = 0.0;
    for (std::size_t j = 0; j < a.markers.size(); ++j) e = std::max(e, std::abs(a.markers[j] - b.markers[j]));
    return e;
}

}  // namespace

int main() {
    int failures = 0;

    failures += run(1, 10.0, [](Outcome& o) {
        for (double t : {0.0, 1.0}) {
            const PrandtlParams par{0.2, 0.5, 1.0, t};
            const auto pos = prandtl_positive(t, 1 << 14);
            const double reach = prandtl_support_radius(par, 1.0);
            const auto fit = scaling_exponent_fit(pos, {0, 0}, log_space(0.02 * reach, 0.3 * reach, 25));
            o.detail << " t=" << t << " alpha=" << fit.alpha_hat << " c1=" << fit.c1_hat;
            o.expect(std::abs(fit.alpha_hat - 2.0) <= 0.02, "alpha within 0.02 of 2");
            o.expect(rel(fit.c1_hat, 1.0 / par.tau()) <= 0.02, "c1 within 2% of 1/tau");
        }
    });

    failures += run(2, 5.0, [](Outcome& o) {
        const auto kaden = kaden_model(1.0, 2.0 / 3.0, 0.03, 1.0, 4096);
        const auto fit = scaling_exponent_fit(kaden, {0, 0}, log_space(0.05, 0.9, 25));
        o.detail << " alpha=" << fit.alpha_hat;
        o.expect(std::abs(fit.alpha_hat - 0.5) <= 0.02, "alpha within 0.02 of 1/2");
        o.expect(similitude_exponent(2.0 / 3.0) == 2.0 - 1.0 / (2.0 / 3.0), "lambda(2/3)");
        o.expect(similitude_exponent(1.0) == 1.0, "lambda(1)");
        o.expect(similitude_exponent(2.0) == 1.5, "lambda(2)");
    });

    failures += run(3, 60.0, [](Outcome& o) {
        const double s = 0.5;
        // mean of |2 sin(θ/2)|^{-s} over the circle
        const double oracle = std::tgamma(1.0 - s) / std::pow(std::tgamma(1.0 - 0.5 * s), 2);
        const auto check = [&](const char* name, const CurveMeasure& mu, bool with_oracle) {
            const double d = t_energy_direct(mu, s);
            const double l = t_energy_layer_cake(mu, s);
            const auto f = settled_fourier(mu, s);
            o.detail << ' ' << name << ": direct=" << d << " layer=" << l << " fourier=" << f.corrected
                     << " (K=" << f.cutoff_series.back().cutoff << ", incr=" << f.last_decade_increment << ")";
            o.expect(std::abs(f.last_decade_increment) < 0.005, std::string(name) + " Fourier settled");
            const double vals[3] = {d, l, f.corrected};
            for (int i = 0; i < 3; ++i) {
                for (int j = i + 1; j < 3; ++j) o.expect(rel(vals[i], vals[j]) <= 0.02, std::string(name) + " pairwise 2%");
            }
            if (with_oracle) {
                o.detail << " oracle=" << oracle;
                for (double v : vals) o.expect(rel(v, oracle) <= 0.01, "circle oracle 1%");
            }
        };
        check("circle", make_circle({0, 0}, 1.0, 1.0, 1024), true);
        check("prandtl", prandtl_positive(0.0, 4096), false);
    });

    failures += run(4, 120.0, [](Outcome& o) {
        const std::size_t n = 1 << 14;
        const double ip1 = t_energy_direct(prandtl_positive(0.0, n), 0.5);
        const double ip2 = t_energy_direct(prandtl_positive(0.0, 2 * n), 0.5);
        const double bp = i_s_upper_bound(1.0, 2.0, 1.0, 1.0, 0.5);
        o.detail << " prandtl I=" << ip1 << "," << ip2 << " bound=" << bp;
        o.expect(rel(ip1, ip2) < 0.01, "Prandtl refinement Cauchy");
        o.expect(ip2 <= bp, "Prandtl below bound");

        const double ik1 = t_energy_direct(kaden_model(1.0, 2.0 / 3.0, 0.03, 1.0, n), 0.25);
        const double ik2 = t_energy_direct(kaden_model(1.0, 2.0 / 3.0, 0.03, 1.0, 2 * n), 0.25);
        const double bk = i_s_upper_bound(1.0, 0.5, 1.0, 1.0, 0.25);
        o.detail << " kaden I=" << ik1 << "," << ik2 << " bound=" << bk;
        o.expect(rel(ik1, ik2) < 0.01, "Kaden refinement Cauchy");
        o.expect(ik2 <= bk, "Kaden below bound");
    });

    failures += run(5, 30.0, [](Outcome& o) {
        const auto check = [&](const char* name, const CurveMeasure& mu, double alpha) {
            BoundCheckOptions opts;
            opts.n_samples = 10000;
            opts.seed = 2024;
            const auto a = offcenter_bound_check(mu, alpha, 1.0, 1.0, opts);
            opts.n_samples = 20000;
            const auto b = offcenter_bound_check(mu, alpha, 1.0, 1.0, opts);
            o.detail << ' ' << name << ": worst=" << a.worst_ratio << "," << b.worst_ratio
                     << " C=" << a.reference_constant;
            o.expect(a.worst_ratio <= a.reference_constant, std::string(name) + " within constant");
            o.expect(b.worst_ratio <= b.reference_constant, std::string(name) + " within constant (doubled)");
            o.expect(rel(b.worst_ratio, a.worst_ratio) < 0.10, std::string(name) + " drift under doubling");
        };
        check("prandtl", prandtl_positive(0.0, 4096), 2.0);
        check("kaden", kaden_model(1.0, 2.0 / 3.0, 0.03, 1.0, 4096), 0.5);
    });

    failures += run(6, 5.0, [](Outcome& o) {
        const AtomicMeasure dirac({{{0.0, 0.0}, 1.0}});
        for (double k : {10.0, 100.0, 1000.0}) {
            const double h = h_minus1_truncated(dirac, k).value;
            const double exact = kPi * std::log1p(k * k);
            o.detail << " K=" << k << ":" << h << "/" << exact;
            o.expect(rel(h, exact) <= 0.005, "Dirac closed form 0.5%");
        }
    });

    failures += run(7, 60.0, [](Outcome& o) {
        const std::vector<double> cutoffs = {10.0, 40.0, 160.0};
        const auto prandtl = prandtl_curve({0.2, 0.5, 1.0, 0.0}, {1.0, 4096, 2.0});
        const auto check = [&](const char* name, const CurveMeasure& mu) {
            const auto r = embedding_chain_check(mu, 1.5, 0.5, cutoffs);
            o.detail << ' ' << name << ": lhs=" << r.points.back().lhs << " rhs=" << r.rhs_morrey;
            o.expect(r.holds, std::string(name) + " chain holds");
            for (const auto& p : r.points) o.expect(p.holds, std::string(name) + " holds at every cutoff");
        };
        check("prandtl", prandtl);
        check("circle", make_circle({0, 0}, 1.0, 1.0, 1024));
        check("kaden", kaden_model(1.0, 2.0 / 3.0, 0.03, 1.0, 4096));
        for (double p : {1.25, 1.5, 1.75}) {
            const PrandtlParams par{0.2, 0.5, 1.0, 0.0};
            const double diam = 2.0 * prandtl_support_radius(par, 1.0);
            MorreyOptions a, b;
            a.r_min = 1e-2 * diam;
            b.r_min = 1e-4 * diam;
            const auto ma = morrey_norm(prandtl, p, a);
            const auto mb = morrey_norm(prandtl, p, b);
            o.detail << " p=" << p << ":" << ma.value << "," << mb.value;
            o.expect(std::isfinite(mb.value) && !mb.at_lower_edge, "Morrey finite");
            o.expect(rel(ma.value, mb.value) < 0.05, "Morrey stable over two decades");
        }
    });

    failures += run(8, 30.0, [](Outcome& o) {
        const double d = 1.0;
        const double period = kPi * d * d;  // co-rotating pair with ΔΓ = 2π
        const auto start = vortex_pair(d);
        const auto traj = evolve(start, {0.0, period / 2000.0, 2000}, 1000);
        const double err = max_error(start, traj.final_state);
        o.detail << " period error=" << err;
        o.expect(err < 1e-6 * d, "period within 1e-6 d");

        const auto& first = traj.series.front();
        double di = 0.0, dh = 0.0;
        for (const auto& obs : traj.series) {
            o.expect(obs.circulation == first.circulation, "circulation exact");
        }
        // at d = 1 the pair Hamiltonian is exactly zero, so conservation is measured at d = 0.8
        const double dc = 0.8;
        const auto cons = evolve(vortex_pair(dc), {0.0, kPi * dc * dc / 2000.0, 1000}, 10);
        const auto& c0 = cons.series.front();
        for (const auto& obs : cons.series) {
            di = std::max(di, std::abs(obs.impulse - c0.impulse) / std::max(1.0, std::abs(c0.impulse)));
            dh = std::max(dh, std::abs(obs.hamiltonian - c0.hamiltonian) / std::abs(c0.hamiltonian));
        }
        o.detail << " impulse drift=" << di << " hamiltonian drift=" << dh;
        o.expect(di < 1e-8, "impulse drift");
        o.expect(dh < 1e-6, "Hamiltonian drift");

        // at T/2000 the error sits near roundoff, so the order is measured on coarser steps
        const double e1 = max_error(start, evolve(start, {0.0, period / 100.0, 100}, 100).final_state);
        const double e2 = max_error(start, evolve(start, {0.0, period / 200.0, 200}, 200).final_state);
        o.detail << " ratio(T/100:T/200)=" << e1 / e2;
        o.expect(e1 / e2 >= 12.0, "order-4 ratio >= 12");
    });

    failures += run(9, 30.0, [](Outcome& o) {
        const PrandtlParams par{0.2, 0.5, -1.0, 0.0};
        std::vector<double> times;
        for (int k = 0; k < 10; ++k) times.push_back(0.99 * k / 9.0);
        const auto rep = collapse_diagnostic(par, times);
        double worst = 0.0;
        bool monotone = true;
        for (std::size_t k = 0; k < rep.series.size(); ++k) {
            const auto& pt = rep.series[k];
            const double closed = std::sqrt((1.0 + par.p * pt.t) * 1.0);
            worst = std::max({worst, rel(pt.support_radius_exact, closed), rel(pt.support_radius, closed)});
            if (k > 0 && !(pt.h_minus1 > rep.series[k - 1].h_minus1)) monotone = false;
        }
        o.detail << " radius error=" << worst << " h first=" << rep.series.front().h_minus1
                 << " last=" << rep.series.back().h_minus1;
        o.expect(rep.series.size() == 10, "ten times");
        o.expect(worst <= 1e-12, "radius closed form");
        o.expect(monotone && rep.h_minus1_increasing, "H^-1 increasing");
    });

    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
