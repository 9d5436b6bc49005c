#include "vsheet/birkhoff_rott.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "vsheet/energies.hpp"
#include "vsheet/measure_io.hpp"
#include "vsheet/numerics.hpp"
#include "vsheet/parallel.hpp"

namespace vsheet {

namespace {

void check_state(const SheetState& state) {
    require(state.markers.size() == state.d_gamma.size(), ErrorKind::invalid_input,
            "need one circulation increment per marker");
    for (std::size_t j = 0; j < state.markers.size(); ++j) {
        require(std::isfinite(state.markers[j].real()) && std::isfinite(state.markers[j].imag()) &&
                    std::isfinite(state.d_gamma[j]),
                ErrorKind::invalid_input, "markers and circulations must be finite");
    }
}

}  // namespace

std::vector<Complex> br_velocity(const SheetState& state, double delta) {
    require(std::isfinite(delta) && delta >= 0.0, ErrorKind::invalid_input, "delta must be nonnegative");
    const std::size_t n = state.markers.size();
    require(state.d_gamma.size() == n, ErrorKind::invalid_input, "need one circulation increment per marker");
    std::vector<double> x(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = state.markers[j].real();
        y[j] = state.markers[j].imag();
    }
    const double d2 = delta * delta;
    const double* px = x.data();
    const double* py = y.data();
    const double* pg = state.d_gamma.data();
    std::vector<Complex> vel(n);
    parallel_for(n, [&](std::size_t j) {
        const double xj = px[j];
        const double yj = py[j];
        double sx = 0.0;
        double sy = 0.0;
        double min_r2 = std::numeric_limits<double>::infinity();
        auto range = [&](std::size_t k0, std::size_t k1) {
#pragma omp simd reduction(+ : sx, sy) reduction(min : min_r2)
            for (std::size_t k = k0; k < k1; ++k) {
                const double dx = xj - px[k];
                const double dy = yj - py[k];
                const double r2 = dx * dx + dy * dy;
                const double w = pg[k] / (r2 + d2);
                sx += w * dx;
                sy += w * dy;
                min_r2 = r2 < min_r2 ? r2 : min_r2;
            }
        };
        range(0, j);
        range(j + 1, n);
        if (delta == 0.0 && min_r2 == 0.0) {
            fail(ErrorKind::singular_configuration, "coincident markers with delta = 0");
        }
        // i/(2π) · Σ ΔΓ_k (z_j − z_k)/(|Δ|² + δ²)
        vel[j] = Complex(-sy, sx) / (2.0 * std::numbers::pi);
    });
    return vel;
}

SheetState br_step(const SheetState& state, const BRConfig& config) {
    require(std::isfinite(config.dt), ErrorKind::invalid_input, "dt must be finite");
    const std::size_t n = state.markers.size();
    const double h = config.dt;
    SheetState stage = state;
    const auto k1 = br_velocity(state, config.delta);
    for (std::size_t j = 0; j < n; ++j) stage.markers[j] = state.markers[j] + 0.5 * h * k1[j];
    const auto k2 = br_velocity(stage, config.delta);
    for (std::size_t j = 0; j < n; ++j) stage.markers[j] = state.markers[j] + 0.5 * h * k2[j];
    const auto k3 = br_velocity(stage, config.delta);
    for (std::size_t j = 0; j < n; ++j) stage.markers[j] = state.markers[j] + h * k3[j];
    const auto k4 = br_velocity(stage, config.delta);
    SheetState next = state;
    for (std::size_t j = 0; j < n; ++j) {
        next.markers[j] = state.markers[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    next.time = state.time + h;
    return next;
}

double total_circulation(const SheetState& state) { return compensated_sum(state.d_gamma); }

Complex linear_impulse(const SheetState& state) {
    CompensatedSum re, im;
    for (std::size_t j = 0; j < state.markers.size(); ++j) {
        re += state.d_gamma[j] * state.markers[j].real();
        im += state.d_gamma[j] * state.markers[j].imag();
    }
    return {re.value(), im.value()};
}

double br_hamiltonian(const SheetState& state, double delta) {
    const std::size_t n = state.markers.size();
    const double d2 = delta * delta;
    std::vector<double> rows(n);
    parallel_for(n, [&](std::size_t j) {
        CompensatedSum row;
        for (std::size_t k = j + 1; k < n; ++k) {
            row += state.d_gamma[k] * std::log(std::norm(state.markers[j] - state.markers[k]) + d2);
        }
        rows[j] = state.d_gamma[j] * row.value();
    });
    // each unordered pair appears twice in the double sum
    return -2.0 / (8.0 * std::numbers::pi) * compensated_sum(rows);
}

namespace {

Observation observe(const SheetState& state, std::size_t step, double delta) {
    Observation o;
    o.step = step;
    o.time = state.time;
    o.circulation = total_circulation(state);
    o.impulse = linear_impulse(state);
    o.hamiltonian = br_hamiltonian(state, delta);
    for (std::size_t j = 1; j < state.markers.size(); ++j) {
        o.max_spacing = std::max(o.max_spacing, std::abs(state.markers[j] - state.markers[j - 1]));
    }
    return o;
}

bool all_finite(const SheetState& s) {
    return std::all_of(s.markers.begin(), s.markers.end(),
                       [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

}  // namespace

Trajectory evolve(const SheetState& initial, const BRConfig& config, std::size_t observe_every,
                  const std::vector<Observer>& observers) {
    check_state(initial);
    require(config.delta >= 0.0 && std::isfinite(config.delta), ErrorKind::invalid_input, "delta must be nonnegative");
    require(config.delta > 0.0 || initial.markers.size() <= 4, ErrorKind::invalid_input,
            "delta = 0 is only allowed for at most 4 markers");
    require(config.dt != 0.0 && std::isfinite(config.dt), ErrorKind::invalid_input, "dt must be finite and nonzero");
    require(observe_every >= 1, ErrorKind::invalid_input, "observe_every must be at least 1");
    Trajectory traj;
    SheetState state = initial;
    auto record = [&](std::size_t k) {
        traj.series.push_back(observe(state, k, config.delta));
        for (const auto& obs : observers) obs(state, traj.series.back());
    };
    record(0);
    for (std::size_t k = 1; k <= config.steps; ++k) {
        SheetState next = br_step(state, config);
        if (!all_finite(next)) {
            throw BlowUpError("non-finite marker position at step " + std::to_string(k), std::move(state), k);
        }
        state = std::move(next);
        if (k % observe_every == 0 || k == config.steps) record(k);
    }
    traj.final_state = std::move(state);
    return traj;
}

SheetState sheet_from_curve(const CurveMeasure& mu) {
    SheetState s;
    for (const auto& br : mu.branches()) {
        const auto v = br.vertices();
        const auto c = br.cumulative();
        for (std::size_t k = 0; k < v.size(); ++k) {
            const double left = k > 0 ? c[k] - c[k - 1] : 0.0;
            const double right = k + 1 < v.size() ? c[k + 1] - c[k] : 0.0;
            s.markers.emplace_back(v[k].x, v[k].y);
            s.d_gamma.push_back(0.5 * (left + right));
        }
    }
    return s;
}

SheetState parse_sheet_csv(std::string_view text) {
    SheetState s;
    for (const auto& r : parse_csv_triples(text, "x,y,dgamma")) {
        s.markers.emplace_back(r[0], r[1]);
        s.d_gamma.push_back(r[2]);
    }
    try {
        check_state(s);
    } catch (const Error& e) {
        fail(ErrorKind::load_error, e.what());
    }
    return s;
}

std::string format_sheet_csv(const SheetState& state) {
    std::vector<std::array<double, 3>> rows;
    for (std::size_t j = 0; j < state.markers.size(); ++j) {
        rows.push_back({state.markers[j].real(), state.markers[j].imag(), state.d_gamma[j]});
    }
    return format_csv_triples(rows, "x,y,dgamma");
}

CollapseReport collapse_diagnostic(const PrandtlParams& params, const std::vector<double>& times,
                                   const CollapseOptions& opts) {
    require(params.p < 0.0, ErrorKind::invalid_input, "collapse needs p < 0");
    require(!times.empty(), ErrorKind::invalid_input, "need at least one time");
    const double t_collapse = -1.0 / params.p;
    for (double t : times) {
        if (!(t < t_collapse)) {
            fail(ErrorKind::collapse_regime, "time " + std::to_string(t) + " is not below the collapse time " +
                                                 std::to_string(t_collapse));
        }
    }
    CollapseReport rep;
    double restrict_radius = opts.restrict_radius;
    for (double t : times) {
        PrandtlParams at = params;
        at.t = t;
        const auto mu = prandtl_curve(at, {opts.gamma_max, opts.n_samples, 2.0});
        const auto positive = hahn_decompose(mu).positive;
        CollapsePoint pt;
        pt.t = t;
        pt.tau = at.tau();
        pt.support_radius = support_radius(positive, {0.0, 0.0});
        pt.support_radius_exact = std::sqrt(at.tau() * opts.gamma_max);
        if (restrict_radius <= 0.0) restrict_radius = 1.01 * pt.support_radius;
        const auto restricted = restrict_to_ball(positive, {0.0, 0.0}, restrict_radius);
        pt.h_minus1 = h_minus1_truncated(restricted, opts.cutoff).value;
        if (!rep.series.empty()) {
            const auto& prev = rep.series.back();
            const bool later = t > prev.t;
            if (later) {
                rep.radius_decreasing = rep.radius_decreasing && pt.support_radius < prev.support_radius;
                rep.h_minus1_increasing = rep.h_minus1_increasing && pt.h_minus1 > prev.h_minus1;
            }
        }
        rep.series.push_back(pt);
    }
    return rep;
}

}  // namespace vsheet
