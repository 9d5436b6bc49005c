#include "vsheet/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vsheet/errors.hpp"
#include "vsheet/numerics.hpp"
#include "vsheet/parallel.hpp"

namespace vsheet {

namespace {

ScalingFit fit_profile(std::span<const double> radii, std::vector<double> masses) {
    require(radii.size() >= 2, ErrorKind::invalid_input, "scaling fit needs at least two radii");
    std::vector<double> lx(radii.size());
    std::vector<double> ly(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(masses[i] > 0.0)) {
            fail(ErrorKind::window_too_wide,
                 "ball mass vanishes at r = " + std::to_string(radii[i]) + "; shrink the fit window");
        }
        lx[i] = std::log(radii[i]);
        ly[i] = std::log(masses[i]);
    }
    const LineFit line = fit_line(lx, ly);
    ScalingFit fit;
    fit.alpha_hat = line.slope;
    fit.c1_hat = std::exp(line.intercept);
    fit.residual = line.r_squared;
    fit.r_lo = radii.front();
    fit.r_hi = radii.back();
    fit.radii.assign(radii.begin(), radii.end());
    fit.masses = std::move(masses);
    return fit;
}

}  // namespace

ScalingFit scaling_exponent_fit(const AtomicMeasure& mu, PlanePoint center, std::span<const double> radii) {
    return fit_profile(radii, ball_mass_profile(mu, center, radii));
}

ScalingFit scaling_exponent_fit(const CurveMeasure& mu, PlanePoint center, std::span<const double> radii) {
    return fit_profile(radii, ball_mass_profile(mu, center, radii));
}

double taylor_remainder_constant(double alpha) {
    require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::invalid_input, "alpha must be positive");
    const double e = alpha - 2.0;
    const double plus = std::max(1.0, std::pow(1.5, e));
    const double minus = std::max(1.0, std::pow(0.5, e));
    return 0.5 * alpha * std::abs(alpha - 1.0) * (plus + minus);
}

double taylor_constant(double alpha, double c1, double r0) {
    const double c = taylor_remainder_constant(alpha);
    const double base = c1 * (2.0 * alpha + 0.5 * c);
    if (alpha >= 1.0) {
        require(r0 > 0.0, ErrorKind::invalid_input, "R0 must be positive");
        return base * std::pow(r0, alpha - 1.0);
    }
    return base;
}

BoundCheckReport offcenter_bound_check(const CurveMeasure& mu, double alpha, double c1, double r0,
                                       const BoundCheckOptions& opts) {
    require(is_nonnegative(mu), ErrorKind::invalid_input, "bound check needs a nonnegative measure");
    require(alpha > 0.0 && c1 >= 0.0 && r0 > 0.0, ErrorKind::invalid_input,
            "bound check needs alpha > 0, c1 >= 0, R0 > 0");
    require(opts.n_samples >= 1, ErrorKind::invalid_input, "need at least one sample");
    const double r_lo = opts.r_lo > 0.0 ? opts.r_lo : 1e-3 * r0;
    require(2.0 * r_lo < r0, ErrorKind::invalid_input, "smallest radius must satisfy 2 r_lo < R0");

    const auto segments = flatten_segments(mu);
    struct Extent {
        double dmin, dmax;
    };
    std::vector<Extent> extent(segments.size());
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const auto& s = segments[k];
        extent[k] = {point_segment_distance(opts.origin, s.a, s.b),
                     std::sqrt(std::max(norm2(s.a - opts.origin), norm2(s.b - opts.origin)))};
    }

    std::mt19937_64 rng(opts.seed);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const double l_lo = std::log(2.0 * r_lo);
    const double l_hi = std::log(r0);

    std::vector<BoundSample> samples;
    samples.reserve(opts.n_samples);
    std::vector<PlanePoint> crossings;
    std::size_t rejected = 0;
    const std::size_t max_attempts = 100 * opts.n_samples;
    for (std::size_t attempt = 0; samples.size() < opts.n_samples && attempt < max_attempts; ++attempt) {
        const double rho = std::exp(l_lo + uniform() * (l_hi - l_lo));
        const double r = std::exp(std::log(r_lo) + uniform() * (std::log(0.5 * rho) - std::log(r_lo)));
        crossings.clear();
        for (std::size_t k = 0; k < segments.size(); ++k) {
            if (extent[k].dmin > rho || extent[k].dmax < rho) continue;
            const Vec2 a = segments[k].a - opts.origin;
            const Vec2 d = segments[k].b - segments[k].a;
            const double qa = norm2(d);
            const double qb = dot(a, d);
            const double qc = norm2(a) - rho * rho;
            const double disc = qb * qb - qa * qc;
            if (disc < 0.0) continue;
            const double root = std::sqrt(disc);
            for (double u : {(-qb - root) / qa, (-qb + root) / qa}) {
                if (u >= 0.0 && u <= 1.0) crossings.push_back(a + u * d);
            }
        }
        if (crossings.empty()) {
            ++rejected;
            continue;
        }
        const auto pick = std::min(crossings.size() - 1, static_cast<std::size_t>(uniform() * crossings.size()));
        const double angle = std::atan2(crossings[pick].y, crossings[pick].x) + (2.0 * uniform() - 1.0) * r / rho;
        samples.push_back({opts.origin + rho * Vec2{std::cos(angle), std::sin(angle)}, r, 0.0, 0.0});
    }
    if (samples.empty()) fail(ErrorKind::no_valid_samples, "no sampled circle meets the support");

    const bool high = alpha >= 1.0;
    parallel_for(samples.size(), [&](std::size_t i) {
        auto& smp = samples[i];
        const double radius[1] = {smp.r};
        smp.mass = ball_mass_profile(segments, smp.x, radius)[0];
        const double denom = high ? smp.r : smp.r * std::pow(norm(smp.x - opts.origin), alpha - 1.0);
        smp.ratio = smp.mass / denom;
    });

    BoundCheckReport rep;
    rep.n_samples = samples.size();
    rep.n_rejected = rejected;
    rep.regime = high ? BoundRegime::alpha_at_least_one : BoundRegime::alpha_below_one;
    rep.reference_constant = taylor_constant(alpha, c1, r0);
    rep.worst_sample = samples.front();
    for (const auto& smp : samples) {
        if (smp.ratio > rep.worst_sample.ratio) rep.worst_sample = smp;
    }
    rep.worst_ratio = rep.worst_sample.ratio;
    return rep;
}

namespace {

template <class M>
EmbeddingReport embedding_impl(const M& mu, double p, double s, std::span<const double> cutoffs,
                               const MorreyOptions& morrey, const QuadratureGrid& grid) {
    require(std::isfinite(p) && p > 1.0, ErrorKind::invalid_input, "p must exceed n/2 = 1");
    const double beta = 2.0 * (1.0 - 1.0 / p);
    require(s > 0.0 && s < beta, ErrorKind::out_of_range, "s must lie in (0, n - n/p)");
    require(!cutoffs.empty(), ErrorKind::invalid_input, "need at least one cutoff");

    EmbeddingReport rep;
    rep.p = p;
    rep.s = s;
    rep.total_variation = total_variation(mu);
    const auto abs_mu = absolute_value(mu);
    rep.diameter = support_diameter(abs_mu);
    rep.morrey = rep.total_variation > 0.0 ? morrey_norm(mu, p, morrey).value : 0.0;
    const double diam_beta = std::pow(rep.diameter, beta);
    const double factor = 4.0 * std::numbers::pi * std::numbers::pi / riesz_constant(s, 2) * 2.0 * s *
                          rep.morrey * (1.0 / (beta - s) + diam_beta / s);
    rep.rhs_mass = factor * rep.total_variation;
    rep.rhs_morrey = factor * diam_beta * rep.morrey;

    const double k_max = *std::max_element(cutoffs.begin(), cutoffs.end());
    QuadratureGrid g = grid;
    g.checkpoints.insert(g.checkpoints.end(), cutoffs.begin(), cutoffs.end());
    const auto h = h_minus1_truncated(mu, k_max, g);
    for (double k : cutoffs) {
        double lhs = h.value;
        for (const auto& pt : h.cutoff_series) {
            if (std::abs(pt.cutoff - k) <= 1e-12 * k_max) lhs = pt.value;
        }
        const bool ok = lhs <= rep.rhs_mass && lhs <= rep.rhs_morrey;
        rep.points.push_back({k, lhs, ok});
        rep.holds = rep.holds && ok;
    }
    return rep;
}

}  // namespace

EmbeddingReport embedding_chain_check(const CurveMeasure& mu, double p, double s, std::span<const double> cutoffs,
                                      const MorreyOptions& morrey, const QuadratureGrid& grid) {
    return embedding_impl(mu, p, s, cutoffs, morrey, grid);
}

EmbeddingReport embedding_chain_check(const AtomicMeasure& mu, double p, double s, std::span<const double> cutoffs,
                                      const MorreyOptions& morrey, const QuadratureGrid& grid) {
    return embedding_impl(mu, p, s, cutoffs, morrey, grid);
}

}  // namespace vsheet
