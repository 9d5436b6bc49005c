#pragma once

#include <cstddef>
#include <functional>

#include "vsheet/measure.hpp"

namespace vsheet {

struct PrandtlParams {
    double b = 0.0;
    double mu = 0.0;
    double p = 1.0;
    double t = 0.0;

    double tau() const { return p * t + 1.0; }
};

struct SpiralSampling {
    double gamma_max = 1.0;
    std::size_t n_samples = 1024;
    /// Γ_j = gamma_max·(j/n)^grading. The default 2 spaces samples uniformly in radius.
    double grading = 2.0;
};

/// z = τ^q Γ^ν with ν = 1/2 + ib, q = 1/2 + ib·mu; z = −τ^q|Γ|^ν for Γ < 0.
PlanePoint prandtl_point(const PrandtlParams& params, double gamma);

/// Both branches, each starting at the origin with Γ = 0. The second branch
/// carries negative density, so total variation is 2·gamma_max.
CurveMeasure prandtl_curve(const PrandtlParams& params, const SpiralSampling& sampling);

/// Γ₊(B(0, r)) = r²/τ.
double prandtl_ball_mass_exact(const PrandtlParams& params, double r);

/// sup |z| over the truncated spiral: (τ·gamma_max)^{1/2}.
double prandtl_support_radius(const PrandtlParams& params, double gamma_max);

/// λ = 2 − 1/m.
double similitude_exponent(double m);

struct SelfSimilarParams {
    double m = 1.0;
    std::function<double(double)> f;
    std::function<double(double)> g;
    double t = 1.0;
};

/// Polyline through t^m f(θ_j) e^{iθ_j} for n_samples angles running
/// uniformly from theta_begin to theta_end, with Γ(θ_j) = t^{2m−1} g(θ_j).
/// If the first Γ is nonzero an origin vertex carrying it is prepended.
CurveMeasure self_similar_curve(const SelfSimilarParams& params, double theta_begin,
                                double theta_end, std::size_t n_samples);

/// Algebraic spiral r(θ) = θ^{−m} from r_min out to r_max, with Γ chosen so
/// that μ(B(0, r)) = c2·r^λ. The segment from the origin to r_min carries
/// the core mass c2·r_min^λ.
CurveMeasure kaden_model(double c2, double m, double r_min, double r_max, std::size_t n_samples);

}  // namespace vsheet
