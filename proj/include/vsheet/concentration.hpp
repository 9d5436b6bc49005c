#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vsheet/energies.hpp"
#include "vsheet/measure.hpp"

namespace vsheet {

struct ScalingFit {
    double alpha_hat = 0.0;
    double c1_hat = 0.0;
    double r_lo = 0.0;
    double r_hi = 0.0;
    double residual = 0.0;  ///< coefficient of determination of the log-log fit
    std::vector<double> radii;
    std::vector<double> masses;
};

/// Least-squares line through (ln r, ln μ(B(center, r))).
ScalingFit scaling_exponent_fit(const AtomicMeasure& mu, PlanePoint center, std::span<const double> radii);
ScalingFit scaling_exponent_fit(const CurveMeasure& mu, PlanePoint center, std::span<const double> radii);

/// Second-order remainder constant c(α) of (1+d)^α − (1−d)^α on d ≤ 1/2,
/// using the worst case of each factor over d ∈ [0, 1/2].
double taylor_remainder_constant(double alpha);

/// C(c1, α, R₀) for α ≥ 1 and C(c1, α) for α < 1 in the off-center bounds.
double taylor_constant(double alpha, double c1, double r0);

enum class BoundRegime { alpha_at_least_one, alpha_below_one };

struct BoundSample {
    PlanePoint x;
    double r = 0.0;
    double mass = 0.0;
    double ratio = 0.0;
};

struct BoundCheckReport {
    double worst_ratio = 0.0;
    BoundSample worst_sample;
    std::size_t n_samples = 0;
    std::size_t n_rejected = 0;
    BoundRegime regime = BoundRegime::alpha_at_least_one;
    double reference_constant = 0.0;  ///< taylor_constant(α, c1, R₀)
};

struct BoundCheckOptions {
    std::size_t n_samples = 10000;
    std::uint64_t seed = 1;
    double r_lo = 0.0;  ///< smallest sampled radius; 0 selects 1e−3·R₀
    PlanePoint origin{};
};

/// Samples (x, r) with 2r < |x| ≤ R₀ near the support and reports the
/// largest μ(B(x, r))/r (α ≥ 1) or μ(B(x, r))/(r|x|^{α−1}) (α < 1).
BoundCheckReport offcenter_bound_check(const CurveMeasure& mu, double alpha, double c1, double r0,
                                       const BoundCheckOptions& opts = {});

struct EmbeddingPoint {
    double cutoff;
    double lhs;
    bool holds;
};

struct EmbeddingReport {
    double p = 0.0;
    double s = 0.0;
    double morrey = 0.0;
    double diameter = 0.0;
    double total_variation = 0.0;
    double rhs_mass = 0.0;    ///< bound with |μ|(Ω) kept
    double rhs_morrey = 0.0;  ///< after |μ|(Ω) ≤ diam^{n(1−1/p)}‖μ‖
    std::vector<EmbeddingPoint> points;
    bool holds = true;
};

/// Truncated H⁻¹ norm against the explicit Morrey-space bound, n = 2.
EmbeddingReport embedding_chain_check(const CurveMeasure& mu, double p, double s,
                                      std::span<const double> cutoffs, const MorreyOptions& morrey = {},
                                      const QuadratureGrid& grid = {});
EmbeddingReport embedding_chain_check(const AtomicMeasure& mu, double p, double s,
                                      std::span<const double> cutoffs, const MorreyOptions& morrey = {},
                                      const QuadratureGrid& grid = {});

}  // namespace vsheet
