#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "vsheet/measure.hpp"

namespace vsheet {

using Frequency = Vec2;

/// μ̂(ξ) = ∫ e^{−i x·ξ} dμ(x). Segments use the closed-form line integral.
std::complex<double> measure_fourier_transform(const AtomicMeasure& mu, Frequency xi);
std::complex<double> measure_fourier_transform(const CurveMeasure& mu, Frequency xi);

/// c(s, n) with (|x|^{−s})^ = c(s, n)|ξ|^{s−n} under the e^{−ix·ξ} convention.
double riesz_constant(double s, int n = 2);

// --- direct pair sums ------------------------------------------------------

/// Σ_{i≠j} w_i w_j |x_i − x_j|^{−s}. Atoms have infinite self-energy, which
/// is left out; coincident atoms give +∞.
double t_energy_direct(const AtomicMeasure& mu, double s);

/// ∫∫|x − y|^{−s} dμ dμ for a nonnegative polyline measure. Far pairs use
/// the midpoint rule; self, touching and close pairs are integrated
/// accurately. A line density has infinite energy for s ≥ 1.
double t_energy_direct(const CurveMeasure& mu, double s);

// --- layer cake ------------------------------------------------------------

struct RadialGrid {
    double r_min = 0.0;  ///< 0 selects 0.01 × shortest segment (curves) or nearest-pair distance (atoms)
    double r_max = 0.0;  ///< 0 selects 1.01 × support diameter
    double points_per_decade = 100.0;
};

/// I_s = ∫ s∫₀^∞ r^{−s−1} μ(B(x, r)) dr dμ(x) with the inner integral on a
/// log grid plus analytic head and tail pieces.
double t_energy_layer_cake(const AtomicMeasure& mu, double s, const RadialGrid& grid = {});
double t_energy_layer_cake(const CurveMeasure& mu, double s, const RadialGrid& grid = {});

// --- frequency space -------------------------------------------------------

struct QuadratureGrid {
    double cutoff = 100.0;
    int n_radial = 12;    ///< Gauss nodes per radial panel
    int n_angular = 16;   ///< minimum angular count on [0, π)
    /// Extra cutoffs reported in the series, besides K·10^{−k/4}.
    std::vector<double> checkpoints;
};

struct CutoffPoint {
    double cutoff;
    double value;      ///< truncated integral over |ξ| ≤ cutoff
    double corrected;  ///< value plus the asymptotic tail beyond cutoff
};

struct FrequencyIntegral {
    double value = 0.0;          ///< truncated at the grid cutoff
    double tail_estimate = 0.0;  ///< asymptotic remainder for line densities; 0 for atoms
    double corrected = 0.0;
    /// (corrected(K) − corrected(K/10)) / corrected(K); the convergence indicator.
    double last_decade_increment = 0.0;
    std::vector<CutoffPoint> cutoff_series;
};

/// (2π)^{−2} c(s, 2) ∫_{|ξ|≤K} |ξ|^{s−2}|μ̂(ξ)|² dξ.
FrequencyIntegral t_energy_fourier(const AtomicMeasure& mu, double s, const QuadratureGrid& grid);
FrequencyIntegral t_energy_fourier(const CurveMeasure& mu, double s, const QuadratureGrid& grid);

/// ∫_{|ξ|≤K} (1 + |ξ|²)^{−1}|μ̂(ξ)|² dξ.
FrequencyIntegral h_minus1_truncated(const AtomicMeasure& mu, double cutoff, const QuadratureGrid& grid);
FrequencyIntegral h_minus1_truncated(const CurveMeasure& mu, double cutoff, const QuadratureGrid& grid);
FrequencyIntegral h_minus1_truncated(const AtomicMeasure& mu, double cutoff);
FrequencyIntegral h_minus1_truncated(const CurveMeasure& mu, double cutoff);

// --- Morrey ----------------------------------------------------------------

struct MorreyOptions {
    std::vector<double> radii;       ///< empty selects a log grid over [r_min, diameter]
    double r_min = 0.0;              ///< 0 selects 1e−3 × diameter
    std::size_t n_radii = 61;
    std::size_t grid_centers = 24;   ///< jittered grid per axis added to the support vertices
    std::size_t max_vertex_centers = 4096;
    unsigned long long seed = 1;
};

struct MorreyResult {
    double value = 0.0;
    double r_star = 0.0;
    PlanePoint x_star;
    bool at_lower_edge = false;  ///< sup attained at the smallest radius: likely unbounded
    std::size_t n_centers = 0;
};

/// sup_{R, x} R^{−n(1−1/p)} |μ|(B(x, R)) over the sampled product grid, n = 2.
MorreyResult morrey_norm(const AtomicMeasure& mu, double p, const MorreyOptions& opts = {});
MorreyResult morrey_norm(const CurveMeasure& mu, double p, const MorreyOptions& opts = {});

// --- upper bound from the finiteness proof ---------------------------------

/// Explicit bound on I_s for a positive measure with μ(B(0, r)) = c1 r^α on (0, R₀).
double i_s_upper_bound(double c1, double alpha, double r0, double total_mass, double s);

// --- combined report -------------------------------------------------------

struct EnergyOptions {
    bool direct = true;
    bool layer_cake = true;
    bool fourier = true;
    QuadratureGrid grid;
    RadialGrid radial;
    int refinements = 0;  ///< extra direct evaluations after refine(μ, 2^k)
};

struct EnergyReport {
    double s = 0.0;
    std::optional<double> direct;
    std::optional<double> layer_cake;
    std::optional<FrequencyIntegral> fourier;
    std::vector<std::pair<std::size_t, double>> refinement_series;
    bool atomic_self_energy_excluded = false;
    /// Largest pairwise relative difference between the computed methods.
    double max_relative_spread = 0.0;
};

EnergyReport energy_report(const CurveMeasure& mu, double s, const EnergyOptions& opts = {});
EnergyReport energy_report(const AtomicMeasure& mu, double s, const EnergyOptions& opts = {});

}  // namespace vsheet
