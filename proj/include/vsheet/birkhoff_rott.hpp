#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "vsheet/errors.hpp"
#include "vsheet/measure.hpp"
#include "vsheet/spirals.hpp"

namespace vsheet {

using Complex = std::complex<double>;

struct SheetState {
    std::vector<Complex> markers;
    std::vector<double> d_gamma;
    double time = 0.0;
};

struct BRConfig {
    double delta = 0.05;
    double dt = 1e-3;
    std::size_t steps = 100;
};

/// dz_j/dt from dz̄_j/dt = (1/2πi) Σ_{k≠j} ΔΓ_k (z̄_j − z̄_k)/(|z_j − z_k|² + δ²).
std::vector<Complex> br_velocity(const SheetState& state, double delta);

/// One classical RK4 step of size config.dt.
SheetState br_step(const SheetState& state, const BRConfig& config);

double total_circulation(const SheetState& state);
/// Σ ΔΓ_j z_j.
Complex linear_impulse(const SheetState& state);
/// H_δ = −(1/8π) Σ_{j≠k} ΔΓ_j ΔΓ_k ln(|z_j − z_k|² + δ²).
double br_hamiltonian(const SheetState& state, double delta);

struct Observation {
    std::size_t step = 0;
    double time = 0.0;
    double circulation = 0.0;
    Complex impulse;
    double hamiltonian = 0.0;
    double max_spacing = 0.0;  ///< largest gap between consecutive markers
};

using Observer = std::function<void(const SheetState&, const Observation&)>;

struct Trajectory {
    std::vector<Observation> series;
    SheetState final_state;
};

class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, SheetState last_valid, std::size_t step)
        : Error(ErrorKind::blow_up, what), last_valid_(std::move(last_valid)), step_(step) {}

    const SheetState& last_valid() const { return last_valid_; }
    std::size_t step() const { return step_; }

private:
    SheetState last_valid_;
    std::size_t step_;
};

/// Runs config.steps RK4 steps, recording an observation at step 0, every
/// observe_every steps, and at the end.
Trajectory evolve(const SheetState& initial, const BRConfig& config, std::size_t observe_every = 1,
                  const std::vector<Observer>& observers = {});

/// Markers at polyline vertices, each carrying half of the circulation of
/// its two neighbouring segments.
SheetState sheet_from_curve(const CurveMeasure& mu);

/// CSV with header `x,y,dgamma`.
SheetState parse_sheet_csv(std::string_view text);
std::string format_sheet_csv(const SheetState& state);

struct CollapsePoint {
    double t = 0.0;
    double tau = 0.0;
    double support_radius = 0.0;        ///< max |z| over the sampled curve
    double support_radius_exact = 0.0;  ///< τ^{1/2} Γ_max^{1/2}
    double h_minus1 = 0.0;
};

struct CollapseReport {
    std::vector<CollapsePoint> series;
    bool radius_decreasing = true;
    bool h_minus1_increasing = true;
};

struct CollapseOptions {
    double gamma_max = 1.0;
    std::size_t n_samples = 1024;
    double cutoff = 20.0;
    double restrict_radius = 0.0;  ///< 0 selects 1.01 × the support radius at the first time
};

/// Positive Prandtl branch along times approaching −1/p (p < 0).
CollapseReport collapse_diagnostic(const PrandtlParams& params, const std::vector<double>& times,
                                   const CollapseOptions& opts = {});

}  // namespace vsheet
