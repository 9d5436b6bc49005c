#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vsheet/errors.hpp"
#include "vsheet/geometry.hpp"

namespace vsheet {

struct Atom {
    PlanePoint position;
    double weight = 0.0;
};

/// Finite weighted point cloud. Weights are finite and nonzero.
class AtomicMeasure {
public:
    AtomicMeasure() = default;
    explicit AtomicMeasure(std::vector<Atom> atoms);

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

private:
    std::vector<Atom> atoms_;
};

/// One polyline carrying a piecewise-constant signed line density.
///
/// cumulative[k] is the circulation carried by the arc from vertex 0 to
/// vertex k, so cumulative[0] == 0 and
/// cumulative[k+1] - cumulative[k] == densities[k] * |v[k+1] - v[k]|.
class CurveBranch {
public:
    CurveBranch() = default;

    /// Validates all three arrays; the cumulative array must agree with
    /// densities times lengths to 1e-9 relative.
    CurveBranch(std::vector<PlanePoint> vertices, std::vector<double> densities,
                std::vector<double> cumulative);

    static CurveBranch from_densities(std::vector<PlanePoint> vertices,
                                      std::vector<double> densities);
    /// Densities derived as ΔΓ / segment length; cumulative kept verbatim.
    static CurveBranch from_cumulative(std::vector<PlanePoint> vertices,
                                       std::vector<double> cumulative);

    std::span<const PlanePoint> vertices() const { return vertices_; }
    std::span<const double> densities() const { return densities_; }
    std::span<const double> cumulative() const { return cumulative_; }
    std::size_t segment_count() const { return densities_.size(); }
    double segment_length(std::size_t k) const;

private:
    std::vector<PlanePoint> vertices_;
    std::vector<double> densities_;
    std::vector<double> cumulative_;
};

/// Generator parameters carried along with a measure for provenance.
struct MeasureInfo {
    std::string family;
    std::map<std::string, double> parameters;

    friend bool operator==(const MeasureInfo&, const MeasureInfo&) = default;
};

/// Signed measure supported on a finite union of polylines.
class CurveMeasure {
public:
    CurveMeasure() = default;
    explicit CurveMeasure(std::vector<CurveBranch> branches, MeasureInfo info = {});

    std::span<const CurveBranch> branches() const { return branches_; }
    std::size_t branch_count() const { return branches_.size(); }
    std::size_t segment_count() const;
    bool empty() const { return branches_.empty(); }

    const MeasureInfo& info() const { return info_; }
    void set_info(MeasureInfo info) { info_ = std::move(info); }

private:
    std::vector<CurveBranch> branches_;
    MeasureInfo info_;
};

/// Straight piece of a curve measure, flattened across branches.
struct DensitySegment {
    PlanePoint a;
    PlanePoint b;
    double density;
};

std::vector<DensitySegment> flatten_segments(const CurveMeasure& mu);

template <class Measure>
struct SignedDecomposition {
    Measure positive;
    Measure negative;
};

// --- ball masses -----------------------------------------------------------

/// μ(B(center, r)) over the open ball.
double ball_mass(const AtomicMeasure& mu, PlanePoint center, double r);
double ball_mass(const CurveMeasure& mu, PlanePoint center, double r);

/// μ(B(center, r_i)) for every radius of an ascending grid, in one pass.
std::vector<double> ball_mass_profile(const AtomicMeasure& mu, PlanePoint center,
                                      std::span<const double> radii);
std::vector<double> ball_mass_profile(const CurveMeasure& mu, PlanePoint center,
                                      std::span<const double> radii);
std::vector<double> ball_mass_profile(std::span<const DensitySegment> segments, PlanePoint center,
                                      std::span<const double> radii);

// --- sign structure --------------------------------------------------------

SignedDecomposition<AtomicMeasure> hahn_decompose(const AtomicMeasure& mu);
SignedDecomposition<CurveMeasure> hahn_decompose(const CurveMeasure& mu);

/// |μ| as a measure of the same kind.
AtomicMeasure absolute_value(const AtomicMeasure& mu);
CurveMeasure absolute_value(const CurveMeasure& mu);

double total_variation(const AtomicMeasure& mu);
double total_variation(const CurveMeasure& mu);
double total_mass(const AtomicMeasure& mu);
double total_mass(const CurveMeasure& mu);

bool is_nonnegative(const AtomicMeasure& mu);
bool is_nonnegative(const CurveMeasure& mu);

// --- restriction and refinement -------------------------------------------

AtomicMeasure restrict_to_ball(const AtomicMeasure& mu, PlanePoint center, double radius);
/// Segments crossing the circle are split at the intersection; each maximal
/// run inside the ball becomes its own branch with Γ restarted at 0.
CurveMeasure restrict_to_ball(const CurveMeasure& mu, PlanePoint center, double radius);

/// Split every segment into `factor` equal children.
CurveMeasure refine(const CurveMeasure& mu, int factor);

/// Γ at a vertex of a branch.
double cumulative_gamma(const CurveMeasure& mu, std::size_t vertex_index, std::size_t branch = 0);

// --- velocity jumps across the sheet --------------------------------------

/// (v⁺ − v⁻)·τ for a unit tangent τ.
double sheet_strength(Vec2 v_plus, Vec2 v_minus, Vec2 tangent);
/// (v⁺ − v⁻)·n for a unit normal n; zero for divergence-free data.
double normal_jump(Vec2 v_plus, Vec2 v_minus, Vec2 normal);

// --- support geometry ------------------------------------------------------

double support_diameter(const AtomicMeasure& mu);
double support_diameter(const CurveMeasure& mu);
/// Center of the axis-aligned bounding box of the support.
PlanePoint support_center(const AtomicMeasure& mu);
PlanePoint support_center(const CurveMeasure& mu);
/// Largest distance from `center` to the support.
double support_radius(const AtomicMeasure& mu, PlanePoint center);
double support_radius(const CurveMeasure& mu, PlanePoint center);

double min_segment_length(const CurveMeasure& mu);

// --- simple fixtures -------------------------------------------------------

/// Inscribed regular n-gon of the circle carrying `mass` uniformly.
CurveMeasure make_circle(PlanePoint center, double radius, double mass, std::size_t n);
/// Straight segment a→b split into n equal pieces with constant density.
CurveMeasure make_segment(PlanePoint a, PlanePoint b, double density, std::size_t n);

}  // namespace vsheet
