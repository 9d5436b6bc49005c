#include "vsheet/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vsheet/errors.hpp"
#include "vsheet/numerics.hpp"

namespace vsheet {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::out_of_range: return "out-of-range";
        case ErrorKind::collapse_regime: return "collapse-regime";
        case ErrorKind::degenerate_exponent: return "degenerate-exponent";
        case ErrorKind::invalid_profile: return "invalid-profile";
        case ErrorKind::window_too_wide: return "window-too-wide";
        case ErrorKind::no_valid_samples: return "no-valid-samples";
        case ErrorKind::singular_configuration: return "singular-configuration";
        case ErrorKind::blow_up: return "blow-up";
        case ErrorKind::missing_series: return "missing-series";
        case ErrorKind::load_error: return "load-error";
    }
    return "unknown";
}

// --- AtomicMeasure ---------------------------------------------------------

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
        require(is_finite(a.position), ErrorKind::invalid_input, "atom position must be finite");
        require(std::isfinite(a.weight) && a.weight != 0.0, ErrorKind::invalid_input,
                "atom weights must be finite and nonzero");
    }
}

// --- CurveBranch -----------------------------------------------------------

namespace {

void check_vertices(const std::vector<PlanePoint>& v) {
    require(v.size() >= 2, ErrorKind::invalid_input, "a curve branch needs at least two vertices");
    for (std::size_t k = 0; k < v.size(); ++k) {
        require(is_finite(v[k]), ErrorKind::invalid_input, "curve vertices must be finite");
        if (k > 0) {
            require(!(v[k] == v[k - 1]), ErrorKind::invalid_input,
                    "consecutive curve vertices must differ");
        }
    }
}

}  // namespace

CurveBranch::CurveBranch(std::vector<PlanePoint> vertices, std::vector<double> densities,
                         std::vector<double> cumulative)
    : vertices_(std::move(vertices)),
      densities_(std::move(densities)),
      cumulative_(std::move(cumulative)) {
    check_vertices(vertices_);
    require(densities_.size() + 1 == vertices_.size(), ErrorKind::invalid_input,
            "need one density per segment");
    require(cumulative_.size() == vertices_.size(), ErrorKind::invalid_input,
            "need one cumulative value per vertex");
    require(cumulative_[0] == 0.0, ErrorKind::invalid_input, "cumulative circulation must start at 0");
    double running_tv = 0.0;
    for (std::size_t k = 0; k < densities_.size(); ++k) {
        require(std::isfinite(densities_[k]) && std::isfinite(cumulative_[k + 1]),
                ErrorKind::invalid_input, "densities and circulations must be finite");
        const double step = densities_[k] * segment_length(k);
        running_tv += std::abs(step);
        const double got = cumulative_[k + 1] - cumulative_[k];
        const double scale =
            std::max({std::abs(cumulative_[k + 1]), std::abs(cumulative_[k]), running_tv});
        require(std::abs(got - step) <= 1e-9 * scale, ErrorKind::invalid_input,
                "cumulative circulation disagrees with density times length at segment " +
                    std::to_string(k));
    }
}

CurveBranch CurveBranch::from_densities(std::vector<PlanePoint> vertices,
                                        std::vector<double> densities) {
    check_vertices(vertices);
    require(densities.size() + 1 == vertices.size(), ErrorKind::invalid_input,
            "need one density per segment");
    std::vector<double> cumulative(vertices.size(), 0.0);
    CompensatedSum gamma;
    for (std::size_t k = 0; k < densities.size(); ++k) {
        gamma += densities[k] * norm(vertices[k + 1] - vertices[k]);
        cumulative[k + 1] = gamma.value();
    }
    return CurveBranch(std::move(vertices), std::move(densities), std::move(cumulative));
}

CurveBranch CurveBranch::from_cumulative(std::vector<PlanePoint> vertices,
                                         std::vector<double> cumulative) {
    check_vertices(vertices);
    require(cumulative.size() == vertices.size(), ErrorKind::invalid_input,
            "need one cumulative value per vertex");
    std::vector<double> densities(vertices.size() - 1);
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
        densities[k] = (cumulative[k + 1] - cumulative[k]) / norm(vertices[k + 1] - vertices[k]);
    }
    return CurveBranch(std::move(vertices), std::move(densities), std::move(cumulative));
}

double CurveBranch::segment_length(std::size_t k) const {
    return norm(vertices_[k + 1] - vertices_[k]);
}

// --- CurveMeasure ----------------------------------------------------------

CurveMeasure::CurveMeasure(std::vector<CurveBranch> branches, MeasureInfo info)
    : branches_(std::move(branches)), info_(std::move(info)) {}

std::size_t CurveMeasure::segment_count() const {
    std::size_t n = 0;
    for (const auto& b : branches_) n += b.segment_count();
    return n;
}

std::vector<DensitySegment> flatten_segments(const CurveMeasure& mu) {
    std::vector<DensitySegment> out;
    out.reserve(mu.segment_count());
    for (const auto& br : mu.branches()) {
        const auto v = br.vertices();
        const auto d = br.densities();
        for (std::size_t k = 0; k < d.size(); ++k) out.push_back({v[k], v[k + 1], d[k]});
    }
    return out;
}

// --- ball masses -----------------------------------------------------------

namespace {

void check_ball(PlanePoint center, double r) {
    require(is_finite(center), ErrorKind::invalid_input, "ball center must be finite");
    require(std::isfinite(r) && r > 0.0, ErrorKind::invalid_input, "ball radius must be positive");
}

void check_radii(std::span<const double> radii) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
        require(std::isfinite(radii[i]) && radii[i] > 0.0, ErrorKind::invalid_input,
                "profile radii must be positive");
        if (i > 0) {
            require(radii[i] > radii[i - 1], ErrorKind::invalid_input,
                    "profile radii must be strictly ascending");
        }
    }
}

}  // namespace

double ball_mass(const AtomicMeasure& mu, PlanePoint center, double r) {
    check_ball(center, r);
    CompensatedSum s;
    const double r2 = r * r;
    for (const auto& a : mu.atoms()) {
        if (norm2(a.position - center) < r2) s += a.weight;
    }
    return s.value();
}

double ball_mass(const CurveMeasure& mu, PlanePoint center, double r) {
    check_ball(center, r);
    CompensatedSum s;
    for (const auto& br : mu.branches()) {
        const auto v = br.vertices();
        const auto d = br.densities();
        for (std::size_t k = 0; k < d.size(); ++k) {
            if (d[k] == 0.0) continue;
            s += d[k] * length_inside_disk(v[k], v[k + 1], center, r);
        }
    }
    return s.value();
}

std::vector<double> ball_mass_profile(const AtomicMeasure& mu, PlanePoint center,
                                      std::span<const double> radii) {
    require(is_finite(center), ErrorKind::invalid_input, "ball center must be finite");
    check_radii(radii);
    std::vector<double> jumps(radii.size() + 1, 0.0);
    for (const auto& a : mu.atoms()) {
        const double dist = norm(a.position - center);
        const auto idx = std::upper_bound(radii.begin(), radii.end(), dist) - radii.begin();
        jumps[static_cast<std::size_t>(idx)] += a.weight;
    }
    std::vector<double> out(radii.size());
    CompensatedSum running;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        running += jumps[i];
        out[i] = running.value();
    }
    return out;
}

std::vector<double> ball_mass_profile(std::span<const DensitySegment> segments, PlanePoint center,
                                      std::span<const double> radii) {
    require(is_finite(center), ErrorKind::invalid_input, "ball center must be finite");
    check_radii(radii);
    const std::size_t m = radii.size();
    std::vector<double> partial(m, 0.0);
    std::vector<double> full(m + 1, 0.0);
    for (const auto& seg : segments) {
        if (seg.density == 0.0) continue;
        const double dmin = point_segment_distance(center, seg.a, seg.b);
        const double dmax = std::sqrt(std::max(norm2(seg.a - center), norm2(seg.b - center)));
        // r <= dmin: nothing inside; r > dmax: the whole segment.
        auto lo = static_cast<std::size_t>(std::upper_bound(radii.begin(), radii.end(), dmin) -
                                           radii.begin());
        auto hi = static_cast<std::size_t>(std::upper_bound(radii.begin() + lo, radii.end(), dmax) -
                                           radii.begin());
        for (std::size_t i = lo; i < hi; ++i) {
            partial[i] += seg.density * length_inside_disk(seg.a, seg.b, center, radii[i]);
        }
        full[hi] += seg.density * norm(seg.b - seg.a);
    }
    std::vector<double> out(m);
    CompensatedSum running;
    for (std::size_t i = 0; i < m; ++i) {
        running += full[i];
        out[i] = running.value() + partial[i];
    }
    return out;
}

std::vector<double> ball_mass_profile(const CurveMeasure& mu, PlanePoint center,
                                      std::span<const double> radii) {
    const auto segments = flatten_segments(mu);
    return ball_mass_profile(segments, center, radii);
}

// --- sign structure --------------------------------------------------------

SignedDecomposition<AtomicMeasure> hahn_decompose(const AtomicMeasure& mu) {
    std::vector<Atom> pos;
    std::vector<Atom> neg;
    for (const auto& a : mu.atoms()) {
        if (a.weight > 0.0) {
            pos.push_back(a);
        } else {
            neg.push_back({a.position, -a.weight});
        }
    }
    return {AtomicMeasure(std::move(pos)), AtomicMeasure(std::move(neg))};
}

namespace {

bool all_of_sign(std::span<const double> d, int sign) {
    return std::all_of(d.begin(), d.end(), [sign](double x) { return sign > 0 ? x >= 0.0 : x <= 0.0; });
}

CurveBranch negated(const CurveBranch& br) {
    std::vector<double> dens(br.densities().begin(), br.densities().end());
    std::vector<double> cum(br.cumulative().begin(), br.cumulative().end());
    for (auto& x : dens) x = -x;
    for (auto& x : cum) x = -x;
    return CurveBranch(std::vector<PlanePoint>(br.vertices().begin(), br.vertices().end()),
                       std::move(dens), std::move(cum));
}

CurveBranch clamped(const CurveBranch& br, int sign) {
    std::vector<double> dens(br.densities().begin(), br.densities().end());
    for (auto& x : dens) x = std::max(0.0, sign * x);
    return CurveBranch::from_densities(std::vector<PlanePoint>(br.vertices().begin(), br.vertices().end()),
                                       std::move(dens));
}

}  // namespace

SignedDecomposition<CurveMeasure> hahn_decompose(const CurveMeasure& mu) {
    std::vector<CurveBranch> pos;
    std::vector<CurveBranch> neg;
    for (const auto& br : mu.branches()) {
        const auto d = br.densities();
        const bool any_pos = std::any_of(d.begin(), d.end(), [](double x) { return x > 0.0; });
        const bool any_neg = std::any_of(d.begin(), d.end(), [](double x) { return x < 0.0; });
        if (any_pos) pos.push_back(all_of_sign(d, +1) ? br : clamped(br, +1));
        if (any_neg) neg.push_back(all_of_sign(d, -1) ? negated(br) : clamped(br, -1));
    }
    return {CurveMeasure(std::move(pos), mu.info()), CurveMeasure(std::move(neg), mu.info())};
}

AtomicMeasure absolute_value(const AtomicMeasure& mu) {
    std::vector<Atom> atoms(mu.atoms().begin(), mu.atoms().end());
    for (auto& a : atoms) a.weight = std::abs(a.weight);
    return AtomicMeasure(std::move(atoms));
}

CurveMeasure absolute_value(const CurveMeasure& mu) {
    std::vector<CurveBranch> out;
    for (const auto& br : mu.branches()) {
        const auto d = br.densities();
        if (all_of_sign(d, +1)) {
            out.push_back(br);
        } else if (all_of_sign(d, -1)) {
            out.push_back(negated(br));
        } else {
            std::vector<double> dens(d.begin(), d.end());
            for (auto& x : dens) x = std::abs(x);
            out.push_back(CurveBranch::from_densities(
                std::vector<PlanePoint>(br.vertices().begin(), br.vertices().end()), std::move(dens)));
        }
    }
    return CurveMeasure(std::move(out), mu.info());
}

double total_variation(const AtomicMeasure& mu) {
    CompensatedSum s;
    for (const auto& a : mu.atoms()) s += std::abs(a.weight);
    return s.value();
}

double total_variation(const CurveMeasure& mu) {
    CompensatedSum s;
    for (const auto& br : mu.branches()) {
        const auto d = br.densities();
        for (std::size_t k = 0; k < d.size(); ++k) s += std::abs(d[k]) * br.segment_length(k);
    }
    return s.value();
}

double total_mass(const AtomicMeasure& mu) {
    CompensatedSum s;
    for (const auto& a : mu.atoms()) s += a.weight;
    return s.value();
}

double total_mass(const CurveMeasure& mu) {
    CompensatedSum s;
    for (const auto& br : mu.branches()) {
        const auto d = br.densities();
        for (std::size_t k = 0; k < d.size(); ++k) s += d[k] * br.segment_length(k);
    }
    return s.value();
}

bool is_nonnegative(const AtomicMeasure& mu) {
    return std::all_of(mu.atoms().begin(), mu.atoms().end(),
                       [](const Atom& a) { return a.weight > 0.0; });
}

bool is_nonnegative(const CurveMeasure& mu) {
    return std::all_of(mu.branches().begin(), mu.branches().end(),
                       [](const CurveBranch& b) { return all_of_sign(b.densities(), +1); });
}

// --- restriction and refinement -------------------------------------------

AtomicMeasure restrict_to_ball(const AtomicMeasure& mu, PlanePoint center, double radius) {
    check_ball(center, radius);
    std::vector<Atom> kept;
    for (const auto& a : mu.atoms()) {
        if (norm2(a.position - center) < radius * radius) kept.push_back(a);
    }
    return AtomicMeasure(std::move(kept));
}

CurveMeasure restrict_to_ball(const CurveMeasure& mu, PlanePoint center, double radius) {
    check_ball(center, radius);
    std::vector<CurveBranch> out;
    std::vector<PlanePoint> run_v;
    std::vector<double> run_d;
    auto close_run = [&] {
        if (run_v.size() >= 2) out.push_back(CurveBranch::from_densities(run_v, run_d));
        run_v.clear();
        run_d.clear();
    };
    for (const auto& br : mu.branches()) {
        const auto v = br.vertices();
        const auto d = br.densities();
        for (std::size_t k = 0; k < d.size(); ++k) {
            const auto clip = clip_segment_to_disk(v[k], v[k + 1], center, radius);
            if (!clip) {
                close_run();
                continue;
            }
            const PlanePoint start = clip->lo == 0.0 ? v[k] : lerp(v[k], v[k + 1], clip->lo);
            const PlanePoint stop = clip->hi == 1.0 ? v[k + 1] : lerp(v[k], v[k + 1], clip->hi);
            if (start == stop) {
                close_run();
                continue;
            }
            if (!run_v.empty() && !(run_v.back() == start)) close_run();
            if (run_v.empty()) run_v.push_back(start);
            run_v.push_back(stop);
            run_d.push_back(d[k]);
            if (clip->hi < 1.0) close_run();
        }
        close_run();
    }
    return CurveMeasure(std::move(out), mu.info());
}

CurveMeasure refine(const CurveMeasure& mu, int factor) {
    require(factor >= 2, ErrorKind::invalid_input, "refinement factor must be at least 2");
    std::vector<CurveBranch> out;
    for (const auto& br : mu.branches()) {
        const auto v = br.vertices();
        const auto d = br.densities();
        const auto c = br.cumulative();
        std::vector<PlanePoint> nv;
        std::vector<double> nd;
        std::vector<double> nc;
        nv.reserve(d.size() * factor + 1);
        nv.push_back(v[0]);
        nc.push_back(c[0]);
        for (std::size_t k = 0; k < d.size(); ++k) {
            const double dgamma = c[k + 1] - c[k];
            for (int j = 1; j <= factor; ++j) {
                if (j == factor) {
                    nv.push_back(v[k + 1]);
                    nc.push_back(c[k + 1]);
                } else {
                    const double u = static_cast<double>(j) / factor;
                    nv.push_back(lerp(v[k], v[k + 1], u));
                    nc.push_back(c[k] + dgamma * u);
                }
                nd.push_back(d[k]);
            }
        }
        out.emplace_back(std::move(nv), std::move(nd), std::move(nc));
    }
    return CurveMeasure(std::move(out), mu.info());
}

double cumulative_gamma(const CurveMeasure& mu, std::size_t vertex_index, std::size_t branch) {
    require(branch < mu.branch_count(), ErrorKind::out_of_range, "branch index out of range");
    const auto c = mu.branches()[branch].cumulative();
    require(vertex_index < c.size(), ErrorKind::out_of_range, "vertex index out of range");
    return c[vertex_index];
}

// --- velocity jumps --------------------------------------------------------

namespace {

void check_unit(Vec2 v, const char* what) {
    require(is_finite(v) && std::abs(norm(v) - 1.0) <= 1e-12, ErrorKind::invalid_input,
            std::string(what) + " must be a unit vector");
}

}  // namespace

double sheet_strength(Vec2 v_plus, Vec2 v_minus, Vec2 tangent) {
    check_unit(tangent, "tangent");
    return dot(v_plus - v_minus, tangent);
}

double normal_jump(Vec2 v_plus, Vec2 v_minus, Vec2 normal) {
    check_unit(normal, "normal");
    return dot(v_plus - v_minus, normal);
}

// --- support geometry ------------------------------------------------------

namespace {

std::vector<PlanePoint> support_points(const CurveMeasure& mu) {
    std::vector<PlanePoint> pts;
    for (const auto& br : mu.branches()) pts.insert(pts.end(), br.vertices().begin(), br.vertices().end());
    return pts;
}

std::vector<PlanePoint> support_points(const AtomicMeasure& mu) {
    std::vector<PlanePoint> pts;
    for (const auto& a : mu.atoms()) pts.push_back(a.position);
    return pts;
}

// Monotone-chain convex hull.
std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> pts) {
    std::sort(pts.begin(), pts.end(),
              [](PlanePoint a, PlanePoint b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<PlanePoint> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double diameter_of(std::vector<PlanePoint> pts) {
    const auto hull = convex_hull(std::move(pts));
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, norm2(hull[i] - hull[j]));
    }
    return std::sqrt(best);
}

PlanePoint box_center(const std::vector<PlanePoint>& pts) {
    if (pts.empty()) return {};
    PlanePoint lo = pts.front();
    PlanePoint hi = pts.front();
    for (const auto& p : pts) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    return 0.5 * (lo + hi);
}

double radius_about(const std::vector<PlanePoint>& pts, PlanePoint c) {
    double best = 0.0;
    for (const auto& p : pts) best = std::max(best, norm2(p - c));
    return std::sqrt(best);
}

}  // namespace

double support_diameter(const AtomicMeasure& mu) { return diameter_of(support_points(mu)); }
double support_diameter(const CurveMeasure& mu) { return diameter_of(support_points(mu)); }
PlanePoint support_center(const AtomicMeasure& mu) { return box_center(support_points(mu)); }
PlanePoint support_center(const CurveMeasure& mu) { return box_center(support_points(mu)); }
double support_radius(const AtomicMeasure& mu, PlanePoint c) { return radius_about(support_points(mu), c); }
double support_radius(const CurveMeasure& mu, PlanePoint c) { return radius_about(support_points(mu), c); }

double min_segment_length(const CurveMeasure& mu) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& br : mu.branches()) {
        for (std::size_t k = 0; k < br.segment_count(); ++k) best = std::min(best, br.segment_length(k));
    }
    return best;
}

// --- fixtures --------------------------------------------------------------

CurveMeasure make_circle(PlanePoint center, double radius, double mass, std::size_t n) {
    require(n >= 3 && radius > 0.0, ErrorKind::invalid_input, "circle needs radius > 0 and n >= 3");
    std::vector<PlanePoint> v(n + 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        v[k] = center + radius * Vec2{std::cos(th), std::sin(th)};
    }
    v[n] = v[0];
    std::vector<double> cum(n + 1);
    for (std::size_t k = 0; k <= n; ++k) cum[k] = mass * static_cast<double>(k) / static_cast<double>(n);
    MeasureInfo info{"circle", {{"radius", radius}, {"mass", mass}, {"n_samples", double(n)},
                                {"center_x", center.x}, {"center_y", center.y}}};
    return CurveMeasure({CurveBranch::from_cumulative(std::move(v), std::move(cum))}, std::move(info));
}

CurveMeasure make_segment(PlanePoint a, PlanePoint b, double density, std::size_t n) {
    require(n >= 1 && !(a == b), ErrorKind::invalid_input, "segment needs distinct endpoints and n >= 1");
    std::vector<PlanePoint> v(n + 1);
    for (std::size_t k = 0; k <= n; ++k) v[k] = lerp(a, b, static_cast<double>(k) / static_cast<double>(n));
    v[n] = b;
    std::vector<double> d(n, density);
    MeasureInfo info{"segment", {{"density", density}, {"n_samples", double(n)}}};
    return CurveMeasure({CurveBranch::from_densities(std::move(v), std::move(d))}, std::move(info));
}

}  // namespace vsheet
