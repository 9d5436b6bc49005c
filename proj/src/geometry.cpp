#include "vsheet/geometry.hpp"

#include <algorithm>
#include <utility>

namespace vsheet {

std::optional<ParamInterval> clip_segment_to_disk(Vec2 a, Vec2 b, Vec2 center, double r) {
    const Vec2 d = b - a;
    const Vec2 f = a - center;
    const double qa = norm2(d);
    if (qa == 0.0) return std::nullopt;
    const double qb = dot(d, f);
    const double qc = norm2(f) - r * r;
    const double disc = qb * qb - qa * qc;
    if (disc <= 1e-12 * (qb * qb + std::abs(qa * qc))) return std::nullopt;

    // Stable pair of roots of qa u^2 + 2 qb u + qc = 0.
    const double sq = std::sqrt(disc);
    const double q = (qb >= 0.0) ? -(qb + sq) : -(qb - sq);
    double u1 = q / qa;
    double u2 = (q != 0.0) ? qc / q : -u1;
    if (u1 > u2) std::swap(u1, u2);

    const double lo = std::max(0.0, u1);
    const double hi = std::min(1.0, u2);
    if (!(hi > lo)) return std::nullopt;
    return ParamInterval{lo, hi};
}

double length_inside_disk(Vec2 a, Vec2 b, Vec2 center, double r) {
    const auto clip = clip_segment_to_disk(a, b, center, r);
    if (!clip) return 0.0;
    return (clip->hi - clip->lo) * norm(b - a);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len2 = norm2(d);
    if (len2 == 0.0) return norm(p - a);
    const double u = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return norm(p - (a + u * d));
}

namespace {

bool segments_cross(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    const double d1 = cross(a1 - a0, b0 - a0);
    const double d2 = cross(a1 - a0, b1 - a0);
    const double d3 = cross(b1 - b0, a0 - b0);
    const double d4 = cross(b1 - b0, a1 - b0);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    if (segments_cross(a0, a1, b0, b1)) return 0.0;
    return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                     point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

}  // namespace vsheet
