#pragma once

#include <cmath>
#include <optional>

namespace vsheet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double a) { x *= a; y *= a; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double a, Vec2 v) { return {a * v.x, a * v.y}; }
    friend constexpr Vec2 operator*(Vec2 v, double a) { return {a * v.x, a * v.y}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

/// A point of the plane. Same representation as a 2-vector.
using PlanePoint = Vec2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

inline Vec2 lerp(Vec2 a, Vec2 b, double u) { return a + u * (b - a); }

/// Parameter interval [lo, hi] ⊂ [0, 1] of a segment.
struct ParamInterval {
    double lo;
    double hi;
};

/// Portion of the segment a→b lying strictly inside the open disk B(center, r).
/// Tangency (discriminant within 1e-12 relative of zero) counts as a miss.
std::optional<ParamInterval> clip_segment_to_disk(Vec2 a, Vec2 b, Vec2 center, double r);

/// Length of the part of segment a→b inside the open disk B(center, r).
double length_inside_disk(Vec2 a, Vec2 b, Vec2 center, double r);

/// Euclidean distance from p to the closed segment a→b.
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Minimum distance between two closed segments.
double segment_segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);

}  // namespace vsheet
