#include "vsheet/energies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "vsheet/concentration.hpp"
#include "vsheet/errors.hpp"
#include "vsheet/numerics.hpp"
#include "vsheet/parallel.hpp"

namespace vsheet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

void check_exponent(double s) {
    require(std::isfinite(s) && s > 0.0 && s < 2.0, ErrorKind::invalid_input,
            "energy exponent s must lie in (0, 2)");
}

void check_positive(const CurveMeasure& mu) {
    require(is_nonnegative(mu), ErrorKind::invalid_input,
            "energies need a nonnegative measure; decompose signed input first");
}

void check_positive(const AtomicMeasure& mu) {
    require(is_nonnegative(mu), ErrorKind::invalid_input,
            "energies need a nonnegative measure; decompose signed input first");
}

// d2 -> d2^{-s/2}. Exponents that are multiples of 1/4 reduce to square
// roots, which vectorize.
struct KernelHalf {
    double operator()(double d2) const { return 1.0 / std::sqrt(std::sqrt(d2)); }
};
struct KernelQuarter {
    double operator()(double d2) const { return 1.0 / std::sqrt(std::sqrt(std::sqrt(d2))); }
};
struct KernelThreeQuarters {
    double operator()(double d2) const {
        const double t = std::sqrt(std::sqrt(std::sqrt(d2)));
        return 1.0 / (t * t * t);
    }
};
struct KernelOne {
    double operator()(double d2) const { return 1.0 / std::sqrt(d2); }
};
struct KernelThreeHalves {
    double operator()(double d2) const { return 1.0 / (std::sqrt(d2) * std::sqrt(std::sqrt(d2))); }
};
struct KernelGeneric {
    double e;
    double operator()(double d2) const { return std::pow(d2, e); }
};

template <class F>
decltype(auto) with_kernel(double s, F&& f) {
    if (s == 0.5) return f(KernelHalf{});
    if (s == 0.25) return f(KernelQuarter{});
    if (s == 0.75) return f(KernelThreeQuarters{});
    if (s == 1.0) return f(KernelOne{});
    if (s == 1.5) return f(KernelThreeHalves{});
    return f(KernelGeneric{-0.5 * s});
}

// --- curve pair integrals --------------------------------------------------

struct SegmentArrays {
    std::vector<double> cx, cy, ux, uy, h, q, rho;
    std::vector<PlanePoint> a, b;
};

SegmentArrays segment_arrays(const CurveMeasure& mu) {
    SegmentArrays t;
    for (const auto& seg : flatten_segments(mu)) {
        const PlanePoint c = 0.5 * (seg.a + seg.b);
        const double len = norm(seg.b - seg.a);
        t.cx.push_back(c.x);
        t.cy.push_back(c.y);
        t.ux.push_back(seg.b.x - seg.a.x);
        t.uy.push_back(seg.b.y - seg.a.y);
        t.h.push_back(len);
        t.q.push_back(seg.density * len);
        t.rho.push_back(seg.density);
        t.a.push_back(seg.a);
        t.b.push_back(seg.b);
    }
    return t;
}

double kernel_pow(double d, double s) { return std::pow(d, -s); }

double gauss_pair(PlanePoint a0, PlanePoint a1, PlanePoint b0, PlanePoint b1, double s,
                  const QuadratureRule& rule) {
    const double la = norm(a1 - a0);
    const double lb = norm(b1 - b0);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const PlanePoint x = lerp(a0, a1, rule.nodes[i]);
        double row = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            row += rule.weights[j] * kernel_pow(norm(x - lerp(b0, b1, rule.nodes[j])), s);
        }
        acc += rule.weights[i] * row;
    }
    return acc * la * lb;
}

double split_pair(PlanePoint a0, PlanePoint a1, PlanePoint b0, PlanePoint b1, double s,
                  const QuadratureRule& rule, int depth) {
    const double la = norm(a1 - a0);
    const double lb = norm(b1 - b0);
    const double gap = segment_segment_distance(a0, a1, b0, b1);
    if (gap >= std::max(la, lb) || depth == 0) return gauss_pair(a0, a1, b0, b1, s, rule);
    if (la >= lb) {
        const PlanePoint m = 0.5 * (a0 + a1);
        return split_pair(a0, m, b0, b1, s, rule, depth - 1) + split_pair(m, a1, b0, b1, s, rule, depth - 1);
    }
    const PlanePoint m = 0.5 * (b0 + b1);
    return split_pair(a0, a1, b0, m, s, rule, depth - 1) + split_pair(a0, a1, m, b1, s, rule, depth - 1);
}

// Two segments P→P+u and P→P+v meeting at P. After the Duffy substitution
// the corner singularity integrates in closed form, leaving two smooth 1D
// integrals.
double corner_pair(Vec2 u, Vec2 v, double s) {
    const double lu = norm(u);
    const double lv = norm(v);
    const double i1 = integrate_adaptive([&](double w) { return kernel_pow(norm(u - w * v), s); }, 0.0, 1.0, 1e-10, 30);
    const double i2 = integrate_adaptive([&](double w) { return kernel_pow(norm(w * u - v), s); }, 0.0, 1.0, 1e-10, 30);
    return lu * lv / (2.0 - s) * (i1 + i2);
}

double near_pair(const SegmentArrays& t, std::size_t i, std::size_t j, double s, const QuadratureRule& rule) {
    const double weight = t.rho[i] * t.rho[j];
    if (weight == 0.0) return 0.0;
    const PlanePoint a0 = t.a[i], a1 = t.b[i], b0 = t.a[j], b1 = t.b[j];
    if (a1 == b0) return weight * corner_pair(a0 - a1, b1 - b0, s);
    if (a0 == b1) return weight * corner_pair(a1 - a0, b0 - b1, s);
    if (a0 == b0) return weight * corner_pair(a1 - a0, b1 - b0, s);
    if (a1 == b1) return weight * corner_pair(a0 - a1, b0 - b1, s);
    return weight * split_pair(a0, a1, b0, b1, s, rule, 40);
}

constexpr double kFarRatio = 4.0;
constexpr std::size_t kBlock = 256;

template <class K>
double curve_row(const SegmentArrays& t, std::size_t i, double s, const K& kernel, const QuadratureRule& rule) {
    const std::size_t n = t.cx.size();
    const double xi = t.cx[i], yi = t.cy[i], hi = t.h[i];
    const double uxi = t.ux[i], uyi = t.uy[i];
    const double* cx = t.cx.data();
    const double* cy = t.cy.data();
    const double* ux = t.ux.data();
    const double* uy = t.uy.data();
    const double* h = t.h.data();
    const double* q = t.q.data();
    const double eta2 = kFarRatio * kFarRatio;
    const double c1 = s / 24.0;
    const double c2 = s + 2.0;
    // midpoint rule plus its h² correction (u_i·∇)² + (u_j·∇)² of the kernel
    const auto far_term = [&](std::size_t j, double dx, double dy, double d2) {
        const double inv = 1.0 / d2;
        const double pi = uxi * dx + uyi * dy;
        const double pj = ux[j] * dx + uy[j] * dy;
        const double corr = 1.0 + c1 * inv * (c2 * (pi * pi + pj * pj) * inv - (hi * hi + h[j] * h[j]));
        return q[j] * kernel(d2) * corr;
    };
    CompensatedSum row;
    for (std::size_t j0 = i + 1; j0 < n; j0 += kBlock) {
        const std::size_t j1 = std::min(n, j0 + kBlock);
        double acc = 0.0;
        double near = 0.0;
#pragma omp simd reduction(+ : acc, near)
        for (std::size_t j = j0; j < j1; ++j) {
            const double dx = cx[j] - xi;
            const double dy = cy[j] - yi;
            const double d2 = dx * dx + dy * dy;
            const double hm = hi > h[j] ? hi : h[j];
            const bool far = d2 >= eta2 * hm * hm;
            const double safe = far ? d2 : 1.0;
            const double v = far_term(j, dx, dy, safe);
            acc += far ? v : 0.0;
            near += far ? 0.0 : 1.0;
        }
        if (near == 0.0) {
            row += t.q[i] * acc;
            continue;
        }
        double far_acc = 0.0;
        for (std::size_t j = j0; j < j1; ++j) {
            const double dx = cx[j] - xi;
            const double dy = cy[j] - yi;
            const double d2 = dx * dx + dy * dy;
            const double hm = std::max(hi, h[j]);
            if (d2 >= eta2 * hm * hm) {
                far_acc += far_term(j, dx, dy, d2);
            } else {
                row += near_pair(t, i, j, s, rule);
            }
        }
        row += t.q[i] * far_acc;
    }
    return row.value();
}

template <class K>
double atom_row(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                std::size_t i, const K& kernel) {
    const std::size_t n = x.size();
    const double xi = x[i], yi = y[i];
    const double* px = x.data();
    const double* py = y.data();
    const double* pw = w.data();
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = px[j] - xi;
        const double dy = py[j] - yi;
        acc += pw[j] * kernel(dx * dx + dy * dy);
    }
    return w[i] * acc;
}

}  // namespace

double riesz_constant(double s, int n) {
    require(n >= 1 && s > 0.0 && s < n, ErrorKind::invalid_input, "Riesz constant needs 0 < s < n");
    const double nn = static_cast<double>(n);
    return std::pow(kPi, 0.5 * nn) * std::pow(2.0, nn - s) * std::tgamma(0.5 * (nn - s)) / std::tgamma(0.5 * s);
}

double t_energy_direct(const AtomicMeasure& mu, double s) {
    check_exponent(s);
    check_positive(mu);
    const std::size_t n = mu.size();
    std::vector<double> x(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = mu.atoms()[i].position.x;
        y[i] = mu.atoms()[i].position.y;
        w[i] = mu.atoms()[i].weight;
    }
    std::vector<double> rows(n, 0.0);
    with_kernel(s, [&](const auto& kernel) {
        parallel_for(n, [&](std::size_t i) { rows[i] = atom_row(x, y, w, i, kernel); });
        return 0;
    });
    return 2.0 * compensated_sum(rows);
}

double t_energy_direct(const CurveMeasure& mu, double s) {
    check_exponent(s);
    check_positive(mu);
    const SegmentArrays t = segment_arrays(mu);
    const std::size_t n = t.cx.size();
    if (n == 0 || total_variation(mu) == 0.0) return 0.0;
    if (s >= 1.0) return kInf;
    const QuadratureRule& rule = gauss_legendre(6);
    std::vector<double> rows(n, 0.0);
    with_kernel(s, [&](const auto& kernel) {
        parallel_for(n, [&](std::size_t i) { rows[i] = curve_row(t, i, s, kernel, rule); });
        return 0;
    });
    CompensatedSum total;
    for (std::size_t i = 0; i < n; ++i) {
        total += 2.0 * rows[i];
        total += t.rho[i] * t.rho[i] * 2.0 * std::pow(t.h[i], 2.0 - s) / ((1.0 - s) * (2.0 - s));
    }
    return total.value();
}

// --- layer cake ------------------------------------------------------------

namespace {

std::vector<double> layer_radii(double r_min, double r_max, double per_decade) {
    require(r_min > 0.0 && r_max > r_min && per_decade > 0.0, ErrorKind::invalid_input,
            "radial grid needs 0 < r_min < r_max");
    const auto n = static_cast<std::size_t>(std::ceil(per_decade * std::log10(r_max / r_min))) + 1;
    return log_space(r_min, r_max, std::max<std::size_t>(n, 2));
}

// ∫_{r_0}^{r_last} s r^{−s−1} m(r) dr with exact cell weights and averaged m.
double grid_part(std::span<const double> cell_weight, std::span<const double> m) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < cell_weight.size(); ++i) acc += cell_weight[i] * 0.5 * (m[i] + m[i + 1]);
    return acc.value();
}

std::vector<double> cell_weights(std::span<const double> radii, double s) {
    std::vector<double> w(radii.size() - 1);
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) w[i] = std::pow(radii[i], -s) - std::pow(radii[i + 1], -s);
    return w;
}

}  // namespace

double t_energy_layer_cake(const AtomicMeasure& mu, double s, const RadialGrid& grid) {
    check_exponent(s);
    check_positive(mu);
    const std::size_t n = mu.size();
    if (n < 2) return 0.0;
    const auto atoms = mu.atoms();
    double nearest = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) nearest = std::min(nearest, norm(atoms[i].position - atoms[j].position));
    }
    if (nearest == 0.0) return kInf;
    const double r_min = grid.r_min > 0.0 ? grid.r_min : 0.5 * nearest;
    const double r_max = grid.r_max > 0.0 ? grid.r_max : 1.01 * support_diameter(mu);
    const auto radii = layer_radii(r_min, r_max, grid.points_per_decade);
    const auto cw = cell_weights(radii, s);
    const double total = total_mass(mu);
    std::vector<double> parts(n);
    parallel_for(n, [&](std::size_t i) {
        auto m = ball_mass_profile(mu, atoms[i].position, radii);
        for (auto& v : m) v -= atoms[i].weight;
        const double head = m.front() > 0.0 ? (s < 1.0 ? s * m.front() * std::pow(r_min, -s) / (1.0 - s) : kInf) : 0.0;
        const double tail = (total - atoms[i].weight) * std::pow(r_max, -s);
        parts[i] = atoms[i].weight * (grid_part(cw, m) + head + tail);
    });
    return compensated_sum(parts);
}

double t_energy_layer_cake(const CurveMeasure& mu, double s, const RadialGrid& grid) {
    check_exponent(s);
    check_positive(mu);
    const auto segments = flatten_segments(mu);
    if (segments.empty() || total_variation(mu) == 0.0) return 0.0;
    if (s >= 1.0) return kInf;
    const double r_min = grid.r_min > 0.0 ? grid.r_min : 0.01 * min_segment_length(mu);
    const double r_max = grid.r_max > 0.0 ? grid.r_max : 1.01 * support_diameter(mu);
    const auto radii = layer_radii(r_min, r_max, grid.points_per_decade);
    const auto cw = cell_weights(radii, s);
    const double total = total_mass(mu);
    const double g = 0.5 / std::sqrt(3.0);
    const std::size_t n = segments.size();
    std::vector<double> parts(2 * n);
    parallel_for(2 * n, [&](std::size_t k) {
        const auto& seg = segments[k / 2];
        const double weight = 0.5 * seg.density * norm(seg.b - seg.a);
        if (weight == 0.0) {
            parts[k] = 0.0;
            return;
        }
        const PlanePoint x = lerp(seg.a, seg.b, k % 2 == 0 ? 0.5 - g : 0.5 + g);
        const auto m = ball_mass_profile(segments, x, radii);
        const double head = s * m.front() * std::pow(r_min, -s) / (1.0 - s);
        const double tail = total * std::pow(r_max, -s);
        parts[k] = weight * (grid_part(cw, m) + head + tail);
    });
    return compensated_sum(parts);
}

// --- Fourier ---------------------------------------------------------------

namespace {

struct SpectralSource {
    std::vector<std::vector<PlanePoint>> chains;
    std::vector<std::vector<double>> coeffs;  // density × length per segment
    std::vector<PlanePoint> atoms;
    std::vector<double> weights;
    double radius = 0.0;
    double line_l2 = 0.0;  // Σ γ² h
};

SpectralSource make_source(const CurveMeasure& mu, PlanePoint shift) {
    SpectralSource src;
    for (const auto& br : mu.branches()) {
        std::vector<PlanePoint> v;
        for (const auto& p : br.vertices()) {
            v.push_back(p - shift);
            src.radius = std::max(src.radius, norm(p - shift));
        }
        std::vector<double> c(br.segment_count());
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double h = br.segment_length(k);
            c[k] = br.densities()[k] * h;
            src.line_l2 += br.densities()[k] * br.densities()[k] * h;
        }
        src.chains.push_back(std::move(v));
        src.coeffs.push_back(std::move(c));
    }
    return src;
}

SpectralSource make_source(const AtomicMeasure& mu, PlanePoint shift) {
    SpectralSource src;
    for (const auto& a : mu.atoms()) {
        src.atoms.push_back(a.position - shift);
        src.weights.push_back(a.weight);
        src.radius = std::max(src.radius, norm(a.position - shift));
    }
    return src;
}

std::complex<double> transform(const SpectralSource& src, Frequency xi) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < src.atoms.size(); ++k) {
        const double ph = dot(src.atoms[k], xi);
        re += src.weights[k] * std::cos(ph);
        im -= src.weights[k] * std::sin(ph);
    }
    for (std::size_t b = 0; b < src.chains.size(); ++b) {
        const auto& v = src.chains[b];
        const auto& c = src.coeffs[b];
        double pa = dot(v[0], xi);
        double ca = std::cos(pa);
        double sa = -std::sin(pa);
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double pb = dot(v[k + 1], xi);
            const double cb = std::cos(pb);
            const double sb = -std::sin(pb);
            const double kk = pb - pa;
            if (c[k] != 0.0) {
                if (std::abs(kk) > 1e-3) {
                    // (E_a − E_b)/(i k) = −i(E_a − E_b)/k
                    const double dre = ca - cb;
                    const double dim = sa - sb;
                    re += c[k] * dim / kk;
                    im -= c[k] * dre / kk;
                } else {
                    // E_a (1 − ik/2 − k²/6 + ik³/24)
                    const double fre = 1.0 - kk * kk / 6.0;
                    const double fim = -0.5 * kk + kk * kk * kk / 24.0;
                    re += c[k] * (ca * fre - sa * fim);
                    im += c[k] * (ca * fim + sa * fre);
                }
            }
            pa = pb;
            ca = cb;
            sa = sb;
        }
    }
    return {re, im};
}

enum class Weight { riesz, bessel };

struct RadialNode {
    double rho;
    double weight;  // quadrature weight including the integrand's radial factor
    std::size_t panel;
};

FrequencyIntegral frequency_integral(const SpectralSource& src, double cutoff, const QuadratureGrid& grid,
                                     Weight kind, double s) {
    require(std::isfinite(cutoff) && cutoff > 0.0, ErrorKind::invalid_input, "cutoff must be positive");
    require(grid.n_radial >= 8 && grid.n_angular >= 8, ErrorKind::invalid_input,
            "quadrature counts must be at least 8");
    const double R = src.radius;
    const double cap = R > 0.0 ? kPi / R : kInf;
    const double first = std::min(cutoff, R > 0.0 ? std::min(1.0, 0.5 / R) : 1.0);

    std::vector<double> checkpoints;
    for (int k = 1; k <= 12; ++k) checkpoints.push_back(cutoff * std::pow(10.0, -0.25 * k));
    checkpoints[3] = cutoff / 10.0;
    for (double c : grid.checkpoints) {
        if (c > 0.0 && c < cutoff) checkpoints.push_back(c);
    }
    std::vector<double> edges{first};
    while (edges.back() < cutoff) edges.push_back(std::min(cutoff, edges.back() + std::min(edges.back(), cap)));
    for (double c : checkpoints) edges.push_back(c);
    edges.push_back(cutoff);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [cutoff](double a, double b) { return std::abs(a - b) <= 1e-14 * cutoff; }),
                edges.end());
    edges.insert(edges.begin(), 0.0);

    const double c_riesz = kind == Weight::riesz ? riesz_constant(s, 2) : 0.0;
    const double prefactor = kind == Weight::riesz ? c_riesz / (4.0 * kPi * kPi) : 1.0;
    auto radial = [&](double rho) {
        return kind == Weight::riesz ? prefactor * std::pow(rho, s - 1.0) : rho / (1.0 + rho * rho);
    };

    const QuadratureRule& gl = gauss_legendre(grid.n_radial);
    std::vector<RadialNode> nodes;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p];
        const double w = edges[p + 1] - a;
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
            if (p == 0) {
                // ρ = w·u^g absorbs the ρ^{s−1} singularity at the origin.
                const double g = kind == Weight::riesz ? 1.0 / s : 1.0;
                const double u = gl.nodes[k];
                const double rho = w * std::pow(u, g);
                const double jac = w * g * std::pow(u, g - 1.0);
                nodes.push_back({rho, gl.weights[k] * jac * radial(rho), p});
            } else {
                const double rho = a + w * gl.nodes[k];
                nodes.push_back({rho, gl.weights[k] * w * radial(rho), p});
            }
        }
    }

    std::vector<double> contrib(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
        const double rho = nodes[k].rho;
        const int m = std::max(grid.n_angular, static_cast<int>(std::ceil(1.1 * rho * R)) + 12);
        CompensatedSum ring;
        for (int j = 0; j < m; ++j) {
            const double phi = kPi * j / m;
            ring += std::norm(transform(src, {rho * std::cos(phi), rho * std::sin(phi)}));
        }
        contrib[k] = nodes[k].weight * 2.0 * kPi / m * ring.value();
    });

    auto tail_at = [&](double k) {
        if (src.line_l2 == 0.0) return 0.0;
        if (kind == Weight::riesz) {
            if (s >= 1.0) return kInf;
            return c_riesz / kPi * src.line_l2 * std::pow(k, s - 1.0) / (1.0 - s);
        }
        return 4.0 * kPi * src.line_l2 * (0.5 * kPi - std::atan(k));
    };

    FrequencyIntegral out;
    CompensatedSum running;
    std::size_t k = 0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        CompensatedSum panel;
        while (k < nodes.size() && nodes[k].panel == p) panel += contrib[k++];
        running += panel.value();
        const double edge = edges[p + 1];
        const bool is_checkpoint =
            edge == cutoff || std::any_of(checkpoints.begin(), checkpoints.end(),
                                          [&](double c) { return std::abs(c - edge) <= 1e-14 * cutoff; });
        if (is_checkpoint) {
            const double tail = tail_at(edge);
            out.cutoff_series.push_back({edge, running.value(), running.value() + tail});
        }
    }
    out.value = running.value();
    out.tail_estimate = tail_at(cutoff);
    out.corrected = out.value + out.tail_estimate;
    for (const auto& pt : out.cutoff_series) {
        if (std::abs(pt.cutoff - cutoff / 10.0) <= 1e-14 * cutoff && out.corrected != 0.0) {
            out.last_decade_increment = (out.corrected - pt.corrected) / out.corrected;
        }
    }
    return out;
}

template <class M>
FrequencyIntegral energy_fourier_impl(const M& mu, double s, const QuadratureGrid& grid) {
    check_exponent(s);
    check_positive(mu);
    return frequency_integral(make_source(mu, support_center(mu)), grid.cutoff, grid, Weight::riesz, s);
}

template <class M>
FrequencyIntegral h_minus1_impl(const M& mu, double cutoff, const QuadratureGrid& grid) {
    return frequency_integral(make_source(mu, support_center(mu)), cutoff, grid, Weight::bessel, 0.0);
}

}  // namespace

std::complex<double> measure_fourier_transform(const AtomicMeasure& mu, Frequency xi) {
    require(is_finite(xi), ErrorKind::invalid_input, "frequency must be finite");
    return transform(make_source(mu, {}), xi);
}

std::complex<double> measure_fourier_transform(const CurveMeasure& mu, Frequency xi) {
    require(is_finite(xi), ErrorKind::invalid_input, "frequency must be finite");
    return transform(make_source(mu, {}), xi);
}

FrequencyIntegral t_energy_fourier(const AtomicMeasure& mu, double s, const QuadratureGrid& grid) {
    return energy_fourier_impl(mu, s, grid);
}

FrequencyIntegral t_energy_fourier(const CurveMeasure& mu, double s, const QuadratureGrid& grid) {
    return energy_fourier_impl(mu, s, grid);
}

FrequencyIntegral h_minus1_truncated(const AtomicMeasure& mu, double cutoff, const QuadratureGrid& grid) {
    return h_minus1_impl(mu, cutoff, grid);
}

FrequencyIntegral h_minus1_truncated(const CurveMeasure& mu, double cutoff, const QuadratureGrid& grid) {
    return h_minus1_impl(mu, cutoff, grid);
}

FrequencyIntegral h_minus1_truncated(const AtomicMeasure& mu, double cutoff) {
    return h_minus1_impl(mu, cutoff, QuadratureGrid{});
}

FrequencyIntegral h_minus1_truncated(const CurveMeasure& mu, double cutoff) {
    return h_minus1_impl(mu, cutoff, QuadratureGrid{});
}

// --- Morrey ----------------------------------------------------------------

namespace {

template <class Profile>
MorreyResult morrey_core(const std::vector<PlanePoint>& support, double diameter, PlanePoint lo, PlanePoint hi,
                         double p, const MorreyOptions& opts, Profile&& profile) {
    require(std::isfinite(p) && p > 1.0, ErrorKind::invalid_input, "Morrey exponent p must exceed 1");
    MorreyResult res;
    if (support.empty() || diameter == 0.0) {
        if (!support.empty()) {
            // a single point: ratio blows up at the smallest radius
            res.at_lower_edge = true;
        }
        return res;
    }
    std::vector<double> radii = opts.radii;
    if (radii.empty()) {
        const double r_min = opts.r_min > 0.0 ? opts.r_min : 1e-3 * diameter;
        radii = log_space(r_min, diameter, std::max<std::size_t>(opts.n_radii, 2));
    }
    const double beta = 2.0 * (1.0 - 1.0 / p);
    std::vector<double> scale(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) scale[i] = std::pow(radii[i], -beta);

    std::vector<PlanePoint> centers;
    const std::size_t stride = std::max<std::size_t>(1, (support.size() + opts.max_vertex_centers - 1) /
                                                            std::max<std::size_t>(1, opts.max_vertex_centers));
    for (std::size_t i = 0; i < support.size(); i += stride) centers.push_back(support[i]);
    if (opts.grid_centers > 0) {
        std::mt19937_64 rng(opts.seed);
        auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        const double nx = static_cast<double>(opts.grid_centers);
        for (std::size_t a = 0; a < opts.grid_centers; ++a) {
            for (std::size_t b = 0; b < opts.grid_centers; ++b) {
                const double u = (static_cast<double>(a) + uniform()) / nx;
                const double v = (static_cast<double>(b) + uniform()) / nx;
                centers.push_back({lo.x + u * (hi.x - lo.x), lo.y + v * (hi.y - lo.y)});
            }
        }
    }

    struct Best {
        double value = -1.0;
        std::size_t radius = 0;
    };
    std::vector<Best> best(centers.size());
    parallel_for(centers.size(), [&](std::size_t c) {
        const auto m = profile(centers[c], radii);
        Best b;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double v = scale[i] * m[i];
            if (v > b.value) b = {v, i};
        }
        best[c] = b;
    });
    std::vector<std::size_t> order(centers.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return best[a].value > best[b].value; });
    res.n_centers = centers.size();

    // pattern search from the leading grid candidates; the grid alone
    // under-resolves the sup once the radius range spans many decades
    const double r_lo = radii.front();
    const double r_hi = radii.back();
    const double log_step = radii.size() > 1 ? std::log(radii[1] / radii[0]) : 0.1;
    const double box = std::max(hi.x - lo.x, hi.y - lo.y);
    const double x_step = box / static_cast<double>(std::max<std::size_t>(opts.grid_centers, 8));
    const auto value_at = [&](PlanePoint c, double r) {
        const std::vector<double> one = {r};
        return std::pow(r, -beta) * profile(c, one)[0];
    };
    const std::size_t n_polish = std::min<std::size_t>(8, order.size());
    std::vector<double> polished(n_polish);
    std::vector<PlanePoint> polished_x(n_polish);
    std::vector<double> polished_r(n_polish);
    parallel_for(n_polish, [&](std::size_t k) {
        PlanePoint x = centers[order[k]];
        double r = radii[best[order[k]].radius];
        double v = best[order[k]].value;
        double dx = x_step;
        double dl = log_step;
        for (int iter = 0; iter < 200 && (dx > 1e-6 * box || dl > 1e-6); ++iter) {
            bool moved = false;
            const PlanePoint moves[4] = {{dx, 0.0}, {-dx, 0.0}, {0.0, dx}, {0.0, -dx}};
            for (const auto& m : moves) {
                const double t = value_at(x + m, r);
                if (t > v) {
                    v = t;
                    x = x + m;
                    moved = true;
                }
            }
            for (double f : {std::exp(dl), std::exp(-dl)}) {
                const double rr = std::clamp(r * f, r_lo, r_hi);
                const double t = value_at(x, rr);
                if (t > v) {
                    v = t;
                    r = rr;
                    moved = true;
                }
            }
            if (!moved) {
                dx *= 0.5;
                dl *= 0.5;
            }
        }
        polished[k] = v;
        polished_x[k] = x;
        polished_r[k] = r;
    });
    std::size_t top = 0;
    for (std::size_t k = 1; k < n_polish; ++k) {
        if (polished[k] > polished[top]) top = k;
    }
    res.value = std::max(0.0, polished[top]);
    res.r_star = polished_r[top];
    res.x_star = polished_x[top];
    res.at_lower_edge = res.value > 0.0 && res.r_star <= r_lo * (1.0 + 1e-12);
    return res;
}

void bounding_box(const std::vector<PlanePoint>& pts, PlanePoint& lo, PlanePoint& hi) {
    lo = hi = pts.empty() ? PlanePoint{} : pts.front();
    for (const auto& q : pts) {
        lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
        hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
    }
}

}  // namespace

MorreyResult morrey_norm(const AtomicMeasure& mu, double p, const MorreyOptions& opts) {
    const AtomicMeasure abs_mu = absolute_value(mu);
    std::vector<PlanePoint> support;
    for (const auto& a : abs_mu.atoms()) support.push_back(a.position);
    PlanePoint lo, hi;
    bounding_box(support, lo, hi);
    double diameter = support_diameter(abs_mu);
    if (diameter == 0.0 && !support.empty() && !opts.radii.empty()) diameter = opts.radii.back();
    if (diameter == 0.0 && !support.empty()) {
        // a lone point mass: |μ|(B(x,R)) R^{−β} grows without bound as R shrinks
        std::vector<double> radii = opts.radii;
        if (radii.empty()) radii = log_space(opts.r_min > 0.0 ? opts.r_min : 1e-3, 1.0, opts.n_radii);
        const double beta = 2.0 * (1.0 - 1.0 / p);
        MorreyResult res;
        res.value = total_variation(abs_mu) * std::pow(radii.front(), -beta);
        res.r_star = radii.front();
        res.x_star = support.front();
        res.at_lower_edge = true;
        res.n_centers = 1;
        require(std::isfinite(p) && p > 1.0, ErrorKind::invalid_input, "Morrey exponent p must exceed 1");
        return res;
    }
    return morrey_core(support, diameter, lo, hi, p, opts, [&](PlanePoint c, const std::vector<double>& r) {
        return ball_mass_profile(abs_mu, c, r);
    });
}

MorreyResult morrey_norm(const CurveMeasure& mu, double p, const MorreyOptions& opts) {
    const CurveMeasure abs_mu = absolute_value(mu);
    const auto segments = flatten_segments(abs_mu);
    std::vector<PlanePoint> support;
    for (const auto& br : abs_mu.branches()) support.insert(support.end(), br.vertices().begin(), br.vertices().end());
    PlanePoint lo, hi;
    bounding_box(support, lo, hi);
    return morrey_core(support, support_diameter(abs_mu), lo, hi, p, opts,
                       [&](PlanePoint c, const std::vector<double>& r) { return ball_mass_profile(segments, c, r); });
}

// --- upper bound -------------------------------------------------------------

double i_s_upper_bound(double c1, double alpha, double r0, double total_mass, double s) {
    require(c1 >= 0.0 && alpha > 0.0 && r0 > 0.0 && total_mass >= 0.0, ErrorKind::invalid_input,
            "bound needs c1 >= 0, alpha > 0, R0 > 0, mass >= 0");
    const double s_max = std::min(alpha, 1.0);
    require(s > 0.0 && s < s_max, ErrorKind::out_of_range, "bound needs 0 < s < min(alpha, 1)");
    const double C = taylor_constant(alpha, c1, r0);
    const double moment = s * c1 * std::pow(r0, alpha - s) / (alpha - s) + total_mass * std::pow(r0, -s);
    const double far = std::pow(2.0, s) * total_mass * moment;
    const double denom = (1.0 - s) * std::pow(2.0, 1.0 - s);
    if (alpha >= 1.0) return C * s * std::pow(r0, 1.0 - s) * total_mass / denom + far;
    return C * s / denom * std::pow(r0, alpha - s) * total_mass + far;
}

// --- report ------------------------------------------------------------------

namespace {

double spread(const EnergyReport& r) {
    std::vector<double> v;
    if (r.direct) v.push_back(*r.direct);
    if (r.layer_cake) v.push_back(*r.layer_cake);
    if (r.fourier) v.push_back(r.fourier->corrected);
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double scale = std::max(std::abs(v[i]), std::abs(v[j]));
            if (scale > 0.0) worst = std::max(worst, std::abs(v[i] - v[j]) / scale);
        }
    }
    return worst;
}

}  // namespace

EnergyReport energy_report(const CurveMeasure& mu, double s, const EnergyOptions& opts) {
    EnergyReport r;
    r.s = s;
    if (opts.direct) {
        r.direct = t_energy_direct(mu, s);
        r.refinement_series.emplace_back(mu.segment_count(), *r.direct);
        for (int k = 1; k <= opts.refinements; ++k) {
            const auto fine = refine(mu, 1 << k);
            r.refinement_series.emplace_back(fine.segment_count(), t_energy_direct(fine, s));
        }
    }
    if (opts.layer_cake) r.layer_cake = t_energy_layer_cake(mu, s, opts.radial);
    if (opts.fourier) r.fourier = t_energy_fourier(mu, s, opts.grid);
    r.max_relative_spread = spread(r);
    return r;
}

EnergyReport energy_report(const AtomicMeasure& mu, double s, const EnergyOptions& opts) {
    EnergyReport r;
    r.s = s;
    r.atomic_self_energy_excluded = true;
    if (opts.direct) {
        r.direct = t_energy_direct(mu, s);
        r.refinement_series.emplace_back(mu.size(), *r.direct);
    }
    if (opts.layer_cake) r.layer_cake = t_energy_layer_cake(mu, s, opts.radial);
    if (opts.fourier) r.fourier = t_energy_fourier(mu, s, opts.grid);
    r.max_relative_spread = spread(r);
    return r;
}

}  // namespace vsheet
