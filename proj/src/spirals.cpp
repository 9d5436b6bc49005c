#include "vsheet/spirals.hpp"

#include <cmath>
#include <complex>

#include "vsheet/errors.hpp"

namespace vsheet {

namespace {

void check_tau(const PrandtlParams& params) {
    require(std::isfinite(params.b) && std::isfinite(params.mu) && std::isfinite(params.p) &&
                std::isfinite(params.t),
            ErrorKind::invalid_input, "Prandtl parameters must be finite");
    if (!(params.tau() > 0.0)) {
        fail(ErrorKind::collapse_regime, "tau = p*t + 1 must be positive (got " +
                                             std::to_string(params.tau()) + ")");
    }
}

}  // namespace

PlanePoint prandtl_point(const PrandtlParams& params, double gamma) {
    check_tau(params);
    require(std::isfinite(gamma) && gamma != 0.0, ErrorKind::invalid_input,
            "Prandtl circulation must be finite and nonzero");
    const std::complex<double> nu(0.5, params.b);
    const std::complex<double> q(0.5, params.b * params.mu);
    const std::complex<double> z = std::exp(q * std::log(params.tau()) + nu * std::log(std::abs(gamma)));
    return gamma > 0.0 ? PlanePoint{z.real(), z.imag()} : PlanePoint{-z.real(), -z.imag()};
}

CurveMeasure prandtl_curve(const PrandtlParams& params, const SpiralSampling& sampling) {
    check_tau(params);
    require(sampling.gamma_max > 0.0 && std::isfinite(sampling.gamma_max), ErrorKind::invalid_input,
            "gamma_max must be positive");
    require(sampling.n_samples >= 2, ErrorKind::invalid_input, "need at least 2 samples");
    require(sampling.grading >= 1.0, ErrorKind::invalid_input, "grading must be at least 1");

    const std::size_t n = sampling.n_samples;
    std::vector<PlanePoint> pos(n + 1);
    std::vector<double> gam(n + 1);
    pos[0] = {0.0, 0.0};
    gam[0] = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(n);
        gam[j] = j == n ? sampling.gamma_max : sampling.gamma_max * std::pow(u, sampling.grading);
        pos[j] = prandtl_point(params, gam[j]);
    }
    std::vector<PlanePoint> neg_pos(n + 1);
    std::vector<double> neg_gam(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        neg_pos[j] = -pos[j];
        neg_gam[j] = -gam[j];
    }
    neg_pos[0] = {0.0, 0.0};

    MeasureInfo info{"prandtl",
                     {{"b", params.b},
                      {"mu", params.mu},
                      {"p", params.p},
                      {"t", params.t},
                      {"tau", params.tau()},
                      {"gamma_max", sampling.gamma_max},
                      {"n_samples", static_cast<double>(n)},
                      {"grading", sampling.grading}}};
    std::vector<CurveBranch> branches;
    branches.push_back(CurveBranch::from_cumulative(std::move(pos), std::move(gam)));
    branches.push_back(CurveBranch::from_cumulative(std::move(neg_pos), std::move(neg_gam)));
    return CurveMeasure(std::move(branches), std::move(info));
}

double prandtl_ball_mass_exact(const PrandtlParams& params, double r) {
    check_tau(params);
    require(std::isfinite(r) && r >= 0.0, ErrorKind::invalid_input, "radius must be nonnegative");
    return r * r / params.tau();
}

double prandtl_support_radius(const PrandtlParams& params, double gamma_max) {
    check_tau(params);
    require(gamma_max >= 0.0, ErrorKind::invalid_input, "gamma_max must be nonnegative");
    return std::sqrt(params.tau() * gamma_max);
}

double similitude_exponent(double m) {
    if (!(m > 0.5) || !std::isfinite(m)) {
        fail(ErrorKind::degenerate_exponent, "similitude law needs m > 1/2 (got " + std::to_string(m) + ")");
    }
    return 2.0 - 1.0 / m;
}

CurveMeasure self_similar_curve(const SelfSimilarParams& params, double theta_begin, double theta_end,
                                std::size_t n_samples) {
    similitude_exponent(params.m);
    require(params.f && params.g, ErrorKind::invalid_input, "profiles f and g are required");
    require(params.t > 0.0 && std::isfinite(params.t), ErrorKind::invalid_input, "time must be positive");
    require(n_samples >= 2, ErrorKind::invalid_input, "need at least 2 samples");
    require(std::isfinite(theta_begin) && std::isfinite(theta_end) && theta_begin != theta_end,
            ErrorKind::invalid_input, "theta range must be finite and nonempty");

    const double pos_scale = std::pow(params.t, params.m);
    const double gam_scale = std::pow(params.t, 2.0 * params.m - 1.0);
    std::vector<PlanePoint> v;
    std::vector<double> gam;
    v.reserve(n_samples + 1);
    gam.reserve(n_samples + 1);
    for (std::size_t j = 0; j < n_samples; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(n_samples - 1);
        const double th = j + 1 == n_samples ? theta_end : theta_begin + u * (theta_end - theta_begin);
        const double radius = pos_scale * params.f(th);
        v.push_back({radius * std::cos(th), radius * std::sin(th)});
        gam.push_back(gam_scale * params.g(th));
        require(is_finite(v.back()) && std::isfinite(gam.back()), ErrorKind::invalid_profile,
                "profile produced a non-finite sample");
    }

    int direction = 0;
    for (std::size_t j = 1; j < gam.size(); ++j) {
        const double step = gam[j] - gam[j - 1];
        const int sgn = (step > 0.0) - (step < 0.0);
        if (sgn == 0) continue;
        if (direction == 0) direction = sgn;
        require(sgn == direction, ErrorKind::invalid_profile,
                "g profile is not monotone (changes direction at sample " + std::to_string(j) + ")");
    }
    if (gam[0] != 0.0) {
        require(!(v[0] == PlanePoint{}), ErrorKind::invalid_profile,
                "first sample sits at the origin but carries nonzero circulation");
        require(direction == 0 || (gam[0] > 0.0) == (direction > 0), ErrorKind::invalid_profile,
                "circulation between the origin and the first sample runs against the profile");
        v.insert(v.begin(), PlanePoint{});
        gam.insert(gam.begin(), 0.0);
    }

    MeasureInfo info{"self-similar",
                     {{"m", params.m},
                      {"t", params.t},
                      {"lambda", 2.0 - 1.0 / params.m},
                      {"theta_begin", theta_begin},
                      {"theta_end", theta_end},
                      {"n_samples", static_cast<double>(n_samples)}}};
    try {
        return CurveMeasure({CurveBranch::from_cumulative(std::move(v), std::move(gam))}, std::move(info));
    } catch (const Error& e) {
        fail(ErrorKind::invalid_profile, e.what());
    }
}

CurveMeasure kaden_model(double c2, double m, double r_min, double r_max, std::size_t n_samples) {
    const double lambda = similitude_exponent(m);
    require(c2 > 0.0 && std::isfinite(c2), ErrorKind::invalid_input, "c2 must be positive");
    require(r_min > 0.0 && r_max > r_min && std::isfinite(r_max), ErrorKind::invalid_input,
            "need 0 < r_min < r_max");
    SelfSimilarParams params;
    params.m = m;
    params.t = 1.0;
    params.f = [m](double th) { return std::pow(th, -m); };
    params.g = [c2, m](double th) { return c2 * std::pow(th, -(2.0 * m - 1.0)); };
    const auto spiral = self_similar_curve(params, std::pow(r_min, -1.0 / m), std::pow(r_max, -1.0 / m), n_samples);
    const CurveBranch& outer = spiral.branches()[0];

    // radial core from the origin to r_min, graded geometrically so that the
    // law c2 r^λ also holds at the core vertices
    constexpr int kCore = 64;
    constexpr double kCoreDepth = 1e-4;
    const PlanePoint dir = (1.0 / norm(outer.vertices()[1])) * outer.vertices()[1];
    std::vector<PlanePoint> vertices = {PlanePoint{0.0, 0.0}};
    std::vector<double> cumulative = {0.0};
    for (int k = kCore; k >= 1; --k) {
        const double rho = r_min * std::pow(kCoreDepth, static_cast<double>(k) / kCore);
        vertices.push_back(rho * dir);
        cumulative.push_back(c2 * std::pow(rho, lambda));
    }
    for (std::size_t k = 1; k < outer.vertices().size(); ++k) {
        vertices.push_back(outer.vertices()[k]);
        cumulative.push_back(outer.cumulative()[k]);
    }
    CurveMeasure mu({CurveBranch::from_cumulative(std::move(vertices), std::move(cumulative))});
    mu.set_info({"kaden",
                 {{"c2", c2},
                  {"m", m},
                  {"lambda", lambda},
                  {"r_min", r_min},
                  {"r_max", r_max},
                  {"n_samples", static_cast<double>(n_samples)}}});
    return mu;
}

}  // namespace vsheet
