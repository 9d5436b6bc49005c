#include "vsheet/numerics.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <queue>
#include <numbers>

#include "vsheet/errors.hpp"

namespace vsheet {

namespace {

QuadratureRule make_gauss_legendre(int n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

void kronrod15(const std::function<double(double)>& f, double a, double b, double& result,
               double& error) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double gauss = fc * kWg[3];
    double kronrod = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    result = kronrod * h;
    error = std::abs((kronrod - gauss) * h);
}

}  // namespace

const QuadratureRule& gauss_legendre(int n) {
    require(n >= 1 && n <= 64, ErrorKind::invalid_input, "Gauss-Legendre order must be in [1, 64]");
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth) {
    if (a == b) return 0.0;
    // global subdivision: always split the interval with the largest error estimate
    struct Piece {
        double a, b, value, err;
        int depth;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    Piece first{a, b, 0.0, 0.0, 0};
    kronrod15(f, a, b, first.value, first.err);
    heap.push(first);
    double total = first.value;
    double total_err = first.err;
    constexpr std::size_t kMaxPieces = 4000;
    std::vector<Piece> done;
    while (!heap.empty() && heap.size() + done.size() < kMaxPieces &&
           total_err > rel_tol * std::max(std::abs(total), 1e-300)) {
        const Piece p = heap.top();
        heap.pop();
        if (p.depth >= max_depth || !(p.b - p.a > 1e-300)) {
            done.push_back(p);
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        Piece left{p.a, m, 0.0, 0.0, p.depth + 1};
        Piece right{m, p.b, 0.0, 0.0, p.depth + 1};
        kronrod15(f, left.a, left.b, left.value, left.err);
        kronrod15(f, right.a, right.b, right.value, right.err);
        total += left.value + right.value - p.value;
        total_err += left.err + right.err - p.err;
        heap.push(left);
        heap.push(right);
    }
    // re-add in a fixed order so the result does not carry the running-update drift
    CompensatedSum sum;
    for (const auto& p : done) sum += p.value;
    while (!heap.empty()) {
        sum += heap.top().value;
        heap.pop();
    }
    return sum.value();
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_input,
            "line fit needs at least two paired samples");
    const double n = static_cast<double>(x.size());
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx.value() / n;
    const double my = sy.value() / n;
    CompensatedSum sxx, sxy, syy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx.value() > 0.0, ErrorKind::invalid_input, "line fit needs distinct abscissae");
    const double slope = sxy.value() / sxx.value();
    const double intercept = my - slope * mx;
    double r2 = 1.0;
    if (syy.value() > 0.0) {
        r2 = (sxy.value() * sxy.value()) / (sxx.value() * syy.value());
    }
    return {slope, intercept, std::clamp(r2, 0.0, 1.0)};
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi > lo && n >= 2, ErrorKind::invalid_input,
            "log_space needs 0 < lo < hi and n >= 2");
    std::vector<double> out(n);
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(llo + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace vsheet
