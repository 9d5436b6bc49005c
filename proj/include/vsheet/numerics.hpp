#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vsheet {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double v) { add(v); return *this; }
    /// An infinite term makes the correction NaN; the plain sum is then the answer.
    double value() const { return std::isfinite(sum_) ? sum_ + comp_ : sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value();
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [0, 1].
const QuadratureRule& gauss_legendre(int n);

/// Adaptive Gauss–Kronrod (7/15) quadrature of f on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-11, int max_depth = 40);

/// Ordinary least-squares line y = slope·x + intercept.
struct LineFit {
    double slope;
    double intercept;
    double r_squared;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// n points log-spaced from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t n);

}  // namespace vsheet
