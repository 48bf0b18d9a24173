#pragma once

#include "swtle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace swtle {

inline constexpr double pi = 3.14159265358979323846;

/// Standard normal CDF through the complementary error function.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }

    static Interval hull(std::span<const double> xs, double pad = 0.0) {
        if (xs.empty()) throw ParameterError("Interval::hull: empty point set");
        auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
        return Interval{*mn - pad, *mx + pad};
    }
};

/// `count` equispaced points covering `iv` after trimming `trim`·length off
/// each end. trim = 0 reproduces the plain linspace.
inline std::vector<double> linspace(const Interval& iv, int count, double trim = 0.0) {
    if (count < 2) throw ParameterError("linspace: need at least 2 points");
    if (trim < 0.0 || trim > 0.25) throw ParameterError("linspace: trim outside [0, 0.25]");
    const double lo = iv.lo + trim * iv.length();
    const double hi = iv.hi - trim * iv.length();
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return xs;
}

/// Trapezoid rule over an ascending grid.
inline double trapezoid(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ParameterError("trapezoid: grids must match and hold >= 2 points");
    double acc = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return acc;
}

/// Dense linear solve with partial pivoting, for the small (k <= 8) Gram and
/// Levenberg-Marquardt systems. `a` is row-major n x n and is consumed.
/// Returns the pivot-ratio condition estimate max|pivot| / min|pivot| through
/// `cond_out` when non-null; throws ParameterError on an exactly singular
/// system.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b,
                                       double* cond_out = nullptr) {
    const std::size_t n = b.size();
    if (a.size() != n * n) throw ParameterError("solve_dense: shape mismatch");
    double max_piv = 0.0, min_piv = std::numeric_limits<double>::infinity();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        const double p = a[col * n + col];
        if (p == 0.0) throw ParameterError("solve_dense: singular matrix");
        max_piv = std::max(max_piv, std::abs(p));
        min_piv = std::min(min_piv, std::abs(p));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / p;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) acc -= a[ri * n + c] * x[c];
        x[ri] = acc / a[ri * n + ri];
    }
    if (cond_out) *cond_out = (min_piv > 0.0) ? max_piv / min_piv : std::numeric_limits<double>::infinity();
    return x;
}

} // namespace swtle
