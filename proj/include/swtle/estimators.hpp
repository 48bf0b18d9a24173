#pragma once

#include "swtle/curve.hpp"
#include "swtle/errors.hpp"
#include "swtle/kernel.hpp"
#include "swtle/sample.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace swtle {

namespace detail {

/// Relative floor for the N-W weight sum; below it the estimate falls back to
/// the response of the nearest covariate so far-tail evaluation stays defined.
inline constexpr double nw_weight_floor = 1e-12;

inline double nearest_response(std::span<const double> x, std::span<const double> y, double at) {
    std::size_t best = 0;
    double bd = std::abs(x[0] - at);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double d = std::abs(x[i] - at);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return y[best];
}

/// Raw N-W value at `x`, optionally skipping one observation (leave-one-out).
inline double nw_value(std::span<const double> xs, std::span<const double> ys, const Kernel& kernel,
                       double h, double x, std::ptrdiff_t skip = -1) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (static_cast<std::ptrdiff_t>(i) == skip) continue;
        const double w = kernel.scaled(xs[i] - x, h);
        num += ys[i] * w;
        den += w;
    }
    if (den < nw_weight_floor * static_cast<double>(xs.size())) {
        if (skip < 0) return nearest_response(xs, ys, x);
        // leave-one-out fallback: nearest among the kept points
        std::size_t best = xs.size();
        double bd = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (static_cast<std::ptrdiff_t>(i) == skip) continue;
            const double d = std::abs(xs[i] - x);
            if (best == xs.size() || d < bd) {
                bd = d;
                best = i;
            }
        }
        return ys[best];
    }
    return num / den;
}

} // namespace detail

/// Gasser-Müller estimator for a fixed-design sample:
/// r̂(x) = Σ_i y_i ∫_{s_{i-1}}^{s_i} K_h(t - x) dt with exact segment integrals.
inline CurveEstimate gm_estimate(const FixedDesignSample& sample, const Kernel& kernel, double h) {
    if (h <= 0.0) throw ParameterError("gm_estimate: bandwidth must be positive");
    auto xs = sample;
    return CurveEstimate(
        [xs, kernel, h](double x) {
            const auto s = xs.s();
            const auto y = xs.y();
            double acc = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i)
                acc += y[i] * kernel.segment_integral(s[i], s[i + 1], x, h);
            return acc;
        },
        Interval{0.0, 1.0}, {h});
}

/// Nadaraya-Watson estimator for a random-design sample:
/// r̂(x) = Σ y_i K_h(x_i - x) / Σ K_h(x_i - x), with a nearest-neighbour
/// fallback when the weight sum underflows the floor.
inline CurveEstimate nw_estimate(const RandomDesignSample& sample, const Kernel& kernel, double h) {
    if (h <= 0.0) throw ParameterError("nw_estimate: bandwidth must be positive");
    if (sample.empty()) throw ParameterError("nw_estimate: empty sample");
    auto xs = sample;
    return CurveEstimate(
        [xs, kernel, h](double x) { return detail::nw_value(xs.x(), xs.y(), kernel, h, x); },
        sample.domain(), {h});
}

/// Default bandwidth candidate set: `count` log-spaced values from
/// lo_frac·range to hi_frac·range of the domain.
inline std::vector<double> default_bandwidth_candidates(const Interval& domain, int count = 20,
                                                        double lo_frac = 0.02, double hi_frac = 0.5) {
    if (count < 1) throw ParameterError("default_bandwidth_candidates: count must be >= 1");
    const double lo = lo_frac * domain.length();
    const double hi = hi_frac * domain.length();
    if (!(lo > 0.0) || hi < lo)
        throw ParameterError("default_bandwidth_candidates: invalid fractions");
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i / (count - 1));
    return out;
}

/// One-dimensional leave-one-out CV bandwidth for an N-W fit on its own data.
/// A fold whose weight sum underflows contributes its worst-case residual y_i^2.
/// Ties break toward the larger bandwidth.
inline double nw_select_bandwidth(const RandomDesignSample& sample, const Kernel& kernel,
                                  std::span<const double> candidates) {
    if (candidates.empty()) throw ParameterError("nw_select_bandwidth: empty candidate set");
    if (sample.size() < 2) throw ParameterError("nw_select_bandwidth: need at least 2 observations");
    const auto xs = sample.x();
    const auto ys = sample.y();
    const std::size_t n = sample.size();
    double best_score = 0.0, best_h = 0.0;
    bool have = false;
    for (double h : candidates) {
        if (h <= 0.0) throw ParameterError("nw_select_bandwidth: non-positive candidate");
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double w = kernel.scaled(xs[j] - xs[i], h);
                num += ys[j] * w;
                den += w;
            }
            const double r = (den < detail::nw_weight_floor * static_cast<double>(n))
                                 ? ys[i]
                                 : ys[i] - num / den;
            acc += r * r;
        }
        acc /= static_cast<double>(n);
        if (!have || acc < best_score || (acc == best_score && h > best_h)) {
            have = true;
            best_score = acc;
            best_h = h;
        }
    }
    return best_h;
}

} // namespace swtle
