#pragma once

#include "swtle/adjust.hpp"
#include "swtle/curve.hpp"
#include "swtle/errors.hpp"
#include "swtle/estimators.hpp"
#include "swtle/kernel.hpp"
#include "swtle/sample.hpp"

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace swtle {

/// Non-negative weights summing to one.
struct SimplexWeights {
    std::vector<double> w;

    void validate() const {
        double sum = 0.0;
        for (double v : w) {
            if (v < 0.0 || v > 1.0) throw ParameterError("SimplexWeights: entry outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("SimplexWeights: entries must sum to 1");
    }
};

/// Target-only N-W baseline (Q-NW).
inline CurveEstimate q_nw(const RandomDesignSample& target, const Kernel& kernel, double h) {
    return nw_estimate(target, kernel, h);
}

/// Pooled-data N-W baseline (F-NW). An empty source reduces to Q-NW.
inline CurveEstimate f_nw(const RandomDesignSample& source, const RandomDesignSample& target,
                          const Kernel& kernel, double h) {
    return nw_estimate(RandomDesignSample::pooled(source, target), kernel, h);
}

/// Simple average baseline: the √(nh)-weighted convex combination of the two
/// N-W fits.
inline CurveEstimate sa_estimate(const RandomDesignSample& source, const RandomDesignSample& target,
                                 const Kernel& kernel, BandwidthPair bw) {
    if (source.empty() || target.empty()) throw ParameterError("sa_estimate: empty sample");
    CurveEstimate p_fit = nw_estimate(source, kernel, bw.h_p);
    CurveEstimate q_fit = nw_estimate(target, kernel, bw.h_q);
    const double wp = std::sqrt(static_cast<double>(source.size()) * bw.h_p);
    const double wq = std::sqrt(static_cast<double>(target.size()) * bw.h_q);
    const double denom = wp + wq;
    return CurveEstimate(
        [p_fit, q_fit, wp, wq, denom](double x) {
            return (wp * p_fit.value(x) + wq * q_fit.value(x)) / denom;
        },
        target.domain(), {bw.h_p, bw.h_q});
}

/// Data-driven weighted average baseline: w^P chosen by leave-one-out grid
/// search where only the target N-W component is refitted per fold. Ties
/// break toward the larger target weight.
inline std::pair<CurveEstimate, SimplexWeights> wa_estimate(const RandomDesignSample& source,
                                                            const RandomDesignSample& target,
                                                            const Kernel& kernel, BandwidthPair bw,
                                                            double grid_step = 0.01) {
    if (source.empty()) throw ParameterError("wa_estimate: empty source");
    if (target.size() < 2) throw ParameterError("wa_estimate: need at least 2 target observations");
    if (!(grid_step > 0.0 && grid_step <= 1.0)) throw ParameterError("wa_estimate: bad grid step");

    CurveEstimate p_fit = nw_estimate(source, kernel, bw.h_p);
    CurveEstimate q_fit = nw_estimate(target, kernel, bw.h_q);

    const std::size_t n = target.size();
    std::vector<double> p_at(n), q_loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        p_at[i] = p_fit.value(target.x()[i]);
        q_loo[i] = detail::nw_value(target.x(), target.y(), kernel, bw.h_q, target.x()[i],
                                    static_cast<std::ptrdiff_t>(i));
    }

    const int levels = static_cast<int>(std::lround(1.0 / grid_step));
    double best = 0.0, best_wp = 0.0;
    bool have = false;
    for (int k = 0; k <= levels; ++k) {
        const double wp = static_cast<double>(k) / levels;
        double crit = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = target.y()[i] - (wp * p_at[i] + (1.0 - wp) * q_loo[i]);
            crit += r * r;
        }
        // strict improvement only: equal scores keep the smaller w^P
        if (!have || crit < best) {
            have = true;
            best = crit;
            best_wp = wp;
        }
    }

    SimplexWeights weights{{best_wp, 1.0 - best_wp}};
    const double wp = best_wp;
    CurveEstimate curve(
        [p_fit, q_fit, wp](double x) { return wp * p_fit.value(x) + (1.0 - wp) * q_fit.value(x); },
        target.domain(), {bw.h_p, bw.h_q});
    return {curve, weights};
}

} // namespace swtle
