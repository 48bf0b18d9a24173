#pragma once

#include "swtle/errors.hpp"
#include "swtle/math.hpp"
#include "swtle/sample.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace swtle {

/// A user-supplied parametric source regression r(x, θ). The Jacobian with
/// respect to θ is optional; when absent, forward differences with step
/// 1e-6·(1 + |θ_j|) are used.
struct ParametricModel {
    int dim = 0;
    std::function<double(double, std::span<const double>)> value;
    std::function<void(double, std::span<const double>, std::span<double>)> jacobian; // optional
    std::string name;

    void jacobian_at(double x, std::span<const double> theta, std::span<double> out) const {
        if (jacobian) {
            jacobian(x, theta, out);
            return;
        }
        std::vector<double> t(theta.begin(), theta.end());
        const double f0 = value(x, t);
        for (int j = 0; j < dim; ++j) {
            const double step = 1e-6 * (1.0 + std::abs(t[static_cast<std::size_t>(j)]));
            const double saved = t[static_cast<std::size_t>(j)];
            t[static_cast<std::size_t>(j)] = saved + step;
            out[static_cast<std::size_t>(j)] = (value(x, t) - f0) / step;
            t[static_cast<std::size_t>(j)] = saved;
        }
    }
};

struct FitResult {
    std::vector<double> theta;
    double rss = 0.0;
    int iterations = 0;
    bool converged = false;
    /// RSS after every accepted step, starting at the initial point.
    std::vector<double> rss_trace;
};

namespace detail {
inline double rss_at(const ParametricModel& model, const RandomDesignSample& sample,
                     std::span<const double> theta) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double r = sample.y()[i] - model.value(sample.x()[i], theta);
        acc += r * r;
    }
    return acc;
}
} // namespace detail

/// Levenberg-Marquardt least squares for the parametric source model.
/// Damping grows x10 on rejected steps and shrinks /10 on accepted ones.
/// Convergence: relative RSS decrease < tol on an accepted step, or gradient
/// norm < tol. Exceeding max_iter returns converged = false with the best θ
/// found; it does not throw.
inline FitResult fit_ls(const ParametricModel& model, const RandomDesignSample& sample,
                        std::span<const double> theta0, int max_iter = 200, double tol = 1e-10) {
    if (model.dim < 1 || !model.value) throw ParameterError("fit_ls: invalid model");
    if (static_cast<int>(theta0.size()) != model.dim)
        throw ParameterError("fit_ls: theta0 dimension mismatch");
    if (sample.size() < static_cast<std::size_t>(model.dim))
        throw ParameterError("fit_ls: sample smaller than parameter dimension");

    const std::size_t n = sample.size();
    const int d = model.dim;
    std::vector<double> theta(theta0.begin(), theta0.end());

    FitResult res;
    res.rss = detail::rss_at(model, sample, theta);
    res.rss_trace.push_back(res.rss);

    double lambda = 1e-3;
    std::vector<double> jrow(static_cast<std::size_t>(d));
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it + 1;

        // assemble JtJ and Jt r
        std::vector<double> jtj(static_cast<std::size_t>(d * d), 0.0);
        std::vector<double> jtr(static_cast<std::size_t>(d), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = sample.x()[i];
            const double r = sample.y()[i] - model.value(x, theta);
            model.jacobian_at(x, theta, jrow);
            for (int a = 0; a < d; ++a) {
                jtr[static_cast<std::size_t>(a)] += jrow[static_cast<std::size_t>(a)] * r;
                for (int b = 0; b < d; ++b)
                    jtj[static_cast<std::size_t>(a * d + b)] +=
                        jrow[static_cast<std::size_t>(a)] * jrow[static_cast<std::size_t>(b)];
            }
        }

        double grad_norm = 0.0;
        for (int a = 0; a < d; ++a) grad_norm += 4.0 * jtr[static_cast<std::size_t>(a)] * jtr[static_cast<std::size_t>(a)];
        grad_norm = std::sqrt(grad_norm);
        if (grad_norm < tol) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            std::vector<double> damped(jtj);
            for (int a = 0; a < d; ++a) {
                const std::size_t idx = static_cast<std::size_t>(a * d + a);
                damped[idx] += lambda * (jtj[idx] > 0.0 ? jtj[idx] : 1.0);
            }
            std::vector<double> step;
            try {
                step = solve_dense(std::move(damped), jtr);
            } catch (const ParameterError&) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> cand(theta);
            for (int a = 0; a < d; ++a) cand[static_cast<std::size_t>(a)] += step[static_cast<std::size_t>(a)];
            const double cand_rss = detail::rss_at(model, sample, cand);
            if (std::isfinite(cand_rss) && cand_rss <= res.rss) {
                const double rel = res.rss > 0.0 ? (res.rss - cand_rss) / res.rss : 0.0;
                theta = std::move(cand);
                res.rss = cand_rss;
                res.rss_trace.push_back(cand_rss);
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (rel < tol) {
                    res.converged = true;
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) {
            // damping saturated: no descent direction left
            res.converged = true;
            break;
        }
        if (res.converged) break;
    }
    res.theta = std::move(theta);
    return res;
}

/// Numerical check for linearity of the model in θ (used to flag the
/// semiparametric path: a θ-linear model makes the sw-TLE free of θ).
inline bool model_is_linear_in_theta(const ParametricModel& model, const Interval& domain) {
    const int d = model.dim;
    std::vector<double> t1(static_cast<std::size_t>(d)), t2(static_cast<std::size_t>(d)),
        tsum(static_cast<std::size_t>(d)), zero(static_cast<std::size_t>(d), 0.0);
    for (int j = 0; j < d; ++j) {
        t1[static_cast<std::size_t>(j)] = 0.37 + 0.21 * j;
        t2[static_cast<std::size_t>(j)] = -0.59 + 0.13 * j;
        tsum[static_cast<std::size_t>(j)] = t1[static_cast<std::size_t>(j)] + t2[static_cast<std::size_t>(j)];
    }
    for (int p = 0; p < 5; ++p) {
        const double x = domain.lo + domain.length() * (p + 0.5) / 5.0;
        const double lhs = model.value(x, tsum) + model.value(x, zero);
        const double rhs = model.value(x, t1) + model.value(x, t2);
        const double scale = 1.0 + std::abs(lhs) + std::abs(rhs);
        if (std::abs(lhs - rhs) > 1e-8 * scale) return false;
    }
    return true;
}

} // namespace swtle
