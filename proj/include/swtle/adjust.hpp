#pragma once

#include "swtle/curve.hpp"
#include "swtle/errors.hpp"
#include "swtle/estimators.hpp"
#include "swtle/kernel.hpp"
#include "swtle/math.hpp"
#include "swtle/nls.hpp"
#include "swtle/sample.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace swtle {

/// Source and target/adjustment smoothing bandwidths (h^P, h^Q).
struct BandwidthPair {
    double h_p = 0.0;
    double h_q = 0.0;
};

/// Marker for "no source bandwidth applies" (semiparametric path). Kept
/// negative so no estimator can consume it by accident.
inline constexpr double bandwidth_not_applicable = -1.0;

/// Denominator guard for the adjustment-factor ratios plus the constant-shift
/// remedy for source functions that pass through zero.
struct GuardPolicy {
    double eps_den = 1e-10; ///< floor relative to the local kernel mass
    double shift_a = 0.0;   ///< added to source responses before fitting
};

/// Monomial basis phi_j(u) = u^j, j = 1..k; every phi_j(0) = 0.
struct BasisSpec {
    int k = 2;
};

enum class AdjustVariant {
    fixed_linear,
    fixed_basis,
    random_linear,
    random_basis,
    semiparametric,
    multi_source,
};

/// A fitted sw-TLE: the source curve(s), the adjustment factor(s) and their
/// pointwise combination. For basis variants `factors` holds the k coefficient
/// curves; for multi-source, one factor per source plus the simplex weights.
struct AdjustedEstimate {
    AdjustVariant variant;
    std::vector<CurveEstimate> sources;
    std::vector<CurveEstimate> factors;
    std::vector<double> weights;
    std::vector<double> theta;
    std::vector<std::string> notes;
    CurveEstimate final;

    const CurveEstimate& source_curve() const { return sources.front(); }
    const CurveEstimate& factor() const { return factors.front(); }
};

namespace detail {

inline void check_bandwidth(double h, const char* what) {
    if (!(h > 0.0)) throw ParameterError(std::string(what) + ": bandwidth must be positive");
}

inline void check_basis(const BasisSpec& basis) {
    if (basis.k < 1) throw ParameterError("BasisSpec: k must be >= 1");
    if (basis.k > 8) throw ParameterError("BasisSpec: k above the supported limit of 8");
}

inline double monomial(double u, int j) {
    double v = u;
    for (int p = 1; p < j; ++p) v *= u;
    return v; // u^j
}

/// Shared global quadrature grid on [0,1]: composite midpoint rule with
/// `cells` equal subintervals. Every fixed-design integral in this module is
/// accumulated on this one grid so that segment sums and full-interval sums
/// telescope consistently.
struct QuadGrid {
    int cells;
    explicit QuadGrid(int c) : cells(c) {
        if (c < 8) throw ParameterError("quadrature grid needs at least 8 cells");
    }
    double width() const { return 1.0 / cells; }
    double midpoint(int g) const { return (g + 0.5) / cells; }
};

inline std::shared_ptr<const std::vector<double>> curve_on_grid(const CurveEstimate& curve,
                                                                const QuadGrid& grid) {
    auto vals = std::make_shared<std::vector<double>>();
    vals->reserve(static_cast<std::size_t>(grid.cells));
    for (int g = 0; g < grid.cells; ++g) vals->push_back(curve.value(grid.midpoint(g)));
    return vals;
}

/// Linear fixed-design adjustment factor at one point, Gram-free form:
/// numerator per-segment integrals and denominator on the shared grid.
inline double xi_value(std::span<const double> src_grid, const QuadGrid& grid,
                       const FixedDesignSample& target, const Kernel& kernel, double h_q, double x,
                       const GuardPolicy& guard) {
    const auto s = target.s();
    const auto y = target.y();
    const double w = grid.width();
    double num = 0.0, den = 0.0, mass = 0.0;
    std::size_t seg = 0;
    double seg_acc = 0.0;
    for (int g = 0; g < grid.cells; ++g) {
        const double t = grid.midpoint(g);
        while (seg + 1 < target.size() && t > s[seg + 1]) {
            num += y[seg] * seg_acc;
            seg_acc = 0.0;
            ++seg;
        }
        const double kv = w * kernel.scaled(t - x, h_q);
        seg_acc += kv * src_grid[static_cast<std::size_t>(g)];
        den += kv * src_grid[static_cast<std::size_t>(g)] * src_grid[static_cast<std::size_t>(g)];
        mass += kv;
    }
    num += y[seg] * seg_acc;
    if (!(mass > 0.0) || den < guard.eps_den * mass) throw OrthogonalAtXError(x);
    return num / den;
}

/// Basis fixed-design coefficients at one point: k x k Gram solve on the
/// shared grid. Throws DegenerateBasisError when the pivot-ratio condition
/// estimate exceeds 1e12.
inline std::vector<double> xi_basis_coeffs(std::span<const double> src_grid, const QuadGrid& grid,
                                           const FixedDesignSample& target, const Kernel& kernel,
                                           double h_q, double x, const BasisSpec& basis,
                                           [[maybe_unused]] const GuardPolicy& guard) {
    const int k = basis.k;
    const auto s = target.s();
    const auto y = target.y();
    const double w = grid.width();
    std::vector<double> gram(static_cast<std::size_t>(k * k), 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(k), 0.0);
    std::vector<double> seg_acc(static_cast<std::size_t>(k), 0.0);
    std::vector<double> phi(static_cast<std::size_t>(k));
    double mass = 0.0;
    std::size_t seg = 0;
    for (int g = 0; g < grid.cells; ++g) {
        const double t = grid.midpoint(g);
        while (seg + 1 < target.size() && t > s[seg + 1]) {
            for (int a = 0; a < k; ++a) {
                rhs[static_cast<std::size_t>(a)] += y[seg] * seg_acc[static_cast<std::size_t>(a)];
                seg_acc[static_cast<std::size_t>(a)] = 0.0;
            }
            ++seg;
        }
        const double kv = w * kernel.scaled(t - x, h_q);
        mass += kv;
        const double u = src_grid[static_cast<std::size_t>(g)];
        for (int a = 0; a < k; ++a) phi[static_cast<std::size_t>(a)] = monomial(u, a + 1);
        for (int a = 0; a < k; ++a) {
            seg_acc[static_cast<std::size_t>(a)] += kv * phi[static_cast<std::size_t>(a)];
            for (int b = 0; b < k; ++b)
                gram[static_cast<std::size_t>(a * k + b)] +=
                    kv * phi[static_cast<std::size_t>(a)] * phi[static_cast<std::size_t>(b)];
        }
    }
    for (int a = 0; a < k; ++a) rhs[static_cast<std::size_t>(a)] += y[seg] * seg_acc[static_cast<std::size_t>(a)];
    if (!(mass > 0.0)) throw OrthogonalAtXError(x);
    double cond = 0.0;
    std::vector<double> coef;
    try {
        coef = solve_dense(std::move(gram), std::move(rhs), &cond);
    } catch (const ParameterError&) {
        throw DegenerateBasisError(x, k);
    }
    if (cond > 1e12) throw DegenerateBasisError(x, k);
    return coef;
}

/// Random-design adjustment factor at one point: exact finite-sum ratio over
/// the target observations, optionally skipping one (leave-one-out).
inline double eta_value(std::span<const double> src_at_x, const RandomDesignSample& target,
                        const Kernel& kernel, double h_q, double x, const GuardPolicy& guard,
                        std::ptrdiff_t skip = -1) {
    const auto xs = target.x();
    const auto ys = target.y();
    double num = 0.0, den = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (static_cast<std::ptrdiff_t>(i) == skip) continue;
        const double w = kernel.scaled(xs[i] - x, h_q);
        const double c = src_at_x[i];
        num += w * ys[i] * c;
        den += w * c * c;
        mass += w;
    }
    if (!(mass > 0.0) || den < guard.eps_den * mass) throw OrthogonalAtXError(x);
    return num / den;
}

/// Random-design basis coefficients at one point (finite-sum Gram solve).
inline std::vector<double> eta_basis_coeffs(std::span<const double> src_at_x,
                                            const RandomDesignSample& target, const Kernel& kernel,
                                            double h_q, double x, const BasisSpec& basis,
                                            std::ptrdiff_t skip = -1) {
    const int k = basis.k;
    const auto xs = target.x();
    const auto ys = target.y();
    std::vector<double> gram(static_cast<std::size_t>(k * k), 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(k), 0.0);
    std::vector<double> phi(static_cast<std::size_t>(k));
    double mass = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (static_cast<std::ptrdiff_t>(i) == skip) continue;
        const double w = kernel.scaled(xs[i] - x, h_q);
        mass += w;
        for (int a = 0; a < k; ++a) phi[static_cast<std::size_t>(a)] = monomial(src_at_x[i], a + 1);
        for (int a = 0; a < k; ++a) {
            rhs[static_cast<std::size_t>(a)] += w * ys[i] * phi[static_cast<std::size_t>(a)];
            for (int b = 0; b < k; ++b)
                gram[static_cast<std::size_t>(a * k + b)] +=
                    w * phi[static_cast<std::size_t>(a)] * phi[static_cast<std::size_t>(b)];
        }
    }
    if (!(mass > 0.0)) throw OrthogonalAtXError(x);
    double cond = 0.0;
    std::vector<double> coef;
    try {
        coef = solve_dense(std::move(gram), std::move(rhs), &cond);
    } catch (const ParameterError&) {
        throw DegenerateBasisError(x, k);
    }
    if (cond > 1e12) throw DegenerateBasisError(x, k);
    return coef;
}

inline std::shared_ptr<const std::vector<double>> curve_at(const CurveEstimate& curve,
                                                           std::span<const double> xs) {
    auto vals = std::make_shared<std::vector<double>>();
    vals->reserve(xs.size());
    for (double x : xs) vals->push_back(curve.value(x));
    return vals;
}

} // namespace detail

/// Estimated fixed-design adjustment factor ξ̂(x): per-segment response
/// integrals against the source curve over the denominator ∫K(r̂^P)², both on
/// the shared global quadrature grid.
inline double xi_hat_fixed(const CurveEstimate& source_curve, const FixedDesignSample& target,
                           const Kernel& kernel, double h_q, double x, const GuardPolicy& guard,
                           int quadrature_cells = 2048) {
    detail::check_bandwidth(h_q, "xi_hat_fixed");
    detail::QuadGrid grid(quadrature_cells);
    auto src_grid = detail::curve_on_grid(source_curve, grid);
    return detail::xi_value(*src_grid, grid, target, kernel, h_q, x, guard);
}

/// Fixed-design sw-TLE: r̂_a(x) = r̂^P(x) · ξ̂(x) with a G-M source fit.
inline AdjustedEstimate sw_tle_fixed(const FixedDesignSample& source, const FixedDesignSample& target,
                                     const Kernel& kernel, BandwidthPair bw, const GuardPolicy& guard,
                                     int quadrature_cells = 2048) {
    detail::check_bandwidth(bw.h_p, "sw_tle_fixed h_p");
    detail::check_bandwidth(bw.h_q, "sw_tle_fixed h_q");
    CurveEstimate src = gm_estimate(source.shifted(guard.shift_a), kernel, bw.h_p);
    detail::QuadGrid grid(quadrature_cells);
    auto src_grid = detail::curve_on_grid(src, grid);
    const double h_q = bw.h_q;
    CurveEstimate xi(
        [src_grid, grid, target, kernel, h_q, guard](double x) {
            return detail::xi_value(*src_grid, grid, target, kernel, h_q, x, guard);
        },
        Interval{0.0, 1.0}, {bw.h_q});
    CurveEstimate final(
        [src, xi](double x) { return src.value(x) * xi.value(x); }, Interval{0.0, 1.0},
        {bw.h_p, bw.h_q});
    return AdjustedEstimate{AdjustVariant::fixed_linear, {src}, {xi}, {}, {}, {}, final};
}

/// Fixed-design basis sw-TLE: r̂_ak(x) = ξ̂_k(x)ᵀ φ̂_k(x) with the k x k local
/// Gram solve of the monomial basis.
inline AdjustedEstimate basis_adjust_fixed(const FixedDesignSample& source,
                                           const FixedDesignSample& target, const Kernel& kernel,
                                           BandwidthPair bw, const BasisSpec& basis,
                                           const GuardPolicy& guard, int quadrature_cells = 2048) {
    detail::check_bandwidth(bw.h_p, "basis_adjust_fixed h_p");
    detail::check_bandwidth(bw.h_q, "basis_adjust_fixed h_q");
    detail::check_basis(basis);
    CurveEstimate src = gm_estimate(source.shifted(guard.shift_a), kernel, bw.h_p);
    detail::QuadGrid grid(quadrature_cells);
    auto src_grid = detail::curve_on_grid(src, grid);
    const double h_q = bw.h_q;
    std::vector<CurveEstimate> factors;
    for (int a = 0; a < basis.k; ++a) {
        factors.emplace_back(
            [src_grid, grid, target, kernel, h_q, basis, guard, a](double x) {
                return detail::xi_basis_coeffs(*src_grid, grid, target, kernel, h_q, x, basis,
                                               guard)[static_cast<std::size_t>(a)];
            },
            Interval{0.0, 1.0}, std::vector<double>{bw.h_q});
    }
    CurveEstimate final(
        [src_grid, grid, target, kernel, h_q, basis, guard, src](double x) {
            auto coef = detail::xi_basis_coeffs(*src_grid, grid, target, kernel, h_q, x, basis, guard);
            const double u = src.value(x);
            double acc = 0.0;
            for (int a = 0; a < basis.k; ++a)
                acc += coef[static_cast<std::size_t>(a)] * detail::monomial(u, a + 1);
            return acc;
        },
        Interval{0.0, 1.0}, {bw.h_p, bw.h_q});
    return AdjustedEstimate{AdjustVariant::fixed_basis, {src}, std::move(factors), {}, {}, {}, final};
}

/// Estimated random-design adjustment factor η̂(x): exact finite-sum ratio.
inline double eta_hat_random(const CurveEstimate& source_curve, const RandomDesignSample& target,
                             const Kernel& kernel, double h_q, double x, const GuardPolicy& guard) {
    detail::check_bandwidth(h_q, "eta_hat_random");
    if (target.empty()) throw ParameterError("eta_hat_random: empty target");
    auto src = detail::curve_at(source_curve, target.x());
    return detail::eta_value(*src, target, kernel, h_q, x, guard);
}

/// Random-design sw-TLE: r̂_b(x) = r̂^P(x) · η̂(x) with an N-W source fit.
inline AdjustedEstimate sw_tle_random(const RandomDesignSample& source,
                                      const RandomDesignSample& target, const Kernel& kernel,
                                      BandwidthPair bw, const GuardPolicy& guard) {
    detail::check_bandwidth(bw.h_p, "sw_tle_random h_p");
    detail::check_bandwidth(bw.h_q, "sw_tle_random h_q");
    CurveEstimate src = nw_estimate(source.shifted(guard.shift_a), kernel, bw.h_p);
    auto src_at_target = detail::curve_at(src, target.x());
    const double h_q = bw.h_q;
    CurveEstimate eta(
        [src_at_target, target, kernel, h_q, guard](double x) {
            return detail::eta_value(*src_at_target, target, kernel, h_q, x, guard);
        },
        target.domain(), {bw.h_q});
    CurveEstimate final(
        [src, eta](double x) { return src.value(x) * eta.value(x); }, target.domain(),
        {bw.h_p, bw.h_q});
    return AdjustedEstimate{AdjustVariant::random_linear, {src}, {eta}, {}, {}, {}, final};
}

/// Random-design basis sw-TLE: r̂_bk(x) = η̂_k(x)ᵀ φ̂_k(x), finite-sum Gram.
inline AdjustedEstimate basis_adjust_random(const RandomDesignSample& source,
                                            const RandomDesignSample& target, const Kernel& kernel,
                                            BandwidthPair bw, const BasisSpec& basis,
                                            const GuardPolicy& guard) {
    detail::check_bandwidth(bw.h_p, "basis_adjust_random h_p");
    detail::check_bandwidth(bw.h_q, "basis_adjust_random h_q");
    detail::check_basis(basis);
    CurveEstimate src = nw_estimate(source.shifted(guard.shift_a), kernel, bw.h_p);
    auto src_at_target = detail::curve_at(src, target.x());
    const double h_q = bw.h_q;
    std::vector<CurveEstimate> factors;
    for (int a = 0; a < basis.k; ++a) {
        factors.emplace_back(
            [src_at_target, target, kernel, h_q, basis, a](double x) {
                return detail::eta_basis_coeffs(*src_at_target, target, kernel, h_q, x,
                                                basis)[static_cast<std::size_t>(a)];
            },
            target.domain(), std::vector<double>{bw.h_q});
    }
    CurveEstimate final(
        [src_at_target, target, kernel, h_q, basis, src](double x) {
            auto coef = detail::eta_basis_coeffs(*src_at_target, target, kernel, h_q, x, basis);
            const double u = src.value(x);
            double acc = 0.0;
            for (int a = 0; a < basis.k; ++a)
                acc += coef[static_cast<std::size_t>(a)] * detail::monomial(u, a + 1);
            return acc;
        },
        target.domain(), {bw.h_p, bw.h_q});
    return AdjustedEstimate{AdjustVariant::random_basis, {src}, std::move(factors), {}, {}, {}, final};
}

/// Semiparametric adjustment factor α̂(x) at a fitted parameter vector.
inline double alpha_hat_semiparam(std::span<const double> theta_hat, const ParametricModel& model,
                                  const RandomDesignSample& target, const Kernel& kernel, double h_q,
                                  double x, const GuardPolicy& guard) {
    detail::check_bandwidth(h_q, "alpha_hat_semiparam");
    if (target.empty()) throw ParameterError("alpha_hat_semiparam: empty target");
    std::vector<double> th(theta_hat.begin(), theta_hat.end());
    auto src = std::make_shared<std::vector<double>>();
    src->reserve(target.size());
    for (double xv : target.x()) src->push_back(model.value(xv, th) + guard.shift_a);
    return detail::eta_value(*src, target, kernel, h_q, x, guard);
}

struct SemiparamOptions {
    std::vector<double> theta0;
    int max_iter = 200;
    double tol = 1e-10;
};

/// Semiparametric sw-TLE: θ̂ by least squares on the source, then
/// r̂_c(x) = r^P(x, θ̂) · α̂(x). A model linear in θ is accepted but flagged
/// (the estimate is then free of θ). Non-convergent fits throw.
inline AdjustedEstimate sw_tle_semiparam(const RandomDesignSample& source, const ParametricModel& model,
                                         const RandomDesignSample& target, const Kernel& kernel,
                                         double h_q, const GuardPolicy& guard,
                                         const SemiparamOptions& options) {
    detail::check_bandwidth(h_q, "sw_tle_semiparam");
    FitResult fit = fit_ls(model, source, options.theta0, options.max_iter, options.tol);
    if (!fit.converged)
        throw NonConvergenceError("sw_tle_semiparam: source least-squares fit did not converge in " +
                                  std::to_string(fit.iterations) + " iterations");
    std::vector<std::string> notes;
    if (model_is_linear_in_theta(model, source.domain()))
        notes.push_back("model is linear in theta; the semiparametric sw-TLE is free of theta");

    auto theta = std::make_shared<const std::vector<double>>(fit.theta);
    const double shift = guard.shift_a;
    CurveEstimate src(
        [theta, model, shift](double x) { return model.value(x, *theta) + shift; }, target.domain());
    auto src_at_target = detail::curve_at(src, target.x());
    CurveEstimate alpha(
        [src_at_target, target, kernel, h_q, guard](double x) {
            return detail::eta_value(*src_at_target, target, kernel, h_q, x, guard);
        },
        target.domain(), {h_q});
    CurveEstimate final(
        [src, alpha](double x) { return src.value(x) * alpha.value(x); }, target.domain(), {h_q});
    return AdjustedEstimate{AdjustVariant::semiparametric, {src},      {alpha}, {}, fit.theta,
                            std::move(notes),              final};
}

/// One source model for the multi-source combination. A parametric entry uses
/// the semiparametric path; a nonparametric one the N-W path with `h_p`
/// (selected by own-data CV when absent).
struct MultiSource {
    RandomDesignSample sample;
    std::optional<ParametricModel> model{};
    SemiparamOptions options{};
    std::optional<double> h_p{};
};

namespace detail {

/// All weight vectors on the simplex with coordinates in steps of `step`.
inline std::vector<std::vector<double>> simplex_grid(std::size_t m, double step) {
    if (!(step > 0.0 && step <= 1.0)) throw ParameterError("simplex grid: step outside (0, 1]");
    const int levels = static_cast<int>(std::lround(1.0 / step));
    if (std::abs(levels * step - 1.0) > 1e-9)
        throw ParameterError("simplex grid: step must divide 1");
    std::vector<std::vector<double>> out;
    std::vector<int> counts(m, 0);
    // enumerate compositions of `levels` into m parts
    std::function<void(std::size_t, int)> rec = [&](std::size_t j, int remaining) {
        if (j + 1 == m) {
            counts[j] = remaining;
            std::vector<double> w(m);
            for (std::size_t a = 0; a < m; ++a) w[a] = counts[a] * step;
            out.push_back(std::move(w));
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[j] = c;
            rec(j + 1, remaining - c);
        }
    };
    rec(0, levels);
    return out;
}

inline double distance_to_uniform(std::span<const double> w) {
    const double u = 1.0 / static_cast<double>(w.size());
    double acc = 0.0;
    for (double v : w) acc += (v - u) * (v - u);
    return acc;
}

} // namespace detail

/// Multi-source sw-TLE (Supplement A.3): per-source adjusted curves combined
/// with simplex weights chosen by grid search on the target residual
/// criterion; ties break toward the uniform weight vector.
inline AdjustedEstimate sw_tle_multi(const std::vector<MultiSource>& sources,
                                     const RandomDesignSample& target, const Kernel& kernel,
                                     double h_q, const GuardPolicy& guard,
                                     double weight_grid_step = 0.01) {
    if (sources.size() < 2) throw ParameterError("sw_tle_multi: need at least 2 sources");
    detail::check_bandwidth(h_q, "sw_tle_multi");
    if (target.size() < 1) throw ParameterError("sw_tle_multi: empty target");

    std::vector<CurveEstimate> source_curves, factor_curves, final_curves;
    std::vector<std::string> notes;
    for (const auto& entry : sources) {
        AdjustedEstimate fitted = [&] {
            if (entry.model) {
                return sw_tle_semiparam(entry.sample, *entry.model, target, kernel, h_q, guard,
                                        entry.options);
            }
            double h_p = entry.h_p ? *entry.h_p : 0.0;
            if (!entry.h_p) {
                auto candidates = default_bandwidth_candidates(entry.sample.domain());
                h_p = nw_select_bandwidth(entry.sample, kernel, candidates);
            }
            return sw_tle_random(entry.sample, target, kernel, BandwidthPair{h_p, h_q}, guard);
        }();
        source_curves.push_back(fitted.sources.front());
        factor_curves.push_back(fitted.factors.front());
        final_curves.push_back(fitted.final);
        for (auto& n : fitted.notes) notes.push_back(std::move(n));
    }

    // per-source adjusted values at the target covariates drive the weights
    const std::size_t m = sources.size();
    const std::size_t n = target.size();
    std::vector<std::vector<double>> pred(m);
    for (std::size_t j = 0; j < m; ++j) pred[j] = final_curves[j].values(target.x());

    auto grid = detail::simplex_grid(m, weight_grid_step);
    std::vector<double> crits(grid.size());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const auto& w = grid[gi];
        double crit = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double fit = 0.0;
            for (std::size_t j = 0; j < m; ++j) fit += w[j] * pred[j][i];
            const double r = target.y()[i] - fit;
            crit += r * r;
        }
        crits[gi] = crit;
    }
    const double min_crit = *std::min_element(crits.begin(), crits.end());
    // ties (up to rounding noise of the flat criterion) resolve toward uniform
    const double tie_cut = min_crit + 1e-12 * min_crit + 1e-15;
    std::size_t best_gi = 0;
    bool have = false;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        if (crits[gi] > tie_cut) continue;
        if (!have || detail::distance_to_uniform(grid[gi]) < detail::distance_to_uniform(grid[best_gi])) {
            best_gi = gi;
            have = true;
        }
    }
    std::vector<double> best_w = grid[best_gi];

    auto weights = std::make_shared<const std::vector<double>>(best_w);
    auto finals = std::make_shared<const std::vector<CurveEstimate>>(final_curves);
    CurveEstimate combined(
        [weights, finals](double x) {
            double acc = 0.0;
            for (std::size_t j = 0; j < weights->size(); ++j)
                acc += (*weights)[j] * (*finals)[j].value(x);
            return acc;
        },
        target.domain(), {h_q});
    return AdjustedEstimate{AdjustVariant::multi_source,
                            std::move(source_curves),
                            std::move(factor_curves),
                            best_w,
                            {},
                            std::move(notes),
                            combined};
}

} // namespace swtle
