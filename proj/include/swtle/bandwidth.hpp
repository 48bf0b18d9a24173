#pragma once

#include "swtle/adjust.hpp"
#include "swtle/errors.hpp"
#include "swtle/estimators.hpp"
#include "swtle/kernel.hpp"
#include "swtle/sample.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace swtle {

/// Candidate bandwidths for the joint (h^P, h^Q) grid search.
struct BandwidthGrid {
    std::vector<double> h_p_values;
    std::vector<double> h_q_values;

    static BandwidthGrid log_spaced(const Interval& domain, int count = 20, double lo_frac = 0.02,
                                    double hi_frac = 0.5) {
        auto v = default_bandwidth_candidates(domain, count, lo_frac, hi_frac);
        return BandwidthGrid{v, v};
    }

    /// Grid for the semiparametric path: only h^Q is searched; h^P carries the
    /// not-applicable marker.
    static BandwidthGrid h_q_only(std::vector<double> h_q) {
        return BandwidthGrid{{bandwidth_not_applicable}, std::move(h_q)};
    }

    void validate() const {
        if (h_p_values.empty() || h_q_values.empty())
            throw ParameterError("BandwidthGrid: empty candidate set");
        const bool marker_only = h_p_values.size() == 1 && h_p_values[0] == bandwidth_not_applicable;
        if (!marker_only) {
            for (std::size_t i = 0; i < h_p_values.size(); ++i) {
                if (!(h_p_values[i] > 0.0)) throw ParameterError("BandwidthGrid: non-positive h_p");
                if (i > 0 && h_p_values[i] <= h_p_values[i - 1])
                    throw ParameterError("BandwidthGrid: h_p values must be strictly ascending");
            }
        }
        for (std::size_t i = 0; i < h_q_values.size(); ++i) {
            if (!(h_q_values[i] > 0.0)) throw ParameterError("BandwidthGrid: non-positive h_q");
            if (i > 0 && h_q_values[i] <= h_q_values[i - 1])
                throw ParameterError("BandwidthGrid: h_q values must be strictly ascending");
        }
    }
};

struct CvScore {
    double value = 0.0;
    int penalized_folds = 0;
};

struct BandwidthSelection {
    BandwidthPair selected;
    /// surface[i_p][i_q] — CV score for each grid cell.
    std::vector<std::vector<double>> surface;
    CvScore score_at_selected;
};

// ---------------------------------------------------------------------------
// CV recipes. A recipe splits estimator construction into a source stage
// (depends on h^P only; reused across folds per the leave-one-out definition,
// which resamples D^Q alone) and an adjustment stage (depends on h^Q), and
// predicts the left-out response. Folds that raise the orthogonality or
// degenerate-basis guard are penalized with the worst-case residual Y_i².
// ---------------------------------------------------------------------------

/// Linear random-design sw-TLE (N-W source fit + η̂ adjustment).
struct SwTleRandomRecipe {
    Kernel kernel;
    GuardPolicy guard;

    using SourceData = RandomDesignSample;
    using TargetData = RandomDesignSample;
    static constexpr bool adjust_needs_source = false;

    struct SourceStage {
        std::vector<double> src_at_target;
    };
    struct AdjustStage {
        double h_q = 0.0;
        std::vector<double> kmat; // row-major n x n kernel weights K_hq(X_j - X_i)
    };

    SourceStage prepare_source(const SourceData& source, const TargetData& target, double h_p) const {
        CurveEstimate src = nw_estimate(source.shifted(guard.shift_a), kernel, h_p);
        return SourceStage{src.values(target.x())};
    }

    AdjustStage prepare_adjust(const SourceStage&, const TargetData& target, double h_q) const {
        const std::size_t n = target.size();
        AdjustStage st;
        st.h_q = h_q;
        st.kmat.resize(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                st.kmat[i * n + j] = kernel.scaled(target.x()[j] - target.x()[i], h_q);
        return st;
    }

    double predict_without(const SourceStage& src, const AdjustStage& adj, const TargetData& target,
                           std::size_t skip) const {
        const std::size_t n = target.size();
        const double* w = &adj.kmat[skip * n];
        double num = 0.0, den = 0.0, mass = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == skip) continue;
            const double c = src.src_at_target[j];
            num += w[j] * target.y()[j] * c;
            den += w[j] * c * c;
            mass += w[j];
        }
        if (!(mass > 0.0) || den < guard.eps_den * mass)
            throw OrthogonalAtXError(target.x()[skip]);
        return src.src_at_target[skip] * num / den;
    }
};

/// Basis random-design sw-TLE (k x k finite-sum Gram solve per fold).
struct BasisRandomRecipe {
    Kernel kernel;
    BasisSpec basis;
    GuardPolicy guard;

    using SourceData = RandomDesignSample;
    using TargetData = RandomDesignSample;
    static constexpr bool adjust_needs_source = false;

    using SourceStage = SwTleRandomRecipe::SourceStage;
    using AdjustStage = SwTleRandomRecipe::AdjustStage;

    SourceStage prepare_source(const SourceData& source, const TargetData& target, double h_p) const {
        CurveEstimate src = nw_estimate(source.shifted(guard.shift_a), kernel, h_p);
        return SourceStage{src.values(target.x())};
    }

    AdjustStage prepare_adjust(const SourceStage& s, const TargetData& target, double h_q) const {
        return SwTleRandomRecipe{kernel, guard}.prepare_adjust(s, target, h_q);
    }

    double predict_without(const SourceStage& src, const AdjustStage& adj, const TargetData& target,
                           std::size_t skip) const {
        auto coef = detail::eta_basis_coeffs(src.src_at_target, target, kernel, adj.h_q,
                                             target.x()[skip], basis,
                                             static_cast<std::ptrdiff_t>(skip));
        const double u = src.src_at_target[skip];
        double acc = 0.0;
        for (int a = 0; a < basis.k; ++a)
            acc += coef[static_cast<std::size_t>(a)] * detail::monomial(u, a + 1);
        return acc;
    }
};

/// Linear fixed-design sw-TLE (G-M source fit + ξ̂ on the shared grid). The
/// left-out point's segment merges into its neighbours' partition.
struct SwTleFixedRecipe {
    Kernel kernel;
    GuardPolicy guard;
    int quadrature_cells = 2048;

    using SourceData = FixedDesignSample;
    using TargetData = FixedDesignSample;
    static constexpr bool adjust_needs_source = false;

    struct SourceStage {
        std::shared_ptr<const std::vector<double>> src_grid;
        std::vector<double> src_at_target;
    };
    struct AdjustStage {
        double h_q = 0.0;
        std::vector<FixedDesignSample> loo;
    };

    SourceStage prepare_source(const SourceData& source, const TargetData& target, double h_p) const {
        CurveEstimate src = gm_estimate(source.shifted(guard.shift_a), kernel, h_p);
        detail::QuadGrid grid(quadrature_cells);
        return SourceStage{detail::curve_on_grid(src, grid), src.values(target.x())};
    }

    AdjustStage prepare_adjust(const SourceStage&, const TargetData& target, double h_q) const {
        AdjustStage st;
        st.h_q = h_q;
        st.loo.reserve(target.size());
        for (std::size_t i = 0; i < target.size(); ++i) st.loo.push_back(target.without(i));
        return st;
    }

    double predict_without(const SourceStage& src, const AdjustStage& adj, const TargetData& target,
                           std::size_t skip) const {
        detail::QuadGrid grid(quadrature_cells);
        const double xi = detail::xi_value(*src.src_grid, grid, adj.loo[skip], kernel, adj.h_q,
                                           target.x()[skip], guard);
        return src.src_at_target[skip] * xi;
    }
};

/// Basis fixed-design sw-TLE.
struct BasisFixedRecipe {
    Kernel kernel;
    BasisSpec basis;
    GuardPolicy guard;
    int quadrature_cells = 2048;

    using SourceData = FixedDesignSample;
    using TargetData = FixedDesignSample;
    static constexpr bool adjust_needs_source = false;

    using SourceStage = SwTleFixedRecipe::SourceStage;
    using AdjustStage = SwTleFixedRecipe::AdjustStage;

    SourceStage prepare_source(const SourceData& source, const TargetData& target, double h_p) const {
        return SwTleFixedRecipe{kernel, guard, quadrature_cells}.prepare_source(source, target, h_p);
    }
    AdjustStage prepare_adjust(const SourceStage& s, const TargetData& target, double h_q) const {
        return SwTleFixedRecipe{kernel, guard, quadrature_cells}.prepare_adjust(s, target, h_q);
    }

    double predict_without(const SourceStage& src, const AdjustStage& adj, const TargetData& target,
                           std::size_t skip) const {
        detail::QuadGrid grid(quadrature_cells);
        auto coef = detail::xi_basis_coeffs(*src.src_grid, grid, adj.loo[skip], kernel, adj.h_q,
                                            target.x()[skip], basis, guard);
        const double u = src.src_at_target[skip];
        double acc = 0.0;
        for (int a = 0; a < basis.k; ++a)
            acc += coef[static_cast<std::size_t>(a)] * detail::monomial(u, a + 1);
        return acc;
    }
};

/// Semiparametric sw-TLE: θ̂ comes from the full source fit; only h^Q is
/// searched (use BandwidthGrid::h_q_only).
struct SemiparamRecipe {
    const ParametricModel* model = nullptr;
    SemiparamOptions options;
    Kernel kernel;
    GuardPolicy guard;

    using SourceData = RandomDesignSample;
    using TargetData = RandomDesignSample;
    static constexpr bool adjust_needs_source = false;

    using SourceStage = SwTleRandomRecipe::SourceStage;
    using AdjustStage = SwTleRandomRecipe::AdjustStage;

    SourceStage prepare_source(const SourceData& source, const TargetData& target,
                               double /*h_p: not applicable*/) const {
        FitResult fit = fit_ls(*model, source, options.theta0, options.max_iter, options.tol);
        if (!fit.converged)
            throw NonConvergenceError("SemiparamRecipe: source least-squares fit did not converge");
        SourceStage st;
        st.src_at_target.reserve(target.size());
        for (double x : target.x()) st.src_at_target.push_back(model->value(x, fit.theta) + guard.shift_a);
        return st;
    }

    AdjustStage prepare_adjust(const SourceStage& s, const TargetData& target, double h_q) const {
        return SwTleRandomRecipe{kernel, guard}.prepare_adjust(s, target, h_q);
    }

    double predict_without(const SourceStage& src, const AdjustStage& adj, const TargetData& target,
                           std::size_t skip) const {
        return SwTleRandomRecipe{kernel, guard}.predict_without(src, adj, target, skip);
    }
};

/// Multi-source sw-TLE: per-source bandwidths are fixed inside the entries;
/// only the shared h^Q is searched. For every candidate h^Q the simplex
/// weights are chosen on the full target data, then held fixed across folds.
struct MultiSwTleRecipe {
    Kernel kernel;
    GuardPolicy guard;
    double weight_grid_step = 0.01;

    using SourceData = std::vector<MultiSource>;
    using TargetData = RandomDesignSample;
    static constexpr bool adjust_needs_source = true;

    struct SourceStage {
        std::vector<std::vector<double>> src_at_target; // per source
    };
    struct AdjustStage {
        double h_q = 0.0;
        std::vector<double> kmat;
        std::vector<double> weights;
    };

    SourceStage prepare_source(const SourceData& sources, const TargetData& target,
                               double /*h_p: per-source*/) const {
        if (sources.size() < 2) throw ParameterError("MultiSwTleRecipe: need at least 2 sources");
        SourceStage st;
        for (const auto& entry : sources) {
            std::vector<double> vals;
            if (entry.model) {
                FitResult fit = fit_ls(*entry.model, entry.sample, entry.options.theta0,
                                       entry.options.max_iter, entry.options.tol);
                if (!fit.converged)
                    throw NonConvergenceError("MultiSwTleRecipe: source fit did not converge");
                vals.reserve(target.size());
                for (double x : target.x()) vals.push_back(entry.model->value(x, fit.theta) + guard.shift_a);
            } else {
                double h_p = entry.h_p ? *entry.h_p : 0.0;
                if (!entry.h_p) {
                    auto candidates = default_bandwidth_candidates(entry.sample.domain());
                    h_p = nw_select_bandwidth(entry.sample, kernel, candidates);
                }
                CurveEstimate src = nw_estimate(entry.sample.shifted(guard.shift_a), kernel, h_p);
                vals = src.values(target.x());
            }
            st.src_at_target.push_back(std::move(vals));
        }
        return st;
    }

    AdjustStage prepare_adjust(const SourceStage& src, const TargetData& target, double h_q) const {
        const std::size_t n = target.size();
        const std::size_t m = src.src_at_target.size();
        AdjustStage st;
        st.h_q = h_q;
        st.kmat.resize(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                st.kmat[i * n + j] = kernel.scaled(target.x()[j] - target.x()[i], h_q);

        // full-sample per-source predictions at the target covariates
        std::vector<std::vector<double>> pred(m, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            const double* w = &st.kmat[i * n];
            for (std::size_t j = 0; j < m; ++j) {
                double num = 0.0, den = 0.0, mass = 0.0;
                const auto& c = src.src_at_target[j];
                for (std::size_t t = 0; t < n; ++t) {
                    num += w[t] * target.y()[t] * c[t];
                    den += w[t] * c[t] * c[t];
                    mass += w[t];
                }
                pred[j][i] = (!(mass > 0.0) || den < guard.eps_den * mass)
                                 ? 0.0 // orthogonal here; the fold itself will be penalized
                                 : c[i] * num / den;
            }
        }
        auto simplex = detail::simplex_grid(m, weight_grid_step);
        double best = 0.0;
        std::size_t best_gi = 0;
        bool have = false;
        for (std::size_t gi = 0; gi < simplex.size(); ++gi) {
            double crit = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double fit = 0.0;
                for (std::size_t j = 0; j < m; ++j) fit += simplex[gi][j] * pred[j][i];
                const double r = target.y()[i] - fit;
                crit += r * r;
            }
            const bool better = !have || crit < best * (1.0 - 1e-12) - 1e-300;
            const bool tie = have && crit <= best * (1.0 + 1e-12) + 1e-300;
            if (better ||
                (tie && detail::distance_to_uniform(simplex[gi]) <
                            detail::distance_to_uniform(simplex[best_gi]))) {
                best = better ? crit : best;
                best_gi = gi;
                have = true;
            }
        }
        st.weights = simplex[best_gi];
        return st;
    }

    double predict_without(const SourceStage& src, const AdjustStage& adj, const TargetData& target,
                           std::size_t skip) const {
        const std::size_t n = target.size();
        const std::size_t m = src.src_at_target.size();
        const double* w = &adj.kmat[skip * n];
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const auto& c = src.src_at_target[j];
            double num = 0.0, den = 0.0, mass = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                if (t == skip) continue;
                num += w[t] * target.y()[t] * c[t];
                den += w[t] * c[t] * c[t];
                mass += w[t];
            }
            if (!(mass > 0.0) || den < guard.eps_den * mass)
                throw OrthogonalAtXError(target.x()[skip]);
            acc += adj.weights[j] * c[skip] * num / den;
        }
        return acc;
    }
};

// ---------------------------------------------------------------------------
// CV engine
// ---------------------------------------------------------------------------

namespace detail {

template <class Recipe>
CvScore cv_fold_loop(const Recipe& recipe, const typename Recipe::SourceStage& stage,
                     const typename Recipe::AdjustStage& adj,
                     const typename Recipe::TargetData& target) {
    CvScore out;
    double acc = 0.0;
    const std::size_t n = target.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = target.y()[i];
        double r = 0.0;
        try {
            r = yi - recipe.predict_without(stage, adj, target, i);
        } catch (const OrthogonalAtXError&) {
            r = yi; // worst-case penalty Y_i²
            ++out.penalized_folds;
        } catch (const DegenerateBasisError&) {
            r = yi;
            ++out.penalized_folds;
        }
        acc += r * r;
    }
    out.value = acc / static_cast<double>(n);
    return out;
}

} // namespace detail

/// Leave-one-out CV criterion for one bandwidth pair: refits the adjustment
/// with each target observation removed (the source fit is reused), evaluates
/// at the left-out covariate and averages squared residuals.
template <class Recipe>
CvScore cv_score(const Recipe& recipe, const typename Recipe::SourceData& source,
                 const typename Recipe::TargetData& target, BandwidthPair bw) {
    if (target.size() < 2) throw ParameterError("cv_score: need at least 2 target observations");
    auto stage = recipe.prepare_source(source, target, bw.h_p);
    auto adj = recipe.prepare_adjust(stage, target, bw.h_q);
    return detail::cv_fold_loop(recipe, stage, adj, target);
}

/// Exhaustive grid search of the CV criterion. Ties break toward larger h^Q,
/// then larger h^P (smoother fits preferred). Throws SelectionError when every
/// fold of every cell was penalized by the guard.
template <class Recipe>
BandwidthSelection select_bandwidths(const Recipe& recipe, const typename Recipe::SourceData& source,
                                     const typename Recipe::TargetData& target,
                                     const BandwidthGrid& grid) {
    grid.validate();
    if (target.size() < 2)
        throw ParameterError("select_bandwidths: need at least 2 target observations");

    const std::size_t np = grid.h_p_values.size();
    const std::size_t nq = grid.h_q_values.size();
    std::vector<typename Recipe::SourceStage> stages;
    stages.reserve(np);
    for (double h_p : grid.h_p_values) stages.push_back(recipe.prepare_source(source, target, h_p));

    BandwidthSelection sel;
    sel.surface.assign(np, std::vector<double>(nq, 0.0));
    bool have = false;
    std::size_t best_p = 0, best_q = 0;
    CvScore best_score;
    const int n_folds = static_cast<int>(target.size());
    bool any_rankable = false;

    for (std::size_t qi = 0; qi < nq; ++qi) {
        typename Recipe::AdjustStage hoisted;
        if constexpr (!Recipe::adjust_needs_source)
            hoisted = recipe.prepare_adjust(stages[0], target, grid.h_q_values[qi]);
        for (std::size_t pi = 0; pi < np; ++pi) {
            CvScore score;
            if constexpr (Recipe::adjust_needs_source) {
                auto adj = recipe.prepare_adjust(stages[pi], target, grid.h_q_values[qi]);
                score = detail::cv_fold_loop(recipe, stages[pi], adj, target);
            } else {
                score = detail::cv_fold_loop(recipe, stages[pi], hoisted, target);
            }
            sel.surface[pi][qi] = score.value;
            if (score.penalized_folds < n_folds) any_rankable = true;
            // tie-break toward larger h_q then larger h_p: scanning ascending,
            // ties replace the incumbent
            if (!have || score.value < best_score.value ||
                (score.value == best_score.value &&
                 (qi > best_q || (qi == best_q && pi > best_p)))) {
                have = true;
                best_score = score;
                best_p = pi;
                best_q = qi;
            }
        }
    }
    if (!any_rankable)
        throw SelectionError(
            "select_bandwidths: every leave-one-out fold of every grid cell was penalized by the "
            "orthogonality guard (eps_den); consider a nonzero GuardPolicy::shift_a");
    sel.selected = BandwidthPair{grid.h_p_values[best_p], grid.h_q_values[best_q]};
    sel.score_at_selected = best_score;
    return sel;
}

} // namespace swtle
