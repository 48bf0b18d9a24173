#pragma once

#include "swtle/adjust.hpp"
#include "swtle/bandwidth.hpp"
#include "swtle/baselines.hpp"
#include "swtle/errors.hpp"
#include "swtle/estimators.hpp"
#include "swtle/kernel.hpp"
#include "swtle/math.hpp"
#include "swtle/rng.hpp"
#include "swtle/sample.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace swtle {

enum class Scenario { similar, identical, unrelated, multi_source };

inline const char* scenario_name(Scenario s) {
    switch (s) {
    case Scenario::similar: return "similar";
    case Scenario::identical: return "identical";
    case Scenario::unrelated: return "unrelated";
    case Scenario::multi_source: return "multi";
    }
    return "?";
}

/// Declarative Monte Carlo scenario. Covariates are uniform on [-2, 2]; the
/// target regression is cosh(x) throughout; sources vary per scenario.
struct ScenarioConfig {
    Scenario scenario = Scenario::similar;
    double a = 1.0, b = 1.0;    // similar-source curve a + b x²
    std::vector<int> n_p{500}; // one entry, or two for multi_source
    int n_q = 50;
    double sigma_p = 0.2, sigma_q = 0.2;
    int reps = 1000;
    std::uint64_t seed = 0;
    std::vector<std::string> estimators; // empty -> scenario defaults
    int eval_points = 201;
    double trim = 0.0;
    int threads = 0;          // 0 -> SWTLE_THREADS env or hardware count
    int bandwidth_count = 20; // log-spaced grid resolution

    static Interval domain() { return Interval{-2.0, 2.0}; }

    double truth(double x) const { return std::cosh(x); }

    double source_regression(std::size_t j, double x) const {
        switch (scenario) {
        case Scenario::similar: return a + b * x * x;
        case Scenario::identical: return std::cosh(x);
        case Scenario::unrelated: return 0.5;
        case Scenario::multi_source:
            return j == 0 ? 0.5 * std::exp(0.5 * x * x) : 1.0 - std::cos(x);
        }
        return 0.0;
    }

    std::size_t source_count() const { return scenario == Scenario::multi_source ? 2 : 1; }

    std::vector<std::string> estimator_list() const {
        if (!estimators.empty()) return estimators;
        switch (scenario) {
        case Scenario::identical: return {"sw-tle", "f-nw", "sa", "wa"};
        case Scenario::multi_source: return {"sw-tle-multi", "q-nw"};
        default: return {"sw-tle", "q-nw", "sa", "wa"};
        }
    }

    void validate() const {
        if (reps < 1) throw ParameterError("ScenarioConfig: reps must be >= 1");
        if (n_q < 2) throw ParameterError("ScenarioConfig: n_q must be >= 2");
        if (sigma_p < 0.0 || sigma_q < 0.0) throw ParameterError("ScenarioConfig: negative sigma");
        if (trim < 0.0 || trim > 0.25) throw ParameterError("ScenarioConfig: trim outside [0, 0.25]");
        if (eval_points < 2) throw ParameterError("ScenarioConfig: eval_points must be >= 2");
        const std::size_t want = source_count();
        if (n_p.size() != want)
            throw ParameterError("ScenarioConfig: scenario needs " + std::to_string(want) +
                                 " source size(s)");
        for (int np : n_p)
            if (np < 2) throw ParameterError("ScenarioConfig: source sizes must be >= 2");
        for (const auto& tag : estimator_list()) {
            const bool multi_tag = tag == "sw-tle-multi";
            const bool single_tag =
                tag == "sw-tle" || tag == "q-nw" || tag == "f-nw" || tag == "sa" || tag == "wa";
            if (!multi_tag && !single_tag)
                throw ParameterError("ScenarioConfig: unknown estimator tag '" + tag + "'");
            if (scenario == Scenario::multi_source && !multi_tag && tag != "q-nw")
                throw ParameterError("ScenarioConfig: estimator '" + tag +
                                     "' is not defined for the multi-source scenario");
            if (scenario != Scenario::multi_source && multi_tag)
                throw ParameterError("ScenarioConfig: 'sw-tle-multi' needs the multi-source scenario");
        }
    }
};

struct GeneratedData {
    std::vector<RandomDesignSample> sources;
    RandomDesignSample target;
};

/// Draw one replication. The stream is derived from (seed, rep_index, role) so
/// replications are independent and bit-reproducible regardless of scheduling.
inline GeneratedData generate(const ScenarioConfig& config, int rep_index) {
    config.validate();
    if (rep_index < 0 || rep_index >= config.reps)
        throw ParameterError("generate: rep_index out of range");
    const Interval dom = ScenarioConfig::domain();

    auto draw = [&](std::size_t role, int n, double sigma, auto&& regression) {
        SplitMix64 rng(stream_seed(config.seed, static_cast<std::uint64_t>(rep_index), role));
        std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = rng.uniform(dom.lo, dom.hi);
        for (int i = 0; i < n; ++i)
            ys[static_cast<std::size_t>(i)] =
                regression(xs[static_cast<std::size_t>(i)]) + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
        return RandomDesignSample(std::move(xs), std::move(ys), dom);
    };

    GeneratedData out{
        {}, draw(0, config.n_q, config.sigma_q, [&](double x) { return config.truth(x); })};
    for (std::size_t j = 0; j < config.source_count(); ++j)
        out.sources.push_back(draw(1 + j, config.n_p[j], config.sigma_p,
                                   [&](double x) { return config.source_regression(j, x); }));
    return out;
}

/// Trapezoid-rule integrated squared error of a fitted curve against the truth
/// over an evaluation grid.
inline double ise(const CurveEstimate& estimate, const std::function<double(double)>& truth,
                  std::span<const double> xs) {
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = estimate.value(xs[i]) - truth(xs[i]);
        sq[i] = d * d;
    }
    return trapezoid(xs, sq);
}

struct EstimatorResult {
    std::string name;
    double mise = 0.0;
    double mc_se = 0.0;
    int failures = 0;
    int reps_used = 0;
};

struct MiseReport {
    ScenarioConfig config;
    std::vector<EstimatorResult> rows;
    double wall_seconds = 0.0;
};

namespace detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SWTLE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Fit one estimator tag on one replication; CV bandwidths per the paper's
/// protocol (joint grid for the sw-TLE, own-data for baseline components).
inline CurveEstimate fit_estimator(const std::string& tag, const GeneratedData& data,
                                   const Kernel& kernel, const BandwidthGrid& grid,
                                   const GuardPolicy& guard) {
    const auto& target = data.target;
    if (tag == "sw-tle") {
        SwTleRandomRecipe recipe{kernel, guard};
        auto sel = select_bandwidths(recipe, data.sources[0], target, grid);
        return sw_tle_random(data.sources[0], target, kernel, sel.selected, guard).final;
    }
    if (tag == "sw-tle-multi") {
        std::vector<MultiSource> sources;
        for (const auto& s : data.sources) {
            MultiSource entry{s};
            entry.h_p = nw_select_bandwidth(s, kernel, grid.h_p_values);
            sources.push_back(std::move(entry));
        }
        MultiSwTleRecipe recipe{kernel, guard};
        auto sel = select_bandwidths(recipe, sources, target,
                                     BandwidthGrid::h_q_only(grid.h_q_values));
        return sw_tle_multi(sources, target, kernel, sel.selected.h_q, guard).final;
    }
    if (tag == "q-nw") {
        const double h = nw_select_bandwidth(target, kernel, grid.h_q_values);
        return q_nw(target, kernel, h);
    }
    if (tag == "f-nw") {
        auto pooled = RandomDesignSample::pooled(data.sources[0], target);
        const double h = nw_select_bandwidth(pooled, kernel, grid.h_q_values);
        return f_nw(data.sources[0], target, kernel, h);
    }
    if (tag == "sa" || tag == "wa") {
        const double h_p = nw_select_bandwidth(data.sources[0], kernel, grid.h_p_values);
        const double h_q = nw_select_bandwidth(target, kernel, grid.h_q_values);
        if (tag == "sa") return sa_estimate(data.sources[0], target, kernel, {h_p, h_q});
        return wa_estimate(data.sources[0], target, kernel, {h_p, h_q}).first;
    }
    throw ParameterError("fit_estimator: unknown tag '" + tag + "'");
}

} // namespace detail

/// Run a full Monte Carlo scenario: per replication, generate data, select
/// bandwidths by CV, fit every requested estimator and accumulate its ISE.
/// Replications execute on a worker pool; the report is bit-identical for any
/// thread count (per-replication RNG streams, order-insensitive aggregation).
/// A replication whose fit fails is excluded from that estimator's mean; more
/// than 5% failures for any estimator aborts the run.
inline MiseReport run_scenario(const ScenarioConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Kernel kernel = Kernel::gaussian();
    const GuardPolicy guard{};
    const BandwidthGrid grid =
        BandwidthGrid::log_spaced(ScenarioConfig::domain(), config.bandwidth_count);
    const auto tags = config.estimator_list();
    const auto eval = linspace(ScenarioConfig::domain(), config.eval_points, config.trim);
    auto truth = [&config](double x) { return config.truth(x); };

    // per-[rep][estimator] outcome; empty optional marks a failed fit
    std::vector<std::vector<std::optional<double>>> cells(
        static_cast<std::size_t>(config.reps),
        std::vector<std::optional<double>>(tags.size()));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int rep = next.fetch_add(1);
            if (rep >= config.reps) return;
            const GeneratedData data = generate(config, rep);
            for (std::size_t e = 0; e < tags.size(); ++e) {
                try {
                    CurveEstimate fit = detail::fit_estimator(tags[e], data, kernel, grid, guard);
                    cells[static_cast<std::size_t>(rep)][e] = ise(fit, truth, eval);
                } catch (const Error&) {
                    // orthogonality / non-convergence / selection failure: counted below
                }
            }
        }
    };

    const int n_threads = std::min(detail::resolve_threads(config.threads), config.reps);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    MiseReport report;
    report.config = config;
    for (std::size_t e = 0; e < tags.size(); ++e) {
        EstimatorResult row;
        row.name = tags[e];
        double sum = 0.0, sumsq = 0.0;
        int used = 0;
        for (int rep = 0; rep < config.reps; ++rep) {
            const auto& cell = cells[static_cast<std::size_t>(rep)][e];
            if (!cell) continue;
            sum += *cell;
            sumsq += *cell * *cell;
            ++used;
        }
        row.failures = config.reps - used;
        row.reps_used = used;
        if (used > 0) {
            row.mise = sum / used;
            if (used > 1) {
                const double var = std::max(0.0, (sumsq - sum * sum / used) / (used - 1));
                row.mc_se = std::sqrt(var / used);
            }
        }
        report.rows.push_back(std::move(row));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& row : report.rows) {
        if (row.failures * 20 > config.reps) // > 5%
            throw SimulationError("run_scenario: estimator '" + row.name + "' failed " +
                                  std::to_string(row.failures) + " of " +
                                  std::to_string(config.reps) + " replications (> 5%)");
    }
    return report;
}

} // namespace swtle
