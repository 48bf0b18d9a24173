#pragma once

#include "swtle/adjust.hpp"
#include "swtle/bandwidth.hpp"
#include "swtle/baselines.hpp"
#include "swtle/csv.hpp"
#include "swtle/errors.hpp"
#include "swtle/estimators.hpp"
#include "swtle/rng.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace swtle {

/// Concrete-slump study protocol: water-cement-ratio covariate, first
/// `train_rows` observations fit the estimators (MSRR), the remainder are held
/// out (MSPE). The real source is the compressive-strength dataset filtered to
/// age = 28; the artificial source draws covariates uniform on
/// [artificial_lo, artificial_hi] with responses normal at the training
/// responses' mean and variance.
struct RealDataOptions {
    int train_rows = 78;
    int artificial_n = 200;
    double artificial_lo = 0.48;
    double artificial_hi = 1.79;
    std::uint64_t seed = 0;
    int bandwidth_count = 20;
    int curve_points = 201;
};

struct MethodScore {
    std::string method;
    double msrr = 0.0;
    double mspe = 0.0;
};

struct ResponseStudy {
    std::string response;
    std::vector<MethodScore> scores;
    std::vector<double> grid;
    std::map<std::string, std::vector<double>> curves;
};

namespace detail {

struct SlumpData {
    std::vector<double> wc_ratio; // water / cement per row
    std::map<std::string, std::vector<double>> responses;
};

inline SlumpData load_slump(const Csv& csv, const std::string& name) {
    const auto water_idx = csv.require_column_containing("water", name);
    const auto cement_idx = csv.require_column_containing("cement", name);
    const auto slump_idx = csv.require_column_containing("slump", name);
    const auto flow_idx = csv.require_column_containing("flow", name);
    const auto cs_idx = csv.require_column_containing("compressive", name);

    SlumpData out;
    const auto water = csv.numeric_column(static_cast<std::size_t>(water_idx), name);
    const auto cement = csv.numeric_column(static_cast<std::size_t>(cement_idx), name);
    for (std::size_t i = 0; i < water.size(); ++i) {
        if (cement[i] == 0.0)
            throw DataError(name + ": zero cement in row " + std::to_string(i + 1));
        out.wc_ratio.push_back(water[i] / cement[i]);
    }
    out.responses["SLUMP"] = csv.numeric_column(static_cast<std::size_t>(slump_idx), name);
    out.responses["FLOW"] = csv.numeric_column(static_cast<std::size_t>(flow_idx), name);
    out.responses["CS"] = csv.numeric_column(static_cast<std::size_t>(cs_idx), name);
    return out;
}

/// Real source from the compressive-strength dataset: rows with age = 28,
/// covariate water/cement, response compressive strength.
inline std::pair<std::vector<double>, std::vector<double>> load_strength_source(
    const Csv& csv, const std::string& name) {
    const auto water_idx = csv.require_column_containing("water", name);
    const auto cement_idx = csv.require_column_containing("cement", name);
    const auto age_idx = csv.require_column_containing("age", name);
    const auto cs_idx = csv.require_column_containing("compressive", name);
    const auto water = csv.numeric_column(static_cast<std::size_t>(water_idx), name);
    const auto cement = csv.numeric_column(static_cast<std::size_t>(cement_idx), name);
    const auto age = csv.numeric_column(static_cast<std::size_t>(age_idx), name);
    const auto cs = csv.numeric_column(static_cast<std::size_t>(cs_idx), name);

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < age.size(); ++i) {
        if (age[i] != 28.0) continue;
        if (cement[i] == 0.0) throw DataError(name + ": zero cement in row " + std::to_string(i + 1));
        xs.push_back(water[i] / cement[i]);
        ys.push_back(cs[i]);
    }
    if (xs.size() < 2) throw DataError(name + ": fewer than 2 rows with age = 28");
    return {std::move(xs), std::move(ys)};
}

inline double mean_squared_error(const CurveEstimate& fit, std::span<const double> xs,
                                 std::span<const double> ys) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - fit.value(xs[i]);
        acc += r * r;
    }
    return acc / static_cast<double>(xs.size());
}

} // namespace detail

/// Run the MSRR/MSPE study for one response. `strength_csv` enables the real
/// source (R-sw-TLE); `artificial` enables the synthetic one (A-sw-TLE);
/// Q-NW always runs.
inline ResponseStudy run_slump_study(const Csv& slump_csv, const std::string& response,
                                     const std::optional<Csv>& strength_csv, bool artificial,
                                     const RealDataOptions& options) {
    auto slump = detail::load_slump(slump_csv, "slump data");
    const auto it = slump.responses.find(response);
    if (it == slump.responses.end())
        throw ParameterError("run_slump_study: unknown response '" + response + "'");
    const auto& y_all = it->second;
    const std::size_t n = slump.wc_ratio.size();
    if (options.train_rows < 2 || static_cast<std::size_t>(options.train_rows) >= n)
        throw ParameterError("run_slump_study: train split must leave at least one test row");
    const std::size_t n_train = static_cast<std::size_t>(options.train_rows);

    std::vector<double> x_train(slump.wc_ratio.begin(), slump.wc_ratio.begin() + n_train);
    std::vector<double> y_train(y_all.begin(), y_all.begin() + n_train);
    std::vector<double> x_test(slump.wc_ratio.begin() + n_train, slump.wc_ratio.end());
    std::vector<double> y_test(y_all.begin() + n_train, y_all.end());

    // one common evaluation domain covering every covariate in play
    Interval dom = Interval::hull(slump.wc_ratio, 1e-9);
    std::optional<std::pair<std::vector<double>, std::vector<double>>> real_source;
    if (strength_csv) {
        real_source = detail::load_strength_source(*strength_csv, "strength data");
        const Interval sdom = Interval::hull(real_source->first, 1e-9);
        dom = Interval{std::min(dom.lo, sdom.lo), std::max(dom.hi, sdom.hi)};
    }
    if (artificial) {
        dom = Interval{std::min(dom.lo, options.artificial_lo), std::max(dom.hi, options.artificial_hi)};
    }

    RandomDesignSample target(x_train, y_train, dom);
    const Kernel kernel = Kernel::gaussian();
    const GuardPolicy guard{};
    const BandwidthGrid grid = BandwidthGrid::log_spaced(dom, options.bandwidth_count);

    ResponseStudy study;
    study.response = response;
    study.grid = linspace(Interval::hull(slump.wc_ratio), options.curve_points);

    auto add = [&](const std::string& method, const CurveEstimate& fit) {
        study.scores.push_back(MethodScore{method, detail::mean_squared_error(fit, x_train, y_train),
                                           detail::mean_squared_error(fit, x_test, y_test)});
        study.curves[method] = fit.values(study.grid);
    };

    if (real_source) {
        RandomDesignSample source(real_source->first, real_source->second, dom);
        SwTleRandomRecipe recipe{kernel, guard};
        auto sel = select_bandwidths(recipe, source, target, grid);
        add("R-sw-TLE", sw_tle_random(source, target, kernel, sel.selected, guard).final);
    }
    if (artificial) {
        double mean = 0.0;
        for (double v : y_train) mean += v;
        mean /= static_cast<double>(y_train.size());
        double var = 0.0;
        for (double v : y_train) var += (v - mean) * (v - mean);
        var /= static_cast<double>(y_train.size() - 1);
        // stream role keyed by the response so the three studies are independent
        const std::uint64_t role = 100 + (response == "CS" ? 0 : response == "FLOW" ? 1 : 2);
        SplitMix64 rng(stream_seed(options.seed, 0, role));
        std::vector<double> xs(static_cast<std::size_t>(options.artificial_n)),
            ys(static_cast<std::size_t>(options.artificial_n));
        for (auto& v : xs) v = rng.uniform(options.artificial_lo, options.artificial_hi);
        for (auto& v : ys) v = rng.normal(mean, std::sqrt(var));
        RandomDesignSample source(std::move(xs), std::move(ys), dom);
        SwTleRandomRecipe recipe{kernel, guard};
        auto sel = select_bandwidths(recipe, source, target, grid);
        add("A-sw-TLE", sw_tle_random(source, target, kernel, sel.selected, guard).final);
    }
    {
        const double h = nw_select_bandwidth(target, kernel, grid.h_q_values);
        add("Q-NW", q_nw(target, kernel, h));
    }
    return study;
}

} // namespace swtle
