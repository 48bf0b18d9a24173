#include "swtle/bandwidth.hpp"
#include "swtle/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace swtle;

namespace {

const Kernel kGauss = Kernel::gaussian();
const GuardPolicy kGuard{};

RandomDesignSample draw(int n, std::uint64_t seed, double sigma,
                        double (*regression)(double)) {
    SplitMix64 rng(seed);
    std::vector<double> xs(static_cast<std::size_t>(n)), ys;
    for (auto& x : xs) x = rng.uniform(-2.0, 2.0);
    for (double x : xs) ys.push_back(regression(x) + (sigma > 0 ? rng.normal(0.0, sigma) : 0.0));
    return RandomDesignSample(std::move(xs), std::move(ys), Interval{-2.0, 2.0});
}

} // namespace

TEST_CASE("grid construction and validation", "[grid]") {
    auto grid = BandwidthGrid::log_spaced(Interval{-2.0, 2.0});
    REQUIRE(grid.h_p_values.size() == 20);
    CHECK(grid.h_p_values.front() == Catch::Approx(0.08));
    CHECK(grid.h_p_values.back() == Catch::Approx(2.0));
    CHECK(std::is_sorted(grid.h_p_values.begin(), grid.h_p_values.end()));
    grid.validate();

    BandwidthGrid bad{{0.2, 0.1}, {0.1}};
    CHECK_THROWS_AS(bad.validate(), ParameterError);
    BandwidthGrid empty{{}, {0.1}};
    CHECK_THROWS_AS(empty.validate(), ParameterError);
}

TEST_CASE("cv is zero when every leave-one-out fold reproduces its response", "[cv]") {
    // target generated noiselessly from the source law: the left-out
    // prediction equals the response exactly (noiseless identity of η̂)
    auto source = draw(60, 101, 0.0, [](double x) { return x + 3.0; });
    auto target = draw(15, 102, 0.0, [](double x) { return x + 3.0; });
    SwTleRandomRecipe recipe{kGauss, kGuard};
    // huge h_p keeps the N-W source fit a poor but nonzero curve; the exact
    // identity needs the target responses to match the *fitted* source curve,
    // so regenerate them from the fit itself.
    const double h_p = 0.3;
    auto src_fit = nw_estimate(source, kGauss, h_p);
    std::vector<double> xs(target.x().begin(), target.x().end());
    std::vector<double> ys;
    for (double x : xs) ys.push_back(src_fit.value(x));
    RandomDesignSample exact_target(xs, ys, Interval{-2.0, 2.0});

    auto score = cv_score(recipe, source, exact_target, BandwidthPair{h_p, 0.5});
    CHECK(score.value == 0.0);
    CHECK(score.penalized_folds == 0);
}

TEST_CASE("three-fold cv matches an enumerated oracle", "[cv][oracle]") {
    auto source = draw(25, 103, 0.1, [](double x) { return 2.0 + x * x; });
    std::vector<double> xq{-1.0, 0.0, 1.0};
    std::vector<double> yq{2.9, 1.2, 3.3};
    RandomDesignSample target(xq, yq, Interval{-2.0, 2.0});
    const BandwidthPair bw{0.4, 0.7};

    SwTleRandomRecipe recipe{kGauss, kGuard};
    const double got = cv_score(recipe, source, target, bw).value;

    auto src = nw_estimate(source, kGauss, bw.h_p);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            const double w = kGauss.scaled(xq[static_cast<std::size_t>(j)] - xq[static_cast<std::size_t>(i)], bw.h_q);
            const double c = src.value(xq[static_cast<std::size_t>(j)]);
            num += w * yq[static_cast<std::size_t>(j)] * c;
            den += w * c * c;
        }
        const double pred = src.value(xq[static_cast<std::size_t>(i)]) * num / den;
        const double r = yq[static_cast<std::size_t>(i)] - pred;
        acc += r * r;
    }
    CHECK(got == Catch::Approx(acc / 3.0).margin(1e-12));
}

TEST_CASE("doubling target responses multiplies the cv score by four", "[cv]") {
    auto source = draw(30, 104, 0.1, [](double x) { return 2.0 + 0.5 * x * x; });
    auto target = draw(12, 105, 0.2, [](double x) { return std::cosh(x); });
    std::vector<double> xs(target.x().begin(), target.x().end());
    std::vector<double> doubled;
    for (double y : target.y()) doubled.push_back(2.0 * y);
    RandomDesignSample target2(xs, doubled, Interval{-2.0, 2.0});

    SwTleRandomRecipe recipe{kGauss, kGuard};
    const BandwidthPair bw{0.3, 0.5};
    const double s1 = cv_score(recipe, source, target, bw).value;
    const double s2 = cv_score(recipe, source, target2, bw).value;
    CHECK(s2 == Catch::Approx(4.0 * s1).epsilon(1e-12));
}

TEST_CASE("singleton grid returns its only cell", "[select]") {
    auto source = draw(20, 106, 0.1, [](double x) { return 2.0 + x * x; });
    auto target = draw(8, 107, 0.1, [](double x) { return std::cosh(x); });
    SwTleRandomRecipe recipe{kGauss, kGuard};
    BandwidthGrid grid{{0.33}, {0.44}};
    auto sel = select_bandwidths(recipe, source, target, grid);
    CHECK(sel.selected.h_p == 0.33);
    CHECK(sel.selected.h_q == 0.44);
    REQUIRE(sel.surface.size() == 1);
    REQUIRE(sel.surface[0].size() == 1);
}

TEST_CASE("constant noiseless target selects the largest h_q", "[select][oracle]") {
    auto source = draw(50, 108, 0.0, [](double) { return 2.0; });
    auto target = draw(20, 109, 0.0, [](double) { return 2.0; });
    SwTleRandomRecipe recipe{kGauss, kGuard};
    auto grid = BandwidthGrid::log_spaced(Interval{-2.0, 2.0});
    auto sel = select_bandwidths(recipe, source, target, grid);
    CHECK(sel.selected.h_q == grid.h_q_values.back());
}

TEST_CASE("cv surface is finite, non-negative, and matches cv_score cell by cell", "[select]") {
    auto source = draw(25, 110, 0.2, [](double x) { return 2.0 + x * x; });
    auto target = draw(10, 111, 0.2, [](double x) { return std::cosh(x); });
    SwTleRandomRecipe recipe{kGauss, kGuard};
    BandwidthGrid grid{{0.2, 0.5}, {0.3, 0.9}};
    auto sel = select_bandwidths(recipe, source, target, grid);
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t q = 0; q < 2; ++q) {
            const double cell = sel.surface[p][q];
            CHECK(std::isfinite(cell));
            CHECK(cell >= 0.0);
            const double direct =
                cv_score(recipe, source, target,
                         BandwidthPair{grid.h_p_values[p], grid.h_q_values[q]})
                    .value;
            CHECK(cell == direct);
        }
}

TEST_CASE("cv is invariant under permutation of target observations", "[cv]") {
    auto source = draw(30, 112, 0.1, [](double x) { return 2.0 + x * x; });
    auto target = draw(9, 113, 0.1, [](double x) { return std::cosh(x); });
    std::vector<double> xs(target.x().begin(), target.x().end());
    std::vector<double> ys(target.y().begin(), target.y().end());
    std::reverse(xs.begin(), xs.end());
    std::reverse(ys.begin(), ys.end());
    RandomDesignSample reversed(xs, ys, Interval{-2.0, 2.0});

    SwTleRandomRecipe recipe{kGauss, kGuard};
    const BandwidthPair bw{0.3, 0.5};
    CHECK(cv_score(recipe, source, target, bw).value ==
          Catch::Approx(cv_score(recipe, source, reversed, bw).value).epsilon(1e-13));
}

TEST_CASE("selection is bit-reproducible", "[select]") {
    auto source = draw(25, 114, 0.2, [](double x) { return 2.0 + x * x; });
    auto target = draw(12, 115, 0.2, [](double x) { return std::cosh(x); });
    SwTleRandomRecipe recipe{kGauss, kGuard};
    auto grid = BandwidthGrid::log_spaced(Interval{-2.0, 2.0}, 8);
    auto s1 = select_bandwidths(recipe, source, target, grid);
    auto s2 = select_bandwidths(recipe, source, target, grid);
    CHECK(s1.selected.h_p == s2.selected.h_p);
    CHECK(s1.selected.h_q == s2.selected.h_q);
    CHECK(s1.surface == s2.surface);
}

TEST_CASE("orthogonal folds are penalized and full penalization raises", "[cv][guard]") {
    // a source that is identically zero degenerates every fold
    auto source = draw(20, 116, 0.0, [](double) { return 0.0; });
    auto target = draw(8, 117, 0.1, [](double x) { return std::cosh(x); });
    SwTleRandomRecipe recipe{kGauss, kGuard};
    auto score = cv_score(recipe, source, target, BandwidthPair{0.3, 0.5});
    CHECK(score.penalized_folds == static_cast<int>(target.size()));
    // worst-case penalty: mean of squared responses
    double acc = 0.0;
    for (double y : target.y()) acc += y * y;
    CHECK(score.value == Catch::Approx(acc / static_cast<double>(target.size())).margin(1e-12));

    BandwidthGrid grid{{0.2, 0.4}, {0.3, 0.6}};
    CHECK_THROWS_AS(select_bandwidths(recipe, source, target, grid), SelectionError);
}

TEST_CASE("semiparametric selection searches h_q only and carries the marker", "[select][semiparam]") {
    ParametricModel m;
    m.dim = 2;
    m.value = [](double x, std::span<const double> t) { return t[0] * std::exp(t[1] * x); };
    auto source = draw(40, 118, 0.1, [](double x) { return std::exp(0.5 * x); });
    auto target = draw(15, 119, 0.1, [](double x) { return std::cosh(x); });
    SemiparamRecipe recipe{&m, SemiparamOptions{{1.0, 0.0}}, kGauss, kGuard};
    auto grid = BandwidthGrid::h_q_only(default_bandwidth_candidates(Interval{-2.0, 2.0}, 6));
    auto sel = select_bandwidths(recipe, source, target, grid);
    CHECK(sel.selected.h_p == bandwidth_not_applicable);
    CHECK(sel.selected.h_q > 0.0);
    REQUIRE(sel.surface.size() == 1);
    CHECK(sel.surface[0].size() == 6);
}

TEST_CASE("fixed-design cv drops the left-out segment into its neighbours", "[cv][fixed]") {
    // four-point fixed design; the recipe's leave-one-out partition must match
    // an explicitly rebuilt three-point sample
    FixedDesignSample source({0.1, 0.35, 0.6, 0.85}, {1.0, 1.5, 2.0, 2.5});
    FixedDesignSample target({0.2, 0.4, 0.7, 0.9}, {1.2, 1.6, 2.1, 2.4});
    SwTleFixedRecipe recipe{kGauss, kGuard, 512};
    const BandwidthPair bw{0.2, 0.3};
    const double got = cv_score(recipe, source, target, bw).value;

    auto src = gm_estimate(source, kGauss, bw.h_p);
    double acc = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        auto loo = target.without(i);
        const double xi = xi_hat_fixed(src, loo, kGauss, bw.h_q, target.x()[i], kGuard, 512);
        const double r = target.y()[i] - src.value(target.x()[i]) * xi;
        acc += r * r;
    }
    CHECK(got == Catch::Approx(acc / 4.0).margin(1e-12));
}
