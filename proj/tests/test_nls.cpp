#include "swtle/nls.hpp"
#include "swtle/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace swtle;

namespace {

ParametricModel linear_model() {
    ParametricModel m;
    m.dim = 2;
    m.name = "lin2";
    m.value = [](double x, std::span<const double> t) { return t[0] + t[1] * x; };
    return m;
}

ParametricModel exp_model(bool with_jacobian) {
    ParametricModel m;
    m.dim = 2;
    m.name = "exp2";
    m.value = [](double x, std::span<const double> t) { return t[0] * std::exp(t[1] * x); };
    if (with_jacobian)
        m.jacobian = [](double x, std::span<const double> t, std::span<double> out) {
            out[0] = std::exp(t[1] * x);
            out[1] = t[0] * x * std::exp(t[1] * x);
        };
    return m;
}

RandomDesignSample sampled(const ParametricModel& m, std::span<const double> theta, int n,
                           double sigma, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (auto& x : xs) x = rng.uniform(-2.0, 2.0);
    for (int i = 0; i < n; ++i)
        ys[static_cast<std::size_t>(i)] =
            m.value(xs[static_cast<std::size_t>(i)], theta) + (sigma > 0 ? rng.normal(0.0, sigma) : 0.0);
    return RandomDesignSample(std::move(xs), std::move(ys), Interval{-2.0, 2.0});
}

} // namespace

TEST_CASE("linear model recovered exactly", "[nls]") {
    auto m = linear_model();
    const std::vector<double> truth{2.0, 3.0};
    auto data = sampled(m, truth, 30, 0.0, 7);
    auto fit = fit_ls(m, data, std::vector<double>{0.0, 0.0});
    REQUIRE(fit.converged);
    CHECK(fit.theta[0] == Catch::Approx(2.0).margin(1e-8));
    CHECK(fit.theta[1] == Catch::Approx(3.0).margin(1e-8));
}

TEST_CASE("exponential model recovered from noiseless data", "[nls][oracle]") {
    auto m = exp_model(true);
    const std::vector<double> truth{1.5, -0.7};
    auto data = sampled(m, truth, 50, 0.0, 11);
    auto fit = fit_ls(m, data, std::vector<double>{1.0, 0.0});
    REQUIRE(fit.converged);
    CHECK(fit.theta[0] == Catch::Approx(1.5).margin(1e-6));
    CHECK(fit.theta[1] == Catch::Approx(-0.7).margin(1e-6));
}

TEST_CASE("underdetermined sample is rejected", "[nls]") {
    auto m = exp_model(false);
    RandomDesignSample tiny({0.3}, {1.1}, Interval{-2.0, 2.0});
    CHECK_THROWS_AS(fit_ls(m, tiny, std::vector<double>{1.0, 0.0}), ParameterError);
}

TEST_CASE("rss is non-increasing across accepted steps", "[nls]") {
    auto m = exp_model(false);
    const std::vector<double> truth{0.8, 0.9};
    auto data = sampled(m, truth, 60, 0.15, 23);
    auto fit = fit_ls(m, data, std::vector<double>{0.2, 0.0});
    REQUIRE(fit.converged);
    REQUIRE(fit.rss_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.rss_trace.size(); ++i)
        CHECK(fit.rss_trace[i] <= fit.rss_trace[i - 1]);
}

TEST_CASE("finite-difference jacobian matches the analytic one", "[nls]") {
    auto with = exp_model(true);
    auto without = exp_model(false);
    const std::vector<double> theta{1.3, -0.4};
    std::vector<double> ja(2), jf(2);
    for (double x : {-1.5, -0.2, 0.7, 1.9}) {
        with.jacobian_at(x, theta, ja);
        without.jacobian_at(x, theta, jf);
        for (int j = 0; j < 2; ++j) {
            const double scale = std::max(1.0, std::abs(ja[static_cast<std::size_t>(j)]));
            CHECK(std::abs(ja[static_cast<std::size_t>(j)] - jf[static_cast<std::size_t>(j)]) / scale <
                  1e-5);
        }
    }
}

TEST_CASE("max_iter exhaustion reports non-convergence without throwing", "[nls]") {
    auto m = exp_model(false);
    const std::vector<double> truth{1.5, 1.2};
    auto data = sampled(m, truth, 80, 0.3, 31);
    auto fit = fit_ls(m, data, std::vector<double>{-4.0, -3.0}, 1, 1e-14);
    CHECK_FALSE(fit.converged);
    CHECK(fit.theta.size() == 2);
}
