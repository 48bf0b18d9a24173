#pragma once

#include "swtle/math.hpp"

#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace swtle {

/// An immutable, evaluatable fitted regression function. Carries the domain it
/// is valid on and the bandwidth(s) it was constructed with. Evaluation is
/// pure; instances are cheap to copy and safe to share across threads.
class CurveEstimate {
public:
    using Fn = std::function<double(double)>;

    CurveEstimate(Fn fn, Interval domain, std::vector<double> bandwidths = {})
        : impl_(std::make_shared<const Impl>(Impl{std::move(fn), domain, std::move(bandwidths)})) {}

    double value(double x) const { return impl_->fn(x); }
    double operator()(double x) const { return impl_->fn(x); }

    const Interval& domain() const { return impl_->domain; }
    std::span<const double> bandwidths() const { return impl_->bandwidths; }

    /// Curve sampled on a grid.
    std::vector<double> values(std::span<const double> xs) const {
        std::vector<double> out;
        out.reserve(xs.size());
        for (double x : xs) out.push_back(value(x));
        return out;
    }

    static CurveEstimate constant(double c, Interval domain) {
        return CurveEstimate([c](double) { return c; }, domain);
    }

private:
    struct Impl {
        Fn fn;
        Interval domain;
        std::vector<double> bandwidths;
    };
    std::shared_ptr<const Impl> impl_;
};

} // namespace swtle
