#pragma once

#include "swtle/errors.hpp"
#include "swtle/math.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace swtle {

namespace detail {
inline void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw ParameterError(std::string(what) + ": non-finite value");
}
} // namespace detail

/// Fixed-design regression sample on [0,1]: strictly ascending covariates with
/// the midpoint partition s_0 = 0, s_i = (x_i + x_{i+1})/2, s_n = 1.
class FixedDesignSample {
public:
    FixedDesignSample(std::vector<double> x, std::vector<double> y) {
        if (x.empty()) throw ParameterError("FixedDesignSample: empty sample");
        if (x.size() != y.size()) throw ParameterError("FixedDesignSample: x/y length mismatch");
        detail::require_finite(x, "FixedDesignSample x");
        detail::require_finite(y, "FixedDesignSample y");
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < 0.0 || x[i] > 1.0)
                throw ParameterError("FixedDesignSample: covariate outside [0,1]");
            if (i > 0 && x[i] <= x[i - 1])
                throw ParameterError("FixedDesignSample: covariates must be strictly ascending");
        }
        auto d = std::make_shared<Data>();
        d->x = std::move(x);
        d->y = std::move(y);
        d->s.resize(d->x.size() + 1);
        d->s.front() = 0.0;
        for (std::size_t i = 1; i < d->x.size(); ++i) d->s[i] = 0.5 * (d->x[i - 1] + d->x[i]);
        d->s.back() = 1.0;
        data_ = std::move(d);
    }

    std::size_t size() const { return data_->x.size(); }
    std::span<const double> x() const { return data_->x; }
    std::span<const double> y() const { return data_->y; }
    /// Midpoint partition, size() + 1 entries.
    std::span<const double> s() const { return data_->s; }

    /// Sample with observation `i` removed and the partition rebuilt from the
    /// remaining points (the dropped segment merges into its neighbours').
    FixedDesignSample without(std::size_t i) const {
        if (i >= size()) throw ParameterError("FixedDesignSample::without: index out of range");
        if (size() == 1) throw ParameterError("FixedDesignSample::without: would empty the sample");
        std::vector<double> xs, ys;
        xs.reserve(size() - 1);
        ys.reserve(size() - 1);
        for (std::size_t j = 0; j < size(); ++j) {
            if (j == i) continue;
            xs.push_back(data_->x[j]);
            ys.push_back(data_->y[j]);
        }
        return FixedDesignSample(std::move(xs), std::move(ys));
    }

    /// Same covariates, responses shifted by a constant.
    FixedDesignSample shifted(double a) const {
        if (a == 0.0) return *this;
        std::vector<double> ys(data_->y);
        for (double& v : ys) v += a;
        return FixedDesignSample(std::vector<double>(data_->x), std::move(ys));
    }

private:
    struct Data {
        std::vector<double> x, y, s;
    };
    std::shared_ptr<const Data> data_;
};

/// Random-design regression sample on a common interval [L, U]. No ordering
/// requirement; may be empty (pooling identity), though the estimators
/// themselves reject empty inputs.
class RandomDesignSample {
public:
    RandomDesignSample(std::vector<double> x, std::vector<double> y, Interval domain) {
        if (x.size() != y.size()) throw ParameterError("RandomDesignSample: x/y length mismatch");
        detail::require_finite(x, "RandomDesignSample x");
        detail::require_finite(y, "RandomDesignSample y");
        if (domain.lo >= domain.hi) throw ParameterError("RandomDesignSample: empty domain");
        for (double v : x)
            if (!domain.contains(v)) throw ParameterError("RandomDesignSample: covariate outside domain");
        auto d = std::make_shared<Data>();
        d->x = std::move(x);
        d->y = std::move(y);
        d->domain = domain;
        data_ = std::move(d);
    }

    /// Convenience: domain taken as the hull of the covariates.
    static RandomDesignSample from_hull(std::vector<double> x, std::vector<double> y) {
        Interval dom = Interval::hull(x);
        return RandomDesignSample(std::move(x), std::move(y), dom);
    }

    std::size_t size() const { return data_->x.size(); }
    bool empty() const { return data_->x.empty(); }
    std::span<const double> x() const { return data_->x; }
    std::span<const double> y() const { return data_->y; }
    const Interval& domain() const { return data_->domain; }

    RandomDesignSample shifted(double a) const {
        if (a == 0.0) return *this;
        std::vector<double> ys(data_->y);
        for (double& v : ys) v += a;
        return RandomDesignSample(std::vector<double>(data_->x), std::move(ys), data_->domain);
    }

    /// Pool of two samples over the hull of both domains.
    static RandomDesignSample pooled(const RandomDesignSample& a, const RandomDesignSample& b) {
        std::vector<double> xs(a.x().begin(), a.x().end());
        xs.insert(xs.end(), b.x().begin(), b.x().end());
        std::vector<double> ys(a.y().begin(), a.y().end());
        ys.insert(ys.end(), b.y().begin(), b.y().end());
        Interval dom{std::min(a.domain().lo, b.domain().lo), std::max(a.domain().hi, b.domain().hi)};
        return RandomDesignSample(std::move(xs), std::move(ys), dom);
    }

private:
    struct Data {
        std::vector<double> x, y;
        Interval domain;
    };
    std::shared_ptr<const Data> data_;
};

} // namespace swtle
