#pragma once

#include "swtle/errors.hpp"
#include "swtle/math.hpp"

#include <cmath>

namespace swtle {

enum class KernelFamily { gaussian, epanechnikov };

/// Second-order symmetric kernel with closed-form segment integrals.
/// Supported families: Gaussian (default) and Epanechnikov.
class Kernel {
public:
    constexpr explicit Kernel(KernelFamily family = KernelFamily::gaussian) : family_(family) {}

    static constexpr Kernel gaussian() { return Kernel(KernelFamily::gaussian); }
    static constexpr Kernel epanechnikov() { return Kernel(KernelFamily::epanechnikov); }

    constexpr KernelFamily family() const { return family_; }

    /// K(t)
    double density(double t) const {
        switch (family_) {
        case KernelFamily::gaussian:
            return std::exp(-0.5 * t * t) / std::sqrt(2.0 * pi);
        case KernelFamily::epanechnikov:
            return std::abs(t) <= 1.0 ? 0.75 * (1.0 - t * t) : 0.0;
        }
        return 0.0;
    }

    /// ∫_{-inf}^{t} K(u) du
    double cdf(double t) const {
        switch (family_) {
        case KernelFamily::gaussian:
            return normal_cdf(t);
        case KernelFamily::epanechnikov: {
            if (t <= -1.0) return 0.0;
            if (t >= 1.0) return 1.0;
            return 0.25 * (2.0 + 3.0 * t - t * t * t);
        }
        }
        return 0.0;
    }

    /// K_h(u) = K(u/h) / h
    double scaled(double u, double h) const { return density(u / h) / h; }

    /// Exact ∫_a^b K_h(t - x) dt, always in [0, 1].
    double segment_integral(double a, double b, double x, double h) const {
        if (h <= 0.0) throw ParameterError("segment_integral: bandwidth must be positive");
        if (a > b) throw ParameterError("segment_integral: requires a <= b");
        const double v = cdf((b - x) / h) - cdf((a - x) / h);
        return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }

private:
    KernelFamily family_;
};

inline double segment_integral(const Kernel& kernel, double a, double b, double x, double h) {
    return kernel.segment_integral(a, b, x, h);
}

} // namespace swtle
