#include "skewsym/special.hpp"

#include <cmath>
#include <numbers>

namespace skewsym::special {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double mills_ratio(double t) {
    if (t < 3.0) return 0.5 * std::erfc(t * kInvSqrt2) / norm_pdf(t);
    // Modified Lentz evaluation of t + 1/(t + 2/(t + 3/(t + ...))).
    constexpr double tiny = 1e-300;
    double f = t;
    double c = t;
    double d = 0.0;
    for (int k = 1; k < 500; ++k) {
        d = t + k * d;
        if (d == 0.0) d = tiny;
        c = t + k / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

double norm_log_cdf(double x) {
    if (x < -20.0) return norm_log_pdf(x) + std::log(mills_ratio(-x));
    if (x < 0.0) return std::log(0.5 * std::erfc(-x * kInvSqrt2));
    return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
}

}  // namespace skewsym::special
