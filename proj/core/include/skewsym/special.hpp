#pragma once

// Numerically stable scalar helpers for the normal and logistic laws.

#include <cmath>
#include <numbers>

namespace skewsym::special {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
inline constexpr double kLog2 = std::numbers::ln2;

inline double norm_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }
inline double norm_pdf(double x) { return std::exp(norm_log_pdf(x)); }

// Phi(x), accurate in both tails.
double norm_cdf(double x);

// log Phi(x). Uses the Mills-ratio continued fraction below x = -20 so the
// result stays finite far past where Phi itself underflows.
double norm_log_cdf(double x);

// Mills ratio R(t) = (1 - Phi(t)) / phi(t) for t >= 0.
double mills_ratio(double t);

// Logistic sigmoid 1/(1+e^{-x}) without overflow for either sign.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log sigmoid(x), branch on sign to keep log1p's argument in (0, 1].
inline double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

// Logistic density e^{-x}/(1+e^{-x})^2, symmetric form.
inline double logistic_pdf(double x) {
    const double e = std::exp(-std::fabs(x));
    const double d = 1.0 + e;
    return e / (d * d);
}

inline double logistic_log_pdf(double x) {
    const double a = std::fabs(x);
    return -a - 2.0 * std::log1p(std::exp(-a));
}

// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -INFINITY) return a;
    return a + std::log1p(std::exp(b - a));
}

// log(exp(a) - exp(b)) for a >= b.
inline double log_sub_exp(double a, double b) {
    if (b == -INFINITY) return a;
    if (b >= a) return -INFINITY;
    const double d = b - a;
    return a + (d > -kLog2 ? std::log(-std::expm1(d)) : std::log1p(-std::exp(d)));
}

}  // namespace skewsym::special
