#include "skewsym/quadrature.hpp"

#include "skewsym/errors.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

// Boost's own adaptive driver (1.74) compares an error estimate it never
// rescales to the subinterval width, so bisection inflates the reported
// error instead of shrinking it. Only its nodes and weights are used here.

namespace skewsym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss = boost::math::quadrature::gauss<double, 10>;

// The integrand on a finite parameter interval: f itself, or f composed with
// the map of an infinite range times its Jacobian.
struct Mapped {
    const Integrand& f;
    double a, b;
    enum class Kind { finite, upper, lower, both } kind;

    // Cubic maps reach |x| ~ eps^-3 before t rounds to the endpoint, which
    // keeps algebraic tails as slow as x^-1.5 integrable to full precision.
    double operator()(double t) const {
        switch (kind) {
            case Kind::finite: return f(t);
            case Kind::upper: {  // [a, inf): x = a + (t/(1-t))^3, t in [0, 1)
                const double s = 1.0 - t, r = t / s;
                return f(a + r * r * r) * 3.0 * r * r / (s * s);
            }
            case Kind::lower: {  // (-inf, b]: x = b - (t/(1-t))^3
                const double s = 1.0 - t, r = t / s;
                return f(b - r * r * r) * 3.0 * r * r / (s * s);
            }
            case Kind::both: {  // x = (t/(1-t^2))^3, t in (-1, 1)
                const double s = 1.0 - t * t, r = t / s;
                return f(r * r * r) * 3.0 * r * r * (1.0 + t * t) / (s * s);
            }
        }
        return 0.0;
    }
};

struct Segment {
    double lo, hi;
    double value, error, l1;
    bool splittable;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment apply_rule(const F& g, double lo, double hi) {
    const auto& x = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);

    double f0 = g(c);
    double kr = f0 * wk[0], ga = 0.0, l1 = std::fabs(f0) * wk[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double fp = g(c + h * x[i]), fm = g(c - h * x[i]);
        kr += (fp + fm) * wk[i];
        l1 += (std::fabs(fp) + std::fabs(fm)) * wk[i];
        if (i % 2 == 1) ga += (fp + fm) * wg[i / 2];
    }
    Segment s{lo, hi, h * kr, h * std::fabs(kr - ga), h * l1, true};
    // Roundoff floor of the rule itself.
    s.error = std::max(s.error, 50.0 * kEps * s.l1);
    // Nodes of a very short interval differ from each other by little more
    // than the rounding of the abscissae.
    const double mid = 0.5 * (lo + hi);
    s.splittable = mid > lo && mid < hi && (hi - lo) > 1e3 * kEps * std::max(std::fabs(lo), std::fabs(hi));
    if (!std::isfinite(s.value) || !std::isfinite(s.error)) s.splittable = false;
    return s;
}

Mapped map_range(const Integrand& f, double a, double b, double& lo, double& hi) {
    using K = Mapped::Kind;
    if (std::isinf(a) && std::isinf(b)) {
        lo = -1.0, hi = 1.0;
        return {f, a, b, K::both};
    }
    if (std::isinf(b)) {
        lo = 0.0, hi = 1.0;
        return {f, a, b, K::upper};
    }
    if (std::isinf(a)) {
        lo = 0.0, hi = 1.0;
        return {f, a, b, K::lower};
    }
    lo = a, hi = b;
    return {f, a, b, K::finite};
}

QuadratureResult run(const Integrand& f, const std::vector<double>& cuts, const QuadratureOptions& opts) {
    std::vector<Mapped> maps;
    maps.reserve(cuts.size());
    std::priority_queue<std::pair<Segment, std::size_t>, std::vector<std::pair<Segment, std::size_t>>,
                        decltype([](const auto& x, const auto& y) { return x.first < y.first; })>
        queue;
    std::vector<Segment> done;
    double value = 0.0, error = 0.0, l1 = 0.0;

    auto add = [&](const Segment& s, std::size_t m) {
        value += s.value;
        error += s.error;
        l1 += s.l1;
        if (s.splittable) queue.push({s, m});
        else done.push_back(s);
    };

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double lo, hi;
        maps.push_back(map_range(f, cuts[i], cuts[i + 1], lo, hi));
        add(apply_rule(maps.back(), lo, hi), maps.size() - 1);
    }

    std::size_t intervals = maps.size();
    while (!queue.empty() && intervals < opts.max_intervals &&
           error > std::max(opts.rel_tol * l1, opts.abs_tol)) {
        const auto [s, m] = queue.top();
        queue.pop();
        value -= s.value;
        error -= s.error;
        l1 -= s.l1;
        const double mid = 0.5 * (s.lo + s.hi);
        add(apply_rule(maps[m], s.lo, mid), m);
        add(apply_rule(maps[m], mid, s.hi), m);
        ++intervals;
    }

    // Re-sum to shed the drift of the running updates.
    QuadratureResult r;
    for (const auto& s : done) r.value += s.value, r.error += s.error, r.l1 += s.l1;
    while (!queue.empty()) {
        const auto& s = queue.top().first;
        r.value += s.value, r.error += s.error, r.l1 += s.l1;
        queue.pop();
    }
    return r;
}

QuadratureResult checked(const Integrand& f, double a, double b, std::vector<double> cuts,
                         const QuadratureOptions& opts) {
    if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate: NaN limit");
    if (a == b) return {};
    const double sign = a < b ? 1.0 : -1.0;
    if (a > b) std::swap(a, b);

    std::vector<double> pts{a};
    for (double p : cuts)
        if (p > a && p < b && std::isfinite(p)) pts.push_back(p);
    pts.push_back(b);
    std::sort(pts.begin() + 1, pts.end() - 1);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto r = run(f, pts, opts);
    const double allowed = std::max(opts.fail_tol * r.l1, opts.abs_tol);
    if (!std::isfinite(r.value) || !(r.error <= allowed)) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << a << ", " << b << "]: value " << r.value
            << ", error estimate " << r.error << ", L1 " << r.l1;
        throw NumericalError(msg.str());
    }
    r.value *= sign;
    return r;
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts) {
    return checked(f, a, b, {}, opts);
}

QuadratureResult integrate_pieces(const Integrand& f, double a, double b,
                                  std::span<const double> breakpoints,
                                  const QuadratureOptions& opts) {
    return checked(f, a, b, std::vector<double>(breakpoints.begin(), breakpoints.end()), opts);
}

}  // namespace skewsym
