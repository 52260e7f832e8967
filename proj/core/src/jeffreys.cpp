#include "skewsym/jeffreys.hpp"

#include "skewsym/errors.hpp"
#include "skewsym/parallel.hpp"
#include "skewsym/quadrature.hpp"
#include "skewsym/special.hpp"

#include <algorithm>
#include <cmath>

// pchip.hpp calls isnan unqualified; make it visible at definition.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace skewsym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QuadratureOptions fisher_quadrature() {
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    return opts;
}

// Breakpoints for x-space integrands built from f(x) and a kernel in lambda*x.
std::vector<double> x_cuts(const SymmetricBase& base, double lambda) {
    std::vector<double> cuts{1.0, 3.0, 10.0};
    const double k = base.tail_cutoff();
    if (k <= 1000.0) cuts.push_back(k);
    if (lambda != 0.0) {
        const double s = 1.0 / std::fabs(lambda);
        for (double m : {1.0, 4.0, 16.0, 64.0}) cuts.push_back(m * s);
    }
    return cuts;
}

}  // namespace

double fisher_lambda(const SymmetricBase& base, const SkewingCdf& skew, double lambda) {
    if (std::isnan(lambda)) throw DomainError("fisher_lambda: NaN lambda");
    const auto opts = fisher_quadrature();

    if (lambda == 0.0) {
        if (!std::isfinite(base.second_moment())) return kInf;
        const double log_k0 = skew.log_fisher_kernel(0.0);
        auto integrand = [&](double x) { return x * x * base.pdf(x); };
        const auto cuts = x_cuts(base, 0.0);
        return 2.0 * std::exp(log_k0) * integrate_pieces(integrand, 0.0, kInf, cuts, opts).value;
    }

    const double a = std::fabs(lambda);
    if (a <= 1.0) {
        auto integrand = [&](double x) {
            if (x == 0.0) return 0.0;
            return std::exp(2.0 * std::log(x) + base.log_pdf(x) + skew.log_fisher_kernel(lambda * x));
        };
        const auto cuts = x_cuts(base, lambda);
        return 2.0 * integrate_pieces(integrand, 0.0, kInf, cuts, opts).value;
    }

    // u = lambda x: I = (2/|l|^3) int u^2 f(u/l) k(u) du over the half-line
    // carrying the sign of lambda.
    auto integrand = [&](double u) {
        if (u == 0.0) return 0.0;
        return std::exp(2.0 * std::log(std::fabs(u)) + base.log_pdf(u / lambda) + skew.log_fisher_kernel(u));
    };
    std::vector<double> cuts;
    for (double m : {1.0, 3.0, 10.0, 30.0, a, 4.0 * a}) cuts.push_back(lambda > 0 ? m : -m);
    const double sign_inf = lambda > 0 ? kInf : -kInf;
    const double mass = std::fabs(integrate_pieces(integrand, 0.0, sign_inf, cuts, opts).value);
    return 2.0 * mass / (a * a * a);
}

double fisher_lambda_truncated(const SymmetricBase& base, const SkewingCdf& skew, double lambda,
                               double upper) {
    if (!(upper > 0.0)) throw DomainError("fisher_lambda_truncated: upper limit must be positive");
    auto integrand = [&](double x) {
        if (x == 0.0) return 0.0;
        return std::exp(2.0 * std::log(x) + base.log_pdf(x) + skew.log_fisher_kernel(lambda * x));
    };
    std::vector<double> cuts = x_cuts(base, lambda);
    for (double d = 10.0; d < upper; d *= 10.0) cuts.push_back(d);
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    return 2.0 * integrate_pieces(integrand, 0.0, upper, cuts, opts).value;
}

double jeffreys_lambda(const SymmetricBase& base, const SkewingCdf& skew, double lambda) {
    const double info = fisher_lambda(base, skew, lambda);
    if (!std::isfinite(info))
        throw DomainError("Jeffreys prior undefined at lambda = 0: base density has no finite second moment");
    return std::sqrt(info);
}

FisherEnvelope fisher_tail_envelope(const SymmetricBase& base, const SkewingCdf& skew, double lambda, double L) {
    const double a = std::fabs(lambda);
    if (!(L > 0.0) || a < L) throw DomainError("fisher_tail_envelope: requires |lambda| >= L > 0");
    const auto opts = fisher_quadrature();
    const std::vector<double> cuts{1.0, 3.0, 10.0, 30.0, L, 4.0 * L};

    auto lower_integrand = [&](double u) {
        if (u == 0.0) return 0.0;
        return std::exp(2.0 * std::log(u) + base.log_pdf(u / L) + skew.log_fisher_kernel(u));
    };
    auto upper_integrand = [&](double u) {
        if (u == 0.0) return 0.0;
        return std::exp(2.0 * std::log(u) + skew.log_fisher_kernel(u));
    };
    const double scale = 2.0 / (a * a * a);
    return {scale * integrate_pieces(lower_integrand, 0.0, kInf, cuts, opts).value,
            scale * base.density_bound() * integrate_pieces(upper_integrand, 0.0, kInf, cuts, opts).value};
}

std::vector<double> GridSpec::points() const {
    if (!(min_abs > 0.0) || !(max_abs > min_abs) || per_side < 4)
        throw DomainError("GridSpec: need 0 < min_abs < max_abs and at least 4 points per side");
    std::vector<double> side(per_side);
    const double lo = std::log(min_abs), hi = std::log(max_abs);
    for (std::size_t i = 0; i < per_side; ++i)
        side[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(per_side - 1));
    side.front() = min_abs;
    side.back() = max_abs;

    std::vector<double> grid;
    grid.reserve(2 * per_side + 1);
    for (auto it = side.rbegin(); it != side.rend(); ++it) grid.push_back(-*it);
    if (include_zero) grid.push_back(0.0);
    grid.insert(grid.end(), side.begin(), side.end());
    return grid;
}

// ----------------------------------------------------------------------------
// JeffreysTable

struct JeffreysTable::Half {
    using Interp = boost::math::interpolators::pchip<std::vector<double>>;

    Half(const std::vector<double>& abs_lambda, const std::vector<double>& vals)
        : min_abs(abs_lambda.front()),
          max_abs(abs_lambda.back()),
          value_at_min(vals.front()),
          interp(log_copy(abs_lambda), log_copy(vals)) {
        // Fit c, b of c l^{-3/2} (1 + b/l^2) through the edge point and the
        // grid point nearest half the edge.
        const std::size_t n = abs_lambda.size();
        std::size_t mid = n - 2;
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (std::fabs(abs_lambda[i] - 0.5 * max_abs) < std::fabs(abs_lambda[mid] - 0.5 * max_abs)) mid = i;
        const double l1 = abs_lambda[mid], l2 = max_abs;
        const double r1 = vals[mid] * std::pow(l1, 1.5), r2 = vals[n - 1] * std::pow(l2, 1.5);
        const double cb = (r1 - r2) / (1.0 / (l1 * l1) - 1.0 / (l2 * l2));
        tail_c = r2 - cb / (l2 * l2);
        tail_b = cb / tail_c;
        if (!(tail_c > 0.0) || !(1.0 + tail_b / (l2 * l2) > 0.5)) {
            tail_c = r2;
            tail_b = 0.0;
        }
    }

    static std::vector<double> log_copy(const std::vector<double>& v) {
        std::vector<double> out(v.size());
        std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::log(x); });
        return out;
    }

    // log of the unnormalized prior for |lambda| >= min_abs.
    double log_value(double a) const {
        if (a >= max_abs) return std::log(tail_c) - 1.5 * std::log(a) + std::log1p(tail_b / (a * a));
        return interp(std::log(a));
    }

    // Integral of the tail beyond the grid edge.
    double tail_mass() const {
        return tail_c * (2.0 / std::sqrt(max_abs) + 0.4 * tail_b * std::pow(max_abs, -2.5));
    }

    double min_abs, max_abs, value_at_min;
    double tail_c = 0.0, tail_b = 0.0;
    Interp interp;
};

JeffreysTable::JeffreysTable(ModelFamily family, std::vector<double> grid, std::vector<double> values)
    : family_(std::move(family)), grid_(std::move(grid)), values_(std::move(values)) {
    const std::size_t n = grid_.size();
    if (n != values_.size()) throw DomainError("JeffreysTable: grid/value size mismatch");
    if (n < 9) throw DomainError("JeffreysTable: grid too small");
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && !(grid_[i] > grid_[i - 1])) throw DomainError("JeffreysTable: grid must be strictly increasing");
        if (grid_[i] != -grid_[n - 1 - i]) throw DomainError("JeffreysTable: grid must be symmetric about 0");
        if (!std::isfinite(values_[i]) || !(values_[i] > 0.0))
            throw DomainError("JeffreysTable: prior values must be positive and finite");
    }

    std::vector<double> pos_l, pos_v, neg_l, neg_v;
    for (std::size_t i = 0; i < n; ++i) {
        if (grid_[i] > 0.0) {
            pos_l.push_back(grid_[i]);
            pos_v.push_back(values_[i]);
        } else if (grid_[i] < 0.0) {
            neg_l.insert(neg_l.begin(), -grid_[i]);
            neg_v.insert(neg_v.begin(), values_[i]);
        } else {
            value_at_zero_ = values_[i];
        }
    }
    if (value_at_zero_ == 0.0) value_at_zero_ = 0.5 * (pos_v.front() + neg_v.front());
    positive_ = std::make_shared<const Half>(pos_l, pos_v);
    negative_ = std::make_shared<const Half>(neg_l, neg_v);

    // Normalizing constant: inner linear piece + interpolant + tails.
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    double total = 0.0;
    for (const Half* half : {positive_.get(), negative_.get()}) {
        total += 0.5 * half->min_abs * (value_at_zero_ + half->value_at_min);
        auto body = [half](double a) { return std::exp(half->log_value(a)); };
        const std::vector<double>& nodes = half == positive_.get() ? pos_l : neg_l;
        total += integrate_pieces(body, half->min_abs, half->max_abs, nodes, opts).value;
        total += half->tail_mass();
    }
    norm_constant_ = total;

    // lambda^3 I(lambda) = lambda^3 pi(lambda)^2 over the outer 20% of each side.
    std::vector<double> outer;
    for (const auto* side : {&pos_l, &neg_l}) {
        const auto& vals = side == &pos_l ? pos_v : neg_v;
        const std::size_t m = side->size();
        const std::size_t start = m - std::max<std::size_t>(1, m / 5);
        for (std::size_t i = start; i < m; ++i) {
            const double l = (*side)[i];
            outer.push_back(l * l * l * vals[i] * vals[i]);
        }
    }
    std::sort(outer.begin(), outer.end());
    const std::size_t k = outer.size();
    tail_constant_ = k % 2 ? outer[k / 2] : 0.5 * (outer[k / 2 - 1] + outer[k / 2]);
}

double JeffreysTable::log_unnormalized(double lambda) const {
    if (std::isnan(lambda)) throw DomainError("JeffreysTable: NaN lambda");
    const Half& half = lambda >= 0.0 ? *positive_ : *negative_;
    const double a = std::fabs(lambda);
    if (a >= half.min_abs) return half.log_value(a);
    return std::log(value_at_zero_ + (half.value_at_min - value_at_zero_) * a / half.min_abs);
}

double JeffreysTable::log_density(double lambda) const {
    return log_unnormalized(lambda) - std::log(norm_constant_);
}

JeffreysTable build_table(const ModelFamily& family, const GridSpec& spec, unsigned threads) {
    std::vector<double> grid = spec.points();
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), threads,
                 [&](std::size_t i) { values[i] = jeffreys_lambda(family.base, family.skew, grid[i]); });
    return JeffreysTable(family, std::move(grid), std::move(values));
}

// ----------------------------------------------------------------------------
// Student-t approximation

double StudentTApprox::log_density(double lambda) const {
    const double t = (lambda - center) / scale;
    return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) - 0.5 * std::log(dof * std::numbers::pi) -
           std::log(scale) - 0.5 * (dof + 1.0) * std::log1p(t * t / dof);
}

StudentTFit fit_t_approx(const JeffreysTable& table) {
    const auto& grid = table.lambda_grid();
    std::vector<double> target(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) target[i] = table.normalized_value(i);

    auto sup_distance = [&](double scale) {
        const StudentTApprox t{0.5, scale, 0.0};
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            worst = std::max(worst, std::fabs(target[i] - t.density(grid[i])));
        return worst;
    };

    // Coarse log-scan, then Brent inside the best bracket.
    constexpr std::size_t scan = 241;
    const double lo = std::log(0.05), hi = std::log(20.0);
    std::vector<double> scales(scan), dist(scan);
    std::size_t best = 0;
    for (std::size_t i = 0; i < scan; ++i) {
        scales[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / (scan - 1));
        dist[i] = sup_distance(scales[i]);
        if (dist[i] < dist[best]) best = i;
    }
    const double a = scales[best == 0 ? 0 : best - 1];
    const double b = scales[std::min(best + 1, scan - 1)];
    auto [scale, value] = boost::math::tools::brent_find_minima(sup_distance, a, b, 40);
    if (dist[best] < value) {
        scale = scales[best];
        value = dist[best];
    }
    return {StudentTApprox{0.5, scale, 0.0}, value};
}

double independence_prior_logdensity(double /*mu*/, double sigma, double lambda, const JeffreysTable& table) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("independence prior: sigma must be positive");
    return -std::log(sigma) + table.log_density(lambda);
}

// ----------------------------------------------------------------------------
// Fisher information diagonal

FisherDiagonal fisher_diag(const SkewSymmetric& model) {
    const auto& base = model.base();
    const auto& skew = model.skew();
    const double lambda = model.lambda();
    const double sigma = model.sigma();

    // g(l t)/G(l t), finite for all t in log space.
    auto hazard = [&](double t) { return std::exp(skew.log_pdf(lambda * t) - skew.log_cdf(lambda * t)); };
    auto weight = [&](double t) { return std::exp(base.log_pdf(t) + skew.log_cdf(lambda * t)); };

    auto mu_integrand = [&](double t) {
        const double s = base.score(t) + lambda * hazard(t);
        return s * s * weight(t);
    };
    auto sigma_integrand = [&](double t) {
        const double s = 1.0 + t * base.score(t) + lambda * t * hazard(t);
        return s * s * weight(t);
    };
    auto lambda_integrand = [&](double t) {
        if (t == 0.0) return 0.0;
        return std::exp(2.0 * std::log(std::fabs(t)) + base.log_pdf(t) + 2.0 * skew.log_pdf(lambda * t) -
                        skew.log_cdf(lambda * t));
    };

    std::vector<double> cuts{-10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0};
    if (std::fabs(lambda) > 1.0)
        for (double m : {1.0, 4.0}) {
            cuts.push_back(m / lambda);
            cuts.push_back(-m / lambda);
        }
    const auto opts = fisher_quadrature();
    const double s2 = sigma * sigma;
    return {2.0 / s2 * integrate_pieces(mu_integrand, -kInf, kInf, cuts, opts).value,
            2.0 / s2 * integrate_pieces(sigma_integrand, -kInf, kInf, cuts, opts).value,
            2.0 * integrate_pieces(lambda_integrand, -kInf, kInf, cuts, opts).value};
}

}  // namespace skewsym
