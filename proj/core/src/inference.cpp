#include "skewsym/inference.hpp"

#include "skewsym/errors.hpp"
#include "skewsym/optimize.hpp"
#include "skewsym/quadrature.hpp"
#include "skewsym/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace skewsym {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PriorSpec PriorSpec::independence_jeffreys(std::shared_ptr<const JeffreysTable> table) {
    PriorSpec p;
    p.kind = PriorKind::independence_jeffreys;
    p.jeffreys_table = std::move(table);
    return p;
}

PriorSpec PriorSpec::benchmark(const StudentTApprox& lambda_prior) {
    PriorSpec p;
    p.kind = PriorKind::benchmark;
    p.proper_lambda_prior = lambda_prior;
    return p;
}

void PriorSpec::validate(const ModelFamily& family) const {
    if (kind == PriorKind::independence_jeffreys) {
        if (!jeffreys_table) throw DomainError("prior: independence Jeffreys prior needs a Jeffreys table");
        if (!(jeffreys_table->family() == family))
            throw DomainError("prior: Jeffreys table was built for " + describe(jeffreys_table->family()) +
                              ", not for " + describe(family));
    } else {
        if (!proper_lambda_prior) throw DomainError("prior: benchmark prior needs a proper density for lambda");
        if (!(proper_lambda_prior->dof > 0.0) || !(proper_lambda_prior->scale > 0.0))
            throw DomainError("prior: benchmark density must have positive dof and scale");
    }
}

double PriorSpec::log_lambda_density(double lambda) const {
    if (kind == PriorKind::independence_jeffreys) return jeffreys_table->log_density(lambda);
    return proper_lambda_prior->log_density(lambda);
}

double PriorSpec::log_density(const Params& p) const {
    if (!(p[1] > 0.0) || !std::isfinite(p[1])) return -kInf;
    return -std::log(p[1]) + log_lambda_density(p[2]);
}

double censored_log_mass(const SkewSymmetric& model, const Interval& s) {
    const ModelFamily fam = model.family();
    const double lambda = model.lambda();
    const double a = (s.lo - model.mu()) / model.sigma();
    const double b = (s.hi - model.mu()) / model.sigma();
    if (!(a < b)) return -kInf;

    if (std::isfinite(a) && std::isfinite(b) && b - a <= 1.0) {
        // Short interval: integrate the density directly rather than
        // differencing two nearly equal CDF values. The density is unimodal,
        // so on a unit interval its maximum is near one of these three.
        const double la = standard_log_density(fam, lambda, a);
        const double lm = standard_log_density(fam, lambda, 0.5 * (a + b));
        const double lb = standard_log_density(fam, lambda, b);
        const double top = std::max({la, lm, lb});
        if (!std::isfinite(top)) return -kInf;
        // A density falling by more than e^50 across the interval is a deep
        // tail, where the tail masses below are the better route.
        if (top - std::min({la, lm, lb}) < 50.0) {
            auto integrand = [&](double t) { return std::exp(standard_log_density(fam, lambda, t) - top); };
            QuadratureOptions opts;
            opts.rel_tol = 1e-12;
            const double mass = integrate(integrand, a, b, opts).value;
            return top + std::log(mass);
        }
    }
    if (b <= 0.0) return special::log_sub_exp(standard_log_cdf(fam, lambda, b), standard_log_cdf(fam, lambda, a));
    if (a >= 0.0) return special::log_sub_exp(standard_log_ccdf(fam, lambda, a), standard_log_ccdf(fam, lambda, b));
    const double outside = std::exp(standard_log_cdf(fam, lambda, a)) + std::exp(standard_log_ccdf(fam, lambda, b));
    return std::log1p(-outside);
}

double log_likelihood(const Params& p, const Dataset& data, const ModelFamily& family, LikelihoodDiagnostics* diag) {
    if (!(p[1] > 0.0) || !std::isfinite(p[1]) || !std::isfinite(p[0]) || !std::isfinite(p[2])) return -kInf;
    const SkewSymmetric model(p[0], p[1], p[2], family);
    double total = 0.0;
    for (double y : data.exact) total += log_density(model, y);
    for (const auto& s : data.censored) {
        const double lm = censored_log_mass(model, s);
        if (lm == -kInf) {
            if (diag) ++diag->zero_mass_intervals;
            return -kInf;
        }
        total += lm;
    }
    return total;
}

double log_posterior(const Params& p, const Dataset& data, const ModelFamily& family, const PriorSpec& prior,
                     LikelihoodDiagnostics* diag) {
    const double lp = prior.log_density(p);
    if (lp == -kInf) return -kInf;
    const double ll = log_likelihood(p, data, family, diag);
    return ll == -kInf ? -kInf : ll + lp;
}

LogTarget posterior_target(const Dataset& data, const ModelFamily& family, const PriorSpec& prior) {
    prior.validate(family);
    return [data, family, prior](std::span<const double> x) {
        try {
            return log_posterior({x[0], x[1], x[2]}, data, family, prior);
        } catch (const NumericalError&) {
            return -kInf;
        } catch (const DomainError&) {
            return -kInf;
        }
    };
}

double aic(double loglik, int k) { return 2.0 * k - 2.0 * loglik; }
double bic(double loglik, int k, std::size_t n) { return k * std::log(static_cast<double>(n)) - 2.0 * loglik; }

namespace {

// Representative points for starting values: exact values, finite
// interval midpoints, or the finite end of half-lines.
std::vector<double> pseudo_values(const Dataset& data) {
    std::vector<double> v = data.exact;
    for (const auto& s : data.censored) {
        if (std::isfinite(s.lo) && std::isfinite(s.hi)) v.push_back(0.5 * (s.lo + s.hi));
        else if (std::isfinite(s.lo)) v.push_back(s.lo);
        else if (std::isfinite(s.hi)) v.push_back(s.hi);
    }
    return v;
}

}  // namespace

MleResult mle_fit(const Dataset& data, const ModelFamily& family, double lambda_max) {
    data.validate();
    if (data.size() < 2) throw DomainError("mle_fit: need at least 2 observations");
    if (!(lambda_max > 0.0)) throw DomainError("mle_fit: lambda_max must be positive");

    std::vector<double> v = pseudo_values(data);
    if (v.empty()) v.push_back(0.0);
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : v) {
        m2 += (x - mean) * (x - mean);
        m3 += (x - mean) * (x - mean) * (x - mean);
    }
    m2 /= n;
    m3 /= n;
    const double sd = m2 > 0.0 ? std::sqrt(m2) : 1.0;
    const double skew_sign = m3 >= 0.0 ? 1.0 : -1.0;
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];

    // Objective in (mu, log sigma, lambda); lambda beyond the clamp is
    // evaluated at the clamp with a quadratic penalty.
    auto objective = [&](const std::vector<double>& x) {
        const double lam = std::clamp(x[2], -lambda_max, lambda_max);
        const double excess = std::fabs(x[2]) - lambda_max;
        const double penalty = excess > 0.0 ? excess * excess : 0.0;
        double ll;
        try {
            ll = log_likelihood({x[0], std::exp(x[1]), lam}, data, family);
        } catch (const NumericalError&) {
            return kInf;
        } catch (const DomainError&) {
            return kInf;
        }
        return -ll + penalty;
    };

    const std::vector<std::vector<double>> starts{
        {mean, std::log(sd), 0.0},
        {median, std::log(sd), 0.0},
        {mean - skew_sign * 0.8 * sd, std::log(1.3 * sd), 2.0 * skew_sign},
        {mean - skew_sign * 1.0 * sd, std::log(1.5 * sd), 6.0 * skew_sign},
        {mean + skew_sign * 0.5 * sd, std::log(sd), -1.0 * skew_sign},
    };
    NelderMeadOptions opts;
    opts.initial_step = 0.3;
    NelderMeadResult best;
    best.value = kInf;
    for (const auto& s : starts) {
        auto r = nelder_mead(objective, s, opts);
        if (r.value < best.value) best = std::move(r);
    }
    if (!std::isfinite(best.value)) throw NumericalError("mle_fit: every start produced a non-finite likelihood");

    MleResult out;
    const double lam = std::clamp(best.x[2], -lambda_max, lambda_max);
    out.params = {best.x[0], std::exp(best.x[1]), lam};
    out.max_loglik = log_likelihood(out.params, data, family);
    out.n = data.size();
    out.k = 3;
    out.aic = aic(out.max_loglik, out.k);
    out.bic = bic(out.max_loglik, out.k, out.n);
    out.boundary = std::fabs(lam) >= lambda_max * (1.0 - 1e-6);
    return out;
}

PosteriorDraws sample_posterior(const Dataset& data, const ModelFamily& family, const PriorSpec& prior,
                                McmcConfig config) {
    data.validate();
    const LogTarget target = posterior_target(data, family, prior);
    if (config.initial_point.empty()) {
        const MleResult mle = mle_fit(data, family);
        config.initial_point = {mle.params[0], mle.params[1], std::clamp(mle.params[2], -20.0, 20.0)};
        if (!std::isfinite(target(config.initial_point))) config.initial_point[2] = 0.0;
    }
    return mcmc_sample(target, location_scale_coordinates(), location_scale_names(), config);
}

MarginalLikelihood importance_marginal(const LogTarget& target, const PosteriorDraws& draws,
                                       const ImportanceOptions& opts) {
    const auto d = static_cast<Eigen::Index>(draws.draws.cols());
    const auto rows = static_cast<Eigen::Index>(draws.rows());
    if (rows < 2 * d + 2) throw DomainError("marginal likelihood: too few posterior draws to fit the proposal");
    if (!(opts.dof > 0.0) || opts.samples < 10) throw DomainError("marginal likelihood: invalid importance options");
    const auto& coords = draws.coordinates;

    Eigen::MatrixXd t(rows, d);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            t(i, j) = to_sampling(coords[static_cast<std::size_t>(j)], draws.draws(i, j));
    const Eigen::VectorXd mean = t.colwise().mean();
    const Eigen::MatrixXd centered = t.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(rows - 1);
    // A t_nu with scale matrix S has covariance S nu/(nu-2); match it.
    if (opts.dof > 2.0) cov *= (opts.dof - 2.0) / opts.dof;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericalError("marginal likelihood: draw covariance is singular");
    const Eigen::MatrixXd L = llt.matrixL();
    const double log_det_L = L.diagonal().array().log().sum();
    const double nu = opts.dof;
    const double dd = static_cast<double>(d);
    const double log_norm = std::lgamma(0.5 * (nu + dd)) - std::lgamma(0.5 * nu) -
                            0.5 * dd * std::log(nu * std::numbers::pi) - log_det_L;

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    std::chi_squared_distribution<double> chi2(nu);

    std::vector<double> log_w(opts.samples);
    std::vector<double> natural(static_cast<std::size_t>(d));
    Eigen::VectorXd z(d);
    for (std::size_t s = 0; s < opts.samples; ++s) {
        for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
        const double w = chi2(rng);
        const Eigen::VectorXd x = mean + L * z * std::sqrt(nu / w);
        // Mahalanobis distance: L^{-1}(x - mean) = z sqrt(nu/w)
        const double q = z.squaredNorm() * nu / w;
        const double log_q = log_norm - 0.5 * (nu + dd) * std::log1p(q / nu);
        double jac = 0.0;
        bool finite = true;
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto c = coords[static_cast<std::size_t>(j)];
            natural[static_cast<std::size_t>(j)] = from_sampling(c, x[j]);
            jac += log_jacobian(c, x[j]);
            finite = finite && std::isfinite(natural[static_cast<std::size_t>(j)]);
        }
        const double lp = finite ? target(natural) : -kInf;
        log_w[s] = std::isnan(lp) ? -kInf : lp + jac - log_q;
    }

    const double max_w = *std::max_element(log_w.begin(), log_w.end());
    if (!std::isfinite(max_w)) throw UnreliableEstimate("marginal likelihood: every importance weight is zero");
    double sum = 0.0, sum_sq = 0.0;
    for (double lw : log_w) {
        const double w = std::exp(lw - max_w);
        sum += w;
        sum_sq += w * w;
    }
    const double N = static_cast<double>(opts.samples);
    MarginalLikelihood out;
    out.samples = opts.samples;
    out.ess = sum * sum / sum_sq;
    out.log_value = max_w + std::log(sum / N);
    const double mean_w = sum / N;
    const double var_w = std::max(0.0, sum_sq / N - mean_w * mean_w) * N / (N - 1.0);
    out.std_error = std::sqrt(var_w / N) / mean_w;
    if (out.ess < opts.min_ess_fraction * N)
        throw UnreliableEstimate("marginal likelihood: importance-weight ESS " + std::to_string(out.ess) +
                                 " is below " + std::to_string(opts.min_ess_fraction * 100.0) + "% of " +
                                 std::to_string(opts.samples) + " samples");
    return out;
}

MarginalLikelihood marginal_likelihood(const Dataset& data, const ModelFamily& family, const PriorSpec& prior,
                                       const PosteriorDraws& draws, const ImportanceOptions& opts) {
    return importance_marginal(posterior_target(data, family, prior), draws, opts);
}

}  // namespace skewsym
