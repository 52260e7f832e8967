#include "skewsym/binreg.hpp"

#include "skewsym/errors.hpp"
#include "skewsym/optimize.hpp"
#include "skewsym/parallel.hpp"
#include "skewsym/special.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skewsym {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// ----------------------------------------------------------------------------
// Data

GlmData GlmData::from_covariates(const std::vector<std::vector<double>>& covariates, std::vector<std::string> names,
                                 std::vector<double> n, std::vector<double> y) {
    GlmData d;
    const auto m = static_cast<Eigen::Index>(n.size());
    const auto k = static_cast<Eigen::Index>(covariates.size());
    if (names.size() != covariates.size()) throw DomainError("glm data: one name per covariate required");
    d.X.resize(m, k + 1);
    d.X.col(0).setOnes();
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto& col = covariates[static_cast<std::size_t>(j)];
        if (static_cast<Eigen::Index>(col.size()) != m) throw DomainError("glm data: covariate length differs from n");
        for (Eigen::Index i = 0; i < m; ++i) d.X(i, j + 1) = col[static_cast<std::size_t>(i)];
    }
    d.covariate_names = std::move(names);
    d.n = std::move(n);
    d.y = std::move(y);
    d.validate();
    return d;
}

GlmData GlmData::bliss() {
    return from_covariates({{1.6907, 1.7242, 1.7552, 1.7842, 1.8113, 1.8369, 1.8610, 1.8839}}, {"dose"},
                           {59, 60, 62, 56, 63, 59, 62, 60}, {6, 13, 18, 28, 52, 53, 61, 60});
}

void GlmData::validate() const {
    const auto m = X.rows();
    if (m < 1) throw DomainError("glm data: need at least one row");
    if (X.cols() < 1) throw DomainError("glm data: design matrix has no columns");
    if (static_cast<Eigen::Index>(n.size()) != m || static_cast<Eigen::Index>(y.size()) != m)
        throw DomainError("glm data: n and y must have one entry per design row");
    if (static_cast<Eigen::Index>(covariate_names.size()) != X.cols() - 1)
        throw DomainError("glm data: one name per covariate column required");
    for (Eigen::Index i = 0; i < m; ++i) {
        if (X(i, 0) != 1.0) throw DomainError("glm data: first design column must be identically 1");
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            if (!std::isfinite(X(i, j))) throw DomainError("glm data: non-finite covariate");
        const auto r = static_cast<std::size_t>(i);
        if (!(n[r] >= 0.0) || !(y[r] >= 0.0) || y[r] > n[r] || !std::isfinite(n[r]))
            throw DomainError("glm data: row " + std::to_string(r + 1) + " needs 0 <= y <= n");
    }
}

bool operator==(const GlmData& a, const GlmData& b) {
    return a.X.rows() == b.X.rows() && a.X.cols() == b.X.cols() && a.X == b.X && a.n == b.n && a.y == b.y;
}

// ----------------------------------------------------------------------------
// Links

SkewLink SkewLink::logit() { return {"logit", ModelFamily::skew_logistic(), true, nullptr}; }
SkewLink SkewLink::probit() { return {"probit", ModelFamily::skew_normal(), true, nullptr}; }
SkewLink SkewLink::skew_logistic(std::shared_ptr<const JeffreysTable> table) {
    return {"skew-logistic", ModelFamily::skew_logistic(), false, std::move(table)};
}
SkewLink SkewLink::skew_normal(std::shared_ptr<const JeffreysTable> table) {
    return {"skew-normal", ModelFamily::skew_normal(), false, std::move(table)};
}

void SkewLink::validate() const {
    if (lambda_fixed) return;
    if (!lambda_prior) throw DomainError("link " + name + ": a Jeffreys table for lambda is required");
    if (!(lambda_prior->family() == family))
        throw DomainError("link " + name + ": Jeffreys table belongs to " + describe(lambda_prior->family()));
}

LinkValues SkewLink::eval(double eta, double lambda) const {
    if (lambda == 0.0) {
        if (family.base.kind() == BaseKind::logistic)
            return {special::log_sigmoid(eta), special::log_sigmoid(-eta), special::logistic_log_pdf(eta)};
        if (family.base.kind() == BaseKind::normal)
            return {special::norm_log_cdf(eta), special::norm_log_cdf(-eta), special::norm_log_pdf(eta)};
    }
    LinkValues v;
    v.log_pdf = standard_log_density(family, lambda, eta);
    // One quadrature per call: the smaller tail directly, the other by
    // complement.
    if (eta <= 0.0) {
        v.log_cdf = standard_log_cdf(family, lambda, eta);
        v.log_ccdf = std::log1p(-std::exp(v.log_cdf));
    } else {
        v.log_ccdf = standard_log_ccdf(family, lambda, eta);
        v.log_cdf = std::log1p(-std::exp(v.log_ccdf));
    }
    return v;
}

// ----------------------------------------------------------------------------
// Likelihood and prior

double binomial_log_constants(const GlmData& data) {
    double c = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i)
        c += std::lgamma(data.n[i] + 1.0) - std::lgamma(data.y[i] + 1.0) - std::lgamma(data.n[i] - data.y[i] + 1.0);
    return c;
}

namespace {

void check_beta(std::span<const double> beta, const GlmData& data) {
    if (beta.size() != data.columns())
        throw DomainError("glm: beta has " + std::to_string(beta.size()) + " entries, design has " +
                          std::to_string(data.columns()) + " columns");
}

double linear_predictor(const GlmData& data, std::size_t i, std::span<const double> beta) {
    double eta = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j)
        eta += data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * beta[j];
    return eta;
}

double row_loglik(const LinkValues& v, double n, double y) {
    double ll = 0.0;
    if (y > 0.0) {
        if (v.log_cdf == -kInf) return -kInf;
        ll += y * v.log_cdf;
    }
    if (n - y > 0.0) {
        if (v.log_ccdf == -kInf) return -kInf;
        ll += (n - y) * v.log_ccdf;
    }
    return ll;
}

double half_logdet(const GlmData& data, const std::vector<LinkValues>& vals) {
    const auto m = data.X.rows();
    const auto p = data.X.cols();
    if (m < p) return -kInf;
    std::vector<double> log_w(static_cast<std::size_t>(m));
    double max_w = -kInf;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& v = vals[static_cast<std::size_t>(i)];
        double lw = std::log(data.n[static_cast<std::size_t>(i)]) + 2.0 * v.log_pdf - v.log_cdf - v.log_ccdf;
        if (std::isnan(lw)) lw = -kInf;
        log_w[static_cast<std::size_t>(i)] = lw;
        max_w = std::max(max_w, lw);
    }
    if (max_w == -kInf) return -kInf;
    // det[X' W X] = e^{p max} det[(W~^{1/2} X)' (W~^{1/2} X)], W~ = W e^{-max}
    Eigen::MatrixXd A(m, p);
    for (Eigen::Index i = 0; i < m; ++i) A.row(i) = data.X.row(i) * std::exp(0.5 * (log_w[static_cast<std::size_t>(i)] - max_w));
    // Rank is decided on the unweighted rows that carry weight, with unit
    // columns: weights spanning many decades would fool a pivot threshold.
    Eigen::MatrixXd B(m, p);
    Eigen::Index live = 0;
    for (Eigen::Index i = 0; i < m; ++i)
        if (log_w[static_cast<std::size_t>(i)] > -kInf) B.row(live++) = data.X.row(i);
    if (live < p) return -kInf;
    B.conservativeResize(live, p);
    B.colwise().normalize();
    if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(B).rank() < p) return -kInf;

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    double s = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double r = std::fabs(qr.matrixQR()(j, j));
        if (!(r > 0.0)) return -kInf;
        s += std::log(r);
    }
    return s + 0.5 * static_cast<double>(p) * max_w;
}

std::vector<LinkValues> link_values(std::span<const double> beta, double lambda, const GlmData& data,
                                    const SkewLink& link) {
    std::vector<LinkValues> vals(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) vals[i] = link.eval(linear_predictor(data, i, beta), lambda);
    return vals;
}

}  // namespace

double glm_loglik(std::span<const double> beta, double lambda, const GlmData& data, const SkewLink& link,
                  bool include_constants) {
    check_beta(beta, data);
    double ll = include_constants ? binomial_log_constants(data) : 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const double r = row_loglik(link.eval(linear_predictor(data, i, beta), lambda), data.n[i], data.y[i]);
        if (r == -kInf) return -kInf;
        ll += r;
    }
    return ll;
}

double cik_half_logdet(std::span<const double> beta, double lambda, const GlmData& data, const SkewLink& link) {
    check_beta(beta, data);
    return half_logdet(data, link_values(beta, lambda, data, link));
}

double cik_logprior(std::span<const double> beta, double lambda, const GlmData& data, const SkewLink& link) {
    const double h = cik_half_logdet(beta, lambda, data, link);
    if (link.lambda_fixed || h == -kInf) return h;
    link.validate();
    return h + link.lambda_prior->log_density(lambda);
}

// ----------------------------------------------------------------------------
// Maximum likelihood

namespace {

// beta = T gamma maps coefficients on standardized covariates back to the
// original design.
Eigen::MatrixXd standardizing_map(const GlmData& data) {
    const auto p = data.X.cols();
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index j = 1; j < p; ++j) {
        const Eigen::VectorXd c = data.X.col(j);
        const double mean = c.mean();
        double sd = std::sqrt((c.array() - mean).square().sum() / static_cast<double>(c.size()));
        if (!(sd > 0.0)) sd = 1.0;
        T(j, j) = 1.0 / sd;
        T(0, j) = -mean / sd;
    }
    return T;
}

// Least squares on empirical link-transformed proportions.
std::vector<double> symmetric_start(const GlmData& data, const SkewLink& link) {
    const SkewSymmetric sym(0.0, 1.0, 0.0, link.family);
    Eigen::VectorXd e(data.X.rows());
    for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
        const auto r = static_cast<std::size_t>(i);
        const double p = (data.y[r] + 0.5) / (data.n[r] + 1.0);
        e[i] = quantile(sym, p);
    }
    const Eigen::VectorXd b = data.X.colPivHouseholderQr().solve(e);
    return {b.data(), b.data() + b.size()};
}

}  // namespace

GlmMle glm_mle(const GlmData& data, const SkewLink& link, bool include_constants, double lambda_max) {
    data.validate();
    link.validate();
    const auto p = data.X.cols();
    const Eigen::MatrixXd T = standardizing_map(data);
    const bool free_lambda = !link.lambda_fixed;

    auto unpack = [&](const std::vector<double>& x, std::vector<double>& beta) {
        Eigen::Map<const Eigen::VectorXd> g(x.data(), p);
        const Eigen::VectorXd b = T * g;
        beta.assign(b.data(), b.data() + p);
        return free_lambda ? x[static_cast<std::size_t>(p)] : 0.0;
    };
    auto objective = [&](const std::vector<double>& x) {
        thread_local std::vector<double> beta;
        const double raw = unpack(x, beta);
        const double lam = std::clamp(raw, -lambda_max, lambda_max);
        const double excess = std::fabs(raw) - lambda_max;
        const double penalty = excess > 0.0 ? excess * excess : 0.0;
        try {
            return -glm_loglik(beta, lam, data, link) + penalty;
        } catch (const NumericalError&) {
            return kInf;
        }
    };

    const std::vector<double> b0 = symmetric_start(data, link);
    const Eigen::VectorXd g0 = T.inverse() * Eigen::Map<const Eigen::VectorXd>(b0.data(), p);
    std::vector<std::vector<double>> starts;
    const std::vector<double> lambdas = free_lambda ? std::vector<double>{0.0, -2.0, 2.0, -5.0, 5.0}
                                                    : std::vector<double>{0.0};
    for (double lam : lambdas) {
        std::vector<double> s(g0.data(), g0.data() + p);
        if (free_lambda) s.push_back(lam);
        starts.push_back(std::move(s));
    }
    NelderMeadOptions opts;
    opts.initial_step = 0.5;
    opts.restarts = 4;
    NelderMeadResult best;
    best.value = kInf;
    for (const auto& s : starts) {
        auto r = nelder_mead(objective, s, opts);
        if (r.value < best.value) best = std::move(r);
    }
    if (!std::isfinite(best.value)) throw NumericalError("glm_mle: every start produced a non-finite likelihood");

    GlmMle out;
    const double raw = unpack(best.x, out.beta);
    out.lambda = std::clamp(raw, -lambda_max, lambda_max);
    out.boundary = free_lambda && std::fabs(out.lambda) >= lambda_max * (1.0 - 1e-6);
    out.max_loglik = glm_loglik(out.beta, out.lambda, data, link, include_constants);
    out.k = static_cast<int>(link.parameter_count(data));
    out.aic = aic(out.max_loglik, out.k);
    out.bic = bic(out.max_loglik, out.k, data.rows());
    return out;
}

// ----------------------------------------------------------------------------
// Posterior

std::optional<double> GlmPosterior::log_marginal() const {
    if (!log_c || !log_c0) return std::nullopt;
    return log_c->log_value - log_c0->log_value;
}

namespace {

std::vector<std::string> glm_names(const GlmData& data, const SkewLink& link) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < data.columns(); ++j) names.push_back("beta" + std::to_string(j));
    if (!link.lambda_fixed) names.push_back("lambda");
    return names;
}

std::vector<Coordinate> glm_coordinates(const GlmData& data, const SkewLink& link) {
    std::vector<Coordinate> c(data.columns(), Coordinate::real);
    if (!link.lambda_fixed) c.push_back(Coordinate::heavy);
    return c;
}

// Prior (with_likelihood = false) or posterior log density over
// (beta, [lambda]).
LogTarget glm_target(const GlmData& data, const SkewLink& link, bool with_likelihood, bool include_constants) {
    return [data, link, with_likelihood, include_constants](std::span<const double> x) {
        const std::size_t p = data.columns();
        const std::span<const double> beta = x.first(p);
        const double lambda = link.lambda_fixed ? 0.0 : x[p];
        try {
            const auto vals = link_values(beta, lambda, data, link);
            double lp = half_logdet(data, vals);
            if (lp == -kInf) return -kInf;
            if (!link.lambda_fixed) lp += link.lambda_prior->log_density(lambda);
            if (with_likelihood) {
                if (include_constants) lp += binomial_log_constants(data);
                for (std::size_t i = 0; i < data.rows(); ++i) {
                    const double r = row_loglik(vals[i], data.n[i], data.y[i]);
                    if (r == -kInf) return -kInf;
                    lp += r;
                }
            }
            return lp;
        } catch (const NumericalError&) {
            return -kInf;
        }
    };
}

// Inverse Hessian of -target in sampling coordinates, or empty when it is
// not positive definite.
Eigen::MatrixXd local_covariance(const LogTarget& target, const std::vector<Coordinate>& coords,
                                 const std::vector<double>& point) {
    const std::size_t d = point.size();
    std::vector<double> t(d);
    for (std::size_t j = 0; j < d; ++j) t[j] = to_sampling(coords[j], point[j]);
    auto f = [&](const std::vector<double>& s) {
        std::vector<double> x(d);
        double jac = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            x[j] = from_sampling(coords[j], s[j]);
            jac += log_jacobian(coords[j], s[j]);
        }
        return -(target(x) + jac);
    };
    const auto h = numerical_hessian(f, t);
    Eigen::MatrixXd H(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h[i][j];
    if (!H.allFinite()) return {};
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (H + H.transpose()));
    if (llt.info() != Eigen::Success) return {};
    return llt.solve(Eigen::MatrixXd::Identity(H.rows(), H.cols()));
}

PosteriorDraws run_chain(const LogTarget& target, const GlmData& data, const SkewLink& link, McmcConfig cfg,
                         const GlmMle& mle) {
    const auto coords = glm_coordinates(data, link);
    if (cfg.initial_point.empty()) {
        cfg.initial_point = mle.beta;
        if (!link.lambda_fixed) cfg.initial_point.push_back(std::clamp(mle.lambda, -20.0, 20.0));
    }
    if (cfg.initial_covariance.size() == 0) cfg.initial_covariance = local_covariance(target, coords, cfg.initial_point);
    return mcmc_sample(target, coords, glm_names(data, link), cfg);
}

}  // namespace

GlmPosterior glm_fit(const GlmData& data, const SkewLink& link, const GlmFitOptions& options) {
    data.validate();
    link.validate();
    GlmPosterior out;
    out.link_name = link.name;
    out.data = data;
    out.include_constants = options.include_constants;
    out.mle = glm_mle(data, link, options.include_constants);

    const LogTarget posterior = glm_target(data, link, true, options.include_constants);
    {
        std::vector<double> start = out.mle.beta;
        if (!link.lambda_fixed) start.push_back(std::clamp(out.mle.lambda, -20.0, 20.0));
        if (!std::isfinite(cik_half_logdet(out.mle.beta, start.size() > data.columns() ? start.back() : 0.0, data, link)))
            throw NumericalError("glm_fit: X'WX is singular at the starting point; the prior cannot be evaluated");
    }
    out.draws = run_chain(posterior, data, link, options.mcmc, out.mle);
    const auto counts = glm_predict(out, data, link);
    out.predicted_probabilities.resize(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i)
        out.predicted_probabilities[i] = data.n[i] > 0.0 ? counts[i] / data.n[i] : 0.5;

    if (options.marginal) {
        ImportanceOptions is = options.importance;
        is.seed = derive_seed(options.mcmc.seed, 101);
        out.log_c = importance_marginal(posterior, out.draws, is);

        const LogTarget prior = glm_target(data, link, false, false);
        McmcConfig prior_cfg = options.mcmc;
        prior_cfg.seed = derive_seed(options.mcmc.seed, 102);
        const PosteriorDraws prior_draws = run_chain(prior, data, link, prior_cfg, out.mle);
        is.seed = derive_seed(options.mcmc.seed, 103);
        out.log_c0 = importance_marginal(prior, prior_draws, is);
    }
    return out;
}

std::vector<double> glm_predict(const GlmPosterior& posterior, const GlmData& data, const SkewLink& link) {
    data.validate();
    const auto& D = posterior.draws;
    if (D.draws.cols() != static_cast<Eigen::Index>(link.parameter_count(data)))
        throw DomainError("glm_predict: draws do not match the design and link");
    const std::size_t p = data.columns();
    std::vector<double> mean(data.rows(), 0.0);
    std::vector<double> beta(p);
    for (Eigen::Index r = 0; r < D.draws.rows(); ++r) {
        for (std::size_t j = 0; j < p; ++j) beta[j] = D.draws(r, static_cast<Eigen::Index>(j));
        const double lambda = link.lambda_fixed ? 0.0 : D.draws(r, static_cast<Eigen::Index>(p));
        for (std::size_t i = 0; i < data.rows(); ++i) mean[i] += link.cdf(linear_predictor(data, i, beta), lambda);
    }
    const double rows = static_cast<double>(std::max<Eigen::Index>(D.draws.rows(), 1));
    for (std::size_t i = 0; i < data.rows(); ++i) mean[i] = data.n[i] * mean[i] / rows;
    return mean;
}

std::vector<GlmComparisonRow> glm_compare(const std::vector<GlmPosterior>& fits, const std::string& reference) {
    if (fits.empty()) throw DomainError("glm_compare: no fits");
    for (const auto& f : fits)
        if (!(f.data == fits.front().data)) throw DomainError("glm_compare: fits were made on different data");
    const auto ref = std::find_if(fits.begin(), fits.end(), [&](const auto& f) { return f.link_name == reference; });
    if (ref == fits.end()) throw DomainError("glm_compare: reference model '" + reference + "' not among the fits");
    const auto ref_lm = ref->log_marginal();

    std::vector<GlmComparisonRow> rows;
    for (const auto& f : fits) {
        GlmComparisonRow row{f.link_name, f.mle.aic, f.mle.bic, f.log_marginal(), std::nullopt};
        if (row.log_marginal && ref_lm) row.bayes_factor = std::exp(*row.log_marginal - *ref_lm);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace skewsym
