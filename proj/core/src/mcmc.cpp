#include "skewsym/mcmc.hpp"

#include "skewsym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace skewsym {

double to_sampling(Coordinate c, double x) {
    switch (c) {
        case Coordinate::real: return x;
        case Coordinate::positive: return std::log(x);
        case Coordinate::heavy: return std::asinh(x);
    }
    return x;
}

double from_sampling(Coordinate c, double t) {
    switch (c) {
        case Coordinate::real: return t;
        case Coordinate::positive: return std::exp(t);
        case Coordinate::heavy: return std::sinh(t);
    }
    return t;
}

double log_jacobian(Coordinate c, double t) {
    switch (c) {
        case Coordinate::real: return 0.0;
        case Coordinate::positive: return t;
        // log cosh t, stable for large |t|
        case Coordinate::heavy: {
            const double a = std::fabs(t);
            return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
        }
    }
    return 0.0;
}

McmcConfig McmcConfig::simulation_defaults() {
    McmcConfig c;
    c.burn_in = 10000;
    c.thinning = 50;
    c.total_iterations = c.burn_in + 1000 * c.thinning;
    return c;
}

McmcConfig McmcConfig::application_defaults() {
    McmcConfig c;
    c.burn_in = 50000;
    c.thinning = 100;
    c.total_iterations = c.burn_in + 1000 * c.thinning;
    return c;
}

void McmcConfig::validate() const {
    if (thinning < 1) throw DomainError("mcmc: thinning must be >= 1");
    if (burn_in >= total_iterations) throw DomainError("mcmc: burn_in must be smaller than total_iterations");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
        throw DomainError("mcmc: target_acceptance must lie in (0, 1)");
    if (!initial_step.empty() && initial_step.size() != initial_point.size())
        throw DomainError("mcmc: initial_step and initial_point differ in length");
    for (double s : initial_step)
        if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("mcmc: initial_step entries must be positive");
}

std::vector<double> PosteriorDraws::column(std::size_t j) const {
    if (j >= static_cast<std::size_t>(draws.cols())) throw DomainError("draws: column index out of range");
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = draws(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

std::size_t PosteriorDraws::index_of(const std::string& name) const {
    const auto it = std::find(param_names.begin(), param_names.end(), name);
    if (it == param_names.end()) throw DomainError("draws: no parameter named '" + name + "'");
    return static_cast<std::size_t>(it - param_names.begin());
}

std::vector<double> PosteriorDraws::column(const std::string& name) const { return column(index_of(name)); }

namespace {

// Running mean and covariance (Welford).
class RunningMoments {
public:
    explicit RunningMoments(Eigen::Index d) : mean_(Eigen::VectorXd::Zero(d)), m2_(Eigen::MatrixXd::Zero(d, d)) {}

    void reset() {
        n_ = 0;
        mean_.setZero();
        m2_.setZero();
    }
    void push(const Eigen::VectorXd& x) {
        ++n_;
        const Eigen::VectorXd delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_).transpose();
    }
    std::size_t count() const { return n_; }
    Eigen::MatrixXd covariance() const { return m2_ / static_cast<double>(n_ - 1); }

private:
    std::size_t n_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd m2_;
};

}  // namespace

PosteriorDraws mcmc_sample(const LogTarget& target, const std::vector<Coordinate>& coordinates,
                           const std::vector<std::string>& names, const McmcConfig& config) {
    config.validate();
    const std::size_t d = config.initial_point.size();
    if (d == 0) throw DomainError("mcmc: empty initial point");
    if (coordinates.size() != d || names.size() != d)
        throw DomainError("mcmc: coordinates/names do not match the initial point");
    const auto D = static_cast<Eigen::Index>(d);

    std::vector<double> natural(d);
    auto eval = [&](const Eigen::VectorXd& t) {
        double jac = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            natural[j] = from_sampling(coordinates[j], t[static_cast<Eigen::Index>(j)]);
            jac += log_jacobian(coordinates[j], t[static_cast<Eigen::Index>(j)]);
        }
        for (double v : natural)
            if (!std::isfinite(v)) return -std::numeric_limits<double>::infinity();
        const double lp = target(natural);
        return std::isnan(lp) ? -std::numeric_limits<double>::infinity() : lp + jac;
    };

    Eigen::VectorXd x(D);
    for (std::size_t j = 0; j < d; ++j) {
        const double v = config.initial_point[j];
        if (coordinates[j] == Coordinate::positive && !(v > 0.0))
            throw NumericalError("mcmc initialization: positive coordinate '" + names[j] + "' starts at " +
                                 std::to_string(v));
        x[static_cast<Eigen::Index>(j)] = to_sampling(coordinates[j], v);
    }
    double lp = eval(x);
    if (!std::isfinite(lp)) throw NumericalError("mcmc initialization: target is not finite at the initial point");

    Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(D, D);
    for (std::size_t j = 0; j < d; ++j)
        chol(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
            config.initial_step.empty() ? 0.1 : config.initial_step[j];
    if (config.initial_covariance.size() != 0) {
        if (config.initial_covariance.rows() != D || config.initial_covariance.cols() != D)
            throw DomainError("mcmc: initial_covariance has the wrong shape");
        Eigen::LLT<Eigen::MatrixXd> llt(config.initial_covariance * (2.38 * 2.38 / static_cast<double>(d)));
        if (llt.info() != Eigen::Success) throw DomainError("mcmc: initial_covariance is not positive definite");
        chol = llt.matrixL();
    }
    double log_mult = 0.0;
    bool empirical = false;

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;

    RunningMoments moments(D);
    const std::size_t reset_at = config.burn_in / 4;
    const std::size_t min_samples = 20 * d + 100;

    PosteriorDraws out;
    out.param_names = names;
    out.coordinates = coordinates;
    out.burn_in = config.burn_in;
    out.thinning = config.thinning;
    out.seed = config.seed;
    out.draws.resize(static_cast<Eigen::Index>(config.retained()), D);

    std::size_t accepted_after = 0;
    Eigen::VectorXd z(D), y(D);
    Eigen::Index row = 0;
    for (std::size_t it = 0; it < config.total_iterations; ++it) {
        for (Eigen::Index j = 0; j < D; ++j) z[j] = normal(rng);
        y = x + std::exp(log_mult) * (chol * z);
        const double lp_y = eval(y);
        const double log_alpha = lp_y - lp;  // -inf - finite = -inf
        const double alpha = log_alpha >= 0.0 ? 1.0 : std::exp(log_alpha);
        if (uniform(rng) < alpha) {
            x = y;
            lp = lp_y;
            if (it >= config.burn_in) ++accepted_after;
        }

        const bool adapting = config.adaptation && it < config.burn_in;
        if (adapting) {
            log_mult += (alpha - config.target_acceptance) / std::pow(static_cast<double>(it + 1), 0.6);
            log_mult = std::clamp(log_mult, -20.0, 20.0);
            if (it == reset_at) moments.reset();
            moments.push(x);
            if (moments.count() >= min_samples && (it + 1) % 100 == 0) {
                Eigen::MatrixXd cov = moments.covariance() * (2.38 * 2.38 / static_cast<double>(d));
                cov.diagonal().array() += 1e-10;
                Eigen::LLT<Eigen::MatrixXd> llt(cov);
                if (llt.info() == Eigen::Success) {
                    chol = llt.matrixL();
                    // 2.38^2/d is already the right scale for a Gaussian
                    // target; restart the multiplier from there.
                    if (!empirical) log_mult = 0.0;
                    empirical = true;
                }
            }
        }

        if (it >= config.burn_in && (it - config.burn_in + 1) % config.thinning == 0) {
            for (std::size_t j = 0; j < d; ++j)
                out.draws(row, static_cast<Eigen::Index>(j)) = from_sampling(coordinates[j], x[static_cast<Eigen::Index>(j)]);
            ++row;
        }
    }
    out.acceptance_rate =
        static_cast<double>(accepted_after) / static_cast<double>(config.total_iterations - config.burn_in);
    return out;
}

double percentile(std::span<const double> values, double p) {
    if (values.empty()) throw DomainError("percentile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("percentile: p must lie in [0, 1]");
    std::vector<double> v(values.begin(), values.end());
    const double h = static_cast<double>(v.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lo), v.end());
    const double a = v[lo];
    if (hi == lo) return a;
    const double b = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(lo) + 1, v.end());
    return a + (h - static_cast<double>(lo)) * (b - a);
}

CredibleInterval credible_interval(std::span<const double> draws, double level) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("credible_interval: level must lie in (0, 1)");
    if (draws.size() < 100)
        throw DomainError("credible_interval: need at least 100 draws, got " + std::to_string(draws.size()));
    const double tail = (1.0 - level) / 2.0;
    return {percentile(draws, tail), percentile(draws, 1.0 - tail)};
}

double effective_sample_size(std::span<const double> chain) {
    const std::size_t n = chain.size();
    if (n < 4) return static_cast<double>(n);
    const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(n);
    auto autocov = [&](std::size_t lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += (chain[i] - mean) * (chain[i + lag] - mean);
        return s / static_cast<double>(n);
    };
    const double c0 = autocov(0);
    if (!(c0 > 0.0)) return static_cast<double>(n);
    // Geyer: sum pairs Gamma_k = rho_{2k} + rho_{2k+1} while positive,
    // enforcing monotone decrease.
    double tau = -1.0;
    double prev = INFINITY;
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        double gamma = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
        if (gamma <= 0.0) break;
        gamma = std::min(gamma, prev);
        prev = gamma;
        tau += 2.0 * gamma;
    }
    tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n)));
    return static_cast<double>(n) / tau;
}

double mc_standard_error(std::span<const double> chain) {
    const std::size_t n = chain.size();
    if (n < 2) throw DomainError("mc_standard_error: need at least 2 values");
    const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : chain) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return sd / std::sqrt(effective_sample_size(chain));
}

}  // namespace skewsym
