#pragma once

// Posterior assembly for (mu, sigma, lambda): exact and censored likelihood
// terms, the independence Jeffreys or benchmark prior, posterior sampling,
// maximum likelihood with AIC/BIC, and importance-sampled marginal
// likelihoods.

#include "skewsym/distributions.hpp"
#include "skewsym/jeffreys.hpp"
#include "skewsym/mcmc.hpp"
#include "skewsym/propriety.hpp"

#include <array>
#include <memory>
#include <optional>

namespace skewsym {

// (mu, sigma, lambda)
using Params = std::array<double, 3>;

inline const std::vector<std::string>& location_scale_names() {
    static const std::vector<std::string> names{"mu", "sigma", "lambda"};
    return names;
}

// mu as is, log sigma, asinh lambda.
inline std::vector<Coordinate> location_scale_coordinates() {
    return {Coordinate::real, Coordinate::positive, Coordinate::heavy};
}

struct PriorSpec {
    PriorKind kind = PriorKind::independence_jeffreys;
    std::shared_ptr<const JeffreysTable> jeffreys_table;  // independence_jeffreys
    std::optional<StudentTApprox> proper_lambda_prior;    // benchmark

    // sigma^{-1} pi(lambda)
    static PriorSpec independence_jeffreys(std::shared_ptr<const JeffreysTable> table);
    // sigma^{-1} p(lambda) with p a proper Student-t density
    static PriorSpec benchmark(const StudentTApprox& p);

    // Throws DomainError when the prior is incomplete or its table belongs
    // to a different model family.
    void validate(const ModelFamily& family) const;

    double log_lambda_density(double lambda) const;
    // -infinity for sigma <= 0.
    double log_density(const Params& params) const;
};

struct LikelihoodDiagnostics {
    // Censored intervals whose probability underflowed to zero.
    std::size_t zero_mass_intervals = 0;
};

// log P(a < Y <= b) under the model, evaluated on the side of the median
// that avoids cancellation.
double censored_log_mass(const SkewSymmetric& model, const Interval& s);

// Sum of exact log densities and censored log masses. -infinity for
// sigma <= 0 or a zero-mass interval (counted in diag).
double log_likelihood(const Params& params, const Dataset& data, const ModelFamily& family,
                      LikelihoodDiagnostics* diag = nullptr);

double log_posterior(const Params& params, const Dataset& data, const ModelFamily& family, const PriorSpec& prior,
                     LikelihoodDiagnostics* diag = nullptr);

// Closure over copies of data/family/prior. Quadrature failures map to
// -infinity so a chain rejects the move instead of aborting.
LogTarget posterior_target(const Dataset& data, const ModelFamily& family, const PriorSpec& prior);

struct MleResult {
    Params params{};
    double max_loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n = 0;
    int k = 3;
    // |lambda| reached the clamp: the likelihood kept increasing in |lambda|.
    bool boundary = false;
};

double aic(double loglik, int k);
double bic(double loglik, int k, std::size_t n);

// Nelder-Mead on (mu, log sigma, lambda) from several starts; lambda is
// clamped to [-lambda_max, lambda_max].
MleResult mle_fit(const Dataset& data, const ModelFamily& family, double lambda_max = 500.0);

// Draws from the posterior. An empty config.initial_point is replaced by
// the MLE with lambda pulled inside [-20, 20].
PosteriorDraws sample_posterior(const Dataset& data, const ModelFamily& family, const PriorSpec& prior,
                                McmcConfig config);

struct ImportanceOptions {
    std::size_t samples = 20000;
    double dof = 4.0;
    std::uint64_t seed = 1;
    double min_ess_fraction = 0.05;
};

struct MarginalLikelihood {
    double log_value = 0.0;
    double std_error = 0.0;  // Monte-Carlo standard error of log_value
    double ess = 0.0;        // effective sample size of the weights
    std::size_t samples = 0;
};

// log of int exp(target) over the natural coordinates, by importance
// sampling from a multivariate Student-t matched to the draw moments in
// sampling coordinates. Throws UnreliableEstimate when the weight ESS is
// below min_ess_fraction of the samples.
MarginalLikelihood importance_marginal(const LogTarget& target, const PosteriorDraws& draws,
                                       const ImportanceOptions& opts = {});

MarginalLikelihood marginal_likelihood(const Dataset& data, const ModelFamily& family, const PriorSpec& prior,
                                       const PosteriorDraws& draws, const ImportanceOptions& opts = {});

}  // namespace skewsym
