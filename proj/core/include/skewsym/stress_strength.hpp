#pragma once

// theta = P(X < Y) = S(0; mu, sigma, lambda) for Z = X - Y skew-symmetric.

#include "skewsym/inference.hpp"
#include "skewsym/mcmc.hpp"
#include "skewsym/propriety.hpp"

#include <vector>

namespace skewsym {

struct PairedSample {
    std::vector<double> x;
    std::vector<double> y;

    static PairedSample from_differences(std::vector<double> z);
    std::vector<double> differences() const;
    // Equal lengths, n >= 2, finite values.
    void validate() const;
};

// cdf of the skew-symmetric model at 0.
double theta_from_params(double mu, double sigma, double lambda, const ModelFamily& family);

struct ThetaPosterior {
    std::vector<double> theta;  // one per retained draw
    CredibleInterval interval{0.0, 0.0};
    double level = 0.95;
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    PosteriorDraws params;
    ProprietyReport propriety;
};

struct StressOptions {
    McmcConfig mcmc = McmcConfig::application_defaults();
    double level = 0.95;
    // Fit even when the propriety check does not return Proper.
    bool force = false;
};

// Push each retained (mu, sigma, lambda) draw through theta_from_params.
ThetaPosterior theta_from_draws(const PosteriorDraws& draws, const ModelFamily& family, double level = 0.95);

// Fit (mu, sigma, lambda) to the differences and map the draws. Throws
// DomainError when the propriety check fails and force is off.
ThetaPosterior posterior_theta(const PairedSample& sample, const ModelFamily& family, const PriorSpec& prior,
                               const StressOptions& options = {});

// Dataset form; censored observations are rejected because the mapping
// needs the complete sample.
ThetaPosterior posterior_theta(const Dataset& differences, const ModelFamily& family, const PriorSpec& prior,
                               const StressOptions& options = {});

}  // namespace skewsym
