#pragma once

// Adaptive random-walk Metropolis on an unconstrained reparameterization.
// Positive coordinates are sampled as log x, heavy-tailed real coordinates
// optionally as asinh x; the Jacobian of each map is added to the target.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace skewsym {

// Log target density in the natural parameterization; may return -inf.
using LogTarget = std::function<double(std::span<const double>)>;

enum class Coordinate {
    real,   // sampled as is
    positive,  // sampled as log x
    heavy,  // sampled as asinh x (for polynomially decaying margins)
};

// Map between natural and sampling coordinates.
double to_sampling(Coordinate c, double x);
double from_sampling(Coordinate c, double t);
// log |dx/dt|
double log_jacobian(Coordinate c, double t);

struct McmcConfig {
    std::size_t total_iterations = 60000;
    std::size_t burn_in = 10000;
    std::size_t thinning = 50;
    std::vector<double> initial_point;
    // Initial per-coordinate proposal standard deviation in sampling
    // coordinates; empty means 0.1 for every coordinate.
    std::vector<double> initial_step;
    // Optional initial proposal covariance in sampling coordinates (scaled
    // by 2.38^2/d); overrides initial_step.
    Eigen::MatrixXd initial_covariance;
    bool adaptation = true;
    double target_acceptance = 0.234;
    std::uint64_t seed = 1;

    // Burn-in 10,000, thinning 50, 1,000 retained draws.
    static McmcConfig simulation_defaults();
    // Burn-in 50,000, thinning 100, 1,000 retained draws.
    static McmcConfig application_defaults();

    std::size_t retained() const { return burn_in < total_iterations ? (total_iterations - burn_in) / thinning : 0; }
    // Throws DomainError unless burn_in < total_iterations and thinning >= 1.
    void validate() const;
};

struct PosteriorDraws {
    Eigen::MatrixXd draws;  // rows: retained iterations, natural coordinates
    std::vector<std::string> param_names;
    std::vector<Coordinate> coordinates;
    double acceptance_rate = 0.0;  // over post-burn-in iterations
    std::size_t burn_in = 0;
    std::size_t thinning = 1;
    std::uint64_t seed = 0;

    std::size_t rows() const { return static_cast<std::size_t>(draws.rows()); }
    std::vector<double> column(std::size_t j) const;
    std::vector<double> column(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;
};

// Throws NumericalError when the initial point has a non-finite target and
// DomainError when the configuration or dimensions are invalid.
PosteriorDraws mcmc_sample(const LogTarget& target, const std::vector<Coordinate>& coordinates,
                           const std::vector<std::string>& names, const McmcConfig& config);

struct CredibleInterval {
    double lo;
    double hi;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

// Percentiles (1-level)/2 and 1-(1-level)/2 by linear interpolation between
// order statistics (h = (n-1) p). Needs at least 100 draws.
CredibleInterval credible_interval(std::span<const double> draws, double level = 0.95);

// Linear-interpolation percentile of a sample, p in [0, 1].
double percentile(std::span<const double> values, double p);

// Effective sample size from the initial monotone positive-sequence
// estimate of the integrated autocorrelation time.
double effective_sample_size(std::span<const double> chain);

// Monte-Carlo standard error of the sample mean, sd / sqrt(ESS).
double mc_standard_error(std::span<const double> chain);

}  // namespace skewsym
