#pragma once

// Frequentist coverage of posterior credible intervals under the
// independence Jeffreys prior.

#include "skewsym/inference.hpp"

#include <array>
#include <cstdint>
#include <memory>

namespace skewsym {

struct CoverageSpec {
    std::size_t n = 30;
    double lambda0 = 1.0;
    double mu0 = 0.0;
    double sigma0 = 1.0;
    std::size_t replications = 200;
    double level = 0.95;
    McmcConfig mcmc = McmcConfig::simulation_defaults();  // initial_point and seed are set per replication
    std::uint64_t seed = 42;
    unsigned threads = 1;

    void validate() const;
};

struct CoverageResult {
    std::array<double, 3> coverage{};   // mu, sigma, lambda
    std::array<double, 3> std_error{};  // sqrt(p (1 - p) / N) with N the successful replications
    std::array<std::size_t, 3> covered{};
    std::size_t replications = 0;
    std::size_t failed = 0;
    double mean_acceptance = 0.0;
};

// Per replication r: data from the true model with seed derive_seed(seed, 2r),
// a chain with seed derive_seed(seed, 2r + 1). Throws NumericalError when more
// than 5% of replications fail.
CoverageResult run_coverage(const CoverageSpec& spec, const ModelFamily& family,
                            std::shared_ptr<const JeffreysTable> table);

}  // namespace skewsym
