#include "skewsym/coverage.hpp"

#include "skewsym/errors.hpp"
#include "skewsym/parallel.hpp"

#include <cmath>
#include <optional>

namespace skewsym {

void CoverageSpec::validate() const {
    if (n < 2) throw DomainError("coverage: sample size must be at least 2");
    if (replications < 1) throw DomainError("coverage: need at least one replication");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("coverage: level must lie in (0, 1)");
    if (!(sigma0 > 0.0)) throw DomainError("coverage: sigma0 must be positive");
    mcmc.validate();
}

namespace {

struct Replication {
    bool ok = false;
    std::array<bool, 3> covered{};
    double acceptance = 0.0;
};

}  // namespace

CoverageResult run_coverage(const CoverageSpec& spec, const ModelFamily& family,
                            std::shared_ptr<const JeffreysTable> table) {
    spec.validate();
    const PriorSpec prior = PriorSpec::independence_jeffreys(std::move(table));
    prior.validate(family);
    const SkewSymmetric truth(spec.mu0, spec.sigma0, spec.lambda0, family);
    const Params truth_params{spec.mu0, spec.sigma0, spec.lambda0};

    std::vector<Replication> reps(spec.replications);
    parallel_for(spec.replications, spec.threads, [&](std::size_t r) {
        Replication& rep = reps[r];
        try {
            Dataset data;
            data.exact = sample(truth, spec.n, derive_seed(spec.seed, 2 * r));
            McmcConfig cfg = spec.mcmc;
            cfg.seed = derive_seed(spec.seed, 2 * r + 1);
            cfg.initial_point.clear();
            const PosteriorDraws draws = sample_posterior(data, family, prior, cfg);
            for (std::size_t j = 0; j < 3; ++j) {
                const auto col = draws.column(j);
                rep.covered[j] = credible_interval(col, spec.level).contains(truth_params[j]);
            }
            rep.acceptance = draws.acceptance_rate;
            rep.ok = true;
        } catch (const NumericalError&) {
            rep.ok = false;
        }
    });

    CoverageResult out;
    out.replications = spec.replications;
    double acc = 0.0;
    for (const auto& rep : reps) {
        if (!rep.ok) {
            ++out.failed;
            continue;
        }
        acc += rep.acceptance;
        for (std::size_t j = 0; j < 3; ++j) out.covered[j] += rep.covered[j] ? 1 : 0;
    }
    if (static_cast<double>(out.failed) > 0.05 * static_cast<double>(spec.replications))
        throw NumericalError("coverage: " + std::to_string(out.failed) + " of " +
                             std::to_string(spec.replications) + " replications failed");
    const double good = static_cast<double>(spec.replications - out.failed);
    out.mean_acceptance = acc / good;
    for (std::size_t j = 0; j < 3; ++j) {
        const double p = static_cast<double>(out.covered[j]) / good;
        out.coverage[j] = p;
        out.std_error[j] = std::sqrt(p * (1.0 - p) / good);
    }
    return out;
}

}  // namespace skewsym
