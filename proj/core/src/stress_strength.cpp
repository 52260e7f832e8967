#include "skewsym/stress_strength.hpp"

#include "skewsym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skewsym {

PairedSample PairedSample::from_differences(std::vector<double> z) {
    PairedSample s;
    s.y.assign(z.size(), 0.0);
    s.x = std::move(z);
    return s;
}

std::vector<double> PairedSample::differences() const {
    validate();
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[i] - y[i];
    return z;
}

void PairedSample::validate() const {
    if (x.size() != y.size()) throw DomainError("paired sample: x and y differ in length");
    if (x.size() < 2) throw DomainError("paired sample: need at least 2 pairs");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw DomainError("paired sample: pair " + std::to_string(i + 1) + " is not finite");
}

double theta_from_params(double mu, double sigma, double lambda, const ModelFamily& family) {
    return cdf(SkewSymmetric(mu, sigma, lambda, family), 0.0);
}

ThetaPosterior theta_from_draws(const PosteriorDraws& draws, const ModelFamily& family, double level) {
    const std::size_t mu = draws.index_of("mu"), sigma = draws.index_of("sigma"), lambda = draws.index_of("lambda");
    ThetaPosterior out;
    out.level = level;
    out.theta.resize(draws.rows());
    for (std::size_t r = 0; r < draws.rows(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        out.theta[r] = theta_from_params(draws.draws(i, static_cast<Eigen::Index>(mu)),
                                         draws.draws(i, static_cast<Eigen::Index>(sigma)),
                                         draws.draws(i, static_cast<Eigen::Index>(lambda)), family);
    }
    const double n = static_cast<double>(out.theta.size());
    out.mean = std::accumulate(out.theta.begin(), out.theta.end(), 0.0) / n;
    double ss = 0.0;
    for (double t : out.theta) ss += (t - out.mean) * (t - out.mean);
    out.sd = out.theta.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out.median = percentile(out.theta, 0.5);
    if (out.theta.size() >= 100) out.interval = credible_interval(out.theta, level);
    else out.interval = {*std::min_element(out.theta.begin(), out.theta.end()),
                         *std::max_element(out.theta.begin(), out.theta.end())};
    out.params = draws;
    return out;
}

ThetaPosterior posterior_theta(const PairedSample& sample, const ModelFamily& family, const PriorSpec& prior,
                               const StressOptions& options) {
    Dataset data;
    data.exact = sample.differences();
    return posterior_theta(data, family, prior, options);
}

ThetaPosterior posterior_theta(const Dataset& differences, const ModelFamily& family, const PriorSpec& prior,
                               const StressOptions& options) {
    if (!differences.censored.empty())
        throw DomainError("stress-strength: censored pairs are not supported; the mapping through S(0) needs the "
                          "complete sample (censored data call for a joint model of X and Y)");
    differences.validate();
    if (differences.exact.size() < 2) throw DomainError("stress-strength: need at least 2 differences");
    const ProprietyReport report = check_exact(differences, family.base, prior.kind);
    if (report.verdict != Verdict::Proper && !options.force) {
        std::string msg = "stress-strength: posterior propriety is not guaranteed (" +
                          std::string(to_string(report.verdict)) + ")";
        for (const auto& r : report.reasons) msg += "; " + r;
        throw DomainError(msg + "; rerun with force to fit anyway");
    }
    const PosteriorDraws draws = sample_posterior(differences, family, prior, options.mcmc);
    ThetaPosterior out = theta_from_draws(draws, family, options.level);
    out.propriety = report;
    return out;
}

}  // namespace skewsym
