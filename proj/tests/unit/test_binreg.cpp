#include <doctest.h>

#include "skewsym/binreg.hpp"
#include "skewsym/errors.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace skewsym;

namespace {

std::shared_ptr<const JeffreysTable> table_for(const ModelFamily& f) {
    static const auto logistic = std::make_shared<const JeffreysTable>(build_table(ModelFamily::skew_logistic()));
    static const auto normal = std::make_shared<const JeffreysTable>(build_table(ModelFamily::skew_normal()));
    return f == ModelFamily::skew_logistic() ? logistic : normal;
}

SkewLink skew_logistic() { return SkewLink::skew_logistic(table_for(ModelFamily::skew_logistic())); }
SkewLink skew_normal() { return SkewLink::skew_normal(table_for(ModelFamily::skew_normal())); }

// S(eta; lambda) = int_{-inf}^{eta} 2 f(z) G(lambda z) dz.
double oracle_link_cdf(const SkewLink& link, double eta, double lambda) {
    auto dens = [&](double z) { return std::exp(standard_log_density(link.family, lambda, z)); };
    if (eta <= 0.0) return testutil::oracle_integral(dens, -INFINITY, eta);
    return 1.0 - testutil::oracle_integral(dens, eta, INFINITY);
}

// Plain Newton-Raphson (IRLS) for the logit model.
Eigen::VectorXd irls_logit(const GlmData& d) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d.X.cols());
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(b.size());
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(b.size(), b.size());
        for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
            const auto r = static_cast<std::size_t>(i);
            const double p = 1.0 / (1.0 + std::exp(-d.X.row(i).dot(b)));
            g += (d.y[r] - d.n[r] * p) * d.X.row(i).transpose();
            H += d.n[r] * p * (1 - p) * d.X.row(i).transpose() * d.X.row(i);
        }
        const Eigen::VectorXd step = H.ldlt().solve(g);
        b += step;
        if (step.norm() < 1e-13) break;
    }
    return b;
}

McmcConfig short_chain(std::uint64_t seed) {
    McmcConfig c;
    c.burn_in = 2000;
    c.thinning = 10;
    c.total_iterations = 2000 + 1000 * 10;
    c.seed = seed;
    return c;
}

// Reference predicted counts.
const std::vector<double> kLogitCounts{3.5, 9.9, 22.5, 33.9, 50.0, 53.2, 59.2, 58.7};

}  // namespace

TEST_CASE("data construction and validation") {
    const auto d = GlmData::bliss();
    CHECK(d.rows() == 8);
    CHECK(d.columns() == 2);
    CHECK(d.covariate_names == std::vector<std::string>{"dose"});
    CHECK(d.X(3, 1) == 1.7842);
    CHECK(d == GlmData::bliss());

    auto bad = d;
    bad.y[0] = 70;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = d;
    bad.X(2, 0) = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = d;
    bad.n.pop_back();
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(GlmData::from_covariates({{1.0, 2.0}}, {"x"}, {1, 1, 1}, {0, 0, 0}), DomainError);
    CHECK_THROWS_AS(GlmData::from_covariates({{1.0}}, {}, {1}, {0}), DomainError);

    auto other = d;
    other.y[7] = 59;
    CHECK_FALSE(other == d);
}

TEST_CASE("link values") {
    for (const auto& link : {SkewLink::logit(), SkewLink::probit(), skew_logistic(), skew_normal()}) {
        CAPTURE(link.name);
        CHECK_NOTHROW(link.validate());
        const std::vector<double> lambdas = link.lambda_fixed ? std::vector<double>{0.0}
                                                              : std::vector<double>{-4.0, -0.7, 0.0, 1.5, 8.0};
        for (double lam : lambdas)
            for (double eta : {-6.0, -1.2, 0.0, 0.4, 3.0}) {
                CAPTURE(lam);
                CAPTURE(eta);
                const auto v = link.eval(eta, lam);
                CHECK(std::exp(v.log_cdf) + std::exp(v.log_ccdf) == doctest::Approx(1.0).epsilon(1e-13));
                CHECK(link.cdf(eta, lam) == doctest::Approx(oracle_link_cdf(link, eta, lam)).epsilon(1e-9));
                const double h = 1e-5;
                const double slope = (link.cdf(eta + h, lam) - link.cdf(eta - h, lam)) / (2 * h);
                CHECK(std::exp(v.log_pdf) == doctest::Approx(slope).epsilon(1e-6));
            }
    }
    CHECK(SkewLink::logit().cdf(0.3, 0.0) == doctest::Approx(1.0 / (1.0 + std::exp(-0.3))).epsilon(1e-15));

    SkewLink broken = skew_logistic();
    broken.lambda_prior = nullptr;
    CHECK_THROWS_AS(broken.validate(), DomainError);
    broken.lambda_prior = table_for(ModelFamily::skew_normal());
    CHECK_THROWS_AS(broken.validate(), DomainError);
}

TEST_CASE("log-likelihood") {
    const auto d = GlmData::bliss();
    const std::vector<double> zero{0.0, 0.0};
    double total = 0.0;
    for (double n : d.n) total += n;
    for (const auto& link : {SkewLink::logit(), SkewLink::probit(), skew_logistic(), skew_normal()})
        CHECK(glm_loglik(zero, 0.0, d, link) == doctest::Approx(total * std::log(0.5)).epsilon(1e-13));

    // Direct logit formula.
    const std::vector<double> beta{-60.0, 34.0};
    double direct = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const double eta = beta[0] + beta[1] * d.X(static_cast<Eigen::Index>(i), 1);
        const double p = 1.0 / (1.0 + std::exp(-eta));
        direct += d.y[i] * std::log(p) + (d.n[i] - d.y[i]) * std::log1p(-p);
    }
    CHECK(glm_loglik(beta, 0.0, d, SkewLink::logit()) == doctest::Approx(direct).epsilon(1e-12));
    // Skew-logistic at lambda = 0 is the logit model.
    CHECK(glm_loglik(beta, 0.0, d, skew_logistic()) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(glm_loglik(beta, 0.0, d, SkewLink::logit(), true) ==
          doctest::Approx(direct + binomial_log_constants(d)).epsilon(1e-12));

    // All-success row driven to S = 1: contribution vanishes.
    const auto perfect = GlmData::from_covariates({{0.0, 1.0}}, {"x"}, {5, 7}, {5, 7});
    CHECK(glm_loglik(std::vector<double>{60.0, 0.0}, 0.0, perfect, SkewLink::logit()) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-20));
    // Opposing counts: the log scale keeps far tails finite until 1 - S
    // itself underflows.
    const auto mixed = GlmData::from_covariates({{0.0}}, {"x"}, {5}, {3});
    CHECK(glm_loglik(std::vector<double>{1e4, 0.0}, 0.0, mixed, SkewLink::probit()) ==
          doctest::Approx(-2 * 0.5e8).epsilon(1e-6));
    CHECK(glm_loglik(std::vector<double>{1e300, 0.0}, 0.0, mixed, SkewLink::probit()) == -INFINITY);

    CHECK_THROWS_AS(glm_loglik(std::vector<double>{0.0}, 0.0, d, SkewLink::logit()), DomainError);
}

TEST_CASE("determinant prior against Cauchy-Binet") {
    // For one covariate det[X' W X] = sum_{i<j} w_i w_j (x_i - x_j)^2, with
    // S and 1 - S from independent tail integrals.
    const auto d = GlmData::bliss();
    std::mt19937_64 rng(5);
    std::normal_distribution<double> N;
    for (const auto& link : {SkewLink::probit(), skew_logistic(), skew_normal()}) {
        const auto mle = glm_mle(d, link);
        for (int rep = 0; rep < 10; ++rep) {
            const std::vector<double> beta{mle.beta[0] * (1 + 0.1 * N(rng)), mle.beta[1] * (1 + 0.1 * N(rng))};
            const double lam = link.lambda_fixed ? 0.0 : mle.lambda + N(rng);
            std::vector<double> w(d.rows());
            for (std::size_t i = 0; i < d.rows(); ++i) {
                const double eta = beta[0] + beta[1] * d.X(static_cast<Eigen::Index>(i), 1);
                auto dens = [&](double z) { return std::exp(standard_log_density(link.family, lam, z)); };
                const double lo = testutil::oracle_integral(dens, -INFINITY, eta);
                const double hi = testutil::oracle_integral(dens, eta, INFINITY);
                w[i] = d.n[i] * dens(eta) * dens(eta) / (lo * hi);
            }
            double det = 0.0;
            for (std::size_t i = 0; i < d.rows(); ++i)
                for (std::size_t j = i + 1; j < d.rows(); ++j) {
                    const double dx = d.X(static_cast<Eigen::Index>(i), 1) - d.X(static_cast<Eigen::Index>(j), 1);
                    det += w[i] * w[j] * dx * dx;
                }
            CAPTURE(link.name);
            CAPTURE(lam);
            CHECK(cik_half_logdet(beta, lam, d, link) == doctest::Approx(0.5 * std::log(det)).epsilon(1e-10));
            const double prior = link.lambda_fixed ? 0.0 : link.lambda_prior->log_density(lam);
            CHECK(cik_logprior(beta, lam, d, link) == doctest::Approx(0.5 * std::log(det) + prior).epsilon(1e-10));
        }
    }
}

TEST_CASE("determinant prior against a dense determinant") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> N;
    // Three covariates on a synthetic design.
    std::vector<std::vector<double>> cov(3, std::vector<double>(12));
    std::vector<double> n(12, 10.0), y(12, 4.0);
    for (auto& c : cov)
        for (double& v : c) v = N(rng);
    const auto g = GlmData::from_covariates(cov, {"a", "b", "c"}, n, y);
    const std::vector<double> beta{0.2, -0.5, 0.3, 0.8};
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 4);
    for (Eigen::Index i = 0; i < g.X.rows(); ++i) {
        const double eta = g.X.row(i).dot(Eigen::Map<const Eigen::Vector4d>(beta.data()));
        const double p = 1.0 / (1.0 + std::exp(-eta));
        M += 10.0 * p * (1 - p) * g.X.row(i).transpose() * g.X.row(i);
    }
    CHECK(cik_half_logdet(beta, 0.0, g, SkewLink::logit()) == doctest::Approx(0.5 * std::log(M.determinant())).epsilon(1e-10));
}

TEST_CASE("determinant prior degenerates") {
    // Fewer rows than coefficients.
    const auto small = GlmData::from_covariates({{1.0}, {2.0}}, {"a", "b"}, {4}, {2});
    CHECK(cik_logprior(std::vector<double>{0.0, 0.0, 0.0}, 0.0, small, SkewLink::logit()) == -INFINITY);
    // Collinear columns.
    const auto coll = GlmData::from_covariates({{1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}}, {"a", "b"}, {4, 4, 4}, {1, 2, 3});
    CHECK(cik_logprior(std::vector<double>{0.0, 0.1, 0.1}, 0.0, coll, SkewLink::logit()) == -INFINITY);

    // Decreasing along a ray once past the bulk.
    const auto d = GlmData::bliss();
    for (const auto& link : {SkewLink::logit(), SkewLink::probit()}) {
        double prev = INFINITY;
        for (double t : {2.0, 4.0, 8.0, 16.0, 64.0, 256.0}) {
            const double v = cik_logprior(std::vector<double>{-60.0 * t, 34.0 * t}, 0.0, d, link);
            CHECK(v < prev);
            prev = v;
        }
        CHECK(prev < -20.0);
    }
}

TEST_CASE("scale-map identity") {
    const auto d = GlmData::bliss();
    std::mt19937_64 rng(17);
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(0.1, 10.0);
    for (const auto& link : {SkewLink::logit(), skew_logistic(), skew_normal()}) {
        for (int rep = 0; rep < 100; ++rep) {
            const double v = U(rng);
            const std::vector<double> beta{-50.0 + 5 * N(rng), 28.0 + 3 * N(rng)};
            const double lam = link.lambda_fixed ? 0.0 : 3 * N(rng);
            auto scaled = d;
            scaled.X.col(1) *= v;
            const std::vector<double> beta_v{beta[0], beta[1] / v};
            const double lhs = cik_logprior(beta_v, lam, scaled, link);
            const double rhs = cik_logprior(beta, lam, d, link) + std::log(v);
            CAPTURE(link.name);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }
    }
}

TEST_CASE("maximum likelihood") {
    const auto d = GlmData::bliss();
    const auto logit = glm_mle(d, SkewLink::logit());
    const Eigen::VectorXd b = irls_logit(d);
    CHECK(logit.beta[0] == doctest::Approx(b[0]).epsilon(1e-4));
    CHECK(logit.beta[1] == doctest::Approx(b[1]).epsilon(1e-4));
    CHECK(logit.k == 2);
    CHECK_FALSE(logit.boundary);
    CHECK(logit.aic == doctest::Approx(-2 * logit.max_loglik + 4).epsilon(1e-14));
    CHECK(logit.bic == doctest::Approx(-2 * logit.max_loglik + 2 * std::log(8.0)).epsilon(1e-14));

    // Reference AICs, binomial constants excluded.
    CHECK(std::fabs(logit.aic - 376.50) < 1.0);
    const auto probit = glm_mle(d, SkewLink::probit());
    CHECK(std::fabs(probit.aic - 375.36) < 1.0);
    const auto sl = glm_mle(d, skew_logistic());
    CHECK(std::fabs(sl.aic - 370.75) < 1.0);
    CHECK(sl.k == 3);
    CHECK(sl.lambda < 0.0);
    const auto sn = glm_mle(d, skew_normal());
    CHECK(std::fabs(sn.aic - 371.04) < 1.0);
    // Nested: the skew links can only improve on their symmetric members.
    CHECK(sl.max_loglik >= logit.max_loglik - 1e-8);
    CHECK(sn.max_loglik >= probit.max_loglik - 1e-8);

    const auto with_c = glm_mle(d, SkewLink::logit(), true);
    CHECK(with_c.aic == doctest::Approx(logit.aic - 2 * binomial_log_constants(d)).epsilon(1e-8));
}

TEST_CASE("posterior predictions for the beetle data") {
    const auto d = GlmData::bliss();
    GlmFitOptions opts;
    opts.mcmc = short_chain(3);
    opts.marginal = false;
    const auto fit = glm_fit(d, SkewLink::logit(), opts);
    REQUIRE(fit.draws.rows() == 1000);
    CHECK(fit.draws.param_names == std::vector<std::string>{"beta0", "beta1"});
    const auto counts = glm_predict(fit, d, SkewLink::logit());
    for (std::size_t i = 0; i < d.rows(); ++i) {
        CAPTURE(i);
        CHECK(std::fabs(counts[i] - kLogitCounts[i]) < 1.0);
        CHECK(fit.predicted_probabilities[i] > 0.0);
        CHECK(fit.predicted_probabilities[i] < 1.0);
        CHECK(fit.predicted_probabilities[i] * d.n[i] == doctest::Approx(counts[i]));
    }
    CHECK_FALSE(fit.log_marginal());

    const auto sl = glm_fit(d, skew_logistic(), opts);
    const auto sc = glm_predict(sl, d, skew_logistic());
    CHECK(std::fabs(sc[0] - 4.9) < 1.0);
    CHECK(std::fabs(sc[7] - 59.6) < 1.0);

    CHECK_THROWS_AS(glm_predict(sl, d, SkewLink::logit()), DomainError);
}

TEST_CASE("prediction from a point mass") {
    const auto d = GlmData::bliss();
    GlmPosterior p;
    p.draws.param_names = {"beta0", "beta1", "lambda"};
    p.draws.draws = Eigen::MatrixXd::Zero(5, 3);
    const auto counts = glm_predict(p, d, skew_normal());
    for (std::size_t i = 0; i < d.rows(); ++i) CHECK(counts[i] == doctest::Approx(d.n[i] / 2));
}

TEST_CASE("lambda pinned at zero reproduces logit") {
    const auto d = GlmData::bliss();
    GlmFitOptions opts;
    opts.mcmc = short_chain(21);
    opts.marginal = false;
    const auto logit = glm_fit(d, SkewLink::logit(), opts);
    SkewLink pinned = skew_logistic();
    pinned.lambda_fixed = true;
    pinned.name = "pinned";
    const auto other = glm_fit(d, pinned, opts);
    for (int j = 0; j < 2; ++j) {
        const auto a = logit.draws.column(static_cast<std::size_t>(j));
        const auto b = other.draws.column(static_cast<std::size_t>(j));
        CHECK(std::fabs(testutil::mean(a) - testutil::mean(b)) < 1e-9 * std::fabs(testutil::mean(a)));
    }
}

TEST_CASE("model comparison") {
    const auto d = GlmData::bliss();
    GlmFitOptions opts;
    opts.mcmc = short_chain(8);
    opts.importance.samples = 4000;
    const auto logit = glm_fit(d, SkewLink::logit(), opts);
    const auto probit = glm_fit(d, SkewLink::probit(), opts);
    REQUIRE(logit.log_marginal());
    const auto rows = glm_compare({logit, probit}, "logit");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].link_name == "logit");
    CHECK(*rows[0].bayes_factor == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rows[1].aic == probit.mle.aic);
    // Probit is preferred on this data.
    CHECK(*rows[1].bayes_factor > 1.0);
    CHECK(*rows[1].bayes_factor < 5.0);

    CHECK_THROWS_AS(glm_compare({logit}, "probit"), DomainError);
    CHECK_THROWS_AS(glm_compare({}, "logit"), DomainError);
    auto moved = probit;
    moved.data.y[0] = 7;
    CHECK_THROWS_AS(glm_compare({logit, moved}, "logit"), DomainError);
}

TEST_CASE("scale invariance of the normalizers") {
    // The determinant gains det V while d beta loses it, so C0 and C agree
    // on X and XV; both sides are importance-sampling estimates here.
    const auto d = GlmData::bliss();
    auto scaled = d;
    scaled.X.col(1) *= 10.0;
    GlmFitOptions opts;
    opts.mcmc = short_chain(13);
    opts.mcmc.total_iterations = 2000 + 4000 * 10;
    opts.importance.samples = 20000;
    const auto a = glm_fit(d, SkewLink::logit(), opts);
    const auto b = glm_fit(scaled, SkewLink::logit(), opts);
    REQUIRE(a.log_c0);
    REQUIRE(b.log_c0);
    CHECK(std::fabs(b.log_c0->log_value - a.log_c0->log_value) <
          3 * std::hypot(a.log_c0->std_error, b.log_c0->std_error) + 1e-3);
    CHECK(std::fabs(b.log_c->log_value - a.log_c->log_value) <
          3 * std::hypot(a.log_c->std_error, b.log_c->std_error) + 1e-3);
}

TEST_CASE("lambda interval covers zero under a logit truth") {
    // Counts simulated from the logit fit to the beetle data, refitted with
    // the skew-logistic link.
    const auto d = GlmData::bliss();
    const auto truth = glm_mle(d, SkewLink::logit());
    std::mt19937_64 rng(77);
    const int reps = 100;
    int covered = 0;
    for (int r = 0; r < reps; ++r) {
        auto sim = d;
        for (std::size_t i = 0; i < d.rows(); ++i) {
            const double eta = truth.beta[0] + truth.beta[1] * d.X(static_cast<Eigen::Index>(i), 1);
            std::binomial_distribution<int> B(static_cast<int>(d.n[i]), 1.0 / (1.0 + std::exp(-eta)));
            sim.y[i] = B(rng);
        }
        GlmFitOptions opts;
        opts.mcmc = short_chain(1000 + static_cast<std::uint64_t>(r));
        opts.marginal = false;
        const auto fit = glm_fit(sim, skew_logistic(), opts);
        covered += credible_interval(fit.draws.column("lambda"), 0.95).contains(0.0) ? 1 : 0;
    }
    const double rate = covered / static_cast<double>(reps);
    CAPTURE(rate);
    CHECK(std::fabs(rate - 0.95) < 3 * std::sqrt(0.95 * 0.05 / reps));
}
