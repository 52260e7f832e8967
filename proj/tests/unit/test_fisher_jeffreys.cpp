#include <doctest.h>

#include "skewsym/errors.hpp"
#include "skewsym/jeffreys.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace skewsym;

namespace {

constexpr double pi = std::numbers::pi;

// Direct evaluation of 2 int_0^inf x^2 f(x) k(lambda x) dx with the kernel
// written out from g and G, no log-space tricks.
double oracle_fisher(const SymmetricBase& f, const SkewingCdf& G, double lambda) {
    auto integrand = [&](double x) {
        const double u = lambda * x;
        const double g = G.pdf(u), c = G.cdf(u);
        const double k = g * g / (c * (1.0 - c));
        return std::isfinite(k) ? x * x * f.pdf(x) * k : 0.0;
    };
    return 2.0 * testutil::oracle_integral(integrand, 0.0, INFINITY);
}

const JeffreysTable& normal_table() {
    static const JeffreysTable t = build_table(ModelFamily::skew_normal());
    return t;
}

const JeffreysTable& logistic_table() {
    static const JeffreysTable t = build_table(ModelFamily::skew_logistic());
    return t;
}

}  // namespace

TEST_CASE("I(0) closed forms") {
    const auto sn = ModelFamily::skew_normal();
    const auto sl = ModelFamily::skew_logistic();
    const double i_sn = fisher_lambda(sn.base, sn.skew, 0.0);
    const double i_sl = fisher_lambda(sl.base, sl.skew, 0.0);
    CHECK(i_sn == doctest::Approx(2.0 / pi).epsilon(1e-10));
    CHECK(i_sl == doctest::Approx(pi * pi / 12.0).epsilon(1e-10));

    // 4 g(0)^2 int x^2 f(x) dx by an independent rule.
    auto second = [](const SymmetricBase& f) {
        return testutil::oracle_integral([&](double x) { return x * x * f.pdf(x); }, -INFINITY, INFINITY);
    };
    CHECK(std::fabs(i_sn - 4.0 / (2.0 * pi) * second(sn.base)) < 1e-6);
    CHECK(std::fabs(i_sl - 4.0 / 16.0 * second(sl.base)) < 1e-6);

    CHECK(jeffreys_lambda(sl.base, sl.skew, 0.0) == doctest::Approx(pi / std::sqrt(12.0)).epsilon(1e-10));
}

TEST_CASE("fisher_lambda against direct quadrature") {
    const std::vector<std::pair<SymmetricBase, SkewingCdf>> pairs{
        {SymmetricBase::normal(), SkewingCdf::normal()},
        {SymmetricBase::logistic(), SkewingCdf::logistic()},
        {SymmetricBase::student_t(5.0), SkewingCdf::normal()},
        {SymmetricBase::exp_power(1.5), SkewingCdf::logistic()},
        {SymmetricBase::normal(), SkewingCdf::student_t(3.0)},
    };
    for (const auto& [f, G] : pairs) {
        for (double lambda : {0.01, 0.3, 1.0, 2.5, 10.0, -4.0}) {
            CAPTURE(to_string(f.kind()));
            CAPTURE(to_string(G.kind()));
            CAPTURE(lambda);
            CHECK(fisher_lambda(f, G, lambda) == doctest::Approx(oracle_fisher(f, G, lambda)).epsilon(1e-8));
        }
    }
}

TEST_CASE("Jeffreys prior is symmetric") {
    for (const auto& fam : {ModelFamily::skew_normal(), ModelFamily::skew_logistic()}) {
        for (double l : {0.1, 1.0, 10.0, 77.0}) {
            const double p = jeffreys_lambda(fam.base, fam.skew, l);
            const double m = jeffreys_lambda(fam.base, fam.skew, -l);
            CHECK(std::fabs(p - m) / p < 1e-10);
        }
    }
    for (const auto* t : {&normal_table(), &logistic_table()}) {
        const auto& v = t->values();
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(v[i] - v[n - 1 - i]) / v[i] < 1e-10);
    }
}

TEST_CASE("tails decay like |lambda|^-3/2") {
    for (const auto& fam : {ModelFamily::skew_normal(), ModelFamily::skew_logistic()}) {
        const double r = jeffreys_lambda(fam.base, fam.skew, 100.0) / jeffreys_lambda(fam.base, fam.skew, 50.0);
        CHECK(std::fabs(r / std::pow(0.5, 1.5) - 1.0) < 0.05);

        // least squares slope of log pi against log lambda on [50, 200]
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (double l = 50.0; l <= 200.0; l *= 1.05, ++m) {
            const double x = std::log(l), y = std::log(jeffreys_lambda(fam.base, fam.skew, l));
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        CHECK(slope == doctest::Approx(-1.5).epsilon(0.05 / 1.5));
    }
}

TEST_CASE("tail envelope brackets I(lambda)") {
    for (const auto& fam : {ModelFamily::skew_normal(), ModelFamily::skew_logistic()}) {
        for (double l : {20.0, 35.0, 80.0, 200.0, -60.0}) {
            const auto env = fisher_tail_envelope(fam.base, fam.skew, l, 20.0);
            const double info = fisher_lambda(fam.base, fam.skew, l);
            CAPTURE(l);
            CHECK(env.lower <= info * (1.0 + 1e-12));
            CHECK(info <= env.upper);
        }
    }
    const auto sn = ModelFamily::skew_normal();
    CHECK_THROWS_AS(fisher_tail_envelope(sn.base, sn.skew, 5.0, 20.0), DomainError);
}

TEST_CASE("I(0) is finite exactly when the base has a second moment") {
    const SkewingCdf G = SkewingCdf::normal();
    for (const auto& f : {SymmetricBase::normal(), SymmetricBase::logistic(), SymmetricBase::exp_power(1.0),
                          SymmetricBase::exp_power(1.5), SymmetricBase::exp_power(2.0),
                          SymmetricBase::student_t(2.5), SymmetricBase::student_t(5.0)}) {
        CAPTURE(to_string(f.kind()));
        const double info = fisher_lambda(f, G, 0.0);
        CHECK(std::isfinite(info));
        CHECK(info == doctest::Approx(4.0 / (2.0 * pi) * f.second_moment()).epsilon(1e-8));
    }
    for (double nu : {1.0, 2.0}) {
        const auto f = SymmetricBase::student_t(nu);
        CHECK(std::isinf(fisher_lambda(f, G, 0.0)));
        CHECK_THROWS_AS(jeffreys_lambda(f, G, 0.0), DomainError);
        // Away from zero the information is finite.
        CHECK(std::isfinite(fisher_lambda(f, G, 0.5)));
        double prev = 0.0;
        for (double upper : {1e2, 1e4, 1e6, 1e8}) {
            const double part = fisher_lambda_truncated(f, G, 0.0, upper);
            CHECK(part > prev);
            prev = part;
        }
    }
}

TEST_CASE("truncated integral converges to the full one") {
    const auto f = SymmetricBase::logistic();
    const auto G = SkewingCdf::logistic();
    CHECK(fisher_lambda_truncated(f, G, 0.7, 200.0) == doctest::Approx(fisher_lambda(f, G, 0.7)).epsilon(1e-10));
    CHECK(fisher_lambda_truncated(f, G, 0.7, 2.0) < fisher_lambda(f, G, 0.7));
    CHECK_THROWS_AS(fisher_lambda_truncated(f, G, 0.7, 0.0), DomainError);
}

TEST_CASE("table normalization") {
    for (const auto* t : {&normal_table(), &logistic_table()}) {
        CHECK(t->lambda_grid().size() == 801);
        // Independent integral of sqrt(I): double-exponential rule over the
        // body, lambda^3 I(lambda) frozen at the last edge beyond it.
        const auto& fam = t->family();
        auto root_info = [&](double l) { return jeffreys_lambda(fam.base, fam.skew, l); };
        double body = 0.0;
        const std::vector<double> edges{0.0, 0.01, 0.1, 1.0, 10.0, 200.0, 2e4, 2e6, 2e8};
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            body += testutil::oracle_integral(root_info, edges[i], edges[i + 1]);
        const double far = edges.back();
        const double tail = 2.0 * far * root_info(far);
        const double total = 2.0 * (body + tail);
        CHECK(std::fabs(t->norm_constant() / total - 1.0) < 1e-6);

        // Normalized density integrates to one.
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            mass += testutil::oracle_integral([&](double l) { return t->density(l); }, edges[i], edges[i + 1]);
        mass += testutil::oracle_integral([&](double l) { return t->density(l); }, far, INFINITY);
        CHECK(std::fabs(2.0 * mass - 1.0) < 1e-6);
    }
}

TEST_CASE("table interpolation and tail constant") {
    for (const auto* t : {&normal_table(), &logistic_table()}) {
        const auto& fam = t->family();
        for (double l : {0.0, 0.0005, -0.0031, 0.37, 1.234, -7.77, 55.5, 199.0, 250.0, -1000.0, 1e5}) {
            CAPTURE(l);
            const double exact = jeffreys_lambda(fam.base, fam.skew, l) / t->norm_constant();
            CHECK(t->density(l) == doctest::Approx(exact).epsilon(1e-5));
        }
        CHECK(t->log_density(0.3) == doctest::Approx(t->log_density(-0.3)).epsilon(1e-12));
        // lambda^3 I(lambda) at a large lambda
        const double big = 5e4;
        const double limit = big * big * big * fisher_lambda(fam.base, fam.skew, big);
        CHECK(t->tail_constant() > 0.0);
        CHECK(t->tail_constant() == doctest::Approx(limit).epsilon(2e-3));
    }
}

TEST_CASE("skew-normal prior decreases in |lambda|") {
    const auto& t = normal_table();
    const auto& g = t.lambda_grid();
    const auto& v = t.values();
    const std::size_t zero = g.size() / 2;
    REQUIRE(g[zero] == 0.0);
    for (std::size_t i = zero + 1; i < g.size(); ++i) CHECK(v[i] < v[i - 1]);
}

TEST_CASE("table construction rejects bad input") {
    const auto fam = ModelFamily::skew_normal();
    CHECK_THROWS_AS(JeffreysTable(fam, {-2, -1, 0, 1, 3, 4, 5, 6, 7}, std::vector<double>(9, 1.0)), DomainError);
    std::vector<double> grid{-4, -3, -2, -1, 0, 1, 2, 3, 4};
    CHECK_THROWS_AS(JeffreysTable(fam, grid, std::vector<double>(8, 1.0)), DomainError);
    std::vector<double> vals(9, 1.0);
    vals[3] = 0.0;
    CHECK_THROWS_AS(JeffreysTable(fam, grid, vals), DomainError);
    GridSpec bad;
    bad.min_abs = 0.0;
    CHECK_THROWS_AS(bad.points(), DomainError);
    const ModelFamily cauchy{SymmetricBase::student_t(1.0), SkewingCdf::normal()};
    CHECK_THROWS_AS(build_table(cauchy), DomainError);
    GridSpec no_zero;
    no_zero.include_zero = false;
    CHECK_NOTHROW(build_table(cauchy, no_zero));
}

TEST_CASE("threaded build matches serial build") {
    GridSpec spec;
    spec.per_side = 60;
    const auto serial = build_table(ModelFamily::skew_logistic(), spec, 1);
    const auto threaded = build_table(ModelFamily::skew_logistic(), spec, 4);
    CHECK(serial.values() == threaded.values());
    CHECK(serial.norm_constant() == threaded.norm_constant());
}

TEST_CASE("Student-t(1/2) approximation") {
    const auto fn = fit_t_approx(normal_table());
    const auto fl = fit_t_approx(logistic_table());
    CHECK(fl.approx.dof == 0.5);
    CHECK(fl.approx.center == 0.0);
    CHECK(fl.approx.scale >= 1.23);
    CHECK(fl.approx.scale <= 1.43);
    CHECK(fn.approx.scale >= 1.47);
    CHECK(fn.approx.scale <= 1.67);
    // Regression bound: first run gave 0.01095.
    CHECK(fl.sup_distance <= 0.0131);
    CHECK(fl.sup_distance > 0.0);

    // Density is a proper symmetric Student-t.
    const StudentTApprox t{0.5, 4.0 / 3.0, 0.0};
    CHECK(t.density(2.0) == t.density(-2.0));
    const double half = testutil::oracle_integral([&](double x) { return t.density(x); }, 0.0, INFINITY);
    CHECK(2.0 * half == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(t.density(0.0) == doctest::Approx(std::tgamma(0.75) / (std::tgamma(0.25) * std::sqrt(0.5 * pi) * 4.0 / 3.0)));

    // The fitted scale is a local optimum of the sup distance.
    auto sup = [&](double s) {
        const StudentTApprox a{0.5, s, 0.0};
        const auto& tab = logistic_table();
        double worst = 0.0;
        for (std::size_t i = 0; i < tab.lambda_grid().size(); ++i)
            worst = std::max(worst, std::fabs(tab.normalized_value(i) - a.density(tab.lambda_grid()[i])));
        return worst;
    };
    CHECK(sup(fl.approx.scale) == doctest::Approx(fl.sup_distance));
    CHECK(sup(fl.approx.scale * 1.02) >= fl.sup_distance);
    CHECK(sup(fl.approx.scale * 0.98) >= fl.sup_distance);
}

TEST_CASE("independence prior") {
    const auto& t = logistic_table();
    CHECK(independence_prior_logdensity(0.0, 1.3, 0.4, t) == independence_prior_logdensity(17.0, 1.3, 0.4, t));
    CHECK(independence_prior_logdensity(0.0, 2.6, 0.4, t) - independence_prior_logdensity(0.0, 1.3, 0.4, t) ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-14));
    for (double l : {0.05, 1.0, 12.0, 300.0})
        CHECK(std::fabs(independence_prior_logdensity(0, 1, l, t) - independence_prior_logdensity(0, 1, -l, t)) <
              1e-10);
    CHECK_THROWS_AS(independence_prior_logdensity(0.0, 0.0, 1.0, t), DomainError);
    CHECK_THROWS_AS(independence_prior_logdensity(0.0, -1.0, 1.0, t), DomainError);
}

TEST_CASE("Fisher information diagonal") {
    // Normal model at lambda = 0: 1/sigma^2 and 2/sigma^2.
    const auto d0 = fisher_diag(SkewSymmetric(0.0, 1.5, 0.0, ModelFamily::skew_normal()));
    CHECK(d0.mu_mu == doctest::Approx(1.0 / 2.25).epsilon(1e-10));
    CHECK(d0.sigma_sigma == doctest::Approx(2.0 / 2.25).epsilon(1e-10));
    CHECK(d0.lambda_lambda == doctest::Approx(2.0 / pi).epsilon(1e-10));

    for (const auto& fam : {ModelFamily::skew_normal(), ModelFamily::skew_logistic(),
                            ModelFamily{SymmetricBase::student_t(4.0), SkewingCdf::normal()}}) {
        for (double l : {0.4, 3.0, -1.7}) {
            const auto a = fisher_diag(SkewSymmetric(0.0, 1.0, l, fam));
            const auto b = fisher_diag(SkewSymmetric(7.0, 1.0, l, fam));
            const auto c = fisher_diag(SkewSymmetric(0.0, 2.0, l, fam));
            CHECK(a.mu_mu == doctest::Approx(b.mu_mu).epsilon(1e-14));
            CHECK(4.0 * c.sigma_sigma == doctest::Approx(a.sigma_sigma).epsilon(1e-12));
            CHECK(std::fabs(a.lambda_lambda - fisher_lambda(fam.base, fam.skew, l)) < 1e-8);
            CHECK(a.mu_mu > 0.0);
        }
    }

    // Skew-logistic mu entry against the closed-form density: E[(d/dmu log s)^2].
    const double l = 1.3;
    auto score_sq = [&](double y) {
        const double h = 1e-5;
        if (skew_logistic_density(0.0, 1.0, l, y) < 1e-300) return 0.0;
        const double d = (std::log(skew_logistic_density(h, 1.0, l, y)) -
                          std::log(skew_logistic_density(-h, 1.0, l, y))) / (2 * h);
        return d * d * skew_logistic_density(0.0, 1.0, l, y);
    };
    const double oracle = testutil::oracle_integral(score_sq, -INFINITY, INFINITY);
    const auto d = fisher_diag(SkewSymmetric(0.0, 1.0, l, ModelFamily::skew_logistic()));
    CHECK(d.mu_mu == doctest::Approx(oracle).epsilon(1e-6));
}
