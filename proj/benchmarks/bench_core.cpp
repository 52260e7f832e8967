#include <benchmark/benchmark.h>

#include "skewsym/binreg.hpp"
#include "skewsym/distributions.hpp"
#include "skewsym/inference.hpp"
#include "skewsym/jeffreys.hpp"
#include "skewsym/mcmc.hpp"
#include "skewsym/propriety.hpp"
#include "skewsym/quadrature.hpp"

#include <cmath>
#include <memory>
#include <random>

using namespace skewsym;

namespace {

std::shared_ptr<const JeffreysTable> logistic_table() {
    static const auto table = std::make_shared<const JeffreysTable>(build_table(ModelFamily::skew_logistic()));
    return table;
}

}  // namespace

static void BM_IntegrateGaussianTail(benchmark::State& state) {
    const auto f = [](double x) { return std::exp(-0.5 * x * x); };
    for (auto _ : state) benchmark::DoNotOptimize(integrate(f, 0.0, INFINITY).value);
}
BENCHMARK(BM_IntegrateGaussianTail);

static void BM_StandardCdf(benchmark::State& state) {
    const auto fam = ModelFamily::skew_normal();
    const double z = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(standard_cdf(fam, 3.0, z));
}
BENCHMARK(BM_StandardCdf)->Arg(-3)->Arg(0)->Arg(12);

static void BM_FisherLambda(benchmark::State& state) {
    const auto fam = ModelFamily::skew_normal();
    const double lam = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fisher_lambda(fam.base, fam.skew, lam));
}
BENCHMARK(BM_FisherLambda)->Arg(0)->Arg(1)->Arg(100);

// Full 801-point table; the cost behind every fit with the Jeffreys prior.
static void BM_BuildTable(benchmark::State& state) {
    const auto fam = ModelFamily::skew_logistic();
    for (auto _ : state) benchmark::DoNotOptimize(build_table(fam).norm_constant());
}
BENCHMARK(BM_BuildTable)->Unit(benchmark::kMillisecond);

static void BM_TableLookup(benchmark::State& state) {
    const auto table = logistic_table();
    double lam = -30.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(table->log_density(lam));
        lam = lam > 30.0 ? -30.0 : lam + 0.37;
    }
}
BENCHMARK(BM_TableLookup);

static void BM_LogPosterior(benchmark::State& state) {
    const auto fam = ModelFamily::skew_logistic();
    Dataset data;
    data.exact = sample(SkewSymmetric(0.0, 1.0, 2.0, fam), static_cast<std::size_t>(state.range(0)), 7);
    const auto target = posterior_target(data, fam, PriorSpec::independence_jeffreys(logistic_table()));
    const std::vector<double> p{0.1, 1.2, 1.5};
    for (auto _ : state) benchmark::DoNotOptimize(target(p));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogPosterior)->Arg(30)->Arg(1000);

static void BM_McmcChain(benchmark::State& state) {
    const auto fam = ModelFamily::skew_logistic();
    Dataset data;
    data.exact = sample(SkewSymmetric(0.0, 1.0, 1.0, fam), 30, 11);
    const auto prior = PriorSpec::independence_jeffreys(logistic_table());
    McmcConfig cfg;
    cfg.burn_in = 1000;
    cfg.thinning = 1;
    cfg.total_iterations = 2000;
    cfg.initial_point = {0.0, 1.0, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(sample_posterior(data, fam, prior, cfg).acceptance_rate);
    state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_McmcChain)->Unit(benchmark::kMillisecond);

static void BM_LinkEval(benchmark::State& state) {
    const auto link = SkewLink::skew_normal(nullptr);
    double eta = -4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(link.eval(eta, 2.5).log_cdf);
        eta = eta > 4.0 ? -4.0 : eta + 0.13;
    }
}
BENCHMARK(BM_LinkEval);

static void BM_CikLogPrior(benchmark::State& state) {
    const auto data = GlmData::bliss();
    const auto link = SkewLink::skew_logistic(logistic_table());
    const std::vector<double> beta{-60.0, 34.0};
    for (auto _ : state) benchmark::DoNotOptimize(cik_logprior(beta, 1.0, data, link));
}
BENCHMARK(BM_CikLogPrior);

static void BM_CheckPropriety(benchmark::State& state) {
    Dataset data;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (int i = 0; i < state.range(0); ++i) data.exact.push_back(z(rng));
    const auto base = SymmetricBase::logistic();
    for (auto _ : state) benchmark::DoNotOptimize(check_propriety(data, base).verdict);
}
BENCHMARK(BM_CheckPropriety)->Arg(100)->Arg(10000);

static void BM_Sample(benchmark::State& state) {
    const SkewSymmetric m(0.0, 1.0, 3.0, ModelFamily::skew_logistic());
    std::mt19937_64 rng(5);
    for (auto _ : state) benchmark::DoNotOptimize(draw(m, rng));
}
BENCHMARK(BM_Sample);

BENCHMARK_MAIN();
