#include "commands.hpp"

#include "skewsym/coverage.hpp"
#include "skewsym/errors.hpp"
#include "skewsym/parallel.hpp"
#include "skewsym/stress_strength.hpp"

#include <array>
#include <cmath>

namespace skewsym::cli {

namespace {

// table1..table4: coverage at n = 10, 30, 100, 1000.
int coverage_table(const Run& run, const ReproduceOptions& o, int which) {
    static constexpr std::array<std::size_t, 4> sizes{10, 30, 100, 1000};
    const std::size_t n = sizes[static_cast<std::size_t>(which - 1)];
    const std::vector<double> lambdas = o.lambdas.empty() ? std::vector<double>{0.5, 1.0, 2.0, 5.0, 10.0} : o.lambdas;
    const std::size_t reps = o.full ? 1000 : o.replications;
    const auto family = ModelFamily::skew_logistic();
    const auto table = jeffreys_table(family, run.threads);

    std::vector<std::vector<std::string>> rows;
    json cells = json::array();
    McmcConfig mcmc;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        CoverageSpec cs;
        cs.n = n;
        cs.lambda0 = lambdas[k];
        cs.replications = reps;
        cs.seed = derive_seed(run.seed, k);
        cs.mcmc = o.chain.apply(McmcConfig::simulation_defaults(), cs.seed);
        cs.threads = run.threads;
        mcmc = cs.mcmc;
        const auto r = run_coverage(cs, family, table);
        rows.push_back({num(lambdas[k]), num(r.coverage[0]), num(r.coverage[1]), num(r.coverage[2]),
                        num(r.std_error[0]), num(r.std_error[1]), num(r.std_error[2]), std::to_string(r.failed)});
        cells.push_back({{"lambda0", lambdas[k]},
                         {"seed", cs.seed},
                         {"coverage", {r.coverage[0], r.coverage[1], r.coverage[2]}},
                         {"std_error", {r.std_error[0], r.std_error[1], r.std_error[2]}},
                         {"failed", r.failed},
                         {"mean_acceptance", r.mean_acceptance}});
    }
    const std::string name = "table" + std::to_string(which);
    const json meta = {{"n", n},
                       {"replications", reps},
                       {"level", 0.95},
                       {"model", model_json(family)},
                       {"mcmc", {{"burn_in", mcmc.burn_in}, {"thinning", mcmc.thinning}, {"retained", mcmc.retained()}}}};
    run.write_csv(name + ".csv",
                  {"lambda0", "mu", "sigma", "lambda", "se_mu", "se_sigma", "se_lambda", "failed"}, rows, meta);
    json summary = meta;
    summary["cells"] = cells;
    summary["artifacts"] = {name + ".csv", name + ".json"};
    run.write_json(name + ".json", summary);
    run.print(summary);
    return 0;
}

int bliss_tables(const Run& run, const ReproduceOptions& o, bool predictions) {
    GlmFitOptions opt;
    opt.mcmc = o.chain.apply(McmcConfig::application_defaults(), run.seed);
    // Predicted counts need no normalizing constants.
    opt.marginal = !predictions;
    const BinregRun r = run_binreg(run, GlmData::bliss(), predictions ? o.links : std::vector<std::string>{},
                                   "", opt);
    json summary = comparison_json(r);
    if (predictions) {
        write_predictions(run, "table6.csv", r);
        json counts;
        for (std::size_t i = 0; i < r.fits.size(); ++i) counts[r.links[i].name] = glm_predict(r.fits[i], r.data, r.links[i]);
        summary = {{"predicted_counts", counts}, {"artifacts", {"table6.csv"}}};
        run.print(summary);
        return 0;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : r.comparison)
        rows.push_back({c.link_name, num(c.aic), num(c.bic), c.bayes_factor ? num(*c.bayes_factor) : "nan"});
    run.write_csv("table7.csv", {"model", "aic", "bic", "bayes_factor"}, rows);
    summary["artifacts"] = {"table7.csv", "table7.json"};
    run.write_json("table7.json", summary);
    run.print(summary);
    return 0;
}

// Jeffreys prior against its Student-t(1/2) approximation.
int fig2(const Run& run) {
    const std::array<ModelFamily, 2> fams{ModelFamily::skew_logistic(), ModelFamily::skew_normal()};
    std::array<StudentTFit, 2> fits;
    std::array<std::shared_ptr<const JeffreysTable>, 2> tables;
    for (std::size_t f = 0; f < 2; ++f) {
        tables[f] = jeffreys_table(fams[f], run.threads);
        fits[f] = fit_t_approx(*tables[f]);
    }
    std::vector<std::vector<std::string>> rows;
    for (int i = -400; i <= 400; ++i) {
        const double lam = i / 20.0;
        std::vector<std::string> row{num(lam)};
        for (std::size_t f = 0; f < 2; ++f) {
            const double p = tables[f]->density(lam), t = fits[f].approx.density(lam);
            row.insert(row.end(), {num(p), num(t), num(std::fabs(p - t))});
        }
        rows.push_back(std::move(row));
    }
    run.write_csv("fig2.csv",
                  {"lambda", "logistic_jeffreys", "logistic_t", "logistic_absdiff", "normal_jeffreys", "normal_t",
                   "normal_absdiff"},
                  rows);
    json summary = {{"skew_logistic", {{"t_scale", fits[0].approx.scale}, {"sup_distance", fits[0].sup_distance}}},
                    {"skew_normal", {{"t_scale", fits[1].approx.scale}, {"sup_distance", fits[1].sup_distance}}},
                    {"t_dof", 0.5},
                    {"artifacts", {"fig2.csv", "fig2.json"}}};
    run.write_json("fig2.json", summary);
    run.print(summary);
    return 0;
}

// Stress-strength fits of the paired-score data, skew-logistic against
// skew-normal.
int table8(const Run& run, const ReproduceOptions& o) {
    if (o.data.empty()) throw UsageError("reproduce table8 needs --data with the paired scores (x,y or z columns)");
    const PairedSample pairs = io::pairs_from_csv(io::read_csv_file(o.data));
    Dataset diffs;
    diffs.exact = pairs.differences();
    const std::array<ModelFamily, 2> fams{ModelFamily::skew_logistic(), ModelFamily::skew_normal()};
    const std::array<std::string, 2> names{"skew-logistic", "skew-normal"};
    json models = json::array();
    std::vector<std::vector<std::string>> rows;
    double ref_lm = 0.0;
    for (std::size_t f = 0; f < 2; ++f) {
        json prior_desc;
        const PriorSpec prior = make_prior(PriorKind::independence_jeffreys, fams[f], run.threads, prior_desc);
        StressOptions so;
        so.mcmc = o.chain.apply(McmcConfig::application_defaults(), derive_seed(run.seed, f));
        so.force = run.force;
        const ThetaPosterior post = posterior_theta(pairs, fams[f], prior, so);
        const MleResult mle = mle_fit(diffs, fams[f]);
        ImportanceOptions is;
        is.seed = derive_seed(run.seed, 10 + f);
        const auto m = marginal_likelihood(diffs, fams[f], prior, post.params, is);
        if (f == 0) ref_lm = m.log_value;
        const double bf = std::exp(m.log_value - ref_lm);
        models.push_back({{"model", names[f]},
                          {"aic", mle.aic},
                          {"bic", mle.bic},
                          {"bayes_factor", bf},
                          {"log_marginal", m.log_value},
                          {"log_marginal_std_error", m.std_error},
                          {"theta_interval", {post.interval.lo, post.interval.hi}},
                          {"theta_mean", post.mean}});
        rows.push_back({names[f], num(mle.aic), num(mle.bic), num(bf), num(post.interval.lo), num(post.interval.hi)});
    }
    run.write_csv("table8.csv", {"model", "aic", "bic", "bayes_factor", "theta_lo", "theta_hi"}, rows);
    json summary = {{"data", o.data}, {"n", diffs.exact.size()}, {"reference", "skew-logistic"}, {"models", models},
                    {"artifacts", {"table8.csv", "table8.json"}}};
    run.write_json("table8.json", summary);
    run.print(summary);
    return 0;
}

}  // namespace

int reproduce(const Run& run, const ReproduceOptions& o) {
    const std::string& t = o.target;
    if (t.size() == 6 && t.rfind("table", 0) == 0 && t[5] >= '1' && t[5] <= '4') return coverage_table(run, o, t[5] - '0');
    if (t == "table6") return bliss_tables(run, o, true);
    if (t == "table7") return bliss_tables(run, o, false);
    if (t == "fig2") return fig2(run);
    if (t == "table8") return table8(run, o);
    throw UsageError("unknown reproduce target '" + t + "' (table1-table4, table6, table7, fig2, table8)");
}

}  // namespace skewsym::cli
