// skewsym: command-line front end. Exit codes: 0 success, 1 numerical or
// model failure, 2 usage error (bad flags, unreadable or malformed input,
// refusal to overwrite).

#include "commands.hpp"

#include "skewsym/errors.hpp"
#include "skewsym/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace skewsym;
using namespace skewsym::cli;

namespace {

void add_chain(CLI::App* app, ChainSettings& c) {
    app->add_option("--burn-in", c.burn_in, "MCMC burn-in iterations")->check(CLI::NonNegativeNumber);
    app->add_option("--thin", c.thinning, "keep every k-th iteration after burn-in")->check(CLI::PositiveNumber);
    app->add_option("--draws", c.draws, "retained posterior draws")->check(CLI::PositiveNumber);
    app->add_option_function<std::string>(
        "--mcmc", [&c](const std::string& s) {
            try {
                c.parse(s);
            } catch (const UsageError& e) {
                throw CLI::ValidationError(e.what());
            }
        }, "chain as total=N,burnin=N,thin=N,seed=N");
}

CLI::Option* add_model(CLI::App* app, std::string& model) {
    return app->add_option("--model", model, "skew-normal, skew-logistic, or a model JSON file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skew-symmetric models with Jeffreys-type priors"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", SKEWSYM_VERSION);

    Run run;
    run.threads = default_threads();
    std::string out = ".";
    app.add_option("--out", out, "directory for output artifacts")->capture_default_str();
    app.add_option("--seed", run.seed, "master random seed")->capture_default_str();
    app.add_option("--threads", run.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--force", run.force, "overwrite existing outputs; fit even when propriety is not guaranteed");

    PriorTabOptions pt;
    auto* c_prior = app.add_subcommand("prior-tab", "tabulate the Jeffreys prior of lambda and its t approximation");
    add_model(c_prior, pt.model)->required();
    c_prior->add_option("--max-abs", pt.max_abs, "grid edge in |lambda|")->check(CLI::PositiveNumber)->capture_default_str();
    c_prior->add_option("--per-side", pt.per_side, "grid points per half")->check(CLI::Range(8, 100000))->capture_default_str();

    FitOptions ft;
    auto* c_fit = app.add_subcommand("fit", "posterior of (mu, sigma, lambda) for exact and censored data");
    add_model(c_fit, ft.model)->required();
    c_fit->add_option("--data", ft.data, "CSV with y and/or lo,hi columns")->required();
    c_fit->add_option("--prior", ft.prior, "jeffreys or benchmark")->capture_default_str();
    c_fit->add_option("--level", ft.level, "credible level")->check(CLI::Range(0.5, 0.9999))->capture_default_str();
    c_fit->add_flag("--marginal", ft.marginal, "importance-sampled log marginal likelihood");
    add_chain(c_fit, ft.chain);

    CoverageOptions cv;
    auto* c_cov = app.add_subcommand("coverage", "frequentist coverage of credible intervals");
    add_model(c_cov, cv.model)->capture_default_str();
    c_cov->add_option("--n", cv.n, "sample size")->check(CLI::Range(2, 100000000))->capture_default_str();
    c_cov->add_option("--lambda0", cv.lambda0, "true lambda")->capture_default_str();
    c_cov->add_option("--reps", cv.replications, "replications")->check(CLI::PositiveNumber)->capture_default_str();
    c_cov->add_option("--level", cv.level, "credible level")->check(CLI::Range(0.5, 0.9999))->capture_default_str();
    add_chain(c_cov, cv.chain);

    BinregOptions br;
    auto* c_bin = app.add_subcommand("binreg", "binomial regression with skew-symmetric links");
    c_bin->add_option("--data", br.data, "CSV with n, y and covariate columns (default: built-in beetle data)");
    c_bin->add_option("--link", br.links, "logit, probit, skew-logistic, skew-normal (repeatable; default all)");
    c_bin->add_option("--reference", br.reference, "reference link for Bayes factors");
    c_bin->add_flag("--constants", br.constants, "include binomial coefficients in the likelihood");
    c_bin->add_flag("!--no-marginal", br.marginal, "skip marginal likelihoods and Bayes factors");
    add_chain(c_bin, br.chain);

    StressOptionsCli st;
    auto* c_st = app.add_subcommand("stress", "posterior of P(X < Y) from paired data");
    c_st->add_option("--data", st.data, "CSV with x,y columns or a z column of differences")->required();
    add_model(c_st, st.model)->capture_default_str();
    c_st->add_option("--prior", st.prior, "jeffreys or benchmark")->capture_default_str();
    c_st->add_option("--level", st.level, "credible level")->check(CLI::Range(0.5, 0.9999))->capture_default_str();
    c_st->add_option("--bins", st.bins, "histogram bins")->capture_default_str();
    add_chain(c_st, st.chain);

    ProprietyOptions pr;
    auto* c_pr = app.add_subcommand("check-propriety", "sufficient conditions for a proper posterior");
    c_pr->add_option("--data", pr.data, "CSV with y and/or lo,hi columns")->required();
    add_model(c_pr, pr.model)->capture_default_str();
    c_pr->add_option("--prior", pr.prior, "jeffreys or benchmark")->capture_default_str();

    ReproduceOptions rp;
    auto* c_rep = app.add_subcommand("reproduce", "regenerate a table or figure");
    c_rep->add_option("target", rp.target, "table1-table4, table6, table7, fig2, table8")->required();
    c_rep->add_option("--reps", rp.replications, "coverage replications")->check(CLI::PositiveNumber)->capture_default_str();
    c_rep->add_flag("--full", rp.full, "coverage at 1000 replications");
    c_rep->add_option("--lambda0", rp.lambdas, "true lambda values for coverage tables (repeatable)");
    c_rep->add_option("--link", rp.links, "links for table6 (repeatable; default all)");
    c_rep->add_option("--data", rp.data, "paired data for table8");
    add_chain(c_rep, rp.chain);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    run.out = out;
    run.argv.assign(argv, argv + argc);
    try {
        if (c_prior->parsed()) return run.subcommand = "prior-tab", prior_tab(run, pt);
        if (c_fit->parsed()) return run.subcommand = "fit", fit(run, ft);
        if (c_cov->parsed()) return run.subcommand = "coverage", coverage(run, cv);
        if (c_bin->parsed()) return run.subcommand = "binreg", binreg(run, br);
        if (c_st->parsed()) return run.subcommand = "stress", stress(run, st);
        if (c_pr->parsed()) return run.subcommand = "check-propriety", check_propriety(run, pr);
        if (c_rep->parsed()) return run.subcommand = "reproduce", reproduce(run, rp);
    } catch (const UsageError& e) {
        std::cerr << "skewsym: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "skewsym: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "skewsym: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
