#include "commands.hpp"

#include "skewsym/coverage.hpp"
#include "skewsym/errors.hpp"
#include "skewsym/parallel.hpp"
#include "skewsym/propriety.hpp"
#include "skewsym/stress_strength.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>

#ifndef SKEWSYM_VERSION
#define SKEWSYM_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace skewsym::cli {

// ----------------------------------------------------------------------------
// Artifacts

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

json Run::config() const {
    return {{"subcommand", subcommand}, {"argv", argv},  {"seed", seed},
            {"threads", threads},       {"out", out.string()}, {"version", SKEWSYM_VERSION}};
}

fs::path Run::reserve(const std::string& name) const {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw UsageError("cannot create output directory '" + out.string() + "': " + ec.message());
    const fs::path p = out / name;
    if (fs::exists(p) && !force) throw UsageError("'" + p.string() + "' exists; pass --force to overwrite");
    return p;
}

void Run::write_json(const std::string& name, json body) const {
    body["schema"] = 1;
    body["config"] = config();
    const fs::path p = reserve(name);
    std::ofstream f(p);
    f << body.dump(2) << "\n";
    if (!f) throw NumericalError("failed writing '" + p.string() + "'");
}

void Run::write_csv(const std::string& name, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows, const json& extra) const {
    json meta = extra;
    meta["schema"] = 1;
    meta["config"] = config();
    const fs::path p = reserve(name);
    std::ofstream f(p);
    f << "# " << meta.dump() << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
    f << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
        f << "\n";
    }
    if (!f) throw NumericalError("failed writing '" + p.string() + "'");
}

void Run::print(json j) const {
    j["schema"] = 1;
    j["config"] = config();
    (stdout_ ? *stdout_ : std::cout) << j.dump(2) << std::endl;
}

void ChainSettings::parse(const std::string& spec) {
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t end = std::min(spec.find(',', start), spec.size());
        const std::string item = spec.substr(start, end - start);
        start = end + 1;
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        const std::string key = item.substr(0, eq);
        const std::string value = eq == std::string::npos ? "" : item.substr(eq + 1);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
            throw UsageError("--mcmc: '" + item + "' is not key=<non-negative integer>");
        if (key == "total") total = v;
        else if (key == "burnin" || key == "burn_in") burn_in = v;
        else if (key == "thin") thinning = v;
        else if (key == "draws") draws = v;
        else if (key == "seed") seed = v;
        else throw UsageError("--mcmc: unknown key '" + key + "' (total, burnin, thin, draws, seed)");
    }
}

McmcConfig ChainSettings::apply(McmcConfig base, std::uint64_t seed_) const {
    if (burn_in) base.burn_in = *burn_in;
    if (thinning) base.thinning = *thinning;
    if (thinning && *thinning == 0) throw UsageError("--mcmc: thin must be positive");
    std::size_t kept = base.retained();
    if (draws) kept = *draws;
    else if (total) {
        if (*total <= base.burn_in) throw UsageError("--mcmc: total must exceed burnin");
        kept = (*total - base.burn_in) / base.thinning;
    }
    base.total_iterations = base.burn_in + kept * base.thinning;
    base.seed = seed ? *seed : seed_;
    base.validate();
    return base;
}

// ----------------------------------------------------------------------------
// Models and priors

io::ModelSpec resolve_model(const std::string& arg) {
    io::ModelSpec s;
    if (arg == "skew-normal") return s;
    if (arg == "skew-logistic") {
        s.family = ModelFamily::skew_logistic();
        return s;
    }
    if (!fs::exists(arg))
        throw UsageError("--model: '" + arg + "' is neither skew-normal, skew-logistic nor an existing JSON file");
    return io::read_model_file(arg);
}

std::shared_ptr<const JeffreysTable> jeffreys_table(const ModelFamily& family, unsigned threads) {
    static std::mutex m;
    static std::map<std::string, std::shared_ptr<const JeffreysTable>> cache;
    const std::string key = describe(family);
    {
        std::lock_guard lock(m);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto t = std::make_shared<const JeffreysTable>(build_table(family, {}, threads));
    std::lock_guard lock(m);
    return cache.emplace(key, t).first->second;
}

PriorKind parse_prior(const std::string& name) {
    if (name == "jeffreys" || name == "independence-jeffreys") return PriorKind::independence_jeffreys;
    if (name == "benchmark") return PriorKind::benchmark;
    throw UsageError("--prior must be jeffreys or benchmark, got '" + name + "'");
}

PriorSpec make_prior(PriorKind kind, const ModelFamily& family, unsigned threads, json& description) {
    if (kind == PriorKind::independence_jeffreys) {
        description = {{"kind", "independence_jeffreys"}};
        return PriorSpec::independence_jeffreys(jeffreys_table(family, threads));
    }
    StudentTApprox p;
    if (prior_defined_at_zero(family.base)) p = fit_t_approx(*jeffreys_table(family, threads)).approx;
    description = {{"kind", "benchmark"}, {"t_dof", p.dof}, {"t_scale", p.scale}};
    return PriorSpec::benchmark(p);
}

SkewLink make_link(const std::string& name, unsigned threads) {
    if (name == "logit") return SkewLink::logit();
    if (name == "probit") return SkewLink::probit();
    if (name == "skew-logistic") return SkewLink::skew_logistic(jeffreys_table(ModelFamily::skew_logistic(), threads));
    if (name == "skew-normal") return SkewLink::skew_normal(jeffreys_table(ModelFamily::skew_normal(), threads));
    throw UsageError("--link must be logit, probit, skew-logistic or skew-normal, got '" + name + "'");
}

json model_json(const ModelFamily& family) {
    json j;
    j["base"]["kind"] = std::string(to_string(family.base.kind()));
    if (family.base.shape()) j["base"]["shape"] = *family.base.shape();
    j["skew"]["kind"] = std::string(to_string(family.skew.kind()));
    if (family.skew.shape()) j["skew"]["shape"] = *family.skew.shape();
    return j;
}

namespace {

json chain_json(const McmcConfig& c) {
    return {{"burn_in", c.burn_in},   {"thinning", c.thinning}, {"total_iterations", c.total_iterations},
            {"retained", c.retained()}, {"seed", c.seed}};
}

json interval_json(const CredibleInterval& ci) { return json::array({ci.lo, ci.hi}); }

json summary_json(const std::vector<double>& v, double level) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    json j = {{"mean", mean},
              {"sd", std::sqrt(ss / static_cast<double>(v.size() - 1))},
              {"median", percentile(v, 0.5)},
              {"interval", interval_json(credible_interval(v, level))},
              {"ess", effective_sample_size(v)}};
    return j;
}

json propriety_json(const ProprietyReport& r) {
    json j = {{"verdict", std::string(to_string(r.verdict))}, {"reasons", r.reasons}, {"warnings", r.warnings}};
    if (r.witness) j["witness"] = {{"first", r.witness->first}, {"second", r.witness->second}, {"gap", r.witness->gap}};
    return j;
}

void require_proper(const ProprietyReport& r, bool force, const std::string& what) {
    if (r.verdict == Verdict::Proper || force) return;
    std::string msg = what + ": posterior propriety is not guaranteed (" + std::string(to_string(r.verdict)) + ")";
    for (const auto& s : r.reasons) msg += "; " + s;
    throw DomainError(msg + "; pass --force to fit anyway");
}

std::vector<std::vector<std::string>> draws_rows(const PosteriorDraws& d) {
    std::vector<std::vector<std::string>> rows(d.rows());
    for (std::size_t r = 0; r < d.rows(); ++r)
        for (Eigen::Index j = 0; j < d.draws.cols(); ++j) rows[r].push_back(num(d.draws(static_cast<Eigen::Index>(r), j)));
    return rows;
}

}  // namespace

// ----------------------------------------------------------------------------
// prior-tab

int prior_tab(const Run& run, const PriorTabOptions& o) {
    const auto spec = resolve_model(o.model);
    GridSpec grid;
    grid.max_abs = o.max_abs;
    grid.per_side = o.per_side;
    const JeffreysTable table = build_table(spec.family, grid, run.threads);
    const StudentTFit t = fit_t_approx(table);

    std::vector<std::vector<std::string>> rows;
    const auto& g = table.lambda_grid();
    for (std::size_t i = 0; i < g.size(); ++i)
        rows.push_back({num(g[i]), num(table.values()[i]), num(table.normalized_value(i)), num(t.approx.density(g[i]))});
    run.write_csv("prior_tab.csv", {"lambda", "sqrt_fisher", "density", "t_approx"}, rows,
                  {{"model", model_json(spec.family)}});

    json summary = {{"model", model_json(spec.family)},
                    {"grid", {{"max_abs", o.max_abs}, {"per_side", o.per_side}, {"points", g.size()}}},
                    {"norm_constant", table.norm_constant()},
                    {"tail_constant", table.tail_constant()},
                    {"t_approx", {{"dof", t.approx.dof}, {"scale", t.approx.scale}, {"sup_distance", t.sup_distance}}},
                    {"artifacts", {"prior_tab.csv", "prior_tab.json"}}};
    run.write_json("prior_tab.json", summary);
    run.print(summary);
    return 0;
}

// ----------------------------------------------------------------------------
// fit

int fit(const Run& run, const FitOptions& o) {
    const auto spec = resolve_model(o.model);
    const Dataset data = io::dataset_from_csv(io::read_csv_file(o.data));
    data.validate();
    const PriorKind kind = parse_prior(o.prior);
    const ProprietyReport report = check_propriety(data, spec.family.base, kind);
    require_proper(report, run.force, "fit");

    json prior_desc;
    const PriorSpec prior = make_prior(kind, spec.family, run.threads, prior_desc);
    const MleResult mle = mle_fit(data, spec.family);
    const McmcConfig cfg = o.chain.apply(McmcConfig::application_defaults(), run.seed);
    const PosteriorDraws draws = sample_posterior(data, spec.family, prior, cfg);

    json params;
    for (std::size_t j = 0; j < draws.param_names.size(); ++j)
        params[draws.param_names[j]] = summary_json(draws.column(j), o.level);
    json summary = {
        {"model", model_json(spec.family)},
        {"prior", prior_desc},
        {"data", {{"path", o.data}, {"exact", data.exact.size()}, {"censored", data.censored.size()}}},
        {"propriety", propriety_json(report)},
        {"mle",
         {{"mu", mle.params[0]}, {"sigma", mle.params[1]}, {"lambda", mle.params[2]}, {"max_loglik", mle.max_loglik},
          {"aic", mle.aic}, {"bic", mle.bic}, {"boundary", mle.boundary}}},
        {"mcmc", chain_json(cfg)},
        {"acceptance_rate", draws.acceptance_rate},
        {"level", o.level},
        {"posterior", params},
        {"artifacts", {"fit_draws.csv", "fit_summary.json"}}};
    if (o.marginal) {
        ImportanceOptions is;
        is.seed = derive_seed(run.seed, 7);
        const auto m = marginal_likelihood(data, spec.family, prior, draws, is);
        // sigma^{-1} is improper: comparable only across models sharing it.
        summary["log_marginal"] = {{"value", m.log_value}, {"std_error", m.std_error}, {"ess", m.ess}};
    }
    run.write_csv("fit_draws.csv", draws.param_names, draws_rows(draws));
    run.write_json("fit_summary.json", summary);
    run.print(summary);
    return 0;
}

// ----------------------------------------------------------------------------
// coverage

int coverage(const Run& run, const CoverageOptions& o) {
    const auto spec = resolve_model(o.model);
    CoverageSpec cs;
    cs.n = o.n;
    cs.lambda0 = o.lambda0;
    cs.replications = o.replications;
    cs.level = o.level;
    cs.mcmc = o.chain.apply(McmcConfig::simulation_defaults(), run.seed);
    cs.seed = run.seed;
    cs.threads = run.threads;
    const auto r = run_coverage(cs, spec.family, jeffreys_table(spec.family, run.threads));
    json summary = {{"model", model_json(spec.family)},
                    {"n", o.n},
                    {"lambda0", o.lambda0},
                    {"level", o.level},
                    {"replications", r.replications},
                    {"failed", r.failed},
                    {"coverage", {{"mu", r.coverage[0]}, {"sigma", r.coverage[1]}, {"lambda", r.coverage[2]}}},
                    {"std_error", {{"mu", r.std_error[0]}, {"sigma", r.std_error[1]}, {"lambda", r.std_error[2]}}},
                    {"mean_acceptance", r.mean_acceptance},
                    {"mcmc", chain_json(cs.mcmc)},
                    {"artifacts", {"coverage.json"}}};
    run.write_json("coverage.json", summary);
    run.print(summary);
    return 0;
}

// ----------------------------------------------------------------------------
// binreg

namespace {

const std::vector<std::string> kAllLinks{"logit", "probit", "skew-logistic", "skew-normal"};

std::uint64_t link_stream(const std::string& name) {
    const auto it = std::find(kAllLinks.begin(), kAllLinks.end(), name);
    return static_cast<std::uint64_t>(it - kAllLinks.begin());
}

}  // namespace

BinregRun run_binreg(const Run& run, const GlmData& data, const std::vector<std::string>& links,
                     std::string reference, const GlmFitOptions& options) {
    BinregRun r;
    r.data = data;
    const auto names = links.empty() ? kAllLinks : links;
    for (const auto& n : names) {
        if (std::count(names.begin(), names.end(), n) > 1) throw UsageError("--link '" + n + "' given twice");
        r.links.push_back(make_link(n, run.threads));
    }
    if (reference.empty())
        reference = std::find(names.begin(), names.end(), "skew-logistic") != names.end() ? "skew-logistic" : names[0];
    if (std::find(names.begin(), names.end(), reference) == names.end())
        throw UsageError("--reference '" + reference + "' is not among the fitted links");
    r.reference = reference;

    r.fits.resize(r.links.size());
    parallel_for(r.links.size(), run.threads, [&](std::size_t i) {
        GlmFitOptions opt = options;
        opt.mcmc.seed = derive_seed(run.seed, link_stream(names[i]));
        r.fits[i] = glm_fit(data, r.links[i], opt);
    });
    r.comparison = glm_compare(r.fits, reference);
    return r;
}

json comparison_json(const BinregRun& r) {
    json rows = json::array();
    for (std::size_t i = 0; i < r.fits.size(); ++i) {
        const auto& f = r.fits[i];
        const auto& c = r.comparison[i];
        json row = {{"link", c.link_name},
                    {"k", f.mle.k},
                    {"max_loglik", f.mle.max_loglik},
                    {"aic", c.aic},
                    {"bic", c.bic},
                    {"beta_hat", f.mle.beta},
                    {"acceptance_rate", f.draws.acceptance_rate},
                    {"log_marginal", c.log_marginal ? json(*c.log_marginal) : json(nullptr)},
                    {"bayes_factor", c.bayes_factor ? json(*c.bayes_factor) : json(nullptr)}};
        if (!r.links[i].lambda_fixed) {
            row["lambda_hat"] = f.mle.lambda;
            row["lambda_boundary"] = f.mle.boundary;
        }
        if (f.log_c && f.log_c0)
            row["log_marginal_std_error"] = std::hypot(f.log_c->std_error, f.log_c0->std_error);
        rows.push_back(row);
    }
    return {{"reference", r.reference},
            {"include_constants", !r.fits.empty() && r.fits[0].include_constants},
            {"models", rows}};
}

void write_predictions(const Run& run, const std::string& name, const BinregRun& r) {
    std::vector<std::string> header = r.data.covariate_names;
    header.push_back("n");
    header.push_back("y");
    for (const auto& l : r.links) header.push_back(l.name);
    std::vector<std::vector<double>> counts;
    for (std::size_t i = 0; i < r.fits.size(); ++i) counts.push_back(glm_predict(r.fits[i], r.data, r.links[i]));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < r.data.rows(); ++i) {
        std::vector<std::string> row;
        for (Eigen::Index j = 1; j < r.data.X.cols(); ++j) row.push_back(num(r.data.X(static_cast<Eigen::Index>(i), j)));
        row.push_back(num(r.data.n[i]));
        row.push_back(num(r.data.y[i]));
        for (const auto& c : counts) row.push_back(num(c[i]));
        rows.push_back(std::move(row));
    }
    run.write_csv(name, header, rows);
}

namespace {

json predictions_json(const BinregRun& r) {
    json j;
    for (std::size_t i = 0; i < r.fits.size(); ++i) j[r.links[i].name] = glm_predict(r.fits[i], r.data, r.links[i]);
    return j;
}

}  // namespace

int binreg(const Run& run, const BinregOptions& o) {
    const GlmData data = o.data.empty() ? GlmData::bliss() : io::glm_data_from_csv(io::read_csv_file(o.data));
    GlmFitOptions opt;
    opt.mcmc = o.chain.apply(McmcConfig::application_defaults(), run.seed);
    opt.include_constants = o.constants;
    opt.marginal = o.marginal;
    const BinregRun r = run_binreg(run, data, o.links, o.reference, opt);

    write_predictions(run, "binreg_predictions.csv", r);
    json summary = comparison_json(r);
    summary["data"] = o.data.empty() ? json("built-in beetle mortality data") : json(o.data);
    summary["mcmc"] = chain_json(opt.mcmc);
    summary["predicted_counts"] = predictions_json(r);
    summary["artifacts"] = {"binreg_predictions.csv", "binreg_comparison.json"};
    run.write_json("binreg_comparison.json", summary);
    run.print(summary);
    return 0;
}

// ----------------------------------------------------------------------------
// stress

namespace {

json histogram_json(const std::vector<double>& v, std::size_t bins) {
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) {
        lo -= 0.5e-3;
        hi += 0.5e-3;
    }
    const double w = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double x : v) counts[std::min(bins - 1, static_cast<std::size_t>((x - lo) / w))]++;
    json rows = json::array();
    for (std::size_t b = 0; b < bins; ++b)
        rows.push_back({{"lo", lo + w * static_cast<double>(b)},
                        {"hi", lo + w * static_cast<double>(b + 1)},
                        {"count", counts[b]},
                        {"density", static_cast<double>(counts[b]) / (static_cast<double>(v.size()) * w)}});
    return rows;
}

}  // namespace

int stress(const Run& run, const StressOptionsCli& o) {
    if (o.bins == 0) throw UsageError("--bins must be positive");
    const auto spec = resolve_model(o.model);
    const PairedSample pairs = io::pairs_from_csv(io::read_csv_file(o.data));
    json prior_desc;
    const PriorSpec prior = make_prior(parse_prior(o.prior), spec.family, run.threads, prior_desc);
    StressOptions so;
    so.mcmc = o.chain.apply(McmcConfig::application_defaults(), run.seed);
    so.level = o.level;
    so.force = run.force;
    const ThetaPosterior post = posterior_theta(pairs, spec.family, prior, so);
    Dataset diffs;
    diffs.exact = pairs.differences();
    const MleResult mle = mle_fit(diffs, spec.family);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t r = 0; r < post.theta.size(); ++r) {
        std::vector<std::string> row{num(post.theta[r])};
        for (Eigen::Index j = 0; j < post.params.draws.cols(); ++j) row.push_back(num(post.params.draws(static_cast<Eigen::Index>(r), j)));
        rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"theta"};
    header.insert(header.end(), post.params.param_names.begin(), post.params.param_names.end());
    run.write_csv("stress_theta.csv", header, rows);

    json summary = {{"model", model_json(spec.family)},
                    {"prior", prior_desc},
                    {"n", pairs.x.size()},
                    {"propriety", propriety_json(post.propriety)},
                    {"theta",
                     {{"mean", post.mean},
                      {"median", post.median},
                      {"sd", post.sd},
                      {"level", post.level},
                      {"interval", interval_json(post.interval)}}},
                    {"mle", {{"mu", mle.params[0]}, {"sigma", mle.params[1]}, {"lambda", mle.params[2]},
                             {"aic", mle.aic}, {"bic", mle.bic}}},
                    {"histogram", histogram_json(post.theta, o.bins)},
                    {"mcmc", chain_json(so.mcmc)},
                    {"acceptance_rate", post.params.acceptance_rate},
                    {"artifacts", {"stress_theta.csv", "stress_summary.json"}}};
    run.write_json("stress_summary.json", summary);
    run.print(summary);
    return 0;
}

// ----------------------------------------------------------------------------
// check-propriety

int check_propriety(const Run& run, const ProprietyOptions& o) {
    const auto spec = resolve_model(o.model);
    const Dataset data = io::dataset_from_csv(io::read_csv_file(o.data));
    const PriorKind kind = parse_prior(o.prior);
    const ProprietyReport r = skewsym::check_propriety(data, spec.family.base, kind);
    json j = propriety_json(r);
    j["base"] = model_json(spec.family)["base"];
    j["prior"] = kind == PriorKind::benchmark ? "benchmark" : "independence_jeffreys";
    j["exact"] = data.exact.size();
    j["censored"] = data.censored.size();
    run.print(j);
    return 0;
}

}  // namespace skewsym::cli
