#pragma once

// Subcommand implementations behind the skewsym executable. Each command
// writes its artifacts under Run::out and prints its JSON summary to stdout.

#include "skewsym/binreg.hpp"
#include "skewsym/inference.hpp"
#include "skewsym/io.hpp"
#include "skewsym/jeffreys.hpp"
#include "skewsym/mcmc.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewsym::cli {

using nlohmann::json;

// Bad invocation that parsing alone cannot catch (missing file, refusal to
// overwrite, inconsistent flags). Exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Settings shared by every subcommand; embedded verbatim in each artifact.
struct Run {
    std::string subcommand;
    std::vector<std::string> argv;
    std::filesystem::path out = ".";
    std::uint64_t seed = 42;
    unsigned threads = 1;
    bool force = false;
    std::ostream* stdout_ = nullptr;

    json config() const;
    // Refuses to replace an existing file unless force.
    std::filesystem::path reserve(const std::string& name) const;
    // Adds "schema" and "config" to body.
    void write_json(const std::string& name, json body) const;
    // CSV with the run configuration (plus `extra`) as a leading '#' line.
    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows, const json& extra = json::object()) const;
    void print(json j) const;
};

// Shortest round-trip decimal form.
std::string num(double x);

struct ChainSettings {
    std::optional<std::size_t> burn_in;
    std::optional<std::size_t> thinning;
    std::optional<std::size_t> draws;
    std::optional<std::size_t> total;  // used when draws is not given
    std::optional<std::uint64_t> seed;

    // "total=60000,burnin=10000,thin=50,seed=7" (any subset; draws= also
    // accepted). Throws UsageError on unknown keys or bad numbers.
    void parse(const std::string& spec);
    // Start from `base`, override what was given, seed from the run unless
    // a chain seed was given.
    McmcConfig apply(McmcConfig base, std::uint64_t seed) const;
};

// "skew-normal", "skew-logistic" or a model JSON file.
io::ModelSpec resolve_model(const std::string& arg);
std::shared_ptr<const JeffreysTable> jeffreys_table(const ModelFamily& family, unsigned threads);
PriorKind parse_prior(const std::string& name);
// The benchmark prior takes its proper p(lambda) from the Student-t fit to
// the Jeffreys table when that table exists.
PriorSpec make_prior(PriorKind kind, const ModelFamily& family, unsigned threads, json& description);
SkewLink make_link(const std::string& name, unsigned threads);
json model_json(const ModelFamily& family);

struct PriorTabOptions {
    std::string model;
    double max_abs = 200.0;
    std::size_t per_side = 400;
};
int prior_tab(const Run& run, const PriorTabOptions& o);

struct FitOptions {
    std::string model;
    std::string data;
    std::string prior = "jeffreys";
    ChainSettings chain;
    double level = 0.95;
    bool marginal = false;
};
int fit(const Run& run, const FitOptions& o);

struct CoverageOptions {
    std::string model = "skew-logistic";
    std::size_t n = 30;
    double lambda0 = 1.0;
    std::size_t replications = 200;
    double level = 0.95;
    ChainSettings chain;
};
int coverage(const Run& run, const CoverageOptions& o);

struct BinregOptions {
    std::string data;  // empty: the built-in beetle data
    std::vector<std::string> links;
    std::string reference;
    ChainSettings chain;
    bool constants = false;
    bool marginal = true;
};
int binreg(const Run& run, const BinregOptions& o);

struct StressOptionsCli {
    std::string data;
    std::string model = "skew-logistic";
    std::string prior = "jeffreys";
    ChainSettings chain;
    double level = 0.95;
    std::size_t bins = 20;
};
int stress(const Run& run, const StressOptionsCli& o);

struct ProprietyOptions {
    std::string data;
    std::string model = "skew-normal";
    std::string prior = "jeffreys";
};
int check_propriety(const Run& run, const ProprietyOptions& o);

struct ReproduceOptions {
    std::string target;
    std::size_t replications = 200;
    bool full = false;
    std::vector<double> lambdas;
    std::vector<std::string> links;
    std::string data;
    ChainSettings chain;
};
int reproduce(const Run& run, const ReproduceOptions& o);

// Shared by binreg and reproduce table6/table7.
struct BinregRun {
    GlmData data;
    std::vector<SkewLink> links;
    std::vector<GlmPosterior> fits;
    std::vector<GlmComparisonRow> comparison;
    std::string reference;
};
BinregRun run_binreg(const Run& run, const GlmData& data, const std::vector<std::string>& links,
                     std::string reference, const GlmFitOptions& options);
json comparison_json(const BinregRun& r);
void write_predictions(const Run& run, const std::string& name, const BinregRun& r);

}  // namespace skewsym::cli
