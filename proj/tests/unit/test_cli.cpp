#include <doctest.h>

#include "skewsym/io.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
    json j() const { return json::parse(out); }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("skewsym_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string data(const std::string& name) { return std::string(SKEWSYM_TEST_DATA) + "/" + name; }

Result cli(const std::string& args) {
    const fs::path dir = scratch("io");
    const std::string cmd = std::string(SKEWSYM_CLI_PATH) + " " + args + " >" + (dir / "out").string() + " 2>" +
                            (dir / "err").string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "out"), slurp(dir / "err")};
}

const std::string kShort = " --burn-in 2000 --thin 10 --draws 1000";

// Data rows of a CSV artifact, skipping the '#' provenance line.
skewsym::io::CsvTable read_artifact(const fs::path& p) {
    std::ifstream f(p);
    std::string first;
    std::getline(f, first);
    REQUIRE(first.rfind("# ", 0) == 0);
    CHECK(json::parse(first.substr(2))["schema"] == 1);
    return skewsym::io::read_csv(f);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
    CHECK(cli("--help").code == 0);
    CHECK(cli("").code == 2);
    CHECK(cli("fit --no-such-flag").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("check-propriety").code == 2);
    CHECK(cli("reproduce table5").code == 2);
    CHECK(cli("reproduce table8").code == 2);
    CHECK(cli("check-propriety --data /no/such/file.csv").code == 2);
    CHECK(cli("check-propriety --model skew-cauchy --data " + data("distinct.csv")).code == 2);
}

TEST_CASE("malformed input reports its position") {
    const auto r = cli("check-propriety --data " + data("malformed.csv"));
    CHECK(r.code == 2);
    CHECK(r.err.find("row 4, column 1") != std::string::npos);

    const auto j = cli("prior-tab --out " + scratch("broken").string() + " --model " + data("broken.json"));
    CHECK(j.code == 2);
    CHECK(j.err.find("row 3") != std::string::npos);
}

TEST_CASE("check-propriety") {
    const auto r = cli("check-propriety --data " + data("distinct.csv"));
    REQUIRE(r.code == 0);
    const auto j = r.j();
    CHECK(j["verdict"] == "Proper");
    CHECK(j["schema"] == 1);
    CHECK(j["config"]["subcommand"] == "check-propriety");

    CHECK(cli("check-propriety --data " + data("ties.csv")).j()["verdict"] == "NotGuaranteed");
    CHECK(cli("check-propriety --model skew-logistic --data " + data("censored.csv")).j()["verdict"] == "Proper");
    const auto t1 = cli("check-propriety --model " + data("skew-normal.json") + " --data " + data("distinct.csv"));
    CHECK(t1.j()["exact"] == 2);
}

TEST_CASE("prior-tab halves are mirror images") {
    const auto dir = scratch("prior");
    const std::string args = "--out " + dir.string() + " prior-tab --model " + data("skew-logistic.json");
    const auto r = cli(args);
    REQUIRE(r.code == 0);
    CHECK(std::fabs(r.j()["t_approx"]["scale"].get<double>() - 1.33) < 0.1);

    const auto t = read_artifact(dir / "prior_tab.csv");
    CHECK(t.header == std::vector<std::string>{"lambda", "sqrt_fisher", "density", "t_approx"});
    const std::size_t m = t.rows.size();
    REQUIRE(m == 801);
    for (std::size_t i = 0; i < m / 2; ++i) {
        const auto& a = t.rows[i];
        const auto& b = t.rows[m - 1 - i];
        CHECK(std::stod(a[0]) == -std::stod(b[0]));
        for (int c : {1, 2}) CHECK(std::fabs(std::stod(a[c]) - std::stod(b[c])) <= 1e-10 * std::stod(b[c]));
    }
    const json summary = json::parse(slurp(dir / "prior_tab.json"));
    CHECK(summary["config"]["argv"].size() > 3);

    // Existing outputs are kept unless forced.
    CHECK(cli(args).code == 2);
    CHECK(cli("--force " + args).code == 0);
}

TEST_CASE("fit is reproducible from its recorded seed") {
    const auto a = scratch("fit_a");
    const auto b = scratch("fit_b");
    const std::string tail = " fit --model skew-logistic --data " + data("censored.csv") + kShort;
    REQUIRE(cli("--seed 9 --out " + a.string() + tail).code == 0);
    REQUIRE(cli("--seed 9 --out " + b.string() + tail).code == 0);
    const auto da = read_artifact(a / "fit_draws.csv");
    const auto db = read_artifact(b / "fit_draws.csv");
    CHECK(da.header == std::vector<std::string>{"mu", "sigma", "lambda"});
    CHECK(da.rows.size() == 1000);
    CHECK(da.rows == db.rows);

    const json s = json::parse(slurp(a / "fit_summary.json"));
    CHECK(s["config"]["seed"] == 9);
    CHECK(s["mcmc"]["retained"] == 1000);
    CHECK(s["propriety"]["verdict"] == "Proper");
    const auto ci = s["posterior"]["sigma"]["interval"];
    CHECK(ci[0].get<double>() > 0.0);
    CHECK(ci[0].get<double>() < ci[1].get<double>());

    // The combined --mcmc spelling selects the same chain.
    const auto m = scratch("fit_m");
    REQUIRE(cli("--out " + m.string() + " fit --model skew-logistic --data " + data("censored.csv") +
                " --mcmc total=12000,burnin=2000,thin=10,seed=9")
                .code == 0);
    CHECK(read_artifact(m / "fit_draws.csv").rows == da.rows);
    CHECK(cli("fit --model skew-logistic --data " + data("censored.csv") + " --mcmc thin=0").code == 2);
    CHECK(cli("fit --model skew-logistic --data " + data("censored.csv") + " --mcmc burn=5").code == 2);

    // Repeated values: refused unless forced.
    const auto c = scratch("fit_c");
    const std::string ties = " fit --model skew-normal --data " + data("ties.csv") + kShort;
    const auto refused = cli("--out " + c.string() + ties);
    CHECK(refused.code == 1);
    CHECK(refused.err.find("--force") != std::string::npos);
}

TEST_CASE("reproduce table6 for the logit link") {
    const auto dir = scratch("t6");
    const auto r = cli("--out " + dir.string() + " reproduce table6 --link logit" + kShort);
    REQUIRE(r.code == 0);
    const std::vector<double> expected{3.5, 9.9, 22.5, 33.9, 50.0, 53.2, 59.2, 58.7};
    const auto counts = r.j()["predicted_counts"]["logit"];
    REQUIRE(counts.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::fabs(counts[i].get<double>() - expected[i]) < 1.0);
    const auto t = read_artifact(dir / "table6.csv");
    CHECK(t.header == std::vector<std::string>{"dose", "n", "y", "logit"});
}

TEST_CASE("binreg, stress and coverage run end to end") {
    const auto dir = scratch("misc");
    const auto b = cli("--out " + dir.string() + " binreg --data " + data("bliss.csv") +
                       " --link probit --link logit --reference logit --no-marginal" + kShort);
    REQUIRE(b.code == 0);
    const auto bj = b.j();
    CHECK(bj["reference"] == "logit");
    CHECK(std::fabs(bj["models"][0]["aic"].get<double>() - 375.36) < 1.0);
    CHECK(bj["models"][0]["bayes_factor"].is_null());
    CHECK(read_artifact(dir / "binreg_predictions.csv").header ==
          std::vector<std::string>{"dose", "n", "y", "probit", "logit"});

    const auto s = cli("--out " + dir.string() + " stress --data " + data("pairs.csv") + kShort);
    REQUIRE(s.code == 0);
    const auto sj = s.j();
    const double lo = sj["theta"]["interval"][0], hi = sj["theta"]["interval"][1];
    CHECK(0.0 < lo);
    CHECK(lo < hi);
    CHECK(hi < 1.0);
    CHECK(sj["histogram"].size() == 20);
    CHECK(read_artifact(dir / "stress_theta.csv").rows.size() == 1000);

    const auto c = cli("--out " + dir.string() + " --threads 2 coverage --n 20 --reps 4" + kShort);
    REQUIRE(c.code == 0);
    CHECK(c.j()["replications"] == 4);
}
