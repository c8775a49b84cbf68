#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sdc/cli.hpp"
#include "sdc/errors.hpp"
#include "sdc/report.hpp"

using namespace sdc;
using nlohmann::json;

namespace {

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result bench(std::vector<std::string> args)
{
    args.insert(args.begin(), "sdc_bench");
    std::ostringstream out, err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

void check_distribution(const json &d)
{
    double total = 0.0;
    for (const auto &[bits, p] : d.items()) {
        CHECK(p.get<double>() >= 0.0);
        CHECK(p.get<double>() <= 1.0);
        total += p.get<double>();
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

} // namespace

TEST_CASE("run emits a report")
{
    const Result r = bench({"run", "--message", "01", "--decoder", "oracle"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["schema_version"] == kSchemaVersion);
    CHECK(doc["message"] == "01");
    CHECK(doc["decoded_bits"] == "01");
    CHECK(doc["blackbox1_probability"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(doc["phase_mode"] == "full");
    CHECK(doc.contains("outcome_distribution"));
    check_distribution(doc["outcome_distribution"]);
    CHECK(doc["config"]["derived"]["recoil_frequency_rad_s"].get<double>() == doctest::Approx(2.4e4));

    const Result literal = bench({"run", "--message", "00", "--decoder", "paper-literal"});
    REQUIRE(literal.code == 0);
    const json lit = json::parse(literal.out);
    CHECK(lit["decoded_bits"].is_null());
    check_distribution(lit["outcome_distribution"]);

    const Result verbose = bench({"--verbose", "run", "--message", "11"});
    REQUIRE(verbose.code == 0);
    CHECK(json::parse(verbose.out)["snapshots"].size() > 5);
}

TEST_CASE("confusion")
{
    const Result r = bench({"confusion", "--decoder", "paper-literal"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    for (const auto &row : doc["matrix"]) {
        for (const auto &p : row) {
            CHECK(p.get<double>() == doctest::Approx(0.25).epsilon(1e-12));
        }
    }
    const json oracle = json::parse(bench({"confusion"}).out);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(oracle["matrix"][i][i].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sweep-alpha in JSON and CSV")
{
    const Result csv = bench({"sweep-alpha", "--grid", "0:2pi:5", "--format", "csv"});
    REQUIRE(csv.code == 0);
    std::istringstream lines(csv.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "alpha,success_probability");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) {
        ++rows;
    }
    CHECK(rows == 5);

    const json doc = json::parse(bench({"sweep-alpha", "--grid", "0:pi:3"}).out);
    REQUIRE(doc["points"].size() == 3);
    CHECK(doc["points"][2]["success_probability"].get<double>() == doctest::Approx(1.0));

    CHECK(bench({"sweep-alpha", "--grid", "0:pi"}).code == kExitConfigError);
    CHECK(bench({"run", "--message", "00", "--format", "csv"}).code == kExitConfigError);
}

TEST_CASE("grid parsing")
{
    const auto g = parse_grid("0:2pi:3");
    REQUIRE(g.size() == 3);
    CHECK(g[1] == doctest::Approx(3.14159265358979));
    CHECK(parse_grid("1:1:1") == std::vector<double>{1.0});
    CHECK(parse_grid("-pi:0.5pi:2")[0] == doctest::Approx(-3.14159265358979));
    CHECK_THROWS_AS(parse_grid("a:b:3"), ConfigError);
    CHECK_THROWS_AS(parse_grid("0:1:0"), ConfigError);
}

TEST_CASE("verify")
{
    const Result r = bench({"verify", "--detuning-ratios", "100,2"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    REQUIRE(doc["rows"].size() == 2);
    CHECK(doc["rows"][0]["max_population_deviation"].get<double>() <= 0.01);
    CHECK(doc["rows"][1]["max_population_deviation"].get<double>() >
          doc["rows"][0]["max_population_deviation"].get<double>());
    CHECK(bench({"verify", "--detuning-ratios", "-1"}).code == kExitConfigError);
}

TEST_CASE("prepare dumps states")
{
    const json bell = json::parse(bench({"prepare", "--stage", "bell"}).out);
    const auto &amps = bell["state"]["amplitudes"];
    CHECK(amps.size() == 16);
    int nonzero = 0;
    for (const auto &a : amps) {
        nonzero += (a["re"].get<double>() != 0.0 || a["im"].get<double>() != 0.0) ? 1 : 0;
    }
    CHECK(nonzero == 2);
    CHECK(bell["heralding_probability"].get<double>() == doctest::Approx(0.5));

    const json hyper = json::parse(bench({"prepare", "--stage", "hypersup", "--phase-mode", "paper"}).out);
    CHECK(hyper["state"]["amplitudes"].size() == 4);
    CHECK(bench({"prepare", "--stage", "nope"}).code != 0);
}

TEST_CASE("errors")
{
    const Result unknown = bench({"run", "--message", "01", "--frobnicate"});
    CHECK(unknown.code != 0);
    CHECK_FALSE(unknown.err.empty());
    CHECK(bench({"teleport"}).code != 0);
    CHECK(bench({}).code != 0);

    const Result degenerate = bench({"run", "--message", "00", "--encode-phase", "0"});
    CHECK(degenerate.code == kExitRunError);
    const json err = json::parse(degenerate.err);
    CHECK(err["error"]["type"] == "stage");
    CHECK(err["error"]["stage"] == "decode");

    const Result bad_message = bench({"run", "--message", "2"});
    CHECK(bad_message.code == kExitRunError);
    CHECK(json::parse(bad_message.err)["error"].contains("message"));

    const Result missing = bench({"--config", "/nonexistent.ini", "confusion"});
    CHECK(missing.code == kExitConfigError);
    CHECK(json::parse(missing.err)["error"]["type"] == "config");
}

TEST_CASE("output files, config files and the environment")
{
    const std::string out_path = "sdc_cli_test_out.json";
    REQUIRE(bench({"run", "--message", "10", "--out", out_path}).out.empty());
    std::ifstream in(out_path);
    const json doc = json::parse(in);
    CHECK(doc["decoded_bits"] == "10");
    std::remove(out_path.c_str());

    const std::string cfg_path = "sdc_cli_test.ini";
    {
        RunConfig c = RunConfig::rb85();
        c.phase_mode = PhaseMode::Paper;
        c.seed = 42;
        std::ofstream cfg(cfg_path);
        cfg << emit_config(c);
    }
    const json from_file = json::parse(bench({"--config", cfg_path, "run", "--message", "00"}).out);
    CHECK(from_file["phase_mode"] == "paper");
    CHECK(from_file["seed"] == 42);

    setenv(kConfigEnvVar, cfg_path.c_str(), 1);
    const json from_env = json::parse(bench({"run", "--message", "00", "--seed", "7"}).out);
    unsetenv(kConfigEnvVar);
    CHECK(from_env["phase_mode"] == "paper");
    CHECK(from_env["seed"] == 7);

    const Result shown = bench({"--config", cfg_path, "show-config"});
    CHECK(parse_config(shown.out).seed == 42);
    std::remove(cfg_path.c_str());
}

TEST_CASE("identical arguments give identical bytes")
{
    for (const auto &args : std::vector<std::vector<std::string>>{
             {"run", "--message", "11", "--policy", "all-outcomes-corrected", "--seed", "5"},
             {"confusion", "--policy", "all-outcomes-corrected"},
             {"sweep-alpha", "--grid", "0:2pi:7"}}) {
        const Result a = bench(args);
        const Result b = bench(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("documents carry every key the published schema requires")
{
    std::ifstream in(std::string(SDC_SOURCE_DIR) + "/docs/report.schema.json");
    REQUIRE(in.good());
    const json schema = json::parse(in);
    const auto &defs = schema["$defs"];

    auto check_required = [](const json &doc, const json &def) {
        for (const auto &key : def["required"]) {
            INFO("missing key " << key);
            CHECK(doc.contains(key.get<std::string>()));
        }
    };
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"run", {"run", "--message", "11"}},
        {"confusion", {"confusion"}},
        {"sweep", {"sweep-alpha", "--grid", "0:pi:3"}},
        {"verify", {"verify", "--detuning-ratios", "50", "--points", "3"}},
        {"prepare", {"prepare", "--stage", "bell"}}};
    for (const auto &[def, args] : commands) {
        const json doc = json::parse(bench(args).out);
        check_required(doc, defs[def]);
        for (const char *block : {"physical", "derived", "protocol", "numerics"}) {
            check_required(doc["config"][block], defs["config"]["properties"][block]);
        }
    }
    const json err = json::parse(bench({"run", "--message", "00", "--encode-phase", "0"}).err);
    check_required(err, defs["error"]);
    check_required(err["error"], defs["error"]["properties"]["error"]);
}
