#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "coalesce/config.hpp"
#include "coalesce/experiments.hpp"

using coalesce::ConfigError;
using coalesce::KeyValueConfig;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("coalesce_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("key = value parsing")
{
    std::istringstream in("# header\nseed = 12\n\nx = -1, 0.5 ,2  # trailing\nname=abc\nseed=13\n");
    const KeyValueConfig c = KeyValueConfig::parse(in);
    CHECK(c.count("seed") == 13);
    CHECK(c.reals("x") == std::vector<double>{-1, 0.5, 2});
    CHECK(c.text("name") == "abc");
    CHECK(c.real("seed") == 13.0);

    KeyValueConfig d;
    d.set("n", "1e5");
    d.set("bad", "1.5x");
    d.set("neg", "-3");
    d.set("empty", "");
    CHECK(d.count("n") == 100000);
    CHECK(d.integer("neg") == -3);
    CHECK(d.reals("empty").empty());
    CHECK_THROWS_AS(d.real("bad"), ConfigError);
    CHECK_THROWS_AS(d.count("neg"), ConfigError);
    CHECK_THROWS_AS(d.text("missing"), ConfigError);

    std::istringstream broken("seed 12\n");
    CHECK_THROWS_WITH_AS(KeyValueConfig::parse(broken, "f.cfg"), doctest::Contains("f.cfg:1"),
                         ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("catalog covers every criterion")
{
    std::vector<int> seen;
    for (const auto& spec : coalesce::experiment_catalog()) {
        if (spec.criterion > 0) {
            seen.push_back(spec.criterion);
        }
        bool has_seed = false;
        for (const auto& p : spec.params) {
            has_seed = has_seed || p.key == "seed";
        }
        CHECK(has_seed);
    }
    std::sort(seen.begin(), seen.end());
    CHECK(seen == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    CHECK_THROWS_AS(coalesce::find_experiment("nope"), ConfigError);
}

TEST_CASE("resolve fills defaults and keeps overrides")
{
    KeyValueConfig given;
    given.set("replicates", "50");
    given.set("unrelated", "1");
    const KeyValueConfig c = coalesce::resolve(coalesce::find_experiment("gen-duality"), given);
    CHECK(c.text("replicates") == "50");
    CHECK(c.text("tolerance") == "1e-9");
    CHECK_FALSE(c.contains("unrelated"));
}

TEST_CASE("gen-duality report")
{
    const auto dir = scratch("gen");
    coalesce::RunContext context;
    context.out_dir = dir;
    const auto result = coalesce::run_experiment("gen-duality", {}, context);
    CHECK(result.pass);
    CHECK(result.report["results"]["max_abs_gap"].get<double>() <= 1e-9);
    CHECK(result.report["criterion"] == 1);
    CHECK(slurp(dir / "gen-duality.json") == coalesce::report_text(result));
}

TEST_CASE("simulate at t = 0 dumps the starting positions")
{
    const auto dir = scratch("sim");
    coalesce::RunContext context;
    context.out_dir = dir;
    KeyValueConfig given;
    given.set("t", "0");
    given.set("starts", "0,0.5,1");
    coalesce::run_experiment("simulate", given, context);
    CHECK(slurp(dir / "paths.csv") == "time,x0,x1,x2\n0,0,0.5,1\n");

    given.set("model", "crw");
    given.set("starts", "-1,0,3");
    const auto crw = coalesce::run_experiment("simulate", given, context);
    CHECK(crw.report["results"]["final_positions"] == std::vector<double>{-1, 0, 3});
}

TEST_CASE("simulate models write their dumps")
{
    const auto dir = scratch("models");
    coalesce::RunContext context;
    context.out_dir = dir;
    for (const std::string model : {"cbm", "unordered", "staggered", "immigration", "stationary"}) {
        KeyValueConfig given;
        given.set("model", model);
        given.set("starts", model == "cbm" ? "0,0.5,1" : "0.5,0,1");
        given.set("births", "0,0.2,0.4");
        given.set("step", "0.01");
        given.set("window", "-4,4");
        given.set("t_back", "0.25");
        given.set("t", "0.5");
        const auto r = coalesce::run_experiment("simulate", given, context);
        CHECK(r.pass);
    }
    CHECK(std::filesystem::exists(dir / "paths.csv"));
    CHECK(std::filesystem::exists(dir / "points.csv"));
    CHECK(std::filesystem::exists(dir / "meeting_times.json"));

    KeyValueConfig bad;
    bad.set("model", "nonsense");
    CHECK_THROWS_AS(coalesce::run_experiment("simulate", bad, {}), ConfigError);
    bad.set("model", "cbm");
    bad.set("starts", "1,0");
    CHECK_THROWS_AS(coalesce::run_experiment("simulate", bad, {}), ConfigError);
}

TEST_CASE("bad experiment configuration is a ConfigError")
{
    KeyValueConfig given;
    given.set("replicates", "10");
    CHECK_THROWS_AS(coalesce::run_experiment("bm-duality", given, {}), ConfigError);
    KeyValueConfig births;
    births.set("t", "0.5");
    CHECK_THROWS_AS(coalesce::run_experiment("staggered-duality", births, {}), ConfigError);
    KeyValueConfig intervals;
    intervals.set("intervals_one", "1,0");
    CHECK_THROWS_AS(coalesce::run_experiment("avoidance", intervals, {}), ConfigError);
}

TEST_CASE("reports do not depend on the worker count")
{
    KeyValueConfig given;
    given.set("replicates", "2000");
    coalesce::RunContext one;
    coalesce::RunContext three;
    three.workers = 3;
    for (const char* name : {"rw-duality", "marginal", "airy-table"}) {
        CHECK(coalesce::report_text(coalesce::run_experiment(name, given, one)) ==
              coalesce::report_text(coalesce::run_experiment(name, given, three)));
    }
}
