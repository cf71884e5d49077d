#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "hawkes_impact/errors.hpp"
#include "hawkes_impact/experiment.hpp"
#include "hawkes_impact/format.hpp"
#include "hawkes_impact/parallel.hpp"
#include "hawkes_impact/random.hpp"
#include "hawkes_impact/stats.hpp"

using namespace hawkes_impact;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const char* base = std::getenv("HAWKES_IMPACT_TEST_TMP");
    const fs::path dir = fs::path(base ? base : "harness_tmp") / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

ExperimentConfig config(const std::string& experiment, json params, const fs::path& out) {
    return ExperimentConfig::from_json({{"experiment", experiment}, {"output_dir", out.string()}, {"parameters", params}});
}

json small_bridge() {
    return {{"alpha", 0.7}, {"K", 1}, {"delta", 1}, {"u", 0.5}, {"paths", 60}, {"steps", 256}, {"seed", 4},
            {"T", 500}, {"reps", 60}};
}

void with_threads(const char* n) { ::setenv("HAWKES_IMPACT_THREADS", n, 1); }

}  // namespace

TEST_CASE("mc_mean_ci") {
    const auto a = mc_mean_ci({1, 1, 1, 1}, 0.95);
    CHECK(a.mean == 1.0);
    CHECK(a.half_width == 0.0);
    const auto b = mc_mean_ci({0, 2}, 0.95);
    CHECK(b.mean == doctest::Approx(1.0));
    CHECK(b.half_width == doctest::Approx(1.959963984540054).epsilon(1e-12));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    std::vector<double> x(10000);
    for (double& v : x) v = n(rng);
    const auto c = mc_mean_ci(x, 0.99);
    CHECK(std::fabs(c.mean) <= 0.05);
    CHECK(c.half_width == doctest::Approx(2.5758 / 100.0).epsilon(0.05));
    CHECK_THROWS_AS(mc_mean_ci({1.0}, 0.95), DomainError);
    CHECK_THROWS_AS(mc_mean_ci({1.0, 2.0}, 1.0), DomainError);
}

TEST_CASE("statistics helpers") {
    RunningStats s;
    for (double v : {1.0, 2.0, 3.0, 4.0}) s.add(v);
    CHECK(s.mean() == 2.5);
    CHECK(s.variance() == doctest::Approx(5.0 / 3.0));
    CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_distance({0, 0}, {1, 1}) == 1.0);
    const auto fit = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK_THROWS_AS(linear_fit({0, 1}, {0, 1}), FitError);
}

TEST_CASE("named random streams") {
    auto a = make_rng(1, 0, Stream::buy), b = make_rng(1, 0, Stream::buy), c = make_rng(1, 0, Stream::sell),
         d = make_rng(1, 1, Stream::buy);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
}

TEST_CASE("round-trip number formatting") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("ordered fold") {
    for (std::size_t workers : {1, 3, 8}) {
        std::vector<std::size_t> seen;
        ordered_fold(
            100, [](std::size_t i) { return i * i; }, [&](std::size_t i, std::size_t v) {
                CHECK(v == i * i);
                seen.push_back(i);
            },
            workers);
        REQUIRE(seen.size() == 100);
        for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == i);
    }
    CHECK_THROWS_AS(ordered_fold(
                        20,
                        [](std::size_t i) -> int {
                            if (i == 13) throw DomainError("job failed");
                            return 0;
                        },
                        [](std::size_t, int) {}, 4),
                    DomainError);
    with_threads("3");
    CHECK(worker_count() == 3);
}

TEST_CASE("config validation") {
    const auto out = scratch("invalid");
    CHECK_THROWS_AS(parse_experiment("figure2"), UsageError);
    CHECK_THROWS_AS(config("figure2", {{"seed", 1}}, out), UsageError);
    // seed is mandatory
    CHECK_THROWS_AS(config("figure1_impact", {{"alpha", 0.5}, {"K", 1}, {"gamma", 0.1}}, out), UsageError);
    CHECK_THROWS_AS(config("figure1_impact", {{"alpha", 0.5}, {"K", 1}, {"gamma", 0.1}, {"seed", -1}}, out), UsageError);
    CHECK_THROWS_AS(config("figure1_impact", {{"alpha", 0.5}, {"K", 1}, {"gamma", 0.1}, {"seed", 1.5}}, out), UsageError);
    // unknown and non-numeric keys
    CHECK_THROWS_AS(config("figure1_impact", {{"alpha", 0.5}, {"K", 1}, {"gamma", 0.1}, {"seed", 1}, {"colour", 2}}, out),
                    UsageError);
    CHECK_THROWS_AS(config("figure1_impact", {{"alpha", "half"}, {"K", 1}, {"gamma", 0.1}, {"seed", 1}}, out), UsageError);
    CHECK_THROWS_AS(ExperimentConfig::from_json({{"experiment", "figure1_impact"}}), UsageError);
    CHECK_THROWS_AS(ExperimentConfig::load(out / "missing.json"), UsageError);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unknown experiment leaves no output") {
    const auto out = scratch("unknown");
    ExperimentConfig cfg;
    CHECK_THROWS_AS(run_experiment(ExperimentConfig::from_json(
                        {{"experiment", "nope"}, {"output_dir", out.string()}, {"parameters", {{"seed", 1}}}})),
                    UsageError);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("figure 1 experiment") {
    const auto out = scratch("figure1");
    const auto art = run_experiment(config(
        "figure1_impact", {{"alpha", 0.5}, {"K", 1}, {"gamma", 0.1}, {"seed", 3}, {"T", 2000}, {"reps", 300}}, out));
    CHECK(art.passed);
    for (const auto& [name, file] : art.tables) CHECK(fs::exists(out / file));
    for (const auto& [name, file] : art.summary.at("tables").items()) CHECK(fs::exists(out / file.get<std::string>()));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "summary.json"));
    const auto manifest = json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("library_version") == kLibraryVersion);
    CHECK(manifest.contains("timestamp"));
    CHECK(manifest.at("config").at("parameters").at("seed") == 3);
    // the limit table covers [0, 5]
    const auto limit = slurp(out / "limit.csv");
    CHECK(limit.find("\n5,") != std::string::npos);
}

TEST_CASE("bridge experiment at alpha = 0.4") {
    const auto out = scratch("bridge");
    const auto art = run_experiment(config(
        "char_function_bridge",
        {{"alpha", 0.4}, {"K", 1}, {"delta", 1}, {"u", 0.5}, {"paths", 400}, {"steps", 2048}, {"seed", 8}}, out));
    CHECK(art.summary.at("flags").at("heston_within_3se") == true);
    CHECK(art.passed);
}

TEST_CASE("convergence experiment") {
    const auto out = scratch("convergence");
    const auto art = run_experiment(
        config("impact_convergence", {{"alpha", 0.3}, {"K", 1}, {"gamma", 0.1}, {"T", {100, 1000, 10000}}, {"seed", 1}}, out));
    CHECK(art.passed);
    CHECK(art.tables.size() == 4);
    CHECK(art.tables.count("limit") == 1);
}

TEST_CASE("micro-macro experiment") {
    const auto out = scratch("micro_macro");
    const auto art = run_experiment(config(
        "micro_macro_price", {{"alpha", 0.5}, {"K", 1}, {"delta", 1}, {"T", 1e4}, {"reps", 2000}, {"steps", 2048}, {"seed", 2}},
        out));
    CAPTURE(art.summary.at("ks").dump());
    CHECK(art.summary.at("ks").at("X1").get<double>() <= 0.08);
    CHECK(art.passed);
}

TEST_CASE("reproducibility, worker independence and manifest replay") {
    const auto base = config("char_function_bridge", small_bridge(), scratch("serial"));
    with_threads("1");
    const auto serial = run_experiment(base);
    with_threads("4");
    auto parallel_cfg = base;
    parallel_cfg.output_dir = scratch("parallel");
    const auto parallel = run_experiment(parallel_cfg);
    auto again_cfg = base;
    again_cfg.output_dir = scratch("again");
    run_experiment(again_cfg);
    // replay from the manifest alone, into a new directory
    auto replay_cfg = ExperimentConfig::load(base.output_dir / "manifest.json");
    CHECK(replay_cfg.to_json().at("parameters") == base.to_json().at("parameters"));
    replay_cfg.output_dir = scratch("replay");
    run_experiment(replay_cfg);
    ::unsetenv("HAWKES_IMPACT_THREADS");

    REQUIRE_FALSE(serial.tables.empty());
    for (const auto& [name, file] : serial.tables) {
        const auto ref = slurp(base.output_dir / file);
        CHECK_FALSE(ref.empty());
        CHECK(slurp(parallel_cfg.output_dir / file) == ref);
        CHECK(slurp(again_cfg.output_dir / file) == ref);
        CHECK(slurp(replay_cfg.output_dir / file) == ref);
    }
    CHECK(serial.summary.dump() == parallel.summary.dump());
}
