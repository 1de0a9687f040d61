#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "moreas/cli.hpp"
#include "moreas/csv.hpp"
#include "moreas/simulator.hpp"

using namespace moreas;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("/tmp/moreas_cli_tests") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kDefaultConfig = std::string(MOREAS_SOURCE_DIR) + "/configs/default.json";

std::string small_config(const fs::path& dir, int count = 60) {
    const fs::path p = dir / "config.json";
    std::ofstream out(p);
    out << R"({"seed": 5, "topics": ")" << MOREAS_SOURCE_DIR << R"(/data/topics.json",
          "cohort": {"cells": [
            {"party": "pro_dem", "updater": "motivated", "count": )" << count * 2 / 3 << R"(},
            {"party": "pro_rep", "updater": "motivated", "count": )" << count / 3 << R"(}]}})";
    return p.string();
}

}  // namespace

TEST_CASE("simulate happy path writes dataset and manifest") {
    const fs::path dir = fresh_dir("sim_happy");
    SimulateOptions opts{small_config(dir), std::uint64_t{5}, (dir / "out").string()};
    CHECK(run_simulate(opts) == kExitOk);
    CHECK(fs::exists(dir / "out/subjects.csv"));
    CHECK(fs::exists(dir / "out/rounds.csv"));
    CHECK(fs::exists(dir / "out/manifest.json"));
    const std::string manifest = slurp(dir / "out/manifest.json");
    CHECK(manifest.find("\"command\": \"simulate\"") != std::string::npos);
    CHECK(manifest.find("\"seed\": 5") != std::string::npos);
}

TEST_CASE("missing topic file fails validation and names the path") {
    const fs::path dir = fresh_dir("sim_badtopics");
    const fs::path cfg = dir / "config.json";
    {
        std::ofstream out(cfg);
        out << R"({"seed": 1, "topics": "/nonexistent/topics.json",
              "cohort": {"cells": [{"party": "pro_dem", "updater": "bayesian", "count": 5}]}})";
    }
    SimulateOptions opts{cfg.string(), std::nullopt, (dir / "out").string()};
    CHECK(run_simulate(opts) == kExitValidation);
    try {
        // the underlying loader carries the offending path in its message
        load_sim_config(cfg.string());
        const SimConfig c = load_sim_config(cfg.string());
        load_topics(c.topics_path);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("/nonexistent/topics.json") != std::string::npos);
    }
}

TEST_CASE("same flags give identical file bytes") {
    const fs::path dir = fresh_dir("sim_repeat");
    const std::string cfg = small_config(dir);
    SimulateOptions a{cfg, std::uint64_t{5}, (dir / "a").string()};
    SimulateOptions b{cfg, std::uint64_t{5}, (dir / "b").string()};
    REQUIRE(run_simulate(a) == kExitOk);
    REQUIRE(run_simulate(b) == kExitOk);
    CHECK(slurp(dir / "a/rounds.csv") == slurp(dir / "b/rounds.csv"));
    CHECK(slurp(dir / "a/subjects.csv") == slurp(dir / "b/subjects.csv"));

    SimulateOptions c{cfg, std::uint64_t{6}, (dir / "c").string()};
    REQUIRE(run_simulate(c) == kExitOk);
    CHECK(slurp(dir / "c/rounds.csv") != slurp(dir / "a/rounds.csv"));
}

TEST_CASE("estimate pipeline and schema handling") {
    const fs::path dir = fresh_dir("estimate");
    SimulateOptions sim{small_config(dir, 90), std::uint64_t{5}, (dir / "out").string()};
    REQUIRE(run_simulate(sim) == kExitOk);

    SUBCASE("happy path produces the three result files") {
        EstimateOptions est{(dir / "out").string(), (dir / "out").string(), false};
        CHECK(run_estimate(est) == kExitOk);
        CHECK(fs::exists(dir / "out/estimates.csv"));
        CHECK(fs::exists(dir / "out/regressions.csv"));
        CHECK(fs::exists(dir / "out/coverage.csv"));
        const std::string regs = slurp(dir / "out/regressions.csv");
        CHECK(regs.find("assess_pro_party") != std::string::npos);
        CHECK(regs.find("assess_pro_party_logit") == std::string::npos);
    }

    SUBCASE("--logit adds the clamped-logit variants") {
        EstimateOptions est{(dir / "out").string(), (dir / "out").string(), true};
        CHECK(run_estimate(est) == kExitOk);
        const std::string regs = slurp(dir / "out/regressions.csv");
        CHECK(regs.find("assess_pro_party_logit") != std::string::npos);
    }

    SUBCASE("schema mismatch names the missing column") {
        const fs::path broken = fresh_dir("estimate_broken");
        fs::copy(dir / "out/subjects.csv", broken / "subjects.csv");
        {
            // drop the assessment column from the header
            std::string rounds = slurp(dir / "out/rounds.csv");
            const auto pos = rounds.find("assessment,");
            REQUIRE(pos != std::string::npos);
            rounds.replace(pos, 11, "ass_removed,");
            std::ofstream out(broken / "rounds.csv", std::ios::binary);
            out << rounds;
        }
        EstimateOptions est{broken.string(), (broken / "est").string(), false};
        CHECK(run_estimate(est) == kExitValidation);
    }

    SUBCASE("unknown extra columns are ignored") {
        const fs::path extra = fresh_dir("estimate_extra");
        fs::copy(dir / "out/subjects.csv", extra / "subjects.csv");
        {
            std::istringstream in(slurp(dir / "out/rounds.csv"));
            std::ofstream out(extra / "rounds.csv", std::ios::binary);
            std::string line;
            bool first = true;
            while (std::getline(in, line)) {
                out << line << (first ? ",mystery" : ",42") << '\n';
                first = false;
            }
        }
        EstimateOptions est{extra.string(), (extra / "est").string(), false};
        CHECK(run_estimate(est) == kExitOk);
    }
}

TEST_CASE("report requires estimates and emits figure series") {
    const fs::path dir = fresh_dir("report");
    SimulateOptions sim{small_config(dir, 90), std::uint64_t{5}, (dir / "out").string()};
    REQUIRE(run_simulate(sim) == kExitOk);

    ReportOptions early{(dir / "out").string(), (dir / "fig").string(), false};
    CHECK(run_report(early) == kExitValidation);

    EstimateOptions est{(dir / "out").string(), (dir / "out").string(), false};
    REQUIRE(run_estimate(est) == kExitOk);

    ReportOptions rep{(dir / "out").string(), (dir / "fig").string(), true};
    CHECK(run_report(rep) == kExitOk);
    CHECK(fs::exists(dir / "fig/cdf_pro_anti.csv"));
    CHECK(fs::exists(dir / "fig/gaps_direction_partisanship.csv"));
    CHECK(fs::exists(dir / "fig/gaps_direction_veracity.csv"));
    CHECK(fs::exists(dir / "fig/cdf_pro_anti.svg"));

    // 11 grid rows and two series per row
    const CsvTable cdf = CsvTable::load((dir / "fig/cdf_pro_anti.csv").string());
    CHECK(cdf.rows() == 11);
    cdf.require_columns({"assessment", "cdf_pro_party", "cdf_anti_party"});
    CHECK(cdf.number(10, "cdf_pro_party") == 1.0);
    CHECK(cdf.number(10, "cdf_anti_party") == 1.0);

    // deterministic figure bytes
    ReportOptions rep2{(dir / "out").string(), (dir / "fig2").string(), true};
    CHECK(run_report(rep2) == kExitOk);
    CHECK(slurp(dir / "fig/cdf_pro_anti.svg") == slurp(dir / "fig2/cdf_pro_anti.svg"));
    CHECK(slurp(dir / "fig/gaps_direction_veracity.csv") ==
          slurp(dir / "fig2/gaps_direction_veracity.csv"));
}

TEST_CASE("unwritable output directory is an IO error") {
    const fs::path dir = fresh_dir("sim_io");
    SimulateOptions opts{small_config(dir), std::uint64_t{5}, "/proc/moreas/cannot/write"};
    CHECK(run_simulate(opts) == kExitIo);
}

TEST_CASE("log level comes from the environment") {
    unsetenv("MOREAS_LOG");
    CHECK(log_level() == LogLevel::Error);
    setenv("MOREAS_LOG", "info", 1);
    CHECK(log_level() == LogLevel::Info);
    setenv("MOREAS_LOG", "debug", 1);
    CHECK(log_level() == LogLevel::Debug);
    setenv("MOREAS_LOG", "bogus", 1);
    CHECK(log_level() == LogLevel::Error);
    unsetenv("MOREAS_LOG");
}

TEST_CASE("quadratic motive form parses from config") {
    const fs::path dir = fresh_dir("quadratic");
    const fs::path p = dir / "config.json";
    {
        std::ofstream out(p);
        out << R"({"seed": 3, "topics": ")" << MOREAS_SOURCE_DIR << R"(/data/topics.json",
              "cohort": {"cells": [{"party": "pro_dem", "updater": "motivated", "count": 8}],
                         "params": {"motive_form": "quadratic"}}})";
    }
    const SimConfig cfg = load_sim_config(p.string());
    CHECK(cfg.cohort.params.motive_form == MotiveForm::Quadratic);
    CHECK_THROWS_AS(
        [&] {
            std::ofstream out(p);
            out << R"({"cohort": {"cells": [{"party": "pro_dem", "updater": "motivated",
                  "count": 8}], "params": {"motive_form": "cubic"}}})";
            out.close();
            return load_sim_config(p.string());
        }(),
        std::invalid_argument);
}

TEST_CASE("default config ships with the repository") {
    const SimConfig cfg = load_sim_config(kDefaultConfig);
    CHECK(cfg.seed == 7);
    CHECK(cfg.cohort.size() == 1000);
    CHECK(cfg.cohort.params.phi == 0.47);
    CHECK(cfg.arms.told_prior == doctest::Approx(1.0 / 3.0));
}
