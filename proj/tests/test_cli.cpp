// Black-box tests of the ruleout-eval binary: exit-code contract, output
// determinism, JSON round-trips, and the documented flag surface.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ruleout/metrics.hpp"

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(RULEOUT_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

const char* kToyCohort =
    "patient_id,truth,reader_decision,ai_score\n"
    "p1,0,0,1\n"
    "p2,0,0,2\n"
    "p3,0,1,3\n"
    "p4,1,1,4\n"
    "p5,0,0,5\n"
    "p6,1,1,6\n";

}  // namespace

TEST_CASE("cli: metrics JSON report round-trips its derived fields") {
    auto r = run_cli("metrics --se 0.906 --sp 0.935 --prevalence 0.007 "
                     "--relative-utility 162 --format json");
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.output);
    const double se = report["inputs"]["se"].get<double>();
    const double sp = report["inputs"]["sp"].get<double>();
    const double pi = report["inputs"]["prevalence"].get<double>();
    const double u = report["inputs"]["relative_utility"].get<double>();

    // recompute from the parsed inputs; values must agree exactly
    ruleout::RocPoint p(se, 1.0 - sp);
    ruleout::UtilityContext ctx(pi, u);
    CHECK(report["metrics"]["iui"].get<double>() == ruleout::iui(p, ctx));
    CHECK(report["metrics"]["ppv"].get<double>() == ruleout::ppv(p, ctx));
    CHECK(report["metrics"]["npv"].get<double>() == ruleout::npv(p, ctx));

    // published values at the baseline
    CHECK(std::abs(report["metrics"]["iui"].get<double>() - 0.849) < 0.005);
    CHECK(std::abs(report["metrics"]["npv"].get<double>() - 0.9993) < 5e-4);
}

TEST_CASE("cli: metrics in recall/detection space") {
    auto r = run_cli("metrics --recall-rate 0.032 --detection-rate 0.0061 "
                     "--relative-utility 111 --format json");
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.output);
    CHECK(std::abs(report["metrics"]["diui"].get<double>() - 5.83e-3) < 0.1e-3);
    CHECK_FALSE(report["metrics"].contains("ppv"));  // prevalence not given
}

TEST_CASE("cli: metrics usage errors exit 2") {
    CHECK(run_cli("metrics --se 0.9 --sp 0.9").exit_code == 2);
    CHECK(run_cli("metrics").exit_code == 2);
    CHECK(run_cli("metrics --recall-rate 0.03 --detection-rate 0.006").exit_code == 2);
    CHECK(run_cli("metrics --se 0.9 --sp 0.9 --prevalence 0.007 --recall-rate 0.03 "
                  "--detection-rate 0.006").exit_code == 2);
}

TEST_CASE("cli: compare on the published baseline vs 10% rule-out row") {
    auto r = run_cli("compare --ref-se 0.906 --ref-sp 0.935 --cand-se 0.901 "
                     "--cand-sp 0.939 --n-cancer 191 --n-noncancer 26349 "
                     "--prevalence 0.007 --relative-utility 162 --seed 1 --format json");
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.output);
    CHECK_FALSE(report["verdict"]["sesp_superior"].get<bool>());
    CHECK_FALSE(report["verdict"]["ppv_npv_superior"].get<bool>());
    const double p =
        report["iui"]["candidate"]["exceedance_probability"].get<double>();
    CHECK(std::abs(p - 0.365) < 0.10);
    CHECK(report["metadata"]["seed"].get<std::uint64_t>() == 1);
}

TEST_CASE("cli: compare with candidate equal to reference") {
    auto r = run_cli("compare --ref-se 0.906 --ref-sp 0.935 --cand-se 0.906 "
                     "--cand-sp 0.935 --n-cancer 191 --n-noncancer 26349 "
                     "--relative-utility 162 --samples 500 --format json");
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.output);
    CHECK_FALSE(report["verdict"]["sesp_superior"].get<bool>());
    CHECK_FALSE(report["verdict"]["ppv_npv_superior"].get<bool>());
    CHECK_FALSE(report["verdict"]["eu_superior"].get<bool>());
    // identical workflows: every paired replicate ties exactly
    CHECK(report["iui"]["candidate"]["exceedance_probability"].get<double>() == 0.0);
    CHECK(report["iui"]["candidate"]["n_ties"].get<std::int64_t>() == 500);
}

TEST_CASE("cli: compare rejects a candidate not reachable by rule-out") {
    CHECK(run_cli("compare --ref-se 0.906 --ref-sp 0.935 --cand-se 0.95 --cand-sp 0.94 "
                  "--n-cancer 191 --n-noncancer 26349 --relative-utility 162")
              .exit_code == 2);
}

TEST_CASE("cli: compare emits boundary polylines on request") {
    auto r = run_cli("compare --ref-se 0.906 --ref-sp 0.935 --cand-se 0.901 "
                     "--cand-sp 0.939 --n-cancer 191 --n-noncancer 26349 "
                     "--relative-utility 162 --samples 100 --boundaries 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("region,segment_index,x,y") != std::string::npos);
    CHECK(r.output.find("iso_utility,1,") != std::string::npos);
}

TEST_CASE("cli: simulate the toy cohort") {
    const auto path = write_temp("ruleout_toy_cohort.csv", kToyCohort);
    auto r = run_cli("simulate --cohort " + path.string() +
                     " --fractions 0,0.5 --relative-utility 162 --samples 400 "
                     "--format json");
    REQUIRE(r.exit_code == 0);
    const json report = json::parse(r.output);
    REQUIRE(report["rows"].size() == 2);

    // fraction 0: the with-device workflow equals the reader alone
    const auto& base = report["rows"][0];
    CHECK(base["se"].get<double>() == 1.0);
    CHECK(base["sp"].get<double>() == 0.75);
    CHECK(base["p_iui_greater_than_baseline"].is_null());

    // fraction 0.5 rules out patients 1-3, removing the reader false positive
    const auto& half = report["rows"][1];
    CHECK(half["achieved_fraction"].get<double>() == 0.5);
    CHECK(half["se"].get<double>() == 1.0);
    CHECK(half["sp"].get<double>() == 1.0);

    // hand-computed IUI at the cohort prevalence 1/3, U_Rel 162
    const double slope = (2.0 / 3.0) / (1.0 / 3.0) / 162.0;
    CHECK(std::abs(base["iui"].get<double>() - (1.0 - slope * 0.25)) < 1e-12);
    CHECK(half["iui"].get<double>() == 1.0);
    std::filesystem::remove(path);
}

TEST_CASE("cli: simulate input failures exit 2") {
    CHECK(run_cli("simulate --cohort /nonexistent.csv --fractions 0 "
                  "--relative-utility 162").exit_code == 2);
    const auto path = write_temp("ruleout_bad_cohort.csv",
                                 "patient_id,truth,reader_decision,ai_score\n"
                                 "a,1,1,0.5\n"
                                 "b,2,1,0.5\n");
    CHECK(run_cli("simulate --cohort " + path.string() +
                  " --fractions 0 --relative-utility 162").exit_code == 2);
    std::filesystem::remove(path);
}

TEST_CASE("cli: baseline-ru") {
    SUBCASE("linear fixture of slope 1/112") {
        std::string csv = "x,y\n";
        for (int i = 0; i <= 9; ++i) {
            const double x = 0.1 * i;
            csv += std::to_string(x) + "," + std::to_string(x / 112.0) + "\n";
        }
        const auto path = write_temp("ruleout_linear_curve.csv", csv);
        auto r = run_cli("baseline-ru --curve " + path.string() + " --at 0.45 --format json");
        REQUIRE(r.exit_code == 0);
        const json report = json::parse(r.output);
        CHECK(std::abs(report["relative_utility"].get<double>() - 111.0) < 1e-6);
        std::filesystem::remove(path);
    }
    SUBCASE("tangent steeper than 1 is rejected in recall/detection space") {
        std::string csv = "x,y\n";
        for (int i = 0; i <= 10; ++i) {
            const double x = 0.1 * i;
            csv += std::to_string(x) + "," + std::to_string(x * x) + "\n";
        }
        const auto path = write_temp("ruleout_square_curve.csv", csv);
        CHECK(run_cli("baseline-ru --curve " + path.string() + " --at 0.6").exit_code == 2);
        // the same curve read as ROC-space data has a valid positive tangent
        auto roc = run_cli("baseline-ru --curve " + path.string() +
                           " --at 0.6 --space roc --prevalence 0.007 --format json");
        CHECK(roc.exit_code == 0);
        std::filesystem::remove(path);
    }
    SUBCASE("bundled double-reading fixture, value is data-dependent") {
        auto r = run_cli(std::string("baseline-ru --curve ") + RULEOUT_DATA_DIR +
                         "/double_reading_curve.csv --at 0.032 --format json");
        REQUIRE(r.exit_code == 0);
        const json report = json::parse(r.output);
        const double u = report["relative_utility"].get<double>();
        CHECK(u > 90.0);
        CHECK(u < 130.0);
    }
    SUBCASE("knot-resampling heuristic is labeled") {
        auto r = run_cli(std::string("baseline-ru --curve ") + RULEOUT_DATA_DIR +
                         "/double_reading_curve.csv --at 0.032 --resample-knots 200 "
                         "--seed 3 --format json");
        REQUIRE(r.exit_code == 0);
        const json report = json::parse(r.output);
        REQUIRE(report.contains("knot_resampling_heuristic"));
        CHECK(report["knot_resampling_heuristic"]["note"].get<std::string>().find(
                  "heuristic") != std::string::npos);
    }
    SUBCASE("extrapolation exits 2") {
        auto r = run_cli(std::string("baseline-ru --curve ") + RULEOUT_DATA_DIR +
                         "/double_reading_curve.csv --at 0.5");
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("cli: reproduce matches the published tables") {
    SUBCASE("us-2019") {
        auto r = run_cli("reproduce --study us-2019 --samples 2000 --format json");
        REQUIRE(r.exit_code == 0);
        const json report = json::parse(r.output);
        REQUIRE(report["rows"].size() == 10);
        for (const auto& row : report["rows"])
            CHECK(std::abs(row["iui"].get<double>() -
                           row["iui_published"].get<double>()) < 0.005);
        REQUIRE(report["eu_ratio_plot"].size() == 10);
        CHECK(report["eu_ratio_plot"][0]["eu_ratio"].get<double>() == 1.0);
    }
    SUBCASE("euro-2022") {
        auto r = run_cli("reproduce --study euro-2022 --samples 2000 --format json");
        REQUIRE(r.exit_code == 0);
        const json report = json::parse(r.output);
        REQUIRE(report["rows"].size() == 4);
        for (const auto& row : report["rows"])
            CHECK(std::abs(row["diui"].get<double>() -
                           row["diui_published"].get<double>()) < 0.1e-3);
    }
    SUBCASE("unknown study exits 2") {
        CHECK(run_cli("reproduce --study us-1999").exit_code == 2);
    }
}

TEST_CASE("cli: repeated invocations are byte-identical") {
    const std::string cmd = "reproduce --study us-2019 --seed 7 --samples 500";
    for (const std::string format : {"table", "json", "csv"}) {
        auto a = run_cli(cmd + " --format " + format);
        auto b = run_cli(cmd + " --format " + format);
        REQUIRE(a.exit_code == 0);
        REQUIRE(a.output == b.output);
    }
    auto t1 = run_cli("simulate --cohort " + std::string(RULEOUT_DATA_DIR) +
                      "/demo_cohort.csv --fractions 0,0.4 --relative-utility 162 "
                      "--samples 500 --seed 3 --threads 1 --format csv");
    auto t4 = run_cli("simulate --cohort " + std::string(RULEOUT_DATA_DIR) +
                      "/demo_cohort.csv --fractions 0,0.4 --relative-utility 162 "
                      "--samples 500 --seed 3 --threads 4 --format csv");
    REQUIRE(t1.exit_code == 0);
    CHECK(t1.output == t4.output);
}

TEST_CASE("cli: exit-code contract") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("metrics --help").exit_code == 0);
    CHECK(run_cli("bogus-subcommand").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);  // a subcommand is required
    CHECK(run_cli("reproduce").exit_code == 2);
    CHECK(run_cli("reproduce --study us-2019 --format yaml").exit_code == 2);
}
