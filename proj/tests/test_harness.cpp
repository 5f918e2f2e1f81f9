#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <sstream>

#include "cmsbm/error.hpp"
#include "cmsbm/harness.hpp"
#include "cmsbm/io.hpp"
#include "cmsbm/philox.hpp"
#include "cmsbm/thresholds.hpp"

using namespace cmsbm;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = CMSBM_FIXTURES;

std::vector<double> draws(int count, double shift, std::uint64_t seed, bool coarse) {
    const CounterRng rng(seed);
    std::vector<double> v;
    for (int i = 0; i < count; ++i) {
        const double x = rng.normal(make_tag(entity::probe, 3), std::uint64_t(i)) + shift;
        v.push_back(coarse ? std::round(x * 2) / 2 : x);
    }
    return v;
}

}  // namespace

TEST_CASE("AUC by ranks and by trapezoids") {
    CHECK(auc_rank({2, 3, 4}, {0, 1}) == 1.0);
    CHECK(auc_rank({0, 1}, {2, 3, 4}) == 0.0);
    CHECK(auc_rank({1, 1}, {1, 1}) == 0.5);
    for (std::uint64_t s = 0; s < 10; ++s)
        for (bool coarse : {false, true}) {
            const auto pos = draws(57, 0.7, 2 * s, coarse), neg = draws(43, 0.0, 2 * s + 1, coarse);
            CHECK(std::abs(auc_rank(pos, neg) - auc_trapezoid(pos, neg)) <= 1e-12);
        }
    // Identical distributions: AUC near one half.
    double sum = 0.0, sq = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) {
        const double a = auc_rank(draws(50, 0.0, 1000 + 2 * r, false), draws(50, 0.0, 1001 + 2 * r, false));
        sum += a;
        sq += a * a;
    }
    const double mean = sum / reps, se = std::sqrt((sq / reps - mean * mean) / reps);
    CHECK(std::abs(mean - 0.5) <= 3 * se);
}

TEST_CASE("records CSV round trip and schema") {
    ExperimentRecord r;
    r.arm_id = "a";
    r.hypothesis = 'Q';
    r.seed = 12345678901ull;
    r.variant = "color2";
    r.value = 0.1 + 0.2;
    r.f_intro = 1.0 / 3;
    r.f_sec3 = 2.5e-300;
    r.sigma_plus = -0.0;
    r.auc = 0.75;
    const std::string text = records_csv({r, r});
    const auto back = parse_records_csv(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].value == r.value);
    CHECK(back[0].f_intro == r.f_intro);
    CHECK(back[0].f_sec3 == r.f_sec3);
    CHECK(back[0].seed == r.seed);
    CHECK(back[0].hypothesis == 'Q');
    CHECK(back[0].auc == r.auc);
    CHECK_FALSE(back[0].cosine.has_value());
    CHECK(records_csv(back) == text);
    CHECK(text.rfind(std::string(kCsvSchema) + "\n", 0) == 0);
    CHECK_THROWS_AS(parse_records_csv("arm_id,hypothesis\n"), Error);
    CHECK_THROWS_AS(emit_plots(""), Error);
    CHECK_THROWS_AS(emit_plots(std::string(kCsvSchema) + "\n"), Error);
}

TEST_CASE("plans validate") {
    const auto plan = load_plan(kFixtures / "smoke_recovery.json");
    CHECK(plan.kind == ExperimentKind::Recovery);
    REQUIRE(plan.arms.size() == 2);
    CHECK(threshold_F(plan.arms[1].params, FormulaVariant::Intro) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(trial_seed(77, 1, 3) == 77 + 1000000 + 3);
    CHECK_THROWS_AS(plan_from_json(nlohmann::json::parse(R"({"kind":"roc","base":{},"arms":[{}]})")), Error);
    CHECK_THROWS_AS(plan_from_json(nlohmann::json::parse(
                        R"({"base":{"n":30,"p":15,"mu":0.5,"rho":0.5,"lambda":[2],"epsilon":[0.5]},
                            "arms":[{"id":"a"}],"variants":["colour1"]})")),
                    Error);
}

TEST_CASE("smoke experiments reproduce the golden fixtures") {
    for (const char* kind : {"smoke_recovery", "smoke_detection"}) {
        const auto plan = load_plan(kFixtures / (std::string(kind) + ".json"));
        const fs::path dir = kFixtures / kind;
        const std::string golden = read_text(dir / "records.csv");
        for (int threads : {1, 3}) {
            const auto res = run_experiment(plan, threads);
            CHECK(records_csv(res.records) == golden);
            CHECK(summary_csv(res.summary) == read_text(dir / "summary.csv"));
        }
        // Recorded thresholds match a recomputation from the arm parameters.
        for (const auto& rec : parse_records_csv(golden)) {
            const auto& arm = *std::find_if(plan.arms.begin(), plan.arms.end(),
                                            [&](const ArmSpec& a) { return a.id == rec.arm_id; });
            CHECK(rec.f_intro == threshold_F(arm.params, FormulaVariant::Intro));
            CHECK(rec.f_sec3 == threshold_F(arm.params, FormulaVariant::Section3));
        }
        const auto plots = emit_plots(golden);
        CHECK_FALSE(plots.empty());
        for (const auto& [name, svg] : plots) CHECK(svg == read_text(dir / name));
    }
}

TEST_CASE("ROC curves are monotone") {
    const std::string svg = read_text(kFixtures / "smoke_detection" / "roc_all.svg");
    // Every polyline is a list of "x,y" pairs that must not decrease in either coordinate.
    std::size_t pos = 0;
    int curves = 0;
    while ((pos = svg.find("points=\"", pos)) != std::string::npos) {
        pos += 8;
        const std::size_t end = svg.find('"', pos);
        std::istringstream in(svg.substr(pos, end - pos));
        double px = -1e300, py = 1e300, x, y;
        char comma;
        while (in >> x >> comma >> y) {
            CHECK(x >= px);
            CHECK(y <= py);  // SVG y grows downward
            px = x;
            py = y;
        }
        ++curves;
        pos = end;
    }
    CHECK(curves >= 2);
}
