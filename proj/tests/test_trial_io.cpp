#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adboin/errors.hpp"
#include "adboin/trial_io.hpp"

#include <filesystem>
#include <fstream>

using namespace adboin;
using nlohmann::json;

namespace {

DesignParams small_design() {
    DesignParams p;
    p.max_n = 18;
    return p;
}

TrialEngine example_trial() {
    TrialEngine engine(small_design());
    engine.record_cohort(0, OutcomeCounts2x2{1, 0, 2, 0}, "2026-01-05T10:00:00Z");
    engine.record_cohort(1, OutcomeCounts2x2{2, 0, 1, 0}, "2026-02-20T10:00:00Z");
    return engine;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST_CASE("design parameters round-trip and default missing keys") {
    DesignParams p;
    p.theta = 0.3;
    p.start_dose = 2;
    p.weights = UtilityWeights{100, 50, 30, 0};
    CHECK(json(p).get<DesignParams>() == p);
    CHECK(json(p)["start_dose"] == 3);

    const auto partial = json::parse(R"({"max_n": 24})").get<DesignParams>();
    DesignParams expect;
    expect.max_n = 24;
    CHECK(partial == expect);

    CHECK(code_of([] { json::parse(R"({"maxn": 24})").get<DesignParams>(); }) ==
          ErrorCode::Schema);
    CHECK(code_of([] { json::parse(R"({"weights": {"eff": 1}})").get<DesignParams>(); }) ==
          ErrorCode::Schema);
}

TEST_CASE("trial state round-trips exactly") {
    const auto engine = example_trial();
    const json j = engine.state();
    CHECK(j["schema_version"] == 1);
    CHECK(j["current_dose"] == 2);
    CHECK(j["doses"][1]["n"] == 3);
    CHECK(j["audit"][0]["decision"]["next_dose"] == 2);
    CHECK(j.get<TrialState>() == engine.state());
    const auto reloaded = load_trial(json::parse(j.dump()));
    CHECK(reloaded.state() == engine.state());
}

TEST_CASE("load rejects corrupted documents") {
    const json good = example_trial().state();

    auto j = good;
    j["doses"][0]["a"] = 2;
    CHECK(code_of([&] { load_trial(j); }) == ErrorCode::Schema);

    j = good;
    j["audit"][1]["decision"]["next_cohort_size"] = 3;
    CHECK(code_of([&] { load_trial(j); }) == ErrorCode::Schema);

    j = good;
    j["schema_version"] = 2;
    CHECK(code_of([&] { load_trial(j); }) == ErrorCode::Schema);

    j = good;
    j["extra"] = true;
    CHECK(code_of([&] { load_trial(j); }) == ErrorCode::Schema);

    j = good;
    j["params"]["theta"] = 1.5;
    CHECK(code_of([&] { load_trial(j); }) == ErrorCode::Schema);

    j = good;
    j.erase("audit");
    CHECK(code_of([&] { load_trial(j); }) == ErrorCode::Schema);

    j = good;
    j["status"] = "paused";
    CHECK(code_of([&] { load_trial(j); }) == ErrorCode::Schema);

    const auto path = std::filesystem::temp_directory_path() / "adboin_bad_state.json";
    std::ofstream(path) << good.dump().substr(0, 40);
    CHECK(code_of([&] { load_trial_file(path.string()); }) == ErrorCode::Schema);
    std::filesystem::remove(path);
    CHECK(code_of([&] { load_trial_file("/nonexistent/state.json"); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("report for a fresh trial") {
    TrialEngine engine(small_design());
    CHECK(decision_report(engine) ==
          "No cohorts recorded.\nRecommendation: start at dose 1, cohort size 3\n");
}

TEST_CASE("report explains an expansion") {
    const auto engine = example_trial();
    const auto text = decision_report(engine);
    CHECK(text.find("Last cohort: dose 2 (n=3, tox=0, eff=2)\n") != std::string::npos);
    CHECK(text.find("escalate if tox <= 0, de-escalate if tox >= 2 -> escalate region") !=
          std::string::npos);
    CHECK(text.find("dose 3 dp=0.2950 (untried);") != std::string::npos);
    CHECK(text.find("Expansion check on dose 2: met\n") != std::string::npos);
    CHECK(text.find("Recommendation: stay at dose 2, cohort size 6\n") != std::string::npos);
}

TEST_CASE("report for a stopped trial names the selection") {
    TrialEngine engine(small_design());
    engine.record_cohort(0, OutcomeCounts2x2{0, 1, 0, 2});
    const auto text = decision_report(engine);
    CHECK(text.find("Dose 1 eliminated for safety\n") != std::string::npos);
    CHECK(text.find("Recommendation: trial stopped (stopped_no_admissible)\n") !=
          std::string::npos);
    CHECK(text.find("Selected OBD: none\n") != std::string::npos);
}
