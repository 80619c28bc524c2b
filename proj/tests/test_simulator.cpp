#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adboin/errors.hpp"
#include "adboin/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

using namespace adboin;

namespace {

Scenario flat(int doses, double pT, double pE) {
    return {"flat", std::vector<double>(doses, pT), std::vector<double>(doses, pE), std::nullopt,
            true};
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

} // namespace

TEST_CASE("an all-toxic trial stops after the first cohort without a selection") {
    const auto p = case_params('A', true);
    const auto s = flat(5, 1.0, 0.5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = simulate_trial(s, p, seed);
        CHECK(r.per_dose_n == std::vector<int>{3, 0, 0, 0, 0});
        CHECK_FALSE(r.selected_obd.has_value());
        CHECK(r.stop_reason == TrialStatus::StoppedNoAdmissible);
        CHECK(r.cohorts == 1);
    }
}

TEST_CASE("a perfect single dose fills the per-dose limit") {
    auto p = case_params('A', true);
    p.num_doses = 1;
    const auto s = flat(1, 0.0, 1.0);
    const auto r = simulate_trial(s, p, 3);
    CHECK(r.per_dose_n == std::vector<int>{12});
    CHECK(r.selected_obd == 0);
    CHECK(r.stop_reason == TrialStatus::StoppedPerDoseRule);
    CHECK(r.cohorts == 3); // 3, 6, then 3 to respect the per-dose limit
    CHECK(r.expanded_cohorts == 1);
    CHECK(r.duration_days > 3 * 60.0);

    p.expanded_cohort = p.base_cohort;
    const auto b = simulate_trial(s, p, 3);
    CHECK(b.per_dose_n == std::vector<int>{12});
    CHECK(b.cohorts == 4);
}

TEST_CASE("one replicate matches a single trial") {
    const auto p = case_params('B', true);
    const auto bank = scenario_bank();
    const auto runs = run_replicates(bank[3], p, 1, 77);
    CHECK(runs[0] == simulate_trial(bank[3], p, replicate_seed(77, 0)));
    const auto oc = summarize(bank[3], p, runs);
    CHECK(oc.mean_duration_months == doctest::Approx(runs[0].duration_days / 30.0));
}

TEST_CASE("replicate seeds are distinct and stable") {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t r = 0; r < 10000; ++r) seeds.push_back(replicate_seed(20230101, r));
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
    CHECK(replicate_seed(1, 2) == replicate_seed(1, 2));
    CHECK(replicate_seed(1, 2) != replicate_seed(2, 1));
}

TEST_CASE("results do not depend on the thread count") {
    const auto p = case_params('A', true);
    const auto bank = scenario_bank();
    const auto one = run_replicates(bank[5], p, 300, 11, 1);
    for (int threads : {2, 3, 8}) CHECK(run_replicates(bank[5], p, 300, 11, threads) == one);
}

TEST_CASE("summary does not depend on replicate order") {
    const auto p = case_params('B', true);
    const auto bank = scenario_bank();
    auto runs = run_replicates(bank[2], p, 500, 5);
    const auto oc = summarize(bank[2], p, runs);
    std::mt19937_64 gen(1);
    for (int k = 0; k < 5; ++k) {
        std::shuffle(runs.begin(), runs.end(), gen);
        CHECK(summarize(bank[2], p, runs) == oc);
    }
}

TEST_CASE("identical designs give zero differences") {
    const auto p = case_params('A', true);
    const auto report = compare_designs(scenario_bank(), p, p, 100, 9);
    for (const auto& sc : report.scenarios) {
        CHECK(sc.diff.pct_correct_obd == 0.0);
        CHECK(sc.diff.mean_duration_months == 0.0);
        CHECK(sc.diff.mean_n_at_correct_obd == 0.0);
        CHECK(sc.diff.mean_n_at_toxic_doses == 0.0);
        CHECK(sc.duration_reduction_pct == 0.0);
    }
    const auto csv = comparison_csv(report, 9);
    CHECK(csv.find("average,AD-BOIN12-minus-BOIN12,0.0000,0.0000,0.0000,0.0000,100,9") !=
          std::string::npos);
}

TEST_CASE("summary matches a hand aggregation of the replicate log") {
    const auto bank = scenario_bank();
    const auto p = case_params('A', true);
    for (const auto& s : {bank[1], bank[8], bank[14]}) {
        const auto runs = run_replicates(s, p, 400, 21);
        const auto oc = summarize(s, p, runs);
        const auto truth = scenario_truth(s, p);
        std::istringstream log(replicate_log_rows(s.name, "AD-BOIN12", runs));
        std::string line;
        int count = 0, correct = 0;
        long n_correct = 0, n_toxic = 0;
        double days = 0.0;
        while (std::getline(log, line)) {
            const auto f = split(line, ',');
            REQUIRE(f.size() == 10);
            ++count;
            const std::string want = truth ? std::to_string(*truth + 1) : "none";
            if (f[4] == want) ++correct;
            days += std::stod(f[5]);
            const auto per_dose = split(f[9], ';');
            for (std::size_t i = 0; i < per_dose.size(); ++i) {
                const int n = std::stoi(per_dose[i]);
                if (truth && static_cast<int>(i) == *truth) n_correct += n;
                if (s.pT[i] > p.phiT) n_toxic += n;
            }
        }
        CHECK(count == 400);
        CHECK(oc.pct_correct_obd == doctest::Approx(100.0 * correct / count).epsilon(1e-12));
        CHECK(oc.mean_duration_months == doctest::Approx(days / count / 30.0).epsilon(1e-12));
        CHECK(oc.mean_n_at_correct_obd == doctest::Approx(double(n_correct) / count));
        CHECK(oc.mean_n_at_toxic_doses == doctest::Approx(double(n_toxic) / count));
    }
}

TEST_CASE("scenario bank truths agree with the utility definition") {
    const auto p = case_params('A', true);
    const auto bank = scenario_bank();
    CHECK(bank.size() >= 12);
    for (const auto& s : bank) {
        CAPTURE(s.name);
        CHECK_FALSE(s.obd_derived);
        CHECK(s.true_obd == derived_true_obd(s, p));
        CHECK(std::is_sorted(s.pT.begin(), s.pT.end()));
    }
}

TEST_CASE("shipped scenario file equals the built-in bank") {
    const auto loaded = load_scenarios(ADBOIN_SOURCE_DIR "/data/scenarios.json");
    const auto bank = scenario_bank();
    REQUIRE(loaded.size() == bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i) {
        CHECK(loaded[i].name == bank[i].name);
        CHECK(loaded[i].pT == bank[i].pT);
        CHECK(loaded[i].pE == bank[i].pE);
        CHECK(loaded[i].true_obd == bank[i].true_obd);
    }
    CHECK(parse_scenarios(scenarios_json(bank)).size() == bank.size());
}

TEST_CASE("scenario parsing") {
    const auto s = parse_scenarios(
        R"({"scenarios":[{"name":"x","pT":[0.1,0.5],"pE":[0.5,0.6]},)"
        R"({"name":"y","pT":[0.1,0.5],"pE":[0.5,0.6],"true_obd":null},)"
        R"({"name":"z","pT":[0.1,0.5],"pE":[0.5,0.6],"true_obd":2}]})");
    REQUIRE(s.size() == 3);
    CHECK(s[0].obd_derived);
    CHECK_FALSE(s[1].obd_derived);
    CHECK_FALSE(s[1].true_obd.has_value());
    CHECK(s[2].true_obd == 1);
    CHECK_THROWS_AS(parse_scenarios(R"({"scenarios":[{"name":"x","pT":[0.1],"pE":[0.5,0.6]}]})"),
                    Error);
    CHECK_THROWS_AS(parse_scenarios("{"), Error);
}

TEST_CASE("longer efficacy windows lengthen trials by exactly the added waiting") {
    const auto bank = scenario_bank();
    auto p = case_params('B', true);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        p.eff_window_days = 60.0;
        const auto a = simulate_trial(bank[6], p, seed);
        p.eff_window_days = 90.0;
        const auto b = simulate_trial(bank[6], p, seed);
        CHECK(a.per_dose_n == b.per_dose_n);
        CHECK(b.duration_days == doctest::Approx(a.duration_days + 30.0 * a.cohorts));
        p.eff_window_days = 30.0; // toxicity window of 45 days now dominates
        const auto c = simulate_trial(bank[6], p, seed);
        CHECK(c.duration_days == doctest::Approx(a.duration_days - 15.0 * a.cohorts));
    }
}

TEST_CASE("expansion shortens the single-dose trial on common random numbers") {
    auto ad = case_params('A', true);
    ad.num_doses = 1;
    auto base = case_params('A', false);
    base.num_doses = 1;
    const auto s = flat(1, 0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = simulate_trial(s, ad, seed);
        const auto b = simulate_trial(s, base, seed);
        CHECK(b.duration_days - a.duration_days == doctest::Approx(60.0));
    }
}

TEST_CASE("simulation arguments are validated") {
    const auto p = case_params('A', true);
    CHECK_THROWS_AS(run_replicates(flat(4, 0.1, 0.5), p, 10, 1), Error);
    CHECK_THROWS_AS(run_replicates(flat(5, 0.1, 0.5), p, 0, 1), Error);
    CHECK_THROWS_AS(run_replicates(flat(5, 1.1, 0.5), p, 10, 1), Error);
    CHECK_THROWS_AS(case_params('E', true), Error);
    CHECK(format_fixed4(-0.00001) == "0.0000");
    CHECK(format_fixed4(1.23456) == "1.2346");
}
