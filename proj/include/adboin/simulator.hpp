#pragma once
// Monte Carlo operating characteristics for the adaptive and the fixed
// cohort-size designs.

#include "adboin/trial_engine.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adboin {

struct Scenario {
    std::string name;
    std::vector<double> pT;
    std::vector<double> pE;
    std::optional<int> true_obd; // zero-based; ignored when obd_derived
    bool obd_derived = false;

    void validate(const DesignParams& params) const;
};

// argmax of the true mean utility among doses with pT <= phiT and pE >= psiE.
std::optional<int> derived_true_obd(const Scenario& scenario, const DesignParams& params);
std::optional<int> scenario_truth(const Scenario& scenario, const DesignParams& params);

struct TrialResult {
    std::optional<int> selected_obd;
    double duration_days = 0.0;
    std::vector<int> per_dose_n;
    TrialStatus stop_reason = TrialStatus::Active;
    std::uint64_t seed_id = 0;
    int cohorts = 0;
    int expanded_cohorts = 0;

    friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

struct OperatingChars {
    double pct_correct_obd = 0.0;
    double mean_duration_months = 0.0;
    double mean_n_at_correct_obd = 0.0;
    double mean_n_at_toxic_doses = 0.0;
    double pct_no_obd = 0.0; // replicates ending without a selected dose
    int replicates = 0;

    friend bool operator==(const OperatingChars&, const OperatingChars&) = default;
};

inline constexpr double kDaysPerMonth = 30.0;

// Per-replicate generator seed derived from (master_seed, replicate).
std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate);

TrialResult simulate_trial(const Scenario& scenario, const DesignParams& params,
                           std::uint64_t seed);

// Results are stored by replicate index, so the output does not depend on
// the thread count.
std::vector<TrialResult> run_replicates(const Scenario& scenario, const DesignParams& params,
                                        int replicates, std::uint64_t master_seed,
                                        int threads = 1);

OperatingChars summarize(const Scenario& scenario, const DesignParams& params,
                         std::span<const TrialResult> results);

OperatingChars run_monte_carlo(const Scenario& scenario, const DesignParams& params,
                               int replicates, std::uint64_t master_seed, int threads = 1);

struct MetricDiff {
    double pct_correct_obd = 0.0;
    double mean_duration_months = 0.0;
    double mean_n_at_correct_obd = 0.0;
    double mean_n_at_toxic_doses = 0.0;
};

struct ScenarioComparison {
    Scenario scenario;
    OperatingChars adaptive;
    OperatingChars base;
    MetricDiff diff; // adaptive - base
    double duration_reduction_pct = 0.0; // (base - adaptive) / base * 100
    std::vector<TrialResult> adaptive_runs; // filled when runs are kept
    std::vector<TrialResult> base_runs;
};

struct ComparisonReport {
    std::vector<ScenarioComparison> scenarios;
    MetricDiff mean_diff;
    double mean_duration_reduction_pct = 0.0;
};

// Both designs see the same replicate seeds (common random numbers).
ComparisonReport compare_designs(const std::vector<Scenario>& bank, const DesignParams& adaptive,
                                 const DesignParams& base, int replicates,
                                 std::uint64_t master_seed, int threads = 1,
                                 bool keep_runs = false);

// Simulation cases: A/C apply the per-dose stopping rule, B/D do not; C/D use
// a 30-day efficacy window instead of 60. The base design keeps cohorts at 3.
DesignParams case_params(char case_id, bool adaptive);

std::vector<Scenario> scenario_bank();
std::vector<Scenario> parse_scenarios(const std::string& json_text);
std::vector<Scenario> load_scenarios(const std::string& path);
std::string scenarios_json(const std::vector<Scenario>& bank);

std::string format_fixed4(double v);
std::string oc_csv_header();
std::string oc_csv_row(const std::string& scenario, const std::string& design,
                       const OperatingChars& oc, std::uint64_t seed);
std::string comparison_csv(const ComparisonReport& report, std::uint64_t seed);
std::string replicate_log_header();
std::string replicate_log_rows(const std::string& scenario, const std::string& design,
                               std::span<const TrialResult> results);

} // namespace adboin
