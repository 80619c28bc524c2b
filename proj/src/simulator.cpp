#include "adboin/simulator.hpp"

#include "adboin/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace adboin {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform on [0,1) with 53 random bits; platform independent unlike
// std::uniform_real_distribution.
double next_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

double true_utility(double pT, double pE, const UtilityWeights& w) {
    return w.eff_notox * pE * (1.0 - pT) + w.eff_tox * pE * pT +
           w.noeff_notox * (1.0 - pE) * (1.0 - pT) + w.noeff_tox * (1.0 - pE) * pT;
}

MetricDiff difference(const OperatingChars& a, const OperatingChars& b) {
    return {a.pct_correct_obd - b.pct_correct_obd, a.mean_duration_months - b.mean_duration_months,
            a.mean_n_at_correct_obd - b.mean_n_at_correct_obd,
            a.mean_n_at_toxic_doses - b.mean_n_at_toxic_doses};
}

} // namespace

void Scenario::validate(const DesignParams& params) const {
    if (static_cast<int>(pT.size()) != params.num_doses ||
        static_cast<int>(pE.size()) != params.num_doses)
        fail(ErrorCode::Configuration,
             "scenario '" + name + "' does not match the number of doses");
    for (double p : pT)
        if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::Configuration, "pT outside [0,1]");
    for (double p : pE)
        if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::Configuration, "pE outside [0,1]");
    if (!obd_derived && true_obd && (*true_obd < 0 || *true_obd >= params.num_doses))
        fail(ErrorCode::Configuration, "true_obd out of range in scenario '" + name + "'");
}

std::optional<int> derived_true_obd(const Scenario& scenario, const DesignParams& params) {
    std::optional<int> best;
    double best_u = -1.0;
    for (std::size_t i = 0; i < scenario.pT.size(); ++i) {
        if (scenario.pT[i] > params.phiT || scenario.pE[i] < params.psiE) continue;
        const double u = true_utility(scenario.pT[i], scenario.pE[i], params.weights);
        if (!best || u > best_u) {
            best = static_cast<int>(i);
            best_u = u;
        }
    }
    return best;
}

std::optional<int> scenario_truth(const Scenario& scenario, const DesignParams& params) {
    return scenario.obd_derived ? derived_true_obd(scenario, params) : scenario.true_obd;
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(replicate + 0x632be59bd9b4e019ULL));
}

TrialResult simulate_trial(const Scenario& scenario, const DesignParams& params,
                           std::uint64_t seed) {
    scenario.validate(params);
    std::mt19937_64 gen(seed);
    const double mean_gap = kDaysPerMonth / params.accrual_rate_per_month;
    const double evaluation = std::max(params.tox_window_days, params.eff_window_days);

    TrialEngine engine(params);
    TrialResult result;
    result.seed_id = seed;
    double clock = 0.0;
    while (engine.state().active()) {
        const int dose = engine.state().current_dose;
        const int size = engine.state().next_cohort_size;
        OutcomeCounts2x2 cohort;
        // Fixed draw order per patient keeps patient k's outcomes identical
        // across designs run from the same seed.
        for (int k = 0; k < size; ++k) {
            clock += -mean_gap * std::log1p(-next_uniform(gen));
            const bool tox = next_uniform(gen) < scenario.pT[dose];
            const bool eff = next_uniform(gen) < scenario.pE[dose];
            if (eff && !tox) ++cohort.a;
            else if (eff) ++cohort.b;
            else if (!tox) ++cohort.c;
            else ++cohort.d;
        }
        clock += evaluation;
        ++result.cohorts;
        if (size > params.base_cohort) ++result.expanded_cohorts;
        engine.record_cohort(dose, cohort);
    }
    const auto& state = engine.state();
    result.duration_days = clock;
    result.stop_reason = state.status;
    result.selected_obd = engine.final_selection();
    for (const auto& rec : state.doses) result.per_dose_n.push_back(rec.counts.n());
    return result;
}

std::vector<TrialResult> run_replicates(const Scenario& scenario, const DesignParams& params,
                                        int replicates, std::uint64_t master_seed,
                                        int threads) {
    if (replicates < 1) fail(ErrorCode::InvalidArgument, "replicates must be at least 1");
    params.validate();
    scenario.validate(params);
    std::vector<TrialResult> results(replicates);
    const int workers = std::clamp(threads, 1, replicates);
    auto work = [&](int worker) {
        for (int r = worker; r < replicates; r += workers)
            results[r] = simulate_trial(scenario, params, replicate_seed(master_seed, r));
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    return results;
}

OperatingChars summarize(const Scenario& scenario, const DesignParams& params,
                         std::span<const TrialResult> results) {
    OperatingChars oc;
    oc.replicates = static_cast<int>(results.size());
    if (results.empty()) return oc;
    const auto truth = scenario_truth(scenario, params);

    long correct = 0;
    long no_obd = 0;
    long n_correct = 0;
    long n_toxic = 0;
    std::vector<double> durations;
    durations.reserve(results.size());
    for (const auto& r : results) {
        if (r.selected_obd == truth) ++correct;
        if (!r.selected_obd) ++no_obd;
        if (truth) n_correct += r.per_dose_n.at(*truth);
        for (std::size_t i = 0; i < r.per_dose_n.size(); ++i)
            if (scenario.pT[i] > params.phiT) n_toxic += r.per_dose_n[i];
        durations.push_back(r.duration_days);
    }
    // Sorted summation makes the mean independent of replicate order.
    std::sort(durations.begin(), durations.end());
    const double total_days = std::accumulate(durations.begin(), durations.end(), 0.0);

    const double count = static_cast<double>(results.size());
    oc.pct_correct_obd = 100.0 * static_cast<double>(correct) / count;
    oc.pct_no_obd = 100.0 * static_cast<double>(no_obd) / count;
    oc.mean_duration_months = total_days / count / kDaysPerMonth;
    oc.mean_n_at_correct_obd = static_cast<double>(n_correct) / count;
    oc.mean_n_at_toxic_doses = static_cast<double>(n_toxic) / count;
    return oc;
}

OperatingChars run_monte_carlo(const Scenario& scenario, const DesignParams& params,
                               int replicates, std::uint64_t master_seed, int threads) {
    const auto results = run_replicates(scenario, params, replicates, master_seed, threads);
    return summarize(scenario, params, results);
}

ComparisonReport compare_designs(const std::vector<Scenario>& bank, const DesignParams& adaptive,
                                 const DesignParams& base, int replicates,
                                 std::uint64_t master_seed, int threads, bool keep_runs) {
    if (adaptive.num_doses != base.num_doses)
        fail(ErrorCode::Configuration, "designs disagree on the number of doses");
    ComparisonReport report;
    for (const auto& scenario : bank) {
        ScenarioComparison sc;
        sc.scenario = scenario;
        auto ad_runs = run_replicates(scenario, adaptive, replicates, master_seed, threads);
        auto base_runs = run_replicates(scenario, base, replicates, master_seed, threads);
        sc.adaptive = summarize(scenario, adaptive, ad_runs);
        sc.base = summarize(scenario, base, base_runs);
        sc.diff = difference(sc.adaptive, sc.base);
        sc.duration_reduction_pct =
            sc.base.mean_duration_months > 0.0
                ? 100.0 * (sc.base.mean_duration_months - sc.adaptive.mean_duration_months) /
                      sc.base.mean_duration_months
                : 0.0;
        if (keep_runs) {
            sc.adaptive_runs = std::move(ad_runs);
            sc.base_runs = std::move(base_runs);
        }
        report.scenarios.push_back(std::move(sc));
    }
    if (!report.scenarios.empty()) {
        const double k = static_cast<double>(report.scenarios.size());
        for (const auto& sc : report.scenarios) {
            report.mean_diff.pct_correct_obd += sc.diff.pct_correct_obd / k;
            report.mean_diff.mean_duration_months += sc.diff.mean_duration_months / k;
            report.mean_diff.mean_n_at_correct_obd += sc.diff.mean_n_at_correct_obd / k;
            report.mean_diff.mean_n_at_toxic_doses += sc.diff.mean_n_at_toxic_doses / k;
            report.mean_duration_reduction_pct += sc.duration_reduction_pct / k;
        }
    }
    return report;
}

DesignParams case_params(char case_id, bool adaptive) {
    DesignParams p;
    p.num_doses = 5;
    p.max_n = 36;
    p.phiT = 0.35;
    p.psiE = 0.25;
    p.theta = 0.20;
    p.expanded_cohort = adaptive ? 6 : p.base_cohort;
    p.tox_window_days = 45.0;
    p.accrual_rate_per_month = 3.0;
    switch (case_id) {
        case 'A': case 'a': p.stop_rule_enabled = true; p.eff_window_days = 60.0; break;
        case 'B': case 'b': p.stop_rule_enabled = false; p.eff_window_days = 60.0; break;
        case 'C': case 'c': p.stop_rule_enabled = true; p.eff_window_days = 30.0; break;
        case 'D': case 'd': p.stop_rule_enabled = false; p.eff_window_days = 30.0; break;
        default: fail(ErrorCode::InvalidArgument, std::string("unknown case '") + case_id + "'");
    }
    return p;
}

std::string format_fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    // Avoid "-0.0000" for differences that round to zero.
    if (std::string(buf) == "-0.0000") return "0.0000";
    return buf;
}

std::string oc_csv_header() {
    return "scenario,design,pct_correct_obd,mean_duration_months,mean_n_correct_obd,"
           "mean_n_toxic,replicates,seed\n";
}

std::string oc_csv_row(const std::string& scenario, const std::string& design,
                       const OperatingChars& oc, std::uint64_t seed) {
    std::ostringstream os;
    os << scenario << ',' << design << ',' << format_fixed4(oc.pct_correct_obd) << ','
       << format_fixed4(oc.mean_duration_months) << ',' << format_fixed4(oc.mean_n_at_correct_obd)
       << ',' << format_fixed4(oc.mean_n_at_toxic_doses) << ',' << oc.replicates << ',' << seed
       << '\n';
    return os.str();
}

std::string comparison_csv(const ComparisonReport& report, std::uint64_t seed) {
    std::ostringstream os;
    os << oc_csv_header();
    auto diff_row = [&](const std::string& name, const MetricDiff& d, int replicates) {
        os << name << ",AD-BOIN12-minus-BOIN12," << format_fixed4(d.pct_correct_obd) << ','
           << format_fixed4(d.mean_duration_months) << ',' << format_fixed4(d.mean_n_at_correct_obd)
           << ',' << format_fixed4(d.mean_n_at_toxic_doses) << ',' << replicates << ',' << seed
           << '\n';
    };
    int replicates = 0;
    for (const auto& sc : report.scenarios) {
        os << oc_csv_row(sc.scenario.name, "AD-BOIN12", sc.adaptive, seed);
        os << oc_csv_row(sc.scenario.name, "BOIN12", sc.base, seed);
        diff_row(sc.scenario.name, sc.diff, sc.adaptive.replicates);
        replicates = sc.adaptive.replicates;
    }
    if (!report.scenarios.empty()) diff_row("average", report.mean_diff, replicates);
    return os.str();
}

std::string replicate_log_header() {
    return "scenario,design,replicate,seed_id,selected_obd,duration_days,stop_reason,cohorts,"
           "expanded_cohorts,per_dose_n\n";
}

std::string replicate_log_rows(const std::string& scenario, const std::string& design,
                               std::span<const TrialResult> results) {
    std::ostringstream os;
    char buf[64];
    for (std::size_t r = 0; r < results.size(); ++r) {
        const auto& t = results[r];
        std::snprintf(buf, sizeof buf, "%.17g", t.duration_days);
        os << scenario << ',' << design << ',' << r << ',' << t.seed_id << ','
           << (t.selected_obd ? std::to_string(*t.selected_obd + 1) : std::string("none")) << ','
           << buf << ',' << to_string(t.stop_reason) << ',' << t.cohorts << ','
           << t.expanded_cohorts << ',';
        for (std::size_t i = 0; i < t.per_dose_n.size(); ++i)
            os << (i ? ";" : "") << t.per_dose_n[i];
        os << '\n';
    }
    return os.str();
}

} // namespace adboin
