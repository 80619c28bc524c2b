// adboin: protocol tables, operating-characteristics simulation, trial
// conduct and the local decision service.

#include "adboin/errors.hpp"
#include "adboin/service.hpp"
#include "adboin/simulator.hpp"
#include "adboin/tables.hpp"
#include "adboin/trial_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace adboin;
using nlohmann::json;

struct DesignFlags {
    std::string design_file;
    std::optional<double> phiT, psiE, theta;
    std::optional<int> num_doses, max_n, base_cohort, expanded_cohort, per_dose_stop_n;
    std::optional<int> start_dose;
    std::optional<bool> stop_rule;
    std::optional<double> tox_window, eff_window, accrual;

    void add_to(CLI::App& app, bool with_theta) {
        app.add_option("--design", design_file, "JSON file with design parameters");
        app.add_option("--phiT", phiT, "Maximum acceptable toxicity probability (0.35)");
        app.add_option("--psiE", psiE, "Minimum acceptable efficacy probability (0.25)");
        if (with_theta)
            app.add_option("--theta", theta, "Cohort expansion threshold on dp (0.20)");
        app.add_option("--num-doses", num_doses, "Number of dose levels (5)");
        app.add_option("--start-dose", start_dose, "Starting dose level, one-based (1)");
        app.add_option("--max-n", max_n, "Maximum sample size (36)");
        app.add_option("--base-cohort", base_cohort, "Regular cohort size (3)");
        app.add_option("--expanded-cohort", expanded_cohort, "Expanded cohort size (6)");
        app.add_option("--per-dose-stop-n", per_dose_stop_n, "Per-dose stopping sample size (12)");
        app.add_option("--stop-rule", stop_rule, "Apply the per-dose stopping rule (true)");
        app.add_option("--tox-window", tox_window, "Toxicity assessment window, days (45)");
        app.add_option("--eff-window", eff_window, "Efficacy assessment window, days (60)");
        app.add_option("--accrual", accrual, "Accrual rate, patients per month (3)");
    }

    DesignParams resolve(DesignParams p) const {
        if (!design_file.empty()) {
            std::ifstream in(design_file);
            if (!in) fail(ErrorCode::InvalidArgument, "cannot open design file " + design_file);
            try {
                p = json::parse(in).get<DesignParams>();
            } catch (const json::exception& e) {
                fail(ErrorCode::Schema, std::string("malformed design file: ") + e.what());
            }
        }
        if (phiT) p.phiT = *phiT;
        if (psiE) p.psiE = *psiE;
        if (theta) p.theta = *theta;
        if (num_doses) p.num_doses = *num_doses;
        if (start_dose) p.start_dose = *start_dose - 1;
        if (max_n) p.max_n = *max_n;
        if (base_cohort) p.base_cohort = *base_cohort;
        if (expanded_cohort) p.expanded_cohort = *expanded_cohort;
        if (per_dose_stop_n) p.per_dose_stop_n = *per_dose_stop_n;
        if (stop_rule) p.stop_rule_enabled = *stop_rule;
        if (tox_window) p.tox_window_days = *tox_window;
        if (eff_window) p.eff_window_days = *eff_window;
        if (accrual) p.accrual_rate_per_month = *accrual;
        if (p.per_dose_stop_n > p.max_n) p.per_dose_stop_n = p.max_n;
        p.validate();
        return p;
    }
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path);
    out << content;
}

std::string theta_tag(double theta) {
    std::ostringstream os;
    os.precision(6);
    os << theta;
    return os.str();
}

std::vector<int> multiples(int step, int upto) {
    std::vector<int> grid;
    for (int n = step; n <= upto; n += step) grid.push_back(n);
    return grid;
}

struct TablesCmd {
    DesignFlags design;
    std::vector<double> thetas{0.20};
    std::vector<int> safety_grid, expansion_grid, rds_grid;
    std::string out_dir;
    std::string format = "csv";

    void run() const {
        DesignParams p = design.resolve(DesignParams{});
        const auto sgrid = safety_grid.empty() ? multiples(p.base_cohort, p.max_n - p.base_cohort)
                                               : safety_grid;
        const auto egrid = expansion_grid.empty() ? multiples(p.base_cohort, p.max_n / 2)
                                                  : expansion_grid;
        const auto rgrid = rds_grid.empty() ? default_rds_grid(p) : rds_grid;

        const auto safety = safety_table(p, sgrid);
        const auto rds = rds_table(p, rgrid, p.max_n);
        std::vector<std::pair<double, std::vector<ExpansionRow>>> expansions;
        for (double theta : thetas) expansions.emplace_back(theta, expansion_table(p, theta, egrid));

        const bool csv = format == "csv" || format == "both";
        const bool md = format == "markdown" || format == "both";
        if (out_dir.empty()) {
            std::ostringstream os;
            if (csv) {
                os << "# safety\n" << safety_csv(safety) << "\n# rds\n" << rds_csv(rds);
                for (const auto& [theta, rows] : expansions)
                    os << "\n# expansion theta=" << theta_tag(theta) << "\n" << expansion_csv(rows);
            }
            if (md) {
                if (csv) os << "\n";
                os << safety_markdown(safety) << "\n" << rds_markdown(rds);
                for (const auto& [theta, rows] : expansions)
                    os << "\n" << expansion_markdown(rows, theta);
            }
            std::cout << os.str();
            return;
        }
        std::filesystem::create_directories(out_dir);
        const std::string dir = out_dir + "/";
        if (csv) {
            write_output(dir + "safety.csv", safety_csv(safety));
            write_output(dir + "rds.csv", rds_csv(rds));
            for (const auto& [theta, rows] : expansions)
                write_output(dir + "expansion_theta_" + theta_tag(theta) + ".csv",
                             expansion_csv(rows));
        }
        if (md) {
            write_output(dir + "safety.md", safety_markdown(safety));
            write_output(dir + "rds.md", rds_markdown(rds));
            for (const auto& [theta, rows] : expansions)
                write_output(dir + "expansion_theta_" + theta_tag(theta) + ".md",
                             expansion_markdown(rows, theta));
        }
    }
};

struct SimCommon {
    std::string scenario_file;
    std::string case_id = "A";
    int replicates = 10000;
    std::uint64_t seed = 20230101;
    int threads = 1;
    std::string out;
    std::string log;

    void add_to(CLI::App& app) {
        app.add_option("--scenarios,--scenario", scenario_file,
                       "Scenario bank JSON (default: bundled 16-scenario bank)");
        app.add_option("--case", case_id, "Simulation case A, B, C or D")
            ->check(CLI::IsMember({"A", "B", "C", "D"}));
        app.add_option("--replicates", replicates, "Replicates per scenario")
            ->check(CLI::PositiveNumber);
        app.add_option("--seed", seed, "Master seed");
        app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
        app.add_option("--out", out, "Output CSV path (default stdout)");
        app.add_option("--log", log, "Per-replicate log CSV path");
    }

    std::vector<Scenario> bank() const {
        return scenario_file.empty() ? scenario_bank() : load_scenarios(scenario_file);
    }
};

DesignParams with_overrides(const DesignFlags& flags, DesignParams base) {
    return flags.resolve(base);
}

struct SimulateCmd {
    SimCommon common;
    DesignFlags design;
    std::string which = "ad";

    void run() const {
        const bool adaptive = which == "ad";
        const auto params = with_overrides(design, case_params(common.case_id[0], adaptive));
        const std::string label = adaptive ? "AD-BOIN12" : "BOIN12";
        std::string csv = oc_csv_header();
        std::string log = replicate_log_header();
        for (const auto& sc : common.bank()) {
            const auto runs =
                run_replicates(sc, params, common.replicates, common.seed, common.threads);
            csv += oc_csv_row(sc.name, label, summarize(sc, params, runs), common.seed);
            if (!common.log.empty()) log += replicate_log_rows(sc.name, label, runs);
        }
        write_output(common.out, csv);
        if (!common.log.empty()) write_output(common.log, log);
    }
};

struct CompareCmd {
    SimCommon common;
    DesignFlags design;

    void run() const {
        const char c = common.case_id[0];
        const auto ad = with_overrides(design, case_params(c, true));
        auto base = with_overrides(design, case_params(c, false));
        base.expanded_cohort = base.base_cohort;
        const bool keep = !common.log.empty();
        const auto report = compare_designs(common.bank(), ad, base, common.replicates,
                                            common.seed, common.threads, keep);
        write_output(common.out, comparison_csv(report, common.seed));
        if (keep) {
            std::string log = replicate_log_header();
            for (const auto& sc : report.scenarios) {
                log += replicate_log_rows(sc.scenario.name, "AD-BOIN12", sc.adaptive_runs);
                log += replicate_log_rows(sc.scenario.name, "BOIN12", sc.base_runs);
            }
            write_output(common.log, log);
        }
        if (!common.out.empty()) {
            std::cerr << "mean duration reduction: "
                      << format_fixed4(report.mean_duration_reduction_pct) << "%\n";
        }
    }
};

int run_cli(int argc, char** argv) {
    CLI::App app{"Adaptive cohort-size BOIN12 dose-finding toolkit"};
    app.require_subcommand(1);

    TablesCmd tables;
    auto* t = app.add_subcommand("tables", "Emit safety, desirability-rank and expansion tables");
    tables.design.add_to(*t, false);
    t->add_option("--theta", tables.thetas, "Expansion threshold(s); repeatable");
    t->add_option("--safety-grid", tables.safety_grid, "Patient counts for the safety table")
        ->delimiter(',');
    t->add_option("--expansion-grid", tables.expansion_grid,
                  "Patient counts for the expansion tables")
        ->delimiter(',');
    t->add_option("--rds-grid", tables.rds_grid, "Patient counts for the desirability ranks")
        ->delimiter(',');
    t->add_option("--out", tables.out_dir, "Output directory (default stdout)");
    t->add_option("--format", tables.format, "csv, markdown or both")
        ->check(CLI::IsMember({"csv", "markdown", "both"}));

    SimulateCmd simulate;
    auto* s = app.add_subcommand("simulate", "Operating characteristics of one design");
    simulate.common.add_to(*s);
    simulate.design.add_to(*s, true);
    s->add_option("--design-kind", simulate.which, "ad (adaptive) or base")
        ->check(CLI::IsMember({"ad", "base"}));

    CompareCmd compare;
    auto* c = app.add_subcommand("compare", "Paired comparison of AD-BOIN12 against BOIN12");
    compare.common.add_to(*c);
    compare.design.add_to(*c, true);

    std::string state_file;
    auto* d = app.add_subcommand("decide", "Report the recommendation for a saved trial state");
    d->add_option("state,--state", state_file, "Trial state JSON")->required();

    DesignFlags init_design;
    std::string init_out;
    auto* in = app.add_subcommand("init", "Write a fresh trial state");
    init_design.add_to(*in, true);
    in->add_option("--out", init_out, "State file to write")->required();

    std::string record_state;
    int record_dose = 0;
    OutcomeCounts2x2 record_counts;
    auto* r = app.add_subcommand("record", "Record a cohort into a trial state file");
    r->add_option("--state", record_state, "Trial state JSON (updated in place)")->required();
    r->add_option("--dose", record_dose, "Dose level, one-based")->required();
    r->add_option("--a", record_counts.a, "Patients with efficacy, no toxicity");
    r->add_option("--b", record_counts.b, "Patients with efficacy and toxicity");
    r->add_option("--c", record_counts.c, "Patients with neither");
    r->add_option("--d", record_counts.d, "Patients with toxicity, no efficacy");

    DesignFlags serve_design;
    int port = 8080;
    std::string audit = "trial_audit.jsonl";
    auto* sv = app.add_subcommand("serve", "Run the local decision service (127.0.0.1 only)");
    serve_design.add_to(*sv, true);
    sv->add_option("--port", port, "TCP port");
    sv->add_option("--audit", audit, "Write-ahead audit file; replayed at startup");

    std::string bank_out;
    auto* b = app.add_subcommand("scenarios", "Write the bundled scenario bank as JSON");
    b->add_option("--out", bank_out, "Output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*t) tables.run();
        if (*s) simulate.run();
        if (*c) compare.run();
        if (*d) {
            const auto engine = load_trial_file(state_file);
            std::cout << decision_report(engine);
        }
        if (*in) {
            TrialEngine engine(init_design.resolve(DesignParams{}));
            write_output(init_out, json(engine.state()).dump(2) + "\n");
        }
        if (*r) {
            auto engine = load_trial_file(record_state);
            engine.record_cohort(record_dose - 1, record_counts);
            const auto text = json(engine.state()).dump(2) + "\n";
            write_output(record_state, text);
            std::cout << decision_report(engine);
        }
        if (*sv) {
            std::cerr << "serving on http://127.0.0.1:" << port
                      << " (no authentication; local use only)\n";
            return serve(serve_design.resolve(DesignParams{}), audit, port);
        }
        if (*b) write_output(bank_out, scenarios_json(scenario_bank()));
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
