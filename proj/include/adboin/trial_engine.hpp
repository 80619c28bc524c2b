#pragma once
// Conduct of a single trial. Dose indices are zero-based internally; every
// external surface (JSON, reports) shows one-based dose levels.

#include "adboin/design_rules.hpp"

#include <optional>
#include <string>
#include <vector>

namespace adboin {

struct DoseRecord {
    OutcomeCounts2x2 counts;
    bool eliminated_safety = false;
    bool eliminated_futility = false;

    bool eliminated() const noexcept { return eliminated_safety || eliminated_futility; }
    friend bool operator==(const DoseRecord&, const DoseRecord&) = default;
};

enum class TrialStatus { Active, StoppedNoAdmissible, StoppedPerDoseRule, StoppedMaxN };
enum class Action { Escalate, Stay, Deescalate, Stop };
enum class ToxRegion { Escalate, Stay, Deescalate };

struct CandidateScore {
    int dose = 0;
    double dp = 0.0;
    bool untried = false;
    friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

struct Rationale {
    int dose = 0; // dose whose data drove the decision
    int n = 0;
    int tox = 0;
    int eff = 0;
    int escalate_le = 0;
    int deescalate_ge = 0;
    ToxRegion region = ToxRegion::Stay;
    std::vector<int> newly_eliminated_safety;
    std::vector<int> newly_eliminated_futility;
    std::vector<CandidateScore> candidates;
    std::optional<int> chosen_dose;
    bool fallback_lower = false;
    std::optional<double> chosen_dp;
    bool expansion_qualified = false;
    bool expansion_capped = false; // qualified, but the larger cohort would pass max_n
                                   // or the per-dose stopping size
    friend bool operator==(const Rationale&, const Rationale&) = default;
};

struct Decision {
    Action action = Action::Stay;
    std::optional<int> next_dose;
    std::optional<int> next_cohort_size;
    TrialStatus status = TrialStatus::Active; // status after the decision
    Rationale rationale;
    friend bool operator==(const Decision&, const Decision&) = default;
};

struct AuditEntry {
    int seq = 0;
    std::string timestamp;
    int dose = 0;
    OutcomeCounts2x2 outcomes;
    Decision decision;
    friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

struct TrialState {
    DesignParams params;
    std::vector<DoseRecord> doses;
    int current_dose = 0; // dose the next cohort is assigned to
    int next_cohort_size = 0;
    int enrolled_total = 0;
    TrialStatus status = TrialStatus::Active;
    std::vector<AuditEntry> audit;

    static TrialState fresh(const DesignParams& params);
    bool active() const noexcept { return status == TrialStatus::Active; }
    friend bool operator==(const TrialState&, const TrialState&) = default;
};

// Decision after the cohort most recently treated at `treated_dose`. Pure:
// does not modify the state; elimination updates are reported in the
// rationale and the returned status.
Decision next_decision(const TrialState& state, int treated_dose);

// Recommended dose among admissible doses with >= 3 patients; lowest dose on
// ties. Requires a stopped trial.
std::optional<int> final_selection(const TrialState& state);

class TrialEngine {
public:
    explicit TrialEngine(const DesignParams& params);

    // Rebuild by replaying the audit of `state`; throws Schema when the
    // replayed state differs from the supplied one.
    static TrialEngine replay(const TrialState& state);

    const TrialState& state() const noexcept { return state_; }

    // Adds the outcomes of the assigned cohort, then decides and applies the
    // next assignment.
    const Decision& record_cohort(int dose, const OutcomeCounts2x2& outcomes,
                                  std::string timestamp = {});

    // Decision produced by the most recent cohort, if any.
    const Decision* last_decision() const noexcept;

    // Decision the engine would make if `outcomes` were recorded now.
    Decision what_if(int dose, const OutcomeCounts2x2& outcomes) const;

    std::optional<int> final_selection() const { return adboin::final_selection(state_); }

private:
    TrialState state_;
};

std::string to_string(TrialStatus s);
std::string to_string(Action a);
std::string to_string(ToxRegion r);

} // namespace adboin
