#include "adboin/trial_engine.hpp"

#include "adboin/errors.hpp"

#include <algorithm>

namespace adboin {

namespace {

constexpr int kMinSelectionN = 3;

double candidate_dp(const DoseRecord& rec, const DesignParams& params) {
    if (rec.counts.n() == 0) return desirability_probability(0, 0.0, params.benchmark());
    return dose_desirability(rec.counts, params);
}

void check_dose(const TrialState& state, int dose) {
    if (dose < 0 || dose >= static_cast<int>(state.doses.size()))
        fail(ErrorCode::InvalidArgument, "dose level " + std::to_string(dose + 1) + " does not exist");
}

} // namespace

TrialState TrialState::fresh(const DesignParams& params) {
    params.validate();
    TrialState s;
    s.params = params;
    s.doses.assign(params.num_doses, DoseRecord{});
    s.current_dose = params.start_dose;
    s.next_cohort_size = std::min(params.base_cohort, params.max_n);
    return s;
}

Decision next_decision(const TrialState& state, int treated_dose) {
    if (!state.active()) fail(ErrorCode::StateViolation, "trial is stopped");
    check_dose(state, treated_dose);
    const auto& params = state.params;
    const int num_doses = static_cast<int>(state.doses.size());
    const auto& treated = state.doses[treated_dose].counts;
    if (treated.n() == 0)
        fail(ErrorCode::StateViolation, "no outcomes recorded at the treated dose");

    Decision dec;
    auto& why = dec.rationale;

    std::vector<bool> safety(num_doses), futility(num_doses);
    for (int i = 0; i < num_doses; ++i) {
        safety[i] = state.doses[i].eliminated_safety;
        futility[i] = state.doses[i].eliminated_futility;
    }
    for (int i = 0; i < num_doses; ++i) {
        const auto& c = state.doses[i].counts;
        if (c.n() == 0) continue;
        if (!safety[i] && safety_eliminated(c.n(), c.n_tox(), params)) {
            for (int j = i; j < num_doses; ++j) {
                if (!safety[j]) {
                    safety[j] = true;
                    why.newly_eliminated_safety.push_back(j);
                }
            }
        }
        if (!futility[i] && futility_eliminated(c.n(), c.n_eff(), params)) {
            futility[i] = true;
            why.newly_eliminated_futility.push_back(i);
        }
    }
    std::sort(why.newly_eliminated_safety.begin(), why.newly_eliminated_safety.end());
    auto admissible = [&](int i) {
        return i >= 0 && i < num_doses && !safety[i] && !futility[i];
    };

    const int d = treated_dose;
    why.dose = d;
    why.n = treated.n();
    why.tox = treated.n_tox();
    why.eff = treated.n_eff();
    const auto cb = count_boundaries(interval_boundaries(params), why.n);
    why.escalate_le = cb.escalate_if_tox_le;
    why.deescalate_ge = cb.deescalate_if_tox_ge;

    auto stop = [&](TrialStatus status) {
        dec.action = Action::Stop;
        dec.next_dose.reset();
        dec.next_cohort_size.reset();
        dec.status = status;
        return dec;
    };

    std::vector<int> wanted;
    if (why.tox >= cb.deescalate_if_tox_ge) {
        why.region = ToxRegion::Deescalate;
        wanted = {d > 0 ? d - 1 : d};
    } else if (why.tox <= cb.escalate_if_tox_le) {
        why.region = ToxRegion::Escalate;
        wanted = {d, d + 1};
    } else {
        why.region = ToxRegion::Stay;
        wanted = {d - 1, d};
    }

    const bool any_admissible = [&] {
        for (int i = 0; i < num_doses; ++i)
            if (admissible(i)) return true;
        return false;
    }();
    if (safety[0] || !any_admissible) return stop(TrialStatus::StoppedNoAdmissible);

    std::vector<int> candidates;
    for (int c : wanted)
        if (admissible(c)) candidates.push_back(c);
    if (candidates.empty()) {
        for (int i = d - 1; i >= 0; --i) {
            if (admissible(i)) {
                candidates.push_back(i);
                why.fallback_lower = true;
                break;
            }
        }
    }
    if (candidates.empty()) return stop(TrialStatus::StoppedNoAdmissible);

    int chosen = -1;
    double best = -1.0;
    for (int c : candidates) {
        const auto& rec = state.doses[c];
        const double dp = candidate_dp(rec, params);
        why.candidates.push_back({c, dp, rec.counts.n() == 0});
        // Ties keep the current dose, then the lower dose.
        const bool better = chosen < 0 || dp > best ||
                            (dp == best && chosen != d && (c == d || c < chosen));
        if (better) {
            chosen = c;
            best = dp;
        }
    }
    why.chosen_dose = chosen;
    why.chosen_dp = best;

    const auto& chosen_counts = state.doses[chosen].counts;
    if (params.stop_rule_enabled && chosen == d && treated.n() >= params.per_dose_stop_n)
        return stop(TrialStatus::StoppedPerDoseRule);
    if (state.enrolled_total >= params.max_n) return stop(TrialStatus::StoppedMaxN);

    dec.action = chosen > d ? Action::Escalate : chosen < d ? Action::Deescalate : Action::Stay;
    dec.next_dose = chosen;
    const int remaining = params.max_n - state.enrolled_total;
    why.expansion_qualified = expansion_qualifies(chosen_counts, params);
    int size = std::min(params.base_cohort, remaining);
    if (why.expansion_qualified && params.expanded_cohort > params.base_cohort) {
        // The larger cohort must fit both the overall sample size and, under
        // the stopping rule, the per-dose sample size.
        const bool fits_trial = params.expanded_cohort <= remaining;
        const bool fits_dose = !params.stop_rule_enabled ||
                               chosen_counts.n() + params.expanded_cohort <= params.per_dose_stop_n;
        if (fits_trial && fits_dose)
            size = params.expanded_cohort;
        else
            why.expansion_capped = true;
    }
    dec.next_cohort_size = size;
    dec.status = TrialStatus::Active;
    return dec;
}

std::optional<int> final_selection(const TrialState& state) {
    if (state.active()) fail(ErrorCode::StateViolation, "final selection needs a stopped trial");
    const auto& params = state.params;
    std::optional<int> best_dose;
    double best = -1.0;
    for (int i = 0; i < static_cast<int>(state.doses.size()); ++i) {
        const auto& rec = state.doses[i];
        const auto& c = rec.counts;
        if (rec.eliminated() || c.n() < kMinSelectionN) continue;
        if (safety_eliminated(c.n(), c.n_tox(), params) ||
            futility_eliminated(c.n(), c.n_eff(), params))
            continue;
        const double dp = dose_desirability(c, params);
        if (!best_dose || dp > best) {
            best_dose = i;
            best = dp;
        }
    }
    return best_dose;
}

TrialEngine::TrialEngine(const DesignParams& params) : state_(TrialState::fresh(params)) {}

TrialEngine TrialEngine::replay(const TrialState& state) {
    TrialEngine engine(state.params);
    for (const auto& entry : state.audit)
        engine.record_cohort(entry.dose, entry.outcomes, entry.timestamp);
    if (!(engine.state_ == state))
        fail(ErrorCode::Schema, "trial state is inconsistent with its audit trail");
    return engine;
}

const Decision& TrialEngine::record_cohort(int dose, const OutcomeCounts2x2& outcomes,
                                           std::string timestamp) {
    if (!state_.active()) fail(ErrorCode::StateViolation, "trial is stopped");
    outcomes.validate();
    check_dose(state_, dose);
    if (dose != state_.current_dose)
        fail(ErrorCode::OutOfOrder, "cohort is assigned to dose " +
                                        std::to_string(state_.current_dose + 1) + ", not dose " +
                                        std::to_string(dose + 1));
    if (state_.enrolled_total + outcomes.n() > state_.params.max_n)
        fail(ErrorCode::StateViolation, "cohort would exceed the maximum sample size");
    if (outcomes.n() != state_.next_cohort_size)
        fail(ErrorCode::StateViolation, "cohort must have " +
                                            std::to_string(state_.next_cohort_size) +
                                            " patients, got " + std::to_string(outcomes.n()));

    TrialState next = state_;
    next.doses[dose].counts += outcomes;
    next.enrolled_total += outcomes.n();
    Decision dec = next_decision(next, dose);

    for (int i : dec.rationale.newly_eliminated_safety) next.doses[i].eliminated_safety = true;
    for (int i : dec.rationale.newly_eliminated_futility) next.doses[i].eliminated_futility = true;
    next.status = dec.status;
    if (dec.next_dose) {
        next.current_dose = *dec.next_dose;
        next.next_cohort_size = *dec.next_cohort_size;
    } else {
        next.next_cohort_size = 0;
    }
    AuditEntry entry;
    entry.seq = static_cast<int>(next.audit.size()) + 1;
    entry.timestamp = std::move(timestamp);
    entry.dose = dose;
    entry.outcomes = outcomes;
    entry.decision = std::move(dec);
    next.audit.push_back(std::move(entry));
    state_ = std::move(next);
    return state_.audit.back().decision;
}

const Decision* TrialEngine::last_decision() const noexcept {
    return state_.audit.empty() ? nullptr : &state_.audit.back().decision;
}

Decision TrialEngine::what_if(int dose, const OutcomeCounts2x2& outcomes) const {
    TrialEngine copy = *this;
    return copy.record_cohort(dose, outcomes);
}

std::string to_string(TrialStatus s) {
    switch (s) {
        case TrialStatus::Active: return "active";
        case TrialStatus::StoppedNoAdmissible: return "stopped_no_admissible";
        case TrialStatus::StoppedPerDoseRule: return "stopped_per_dose_rule";
        case TrialStatus::StoppedMaxN: return "stopped_max_n";
    }
    return "unknown";
}

std::string to_string(Action a) {
    switch (a) {
        case Action::Escalate: return "escalate";
        case Action::Stay: return "stay";
        case Action::Deescalate: return "deescalate";
        case Action::Stop: return "stop";
    }
    return "unknown";
}

std::string to_string(ToxRegion r) {
    switch (r) {
        case ToxRegion::Escalate: return "escalate";
        case ToxRegion::Stay: return "stay";
        case ToxRegion::Deescalate: return "deescalate";
    }
    return "unknown";
}

} // namespace adboin
