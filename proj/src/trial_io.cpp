#include "adboin/trial_io.hpp"

#include "adboin/errors.hpp"
#include "adboin/tables.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace adboin {

using nlohmann::json;

namespace {

template <typename Enum>
Enum parse_enum(const json& j, std::initializer_list<Enum> values, const char* what) {
    const auto text = j.get<std::string>();
    for (Enum v : values)
        if (to_string(v) == text) return v;
    fail(ErrorCode::Schema, std::string("unknown ") + what + " '" + text + "'");
}

json optional_dose(const std::optional<int>& d) { return d ? json(*d + 1) : json(nullptr); }

std::optional<int> read_optional_dose(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<int>() - 1;
}

std::vector<int> one_based(const std::vector<int>& doses) {
    std::vector<int> out;
    for (int d : doses) out.push_back(d + 1);
    return out;
}

std::vector<int> zero_based(const json& j) {
    std::vector<int> out;
    for (const auto& d : j) out.push_back(d.get<int>() - 1);
    return out;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
    if (!j.is_object()) fail(ErrorCode::Schema, std::string(where) + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            fail(ErrorCode::Schema, std::string("unknown key '") + key + "' in " + where);
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

} // namespace

void to_json(json& j, const DesignParams& p) {
    j = json{{"num_doses", p.num_doses},
             {"start_dose", p.start_dose + 1},
             {"phiT", p.phiT},
             {"psiE", p.psiE},
             {"weights",
              {{"eff_notox", p.weights.eff_notox},
               {"eff_tox", p.weights.eff_tox},
               {"noeff_notox", p.weights.noeff_notox},
               {"noeff_tox", p.weights.noeff_tox}}},
             {"safety_cutoff", p.safety_cutoff},
             {"futility_cutoff", p.futility_cutoff},
             {"theta", p.theta},
             {"base_cohort", p.base_cohort},
             {"expanded_cohort", p.expanded_cohort},
             {"max_n", p.max_n},
             {"per_dose_stop_n", p.per_dose_stop_n},
             {"stop_rule_enabled", p.stop_rule_enabled},
             {"tox_window_days", p.tox_window_days},
             {"eff_window_days", p.eff_window_days},
             {"accrual_rate_per_month", p.accrual_rate_per_month},
             {"phi1_factor", p.phi1_factor},
             {"phi2_factor", p.phi2_factor}};
}

void from_json(const json& j, DesignParams& p) {
    reject_unknown(j,
                   {"num_doses", "start_dose", "phiT", "psiE", "weights", "safety_cutoff",
                    "futility_cutoff", "theta", "base_cohort", "expanded_cohort", "max_n",
                    "per_dose_stop_n", "stop_rule_enabled", "tox_window_days", "eff_window_days",
                    "accrual_rate_per_month", "phi1_factor", "phi2_factor"},
                   "design parameters");
    read_if(j, "num_doses", p.num_doses);
    if (auto it = j.find("start_dose"); it != j.end()) p.start_dose = it->get<int>() - 1;
    read_if(j, "phiT", p.phiT);
    read_if(j, "psiE", p.psiE);
    if (auto it = j.find("weights"); it != j.end()) {
        reject_unknown(*it, {"eff_notox", "eff_tox", "noeff_notox", "noeff_tox"}, "weights");
        read_if(*it, "eff_notox", p.weights.eff_notox);
        read_if(*it, "eff_tox", p.weights.eff_tox);
        read_if(*it, "noeff_notox", p.weights.noeff_notox);
        read_if(*it, "noeff_tox", p.weights.noeff_tox);
    }
    read_if(j, "safety_cutoff", p.safety_cutoff);
    read_if(j, "futility_cutoff", p.futility_cutoff);
    read_if(j, "theta", p.theta);
    read_if(j, "base_cohort", p.base_cohort);
    read_if(j, "expanded_cohort", p.expanded_cohort);
    read_if(j, "max_n", p.max_n);
    read_if(j, "per_dose_stop_n", p.per_dose_stop_n);
    read_if(j, "stop_rule_enabled", p.stop_rule_enabled);
    read_if(j, "tox_window_days", p.tox_window_days);
    read_if(j, "eff_window_days", p.eff_window_days);
    read_if(j, "accrual_rate_per_month", p.accrual_rate_per_month);
    read_if(j, "phi1_factor", p.phi1_factor);
    read_if(j, "phi2_factor", p.phi2_factor);
}

void to_json(json& j, const OutcomeCounts2x2& c) {
    j = json{{"a", c.a}, {"b", c.b}, {"c", c.c}, {"d", c.d}};
}

void from_json(const json& j, OutcomeCounts2x2& c) {
    c.a = j.at("a").get<int>();
    c.b = j.at("b").get<int>();
    c.c = j.at("c").get<int>();
    c.d = j.at("d").get<int>();
}

void to_json(json& j, const Decision& d) {
    const auto& r = d.rationale;
    json candidates = json::array();
    for (const auto& c : r.candidates)
        candidates.push_back({{"dose", c.dose + 1}, {"dp", c.dp}, {"untried", c.untried}});
    j = json{{"action", to_string(d.action)},
             {"next_dose", optional_dose(d.next_dose)},
             {"next_cohort_size", d.next_cohort_size ? json(*d.next_cohort_size) : json(nullptr)},
             {"status", to_string(d.status)},
             {"rationale",
              {{"dose", r.dose + 1},
               {"n", r.n},
               {"tox", r.tox},
               {"eff", r.eff},
               {"escalate_le", r.escalate_le},
               {"deescalate_ge", r.deescalate_ge},
               {"region", to_string(r.region)},
               {"newly_eliminated_safety", one_based(r.newly_eliminated_safety)},
               {"newly_eliminated_futility", one_based(r.newly_eliminated_futility)},
               {"candidates", candidates},
               {"chosen_dose", optional_dose(r.chosen_dose)},
               {"chosen_dp", r.chosen_dp ? json(*r.chosen_dp) : json(nullptr)},
               {"fallback_lower", r.fallback_lower},
               {"expansion_qualified", r.expansion_qualified},
               {"expansion_capped", r.expansion_capped}}}};
}

void from_json(const json& j, Decision& d) {
    d.action = parse_enum(j.at("action"),
                          {Action::Escalate, Action::Stay, Action::Deescalate, Action::Stop},
                          "action");
    d.next_dose = read_optional_dose(j.at("next_dose"));
    const auto& size = j.at("next_cohort_size");
    d.next_cohort_size = size.is_null() ? std::nullopt : std::optional<int>(size.get<int>());
    d.status = parse_enum(j.at("status"),
                          {TrialStatus::Active, TrialStatus::StoppedNoAdmissible,
                           TrialStatus::StoppedPerDoseRule, TrialStatus::StoppedMaxN},
                          "status");
    const auto& r = j.at("rationale");
    auto& out = d.rationale;
    out.dose = r.at("dose").get<int>() - 1;
    out.n = r.at("n").get<int>();
    out.tox = r.at("tox").get<int>();
    out.eff = r.at("eff").get<int>();
    out.escalate_le = r.at("escalate_le").get<int>();
    out.deescalate_ge = r.at("deescalate_ge").get<int>();
    out.region = parse_enum(r.at("region"),
                            {ToxRegion::Escalate, ToxRegion::Stay, ToxRegion::Deescalate}, "region");
    out.newly_eliminated_safety = zero_based(r.at("newly_eliminated_safety"));
    out.newly_eliminated_futility = zero_based(r.at("newly_eliminated_futility"));
    out.candidates.clear();
    for (const auto& c : r.at("candidates"))
        out.candidates.push_back(
            {c.at("dose").get<int>() - 1, c.at("dp").get<double>(), c.at("untried").get<bool>()});
    out.chosen_dose = read_optional_dose(r.at("chosen_dose"));
    const auto& dp = r.at("chosen_dp");
    out.chosen_dp = dp.is_null() ? std::nullopt : std::optional<double>(dp.get<double>());
    out.fallback_lower = r.at("fallback_lower").get<bool>();
    out.expansion_qualified = r.at("expansion_qualified").get<bool>();
    out.expansion_capped = r.at("expansion_capped").get<bool>();
}

void to_json(json& j, const TrialState& s) {
    json doses = json::array();
    for (std::size_t i = 0; i < s.doses.size(); ++i) {
        const auto& rec = s.doses[i];
        json d = rec.counts;
        d["dose"] = static_cast<int>(i) + 1;
        d["n"] = rec.counts.n();
        d["tox"] = rec.counts.n_tox();
        d["eff"] = rec.counts.n_eff();
        d["eliminated_safety"] = rec.eliminated_safety;
        d["eliminated_futility"] = rec.eliminated_futility;
        doses.push_back(std::move(d));
    }
    json audit = json::array();
    for (const auto& e : s.audit) {
        json entry = e.outcomes;
        entry["seq"] = e.seq;
        entry["timestamp"] = e.timestamp;
        entry["dose"] = e.dose + 1;
        entry["decision"] = e.decision;
        audit.push_back(std::move(entry));
    }
    j = json{{"schema_version", kStateSchemaVersion},
             {"params", s.params},
             {"doses", doses},
             {"current_dose", s.current_dose + 1},
             {"next_cohort_size", s.next_cohort_size},
             {"enrolled_total", s.enrolled_total},
             {"status", to_string(s.status)},
             {"audit", audit}};
}

void from_json(const json& j, TrialState& s) {
    reject_unknown(j,
                   {"schema_version", "params", "doses", "current_dose", "next_cohort_size",
                    "enrolled_total", "status", "audit"},
                   "trial state");
    if (j.at("schema_version").get<int>() != kStateSchemaVersion)
        fail(ErrorCode::Schema, "unsupported schema_version");
    s.params = j.at("params").get<DesignParams>();
    s.doses.clear();
    for (const auto& d : j.at("doses")) {
        DoseRecord rec;
        rec.counts = d.get<OutcomeCounts2x2>();
        rec.eliminated_safety = d.at("eliminated_safety").get<bool>();
        rec.eliminated_futility = d.at("eliminated_futility").get<bool>();
        s.doses.push_back(rec);
    }
    s.current_dose = j.at("current_dose").get<int>() - 1;
    s.next_cohort_size = j.at("next_cohort_size").get<int>();
    s.enrolled_total = j.at("enrolled_total").get<int>();
    s.status = parse_enum(j.at("status"),
                          {TrialStatus::Active, TrialStatus::StoppedNoAdmissible,
                           TrialStatus::StoppedPerDoseRule, TrialStatus::StoppedMaxN},
                          "status");
    s.audit.clear();
    for (const auto& e : j.at("audit")) {
        AuditEntry entry;
        entry.seq = e.at("seq").get<int>();
        entry.timestamp = e.at("timestamp").get<std::string>();
        entry.dose = e.at("dose").get<int>() - 1;
        entry.outcomes = e.get<OutcomeCounts2x2>();
        entry.decision = e.at("decision").get<Decision>();
        s.audit.push_back(std::move(entry));
    }
}

TrialEngine load_trial(const json& j) {
    TrialState state;
    try {
        state = j.get<TrialState>();
        state.params.validate();
    } catch (const Error& e) {
        fail(ErrorCode::Schema, e.what());
    } catch (const json::exception& e) {
        fail(ErrorCode::Schema, std::string("malformed trial state: ") + e.what());
    }
    try {
        return TrialEngine::replay(state);
    } catch (const Error& e) {
        fail(ErrorCode::Schema, e.what());
    }
}

TrialEngine load_trial_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::InvalidArgument, "cannot open state file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCode::Schema, std::string("state file is not valid JSON: ") + e.what());
    }
    return load_trial(j);
}

std::string decision_report(const TrialEngine& engine) {
    const auto& s = engine.state();
    std::ostringstream os;
    const Decision* dec = engine.last_decision();
    if (!dec) {
        os << "No cohorts recorded.\n"
           << "Recommendation: start at dose " << s.current_dose + 1 << ", cohort size "
           << s.next_cohort_size << "\n";
        return os.str();
    }
    const auto& r = dec->rationale;
    os << "Last cohort: dose " << r.dose + 1 << " (n=" << r.n << ", tox=" << r.tox
       << ", eff=" << r.eff << ")\n";
    os << "Safety boundaries at n=" << r.n << ": escalate if tox <= " << r.escalate_le
       << ", de-escalate if tox >= " << r.deescalate_ge << " -> " << to_string(r.region)
       << " region\n";
    for (int d : r.newly_eliminated_safety) os << "Dose " << d + 1 << " eliminated for safety\n";
    for (int d : r.newly_eliminated_futility)
        os << "Dose " << d + 1 << " eliminated for futility\n";
    if (!r.candidates.empty()) {
        os << "Candidates:";
        for (const auto& c : r.candidates)
            os << " dose " << c.dose + 1 << " dp=" << format_probability(c.dp)
               << (c.untried ? " (untried)" : "") << ";";
        os << "\n";
    }
    if (dec->action == Action::Stop) {
        os << "Recommendation: trial stopped (" << to_string(dec->status) << ")\n";
        const auto obd = engine.final_selection();
        os << "Selected OBD: " << (obd ? "dose " + std::to_string(*obd + 1) : "none") << "\n";
        return os.str();
    }
    os << "Expansion check on dose " << *dec->next_dose + 1 << ": "
       << (r.expansion_qualified ? (r.expansion_capped ? "met, capped by sample size limits"
                                                       : "met")
                                 : "not met")
       << "\n";
    os << "Recommendation: " << to_string(dec->action)
       << (dec->action == Action::Stay ? " at dose " : " to dose ") << *dec->next_dose + 1
       << ", cohort size " << *dec->next_cohort_size << "\n";
    return os.str();
}

} // namespace adboin
