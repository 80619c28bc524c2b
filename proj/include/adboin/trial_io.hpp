#pragma once
// JSON documents for design parameters and trial state, and the plain-text
// decision report shared by the CLI and the service.

#include "adboin/trial_engine.hpp"

#include <json.hpp>

#include <string>

namespace adboin {

inline constexpr int kStateSchemaVersion = 1;

void to_json(nlohmann::json& j, const DesignParams& p);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, DesignParams& p);

void to_json(nlohmann::json& j, const OutcomeCounts2x2& c);
void from_json(const nlohmann::json& j, OutcomeCounts2x2& c);

void to_json(nlohmann::json& j, const Decision& d);
void from_json(const nlohmann::json& j, Decision& d);

void to_json(nlohmann::json& j, const TrialState& s);
void from_json(const nlohmann::json& j, TrialState& s);

// Parses and checks a state document, then rebuilds the engine from its
// audit trail. Any inconsistency raises ErrorCode::Schema.
TrialEngine load_trial(const nlohmann::json& j);
TrialEngine load_trial_file(const std::string& path);

std::string decision_report(const TrialEngine& engine);

} // namespace adboin
