#pragma once
// JSON (de)serialization for domain types, mock scripts, and populations.
// All schemas carry schema_version; maps keep sorted keys so dumps are
// byte-deterministic.

#include <nlohmann/json.hpp>

#include "uprof/core.hpp"
#include "uprof/mock_backend.hpp"
#include "uprof/pipeline.hpp"
#include "uprof/selection.hpp"
#include "uprof/synthlab.hpp"

namespace uprof {

inline constexpr int kSchemaVersion = 1;

nlohmann::json question_to_json(const QuestionRecord& q);
QuestionRecord question_from_json(const nlohmann::json& j);

// Canonical chain serialization: excludes wall-clock stage timings so
// identical seeded runs dump identical bytes.
nlohmann::json chain_to_json(const ChainRecord& c);
ChainRecord chain_from_json(const nlohmann::json& j);

nlohmann::json label_to_json(const LabeledExample& ex);
LabeledExample label_from_json(const nlohmann::json& j);

nlohmann::json profile_to_json(const std::string& question_id, const SourceProfile& p);
std::pair<std::string, SourceProfile> profile_from_json(const nlohmann::json& j);

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

nlohmann::json profile_vector_to_json(const ProfileVector& v);
ProfileVector profile_vector_from_json(const nlohmann::json& j);

nlohmann::json mock_script_to_json(const MockScript& s);
MockScript mock_script_from_json(const nlohmann::json& j);

nlohmann::json population_to_json(const synth::Population& p);
synth::Population population_from_json(const nlohmann::json& j);

} // namespace uprof
