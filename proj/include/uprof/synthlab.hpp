#pragma once
// Synthetic validation harness: mock-backend populations with one
// injected dominant uncertainty source, used to falsify (or confirm)
// each estimator's discriminative design without a real LLM.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uprof/core.hpp"
#include "uprof/mock_backend.hpp"
#include "uprof/pipeline.hpp"

namespace uprof::synth {

enum class ScenarioKind {
    knowledge_gap,      // high EU: dispersed self-check answers
    execution_noise,    // high OU: dispersed first trial, concentrated self-check
    phrasing_sensitive, // high SU: token-divergent paraphrases
    ambiguous_input,    // high AU: clarifications far from paraphrases
    certain,            // all low
};

const char* scenario_kind_name(ScenarioKind k);
ScenarioKind scenario_kind_from(const std::string& name);

struct Population {
    ScenarioKind kind = ScenarioKind::certain;
    std::vector<QuestionRecord> questions;
    MockScript script;
    std::map<std::string, bool> ground_truth;  // positive = injected
};

// Pure function of (kind, n, rate, seed). Positive questions carry the
// kind's injection and are coupled to fail the 70% labeling rule
// (positive direct-answer accuracy ~= 1/3, negatives 1.0).
Population make_population(ScenarioKind kind, int n_questions, double positive_rate,
                           uint64_t seed);

struct EstimatorScore {
    std::string estimator;  // su / au / eu / ou
    double auroc = 0.0;
    double auprc = 0.0;
};

struct ValidationReport {
    ScenarioKind kind = ScenarioKind::certain;
    int positives = 0;
    int negatives = 0;
    std::vector<EstimatorScore> rows;           // ordered su, au, eu, ou
    std::map<std::string, SourceProfile> profiles;  // per question

    const EstimatorScore& row(const std::string& estimator) const;
};

// Runs the full pipeline + estimators on the mock population and scores
// each source estimate against the ground truth.
ValidationReport validate_estimators(const Population& population,
                                     const RunManifest& manifest);

} // namespace uprof::synth
