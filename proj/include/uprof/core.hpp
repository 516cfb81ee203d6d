#pragma once
// Domain types shared by every module. All values are immutable after
// construction and safe to share across threads.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uprof/errors.hpp"

namespace uprof {

enum class TaskType { mc, rc, essay };

const char* task_type_name(TaskType t);
TaskType task_type_from(const std::string& name);

// One benchmark item with gold answers.
struct QuestionRecord {
    std::string id;
    TaskType task_type = TaskType::mc;
    std::string text;
    std::optional<std::vector<std::string>> choices;  // MC options, labeled A..E
    std::optional<std::string> passage;               // RC context
    std::vector<std::string> gold_answers;
    std::map<std::string, std::string> metadata;

    // Throws Errc::schema_error on invariant violations.
    void validate() const;
};

struct LogprobInfo {
    double sum_logprob = 0.0;  // nats, <= 0
    int token_count = 1;       // >= 1
};

enum class Stage { paraphrase, clarify, answer, self_check };

const char* stage_name(Stage s);

// One pass through paraphrase -> clarify -> answer -> self-check.
struct ChainRecord {
    int chain_id = 0;
    std::string question_id;
    std::string paraphrase;
    std::string clarification;
    std::string first_trial_raw;
    std::optional<std::string> first_trial_answer;
    std::string self_checked_raw;
    std::optional<std::string> self_checked_answer;
    std::optional<LogprobInfo> first_trial_logprob;
    // Stage at which the backend failed, if any; later fields stay empty.
    std::optional<std::string> failed_stage;
    std::optional<std::string> failure_cause;
    // Wall-clock stage durations (seconds). Kept out of the canonical
    // chains.jsonl serialization so runs stay byte-comparable.
    std::map<std::string, double> stage_seconds;
};

// Empirical distribution over canonical answer strings.
// std::map keeps the support ordered, so serialization is deterministic.
struct AnswerDistribution {
    std::map<std::string, double> probs;

    bool valid(double tol = 1e-9) const;
    void validate() const;  // throws Errc::invalid_distribution
};

// probs[a] = count(a) / answers.size(). Throws Errc::empty_input.
AnswerDistribution empirical_distribution(const std::vector<std::string>& answers);

// Normalized (SU, AU, EU, OU), each in [0,1].
struct SourceProfile {
    double su = 0.0;
    double au = 0.0;
    double eu = 0.0;
    double ou = 0.0;
};

enum class ProfileKind { dataset, model, metric };

const char* profile_kind_name(ProfileKind k);

// Labeled 4-axis vector used in similarity ranking. Component order is
// fixed: (SU, AU, EU, OU).
struct ProfileVector {
    ProfileKind kind = ProfileKind::dataset;
    std::string label;
    std::array<double, 4> values{0.0, 0.0, 0.0, 0.0};
    bool scaled = false;
};

struct LabeledExample {
    std::string question_id;
    double empirical_accuracy = 0.0;  // in [0,1]
    bool uncertain = false;           // accuracy < threshold (positive class)
};

struct DecodingParams {
    double temperature = 1.0;
    int max_tokens = 0;  // 0 = per-task default (256 mc, 512 rc/essay)
    double top_p = 1.0;
};

int default_max_tokens(TaskType t);

// Per-run configuration; the seed drives every sampled decision.
struct RunManifest {
    std::string model_id;
    std::string dataset_id;
    int n_chains = 8;            // N; all estimators average over chains
    int label_samples = 32;
    double label_threshold = 0.70;
    DecodingParams decoding;
    uint64_t seed = 0;
    std::string backend_descriptor;

    void validate() const;  // throws Errc::schema_error
};

} // namespace uprof
