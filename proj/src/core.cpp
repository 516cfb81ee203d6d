#include "uprof/core.hpp"

#include <cmath>
#include <set>

namespace uprof {

const char* task_type_name(TaskType t) {
    switch (t) {
        case TaskType::mc: return "mc";
        case TaskType::rc: return "rc";
        case TaskType::essay: return "essay";
    }
    return "mc";
}

TaskType task_type_from(const std::string& name) {
    if (name == "mc") return TaskType::mc;
    if (name == "rc") return TaskType::rc;
    if (name == "essay") return TaskType::essay;
    fail(Errc::schema_error, "unknown task_type '" + name + "'");
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::paraphrase: return "paraphrase";
        case Stage::clarify: return "clarify";
        case Stage::answer: return "answer";
        case Stage::self_check: return "self_check";
    }
    return "answer";
}

const char* profile_kind_name(ProfileKind k) {
    switch (k) {
        case ProfileKind::dataset: return "dataset";
        case ProfileKind::model: return "model";
        case ProfileKind::metric: return "metric";
    }
    return "dataset";
}

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::empty_input: return "EmptyInput";
        case Errc::invalid_distribution: return "InvalidDistribution";
        case Errc::invalid_order: return "InvalidOrder";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::zero_vector: return "ZeroVector";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::too_few_samples: return "TooFewSamples";
        case Errc::single_class: return "SingleClass";
        case Errc::no_positives: return "NoPositives";
        case Errc::all_zero_relevance: return "AllZeroRelevance";
        case Errc::timeout: return "Timeout";
        case Errc::server_error: return "ServerError";
        case Errc::logprobs_unavailable: return "LogprobsUnavailable";
        case Errc::rate_limited: return "RateLimited";
        case Errc::dimension_drift: return "DimensionDrift";
        case Errc::invalid_script: return "InvalidScript";
        case Errc::missing_slot: return "MissingSlot";
        case Errc::no_boxed_answer: return "NoBoxedAnswer";
        case Errc::invalid_choice: return "InvalidChoice";
        case Errc::stage_failure: return "StageFailure";
        case Errc::insufficient_chains: return "InsufficientChains";
        case Errc::empty_paraphrases: return "EmptyParaphrases";
        case Errc::unparseable_confidence: return "UnparseableConfidence";
        case Errc::unparseable_verdict: return "UnparseableVerdict";
        case Errc::empty_candidates: return "EmptyCandidates";
        case Errc::missing_runs: return "MissingRuns";
        case Errc::invalid_rate: return "InvalidRate";
        case Errc::too_few_questions: return "TooFewQuestions";
        case Errc::schema_error: return "SchemaError";
        case Errc::duplicate_id: return "DuplicateId";
        case Errc::io_error: return "IoError";
        case Errc::usage_error: return "UsageError";
    }
    return "Error";
}

void QuestionRecord::validate() const {
    if (id.empty()) fail(Errc::schema_error, "question id empty");
    if (gold_answers.empty())
        fail(Errc::schema_error, "question '" + id + "': gold_answers empty");
    if (task_type == TaskType::mc) {
        if (!choices || choices->size() < 2 || choices->size() > 5)
            fail(Errc::schema_error,
                 "question '" + id + "': mc requires 2-5 choices");
        static const std::set<std::string> letters{"A", "B", "C", "D", "E"};
        for (const auto& g : gold_answers) {
            if (!letters.count(g))
                fail(Errc::schema_error,
                     "question '" + id + "': mc gold answer '" + g +
                         "' not in A-E");
        }
    }
    if (task_type == TaskType::rc && (!passage || passage->empty()))
        fail(Errc::schema_error, "question '" + id + "': rc requires passage");
}

bool AnswerDistribution::valid(double tol) const {
    if (probs.empty()) return false;
    double sum = 0.0;
    for (const auto& [a, p] : probs) {
        if (p < 0.0 || p > 1.0 || !std::isfinite(p)) return false;
        sum += p;
    }
    return std::fabs(sum - 1.0) <= tol;
}

void AnswerDistribution::validate() const {
    if (!valid())
        fail(Errc::invalid_distribution,
             "probabilities must be in [0,1] and sum to 1");
}

AnswerDistribution empirical_distribution(const std::vector<std::string>& answers) {
    if (answers.empty()) fail(Errc::empty_input, "no answers to count");
    std::map<std::string, double> counts;
    for (const auto& a : answers) counts[a] += 1.0;
    AnswerDistribution d;
    const double n = static_cast<double>(answers.size());
    for (auto& [a, c] : counts) d.probs[a] = c / n;
    return d;
}

int default_max_tokens(TaskType t) {
    return t == TaskType::mc ? 256 : 512;
}

void RunManifest::validate() const {
    if (n_chains < 2)
        fail(Errc::schema_error, "n_chains must be >= 2 (estimators average over chains)");
    if (label_samples < 1) fail(Errc::schema_error, "label_samples must be >= 1");
    if (!(label_threshold > 0.0 && label_threshold < 1.0))
        fail(Errc::schema_error, "label_threshold must be in (0,1)");
    if (decoding.temperature < 0.0)
        fail(Errc::schema_error, "temperature must be >= 0");
}

} // namespace uprof
