#pragma once
// The four-stage prompting process per question: paraphrase -> clarify ->
// answer -> self-check, plus answer extraction, grading, and labeling.

#include <string>
#include <vector>

#include "uprof/backend.hpp"
#include "uprof/core.hpp"
#include "uprof/prompts.hpp"

namespace uprof {

// All chains for one question plus the answer distributions over
// successfully extracted chains.
struct ChainSet {
    std::string question_id;
    std::vector<ChainRecord> chains;        // ordered by chain_id
    AnswerDistribution first_trial_dist;    // P_FT
    AnswerDistribution self_check_dist;     // P_SC
    std::map<std::string, int> extraction_failures;  // per-stage counts
};

// Content of the LAST \boxed{...}; MC canonicalizes to a single letter
// A-E, rc/essay to a normalized string (lowercase, trimmed, no leading
// article, numerals reprinted canonically). Throws Errc::no_boxed_answer
// or Errc::invalid_choice.
std::string extract_answer(const std::string& raw, TaskType task);

// Canonical form used for both extracted answers and gold aliases.
std::string canonicalize_answer(const std::string& s, TaskType task);

// mc: exact letter match. rc/essay: membership in the canonicalized gold
// list; numeric values compare with relative tolerance 1e-6.
bool grade(const std::string& answer, const std::vector<std::string>& gold,
           TaskType task);

struct PipelineContext {
    BackendPtr backend;
    const PromptRegistry* prompts = &PromptRegistry::embedded();
    RunManifest manifest;
};

// Executes the four stages in order, each consuming the previous stage's
// output. Backend failures mark the chain (failed_stage) and stop it;
// the caller continues with other chains.
ChainRecord run_chain(const QuestionRecord& q, const PipelineContext& ctx, int chain_id);

// N = manifest.n_chains chains, executed concurrently, ordered by
// chain_id so concurrency never changes results.
std::vector<ChainRecord> run_chains(const QuestionRecord& q, const PipelineContext& ctx);

// run_chains + distribution assembly. Throws Errc::insufficient_chains
// when < 2 chains produce both answers.
ChainSet run_question(const QuestionRecord& q, const PipelineContext& ctx);

// manifest.label_samples direct answers to the ORIGINAL question text;
// accuracy = correct/total (failed extraction counts incorrect);
// uncertain = accuracy < manifest.label_threshold (strict <).
LabeledExample label_question(const QuestionRecord& q, const PipelineContext& ctx);

// Distributions rebuilt from stored chains (used by `estimate` and tests).
ChainSet assemble_chain_set(const std::string& question_id,
                            std::vector<ChainRecord> chains);

} // namespace uprof
