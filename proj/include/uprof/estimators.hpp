#pragma once
// The four uncertainty-source estimators. Raw values are normalized into
// [0,1]: SU is bounded by construction, AU (cosine) divides by 2, EU maps
// entropy through 1 - 2^-H, OU divides JSD by its maximum ln 2.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "uprof/core.hpp"
#include "uprof/pipeline.hpp"
#include "uprof/textdist.hpp"

namespace uprof::est {

struct EstimatorConfig {
    text::LexMethod lex_method = text::LexMethod::rouge_l();
    text::SemMethod sem_method = text::SemMethod::cosine;
};

using Embedder = std::function<std::vector<double>(const std::string&)>;

// Mean lexical distance between the original question and its paraphrases.
double estimate_su(const std::string& original,
                   std::span<const std::string> paraphrases,
                   const EstimatorConfig& cfg = {});

// Mean semantic distance between each paraphrase and its clarification,
// scaled into [0,1] (cosine: /2; l1/l2: capped, ablation options only).
double estimate_au(std::span<const std::string> paraphrases,
                   std::span<const std::string> clarifications,
                   const Embedder& embed, const EstimatorConfig& cfg = {});

// 1 - 2^-H2(P_SC); uniform over K gives 1 - 1/K.
double estimate_eu(const AnswerDistribution& p_sc);

// JSD(P_SC || P_FT) / ln 2.
double estimate_ou(const AnswerDistribution& p_ft, const AnswerDistribution& p_sc);

// All four estimators over one question's chain set. Chains that failed
// before producing the relevant stage text are skipped per estimator.
SourceProfile profile_question(const ChainSet& chain_set, const std::string& original,
                               const Embedder& embed, const EstimatorConfig& cfg = {});

} // namespace uprof::est
