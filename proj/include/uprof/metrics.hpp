#pragma once
// The eight benchmarked task-agnostic uncertainty metrics. Convention:
// larger = more uncertain (Comp/Neg transforms applied where the source
// metric expresses confidence).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uprof/backend.hpp"
#include "uprof/core.hpp"
#include "uprof/prompts.hpp"

namespace uprof::metrics {

enum class MetricName {
    npe,
    lnpe,
    se,
    lexsim,
    vc_neg,
    ptrue_comp,
    spuq_comp,
    ipt_eu,
};

const char* metric_name(MetricName m);
MetricName metric_from(const std::string& name);
std::vector<MetricName> all_metrics();

struct MetricSpec {
    MetricName name = MetricName::npe;
    int samples = 0;  // 0 = per-metric default
    double se_cluster_threshold = 0.9;
    int ipt_chains = 4;
    int ipt_depth = 5;
    int spuq_perturbations = 5;

    int effective_samples() const;
    static MetricSpec defaults(MetricName name) { return MetricSpec{name}; }
};

struct MetricContext {
    BackendPtr backend;
    const PromptRegistry* prompts = &PromptRegistry::embedded();
    uint64_t run_seed = 0;
    DecodingParams decoding;
};

// Monte-Carlo predictive entropy: -(1/M) sum of sequence logprobs (nats).
double npe(const QuestionRecord& q, const MetricContext& ctx, const MetricSpec& spec);

// As npe with each term divided by its token count.
double lnpe(const QuestionRecord& q, const MetricContext& ctx, const MetricSpec& spec);

// Entropy over semantic clusters: extracted-answer equality when
// extraction succeeds, greedy embedding agglomeration otherwise.
double semantic_entropy(const QuestionRecord& q, const MetricContext& ctx,
                        const MetricSpec& spec);

// 1 - mean pairwise ROUGE-L F1 over sampled responses.
double lexsim_uncertainty(const QuestionRecord& q, const MetricContext& ctx,
                          const MetricSpec& spec);

// Negated mean verbalized confidence (0-100 scale), so <= 0.
double vc_neg(const QuestionRecord& q, const MetricContext& ctx, const MetricSpec& spec);

// 1 - P(True) via first-token logprobs when available, else sampled verdicts.
double ptrue_comp(const QuestionRecord& q, const MetricContext& ctx,
                  const MetricSpec& spec);

// 1 - mean ROUGE-L agreement between the original answer and answers to
// paraphrased perturbations.
double spuq_comp(const QuestionRecord& q, const MetricContext& ctx,
                 const MetricSpec& spec);

// Plug-in conditional-vs-marginal log-ratio over iterative prompting
// chains; 0 when conditioning never changes the answer distribution.
double ipt_eu(const QuestionRecord& q, const MetricContext& ctx, const MetricSpec& spec);

double score_one(const QuestionRecord& q, const MetricContext& ctx,
                 const MetricSpec& spec);

struct BatchResult {
    std::map<std::string, double> scores;           // question id -> score
    std::map<std::string, std::string> errors;      // question id -> message
};

// Batch evaluation; per-question failures are recorded, never aborting.
BatchResult score_metric(const MetricSpec& spec,
                         const std::vector<QuestionRecord>& questions,
                         const MetricContext& ctx);

// Aggregation cores, exposed so tests can pin exact values.
double lexsim_from_texts(const std::vector<std::string>& texts);
double spuq_from_answers(const std::string& original_answer,
                         const std::vector<std::string>& perturbed_answers);
double ptrue_from_verdict_logprobs(double logprob_true, double logprob_false);
double ipt_score_from_transcripts(const std::vector<std::vector<std::string>>& chains);
std::optional<int> parse_last_confidence(const std::string& reply);
std::optional<bool> parse_verdict(const std::string& reply);

} // namespace uprof::metrics
