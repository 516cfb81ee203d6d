#include "uprof/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "uprof/stats.hpp"

namespace uprof::est {

double estimate_su(const std::string& original,
                   std::span<const std::string> paraphrases,
                   const EstimatorConfig& cfg) {
    if (paraphrases.empty())
        fail(Errc::empty_paraphrases, "SU needs at least one paraphrase");
    double sum = 0.0;
    for (const auto& p : paraphrases)
        sum += text::lexical_distance(original, p, cfg.lex_method);
    return sum / static_cast<double>(paraphrases.size());
}

double estimate_au(std::span<const std::string> paraphrases,
                   std::span<const std::string> clarifications,
                   const Embedder& embed, const EstimatorConfig& cfg) {
    if (paraphrases.size() != clarifications.size())
        fail(Errc::length_mismatch, "paraphrase/clarification counts differ");
    if (paraphrases.empty())
        fail(Errc::empty_paraphrases, "AU needs at least one pair");
    double sum = 0.0;
    double dim = 0.0;
    for (size_t i = 0; i < paraphrases.size(); ++i) {
        const auto u = embed(paraphrases[i]);
        const auto v = embed(clarifications[i]);
        dim = static_cast<double>(u.size());
        sum += text::semantic_distance(u, v, cfg.sem_method);
    }
    const double mean = sum / static_cast<double>(paraphrases.size());
    switch (cfg.sem_method) {
        case text::SemMethod::cosine:
            return std::clamp(mean / 2.0, 0.0, 1.0);
        case text::SemMethod::l2:
            return std::min(mean / (2.0 * std::sqrt(dim)), 1.0);
        case text::SemMethod::l1:
            return std::min(mean / (2.0 * dim), 1.0);
    }
    return 0.0;
}

double estimate_eu(const AnswerDistribution& p_sc) {
    const double h2 = stats::shannon_entropy(p_sc, stats::EntropyBase::two);
    return 1.0 - std::exp2(-h2);
}

double estimate_ou(const AnswerDistribution& p_ft, const AnswerDistribution& p_sc) {
    return stats::js_divergence(p_sc, p_ft) / std::log(2.0);
}

SourceProfile profile_question(const ChainSet& chain_set, const std::string& original,
                               const Embedder& embed, const EstimatorConfig& cfg) {
    std::vector<std::string> paraphrases;
    std::vector<std::string> clar_paraphrases, clarifications;
    for (const auto& c : chain_set.chains) {
        if (!c.paraphrase.empty()) paraphrases.push_back(c.paraphrase);
        if (!c.paraphrase.empty() && !c.clarification.empty()) {
            clar_paraphrases.push_back(c.paraphrase);
            clarifications.push_back(c.clarification);
        }
    }
    SourceProfile prof;
    prof.su = estimate_su(original, paraphrases, cfg);
    prof.au = estimate_au(clar_paraphrases, clarifications, embed, cfg);
    prof.eu = estimate_eu(chain_set.self_check_dist);
    prof.ou = estimate_ou(chain_set.first_trial_dist, chain_set.self_check_dist);
    return prof;
}

} // namespace uprof::est
