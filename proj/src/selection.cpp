#include "uprof/selection.hpp"

#include <algorithm>
#include <numeric>

#include "uprof/rng.hpp"
#include "uprof/stats.hpp"

namespace uprof::sel {
namespace {

// vector of (label, similarity) sorted by score with lexicographic tie-break
std::vector<std::pair<std::string, double>> sorted_by_score(
    std::map<std::string, double> scores, bool descending) {
    std::vector<std::pair<std::string, double>> items(scores.begin(), scores.end());
    std::sort(items.begin(), items.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second)
            return descending ? a.second > b.second : a.second < b.second;
        return a.first < b.first;
    });
    return items;
}

Ranking build_ranking(Scenario scenario, std::map<std::string, double> scores,
                      bool descending) {
    Ranking r;
    r.scenario = scenario;
    for (auto& [id, score] : sorted_by_score(scores, descending))
        r.ordered_ids.push_back(id);
    r.scores = std::move(scores);
    return r;
}

std::map<std::string, double> similarity_to_query(
    const ProfileVector& query, const std::vector<ProfileVector>& candidates) {
    auto [sq, scs] = scale_for_similarity(query, candidates);
    std::map<std::string, double> sims;
    for (const auto& c : scs) {
        sims[c.label] = stats::cosine_similarity(
            std::span<const double>(sq.values), std::span<const double>(c.values));
    }
    return sims;
}

} // namespace

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::s1_metric_for_task: return "s1_metric_for_task";
        case Scenario::s2_model_for_task: return "s2_model_for_task";
        case Scenario::s3_metric_for_task_model: return "s3_metric_for_task_model";
    }
    return "s1_metric_for_task";
}

Scenario scenario_from(int number) {
    switch (number) {
        case 1: return Scenario::s1_metric_for_task;
        case 2: return Scenario::s2_model_for_task;
        case 3: return Scenario::s3_metric_for_task_model;
    }
    fail(Errc::usage_error, "scenario must be 1, 2 or 3");
}

std::pair<ProfileVector, std::vector<ProfileVector>> scale_for_similarity(
    const ProfileVector& query, const std::vector<ProfileVector>& candidates) {
    if (candidates.empty())
        fail(Errc::empty_candidates, "no candidate vectors");
    std::vector<std::vector<double>> matrix;
    matrix.reserve(candidates.size() + 1);
    matrix.push_back({query.values[0], query.values[1], query.values[2], query.values[3]});
    for (const auto& c : candidates)
        matrix.push_back({c.values[0], c.values[1], c.values[2], c.values[3]});
    const auto scaled = stats::minmax_columns(matrix);
    ProfileVector sq = query;
    for (size_t k = 0; k < 4; ++k) sq.values[k] = scaled[0][k];
    sq.scaled = true;
    std::vector<ProfileVector> scs = candidates;
    for (size_t i = 0; i < scs.size(); ++i) {
        for (size_t k = 0; k < 4; ++k) scs[i].values[k] = scaled[i + 1][k];
        scs[i].scaled = true;
    }
    return {sq, scs};
}

Ranking select_metric_for_task(const ProfileVector& dataset_vec,
                               const std::vector<ProfileVector>& metric_vecs) {
    Ranking r = build_ranking(Scenario::s1_metric_for_task,
                              similarity_to_query(dataset_vec, metric_vecs), true);
    r.query_dataset = dataset_vec.label;
    return r;
}

Ranking select_model_for_task(const ProfileVector& dataset_vec,
                              const std::vector<ProfileVector>& model_vecs) {
    Ranking r = build_ranking(Scenario::s2_model_for_task,
                              similarity_to_query(dataset_vec, model_vecs), false);
    r.query_dataset = dataset_vec.label;
    return r;
}

Ranking select_metric_for_task_model(const ProfileVector& dataset_vec,
                                     const ProfileVector& model_vec,
                                     const std::vector<ProfileVector>& metric_vecs) {
    const auto sims_d = similarity_to_query(dataset_vec, metric_vecs);
    const auto sims_m = similarity_to_query(model_vec, metric_vecs);
    std::map<std::string, double> scores;
    for (const auto& [label, sd] : sims_d) {
        const double sm = sims_m.at(label);
        scores[label] = stats::geometric_mean(std::max(sd, 0.0), std::max(sm, 0.0));
    }
    Ranking r = build_ranking(Scenario::s3_metric_for_task_model, std::move(scores), true);
    r.query_dataset = dataset_vec.label;
    r.query_model = model_vec.label;
    return r;
}

SelectionEval evaluate_selection(const Ranking& ranking,
                                 const std::map<std::string, double>& relevance,
                                 int k, int random_samplings, uint64_t seed) {
    SelectionEval ev;
    ev.ndcg = stats::ndcg(ranking.ordered_ids, relevance, k);

    // worst baseline: ascending relevance, id tie-break for determinism
    std::vector<std::string> worst_order = ranking.ordered_ids;
    std::sort(worst_order.begin(), worst_order.end(),
              [&](const std::string& a, const std::string& b) {
                  const double ra = relevance.at(a), rb = relevance.at(b);
                  if (ra != rb) return ra < rb;
                  return a < b;
              });
    ev.worst = stats::ndcg(worst_order, relevance, k);

    Rng rng(seed);
    std::vector<std::string> perm = ranking.ordered_ids;
    double sum = 0.0;
    for (int s = 0; s < random_samplings; ++s) {
        // Fisher-Yates on the portable generator
        for (size_t i = perm.size(); i > 1; --i) {
            const size_t j = rng.next_index(i);
            std::swap(perm[i - 1], perm[j]);
        }
        sum += stats::ndcg(perm, relevance, k);
    }
    ev.random_mean = random_samplings > 0 ? sum / random_samplings : 0.0;
    ev.gain_percent = ev.random_mean > 0.0
                          ? (ev.ndcg - ev.random_mean) / ev.random_mean * 100.0
                          : 0.0;
    return ev;
}

std::map<std::string, double> relevance_for_metrics(
    const std::vector<std::string>& metric_names,
    const std::map<std::string, std::map<std::string, double>>& scores_by_metric,
    const std::vector<LabeledExample>& labels) {
    std::map<std::string, double> relevance;
    for (const auto& name : metric_names) {
        auto it = scores_by_metric.find(name);
        if (it == scores_by_metric.end() || it->second.empty())
            fail(Errc::missing_runs, "no metric scores for '" + name + "'");
        std::vector<double> scores;
        std::vector<bool> y;
        for (const auto& ex : labels) {
            auto sit = it->second.find(ex.question_id);
            if (sit == it->second.end()) continue;
            scores.push_back(sit->second);
            y.push_back(ex.uncertain);
        }
        if (scores.empty())
            fail(Errc::missing_runs,
                 "metric '" + name + "' shares no question ids with the labels");
        relevance[name] = stats::auroc(scores, y);
    }
    return relevance;
}

std::map<std::string, double> relevance_for_models(
    const std::map<std::string, std::vector<LabeledExample>>& labels_by_model) {
    std::map<std::string, double> relevance;
    for (const auto& [model, labels] : labels_by_model) {
        if (labels.empty())
            fail(Errc::missing_runs, "no labels for model '" + model + "'");
        double sum = 0.0;
        for (const auto& ex : labels) sum += ex.empirical_accuracy;
        relevance[model] = sum / static_cast<double>(labels.size());
    }
    return relevance;
}

} // namespace uprof::sel
