#pragma once
// Uncertainty-profile-guided selection: three scenarios, NDCG evaluation,
// and the worst/random baselines.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uprof/core.hpp"

namespace uprof::sel {

enum class Scenario {
    s1_metric_for_task,
    s2_model_for_task,
    s3_metric_for_task_model,
};

const char* scenario_name(Scenario s);
Scenario scenario_from(int number);

struct Ranking {
    Scenario scenario = Scenario::s1_metric_for_task;
    std::vector<std::string> ordered_ids;
    std::map<std::string, double> scores;
    std::string query_dataset;
    std::string query_model;  // scenario 3 only
};

// Column-wise min-max over the stacked [query; candidates] matrix;
// outputs are flagged scaled. Throws Errc::empty_candidates.
std::pair<ProfileVector, std::vector<ProfileVector>> scale_for_similarity(
    const ProfileVector& query, const std::vector<ProfileVector>& candidates);

// Scenario 1: highest cosine similarity first; lexicographic tie-break.
Ranking select_metric_for_task(const ProfileVector& dataset_vec,
                               const std::vector<ProfileVector>& metric_vecs);

// Scenario 2: LEAST similar first (ascending cosine similarity).
Ranking select_model_for_task(const ProfileVector& dataset_vec,
                              const std::vector<ProfileVector>& model_vecs);

// Scenario 3: geometric mean of the dataset and model similarities
// (each clamped at 0), descending.
Ranking select_metric_for_task_model(const ProfileVector& dataset_vec,
                                     const ProfileVector& model_vec,
                                     const std::vector<ProfileVector>& metric_vecs);

struct SelectionEval {
    double ndcg = 0.0;
    double worst = 0.0;
    double random_mean = 0.0;
    double gain_percent = 0.0;
};

// ndcg of the ranking, the ascending-relevance worst baseline, the mean
// over seeded uniform permutations, and the percentage gain over random.
SelectionEval evaluate_selection(const Ranking& ranking,
                                 const std::map<std::string, double>& relevance,
                                 int k, int random_samplings, uint64_t seed);

// s1/s3 relevance: AUROC of each metric's scores against the uncertain
// labels. Throws Errc::missing_runs naming the metric lacking scores.
std::map<std::string, double> relevance_for_metrics(
    const std::vector<std::string>& metric_names,
    const std::map<std::string, std::map<std::string, double>>& scores_by_metric,
    const std::vector<LabeledExample>& labels);

// s2 relevance: mean empirical accuracy per model on the dataset.
std::map<std::string, double> relevance_for_models(
    const std::map<std::string, std::vector<LabeledExample>>& labels_by_model);

} // namespace uprof::sel
