#pragma once
// Builds Metric-Vec / Dataset-Vec / Model-Vec and difficulty-binned
// profiles from run artifacts.

#include <array>
#include <map>
#include <string>
#include <vector>

#include "uprof/core.hpp"
#include "uprof/stats.hpp"

namespace uprof::profiling {

inline constexpr std::array<const char*, 4> kSourceNames{"su", "au", "eu", "ou"};

std::array<double, 4> profile_values(const SourceProfile& p);

// MI(metric score; source value) per source over the id intersection.
std::array<double, 4> metric_source_mi(
    const std::map<std::string, double>& metric_scores,
    const std::map<std::string, SourceProfile>& profiles,
    const stats::BinningSpec& spec = {});

// Per-source column min-max over metric rows (Figure-2 normalization).
std::vector<std::array<double, 4>> normalize_within_source(
    const std::vector<std::array<double, 4>>& mi_matrix);

// Component-wise mean over all questions of all models (equal weight).
ProfileVector dataset_vec(
    const std::map<std::string, std::vector<SourceProfile>>& profiles_by_model,
    const std::string& dataset_label);

// Component-wise mean over all questions of all datasets for one model.
ProfileVector model_vec(
    const std::map<std::string, std::vector<SourceProfile>>& profiles_by_dataset,
    const std::string& model_label);

struct DifficultyBin {
    double accuracy_min = 0.0;
    double accuracy_max = 0.0;
    int count = 0;
    SourceProfile mean;
};

// Equal-count accuracy bins ordered hardest (lowest accuracy) first.
std::vector<DifficultyBin> difficulty_bins(
    const std::map<std::string, double>& accuracies,
    const std::map<std::string, SourceProfile>& profiles, int n_bins = 4);

} // namespace uprof::profiling
