#include "uprof/profiling.hpp"

#include <algorithm>

namespace uprof::profiling {

std::array<double, 4> profile_values(const SourceProfile& p) {
    return {p.su, p.au, p.eu, p.ou};
}

std::array<double, 4> metric_source_mi(
    const std::map<std::string, double>& metric_scores,
    const std::map<std::string, SourceProfile>& profiles,
    const stats::BinningSpec& spec) {
    std::vector<double> xs;
    std::array<std::vector<double>, 4> ys;
    for (const auto& [id, score] : metric_scores) {
        auto it = profiles.find(id);
        if (it == profiles.end()) continue;
        xs.push_back(score);
        const auto vals = profile_values(it->second);
        for (size_t k = 0; k < 4; ++k) ys[k].push_back(vals[k]);
    }
    if (xs.size() < 2 * static_cast<size_t>(spec.bins))
        fail(Errc::too_few_samples,
             "only " + std::to_string(xs.size()) + " common question ids");
    std::array<double, 4> mi{};
    for (size_t k = 0; k < 4; ++k)
        mi[k] = stats::mutual_information(xs, ys[k], spec);
    return mi;
}

std::vector<std::array<double, 4>> normalize_within_source(
    const std::vector<std::array<double, 4>>& mi_matrix) {
    if (mi_matrix.empty()) return {};
    std::vector<std::vector<double>> rows;
    rows.reserve(mi_matrix.size());
    for (const auto& r : mi_matrix) rows.push_back({r[0], r[1], r[2], r[3]});
    const auto scaled = stats::minmax_columns(rows);
    std::vector<std::array<double, 4>> out;
    out.reserve(scaled.size());
    for (const auto& r : scaled) out.push_back({r[0], r[1], r[2], r[3]});
    return out;
}

namespace {

ProfileVector mean_vec(const std::map<std::string, std::vector<SourceProfile>>& groups,
                       ProfileKind kind, const std::string& label) {
    std::array<double, 4> sum{};
    size_t n = 0;
    for (const auto& [group, profiles] : groups) {
        for (const auto& p : profiles) {
            const auto vals = profile_values(p);
            for (size_t k = 0; k < 4; ++k) sum[k] += vals[k];
            ++n;
        }
    }
    if (n == 0) fail(Errc::empty_input, "no profiles to average");
    ProfileVector v;
    v.kind = kind;
    v.label = label;
    for (size_t k = 0; k < 4; ++k) v.values[k] = sum[k] / static_cast<double>(n);
    return v;
}

} // namespace

ProfileVector dataset_vec(
    const std::map<std::string, std::vector<SourceProfile>>& profiles_by_model,
    const std::string& dataset_label) {
    return mean_vec(profiles_by_model, ProfileKind::dataset, dataset_label);
}

ProfileVector model_vec(
    const std::map<std::string, std::vector<SourceProfile>>& profiles_by_dataset,
    const std::string& model_label) {
    return mean_vec(profiles_by_dataset, ProfileKind::model, model_label);
}

std::vector<DifficultyBin> difficulty_bins(
    const std::map<std::string, double>& accuracies,
    const std::map<std::string, SourceProfile>& profiles, int n_bins) {
    struct Item {
        std::string id;
        double accuracy;
        SourceProfile profile;
    };
    std::vector<Item> items;
    for (const auto& [id, acc] : accuracies) {
        auto it = profiles.find(id);
        if (it == profiles.end()) continue;
        items.push_back({id, acc, it->second});
    }
    if (items.size() < static_cast<size_t>(n_bins))
        fail(Errc::too_few_questions,
             std::to_string(items.size()) + " questions for " +
                 std::to_string(n_bins) + " bins");
    // ties broken by id order; hardest (lowest accuracy) first
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.accuracy != b.accuracy) return a.accuracy < b.accuracy;
        return a.id < b.id;
    });
    const size_t n = items.size();
    std::vector<DifficultyBin> bins;
    for (int b = 0; b < n_bins; ++b) {
        const size_t lo = static_cast<size_t>(b) * n / n_bins;
        const size_t hi = static_cast<size_t>(b + 1) * n / n_bins;
        DifficultyBin bin;
        bin.count = static_cast<int>(hi - lo);
        bin.accuracy_min = items[lo].accuracy;
        bin.accuracy_max = items[hi - 1].accuracy;
        std::array<double, 4> sum{};
        for (size_t i = lo; i < hi; ++i) {
            const auto vals = profile_values(items[i].profile);
            for (size_t k = 0; k < 4; ++k) sum[k] += vals[k];
        }
        const double cnt = static_cast<double>(bin.count);
        bin.mean = SourceProfile{sum[0] / cnt, sum[1] / cnt, sum[2] / cnt, sum[3] / cnt};
        bins.push_back(bin);
    }
    return bins;
}

} // namespace uprof::profiling
