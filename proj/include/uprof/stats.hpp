#pragma once
// Information-theoretic and ranking statistics. Everything here is pure
// and reentrant; bootstrap takes an explicit seed.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uprof/core.hpp"

namespace uprof::stats {

enum class EntropyBase { e, two };

struct BinningSpec {
    enum class Strategy { quantile, equal_width };
    Strategy strategy = Strategy::quantile;
    int bins = 10;
};

// -sum p log p with 0 log 0 = 0. Validates the distribution first.
double shannon_entropy(std::span<const double> probs, EntropyBase base);
double shannon_entropy(const AnswerDistribution& d, EntropyBase base);

// Jensen-Shannon divergence over the union support, natural log.
// Symmetric, in [0, ln 2], 0 iff p = q.
double js_divergence(const AnswerDistribution& p, const AnswerDistribution& q);

// Equal-count (quantile) or equal-width bin index per sample. Quantile
// binning stable-sorts by value, so ties keep input order.
std::vector<int> bin_values(std::span<const double> xs, const BinningSpec& spec);

// Plug-in MI of the joint histogram after binning each variable, nats.
// Requires |xs| = |ys| >= 2 * bins.
double mutual_information(std::span<const double> xs, std::span<const double> ys,
                          const BinningSpec& spec);

// Column-wise (x - min)/(max - min); constant columns map to 0.5.
std::vector<std::vector<double>> minmax_columns(
    const std::vector<std::vector<double>>& matrix);

// u.v/(|u||v|); 0 when either norm < 1e-12.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// Mann-Whitney AUROC with ties counted 1/2. Both classes must be present.
double auroc(std::span<const double> scores, const std::vector<bool>& labels);

// Average precision over descending scores, ties broken by input order.
double auprc(std::span<const double> scores, const std::vector<bool>& labels);

inline constexpr int kAllRanks = -1;

enum class NdcgGain { linear, exponential };

// DCG@k with gain rel/log2(i+1) (or (2^rel - 1) under exponential),
// normalized by the ideal DCG@k. k = kAllRanks scores the full list.
double ndcg(const std::vector<std::string>& ranked_ids,
            const std::map<std::string, double>& relevance, int k = kAllRanks,
            NdcgGain gain = NdcgGain::linear);

// sqrt(ab); negative inputs are clamped to 0.
double geometric_mean(double a, double b);

struct BootstrapResult {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

using Statistic = std::function<double(std::span<const double>)>;

double mean_statistic(std::span<const double> values);

// Percentile 2.5/97.5 CI over seeded resamples with replacement.
BootstrapResult bootstrap(std::span<const double> values, const Statistic& statistic,
                          int resamples, uint64_t seed);
BootstrapResult bootstrap_mean(std::span<const double> values, uint64_t seed,
                               int resamples = 500);

} // namespace uprof::stats
