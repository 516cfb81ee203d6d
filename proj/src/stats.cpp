#include "uprof/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uprof/rng.hpp"

namespace uprof::stats {
namespace {

void check_probs(std::span<const double> probs) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0 || !std::isfinite(p))
            fail(Errc::invalid_distribution, "negative or non-finite probability");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        fail(Errc::invalid_distribution, "probabilities sum to " + std::to_string(sum));
}

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

} // namespace

double shannon_entropy(std::span<const double> probs, EntropyBase base) {
    check_probs(probs);
    double h = 0.0;
    for (double p : probs) h -= plogp(p);
    if (base == EntropyBase::two) h /= std::log(2.0);
    return std::max(h, 0.0);
}

double shannon_entropy(const AnswerDistribution& d, EntropyBase base) {
    std::vector<double> ps;
    ps.reserve(d.probs.size());
    for (const auto& [a, p] : d.probs) ps.push_back(p);
    if (ps.empty()) fail(Errc::invalid_distribution, "empty support");
    return shannon_entropy(ps, base);
}

double js_divergence(const AnswerDistribution& p, const AnswerDistribution& q) {
    p.validate();
    q.validate();
    // union support with implicit zeros
    std::map<std::string, std::pair<double, double>> joint;
    for (const auto& [a, v] : p.probs) joint[a].first = v;
    for (const auto& [a, v] : q.probs) joint[a].second = v;
    double d = 0.0;
    for (const auto& [a, pq] : joint) {
        const double m = 0.5 * (pq.first + pq.second);
        if (pq.first > 0.0) d += 0.5 * pq.first * std::log(pq.first / m);
        if (pq.second > 0.0) d += 0.5 * pq.second * std::log(pq.second / m);
    }
    return std::clamp(d, 0.0, std::log(2.0));
}

std::vector<int> bin_values(std::span<const double> xs, const BinningSpec& spec) {
    const size_t n = xs.size();
    std::vector<int> bins(n, 0);
    if (n == 0) return bins;
    const int b = spec.bins;
    if (spec.strategy == BinningSpec::Strategy::quantile) {
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t i, size_t j) { return xs[i] < xs[j]; });
        for (size_t rank = 0; rank < n; ++rank) {
            bins[order[rank]] = static_cast<int>(rank * static_cast<size_t>(b) / n);
        }
    } else {
        const auto [mn_it, mx_it] = std::minmax_element(xs.begin(), xs.end());
        const double mn = *mn_it, mx = *mx_it;
        if (mx == mn) return bins;  // one occupied bin
        for (size_t i = 0; i < n; ++i) {
            int k = static_cast<int>((xs[i] - mn) / (mx - mn) * b);
            bins[i] = std::min(k, b - 1);
        }
    }
    return bins;
}

double mutual_information(std::span<const double> xs, std::span<const double> ys,
                          const BinningSpec& spec) {
    if (xs.size() != ys.size())
        fail(Errc::length_mismatch, "series lengths differ");
    const size_t n = xs.size();
    if (n < 2 * static_cast<size_t>(spec.bins))
        fail(Errc::too_few_samples,
             "need at least 2*bins samples, got " + std::to_string(n));
    const auto bx = bin_values(xs, spec);
    const auto by = bin_values(ys, spec);
    const int b = spec.bins;
    std::vector<double> joint(static_cast<size_t>(b) * b, 0.0);
    std::vector<double> mx(b, 0.0), my(b, 0.0);
    const double w = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
        joint[static_cast<size_t>(bx[i]) * b + by[i]] += w;
        mx[bx[i]] += w;
        my[by[i]] += w;
    }
    double mi = 0.0;
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < b; ++j) {
            const double p = joint[static_cast<size_t>(i) * b + j];
            if (p > 0.0) mi += p * std::log(p / (mx[i] * my[j]));
        }
    }
    return std::max(mi, 0.0);
}

std::vector<std::vector<double>> minmax_columns(
    const std::vector<std::vector<double>>& matrix) {
    if (matrix.empty()) return {};
    const size_t cols = matrix.front().size();
    for (const auto& row : matrix)
        if (row.size() != cols)
            fail(Errc::length_mismatch, "ragged matrix");
    auto out = matrix;
    for (size_t c = 0; c < cols; ++c) {
        double mn = matrix[0][c], mx = matrix[0][c];
        for (const auto& row : matrix) {
            mn = std::min(mn, row[c]);
            mx = std::max(mx, row[c]);
        }
        for (size_t r = 0; r < matrix.size(); ++r) {
            out[r][c] = (mx == mn) ? 0.5 : (matrix[r][c] - mn) / (mx - mn);
        }
    }
    return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        fail(Errc::dimension_mismatch, "vector lengths differ");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    const double denom = std::sqrt(nu) * std::sqrt(nv);
    if (denom < 1e-12) return 0.0;
    return std::clamp(dot / denom, -1.0, 1.0);
}

double auroc(std::span<const double> scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size())
        fail(Errc::length_mismatch, "scores/labels lengths differ");
    size_t pos = 0;
    for (bool l : labels) pos += l ? 1 : 0;
    const size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        fail(Errc::single_class, "AUROC needs both classes");
    // midrank formulation: sum positive ranks, ties share the average rank
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return scores[i] < scores[j]; });
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (size_t k = i; k <= j; ++k)
            if (labels[order[k]]) rank_sum_pos += mid;
        i = j + 1;
    }
    const double u = rank_sum_pos -
                     static_cast<double>(pos) * (static_cast<double>(pos) + 1.0) / 2.0;
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double auprc(std::span<const double> scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size())
        fail(Errc::length_mismatch, "scores/labels lengths differ");
    size_t pos = 0;
    for (bool l : labels) pos += l ? 1 : 0;
    if (pos == 0) fail(Errc::no_positives, "AUPRC needs at least one positive");
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return scores[i] > scores[j]; });
    double ap = 0.0;
    size_t tp = 0;
    for (size_t rank = 0; rank < order.size(); ++rank) {
        if (labels[order[rank]]) {
            ++tp;
            ap += static_cast<double>(tp) / static_cast<double>(rank + 1);
        }
    }
    return ap / static_cast<double>(pos);
}

double ndcg(const std::vector<std::string>& ranked_ids,
            const std::map<std::string, double>& relevance, int k, NdcgGain gain) {
    if (ranked_ids.empty()) fail(Errc::empty_input, "empty ranking");
    std::vector<double> rels;
    rels.reserve(ranked_ids.size());
    double rel_max = 0.0;
    for (const auto& id : ranked_ids) {
        auto it = relevance.find(id);
        if (it == relevance.end())
            fail(Errc::schema_error, "relevance missing for id '" + id + "'");
        rels.push_back(it->second);
        rel_max = std::max(rel_max, it->second);
    }
    if (rel_max <= 0.0)
        fail(Errc::all_zero_relevance, "all relevance values are zero");
    const size_t cutoff =
        (k == kAllRanks) ? rels.size()
                         : std::min<size_t>(static_cast<size_t>(std::max(k, 1)), rels.size());
    auto gained = [&](double rel) {
        return gain == NdcgGain::linear ? rel : std::pow(2.0, rel) - 1.0;
    };
    auto dcg = [&](const std::vector<double>& rs) {
        double s = 0.0;
        for (size_t i = 0; i < cutoff; ++i)
            s += gained(rs[i]) / std::log2(static_cast<double>(i) + 2.0);
        return s;
    };
    std::vector<double> ideal = rels;
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    const double denom = dcg(ideal);
    if (denom <= 0.0) fail(Errc::all_zero_relevance, "ideal DCG is zero at this cutoff");
    return dcg(rels) / denom;
}

double geometric_mean(double a, double b) {
    a = std::max(a, 0.0);
    b = std::max(b, 0.0);
    return std::sqrt(a * b);
}

double mean_statistic(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

namespace {

double percentile(std::vector<double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

BootstrapResult bootstrap(std::span<const double> values, const Statistic& statistic,
                          int resamples, uint64_t seed) {
    if (values.size() < 2)
        fail(Errc::too_few_samples, "bootstrap needs at least 2 values");
    if (resamples < 1) fail(Errc::too_few_samples, "resamples must be >= 1");
    BootstrapResult res;
    res.point = statistic(values);
    Rng rng(seed);
    std::vector<double> draw(values.size());
    std::vector<double> stats;
    stats.reserve(resamples);
    for (int r = 0; r < resamples; ++r) {
        for (size_t i = 0; i < values.size(); ++i)
            draw[i] = values[rng.next_index(values.size())];
        stats.push_back(statistic(draw));
    }
    std::sort(stats.begin(), stats.end());
    res.ci_low = percentile(stats, 0.025);
    res.ci_high = percentile(stats, 0.975);
    return res;
}

BootstrapResult bootstrap_mean(std::span<const double> values, uint64_t seed,
                               int resamples) {
    return bootstrap(values, mean_statistic, resamples, seed);
}

} // namespace uprof::stats
