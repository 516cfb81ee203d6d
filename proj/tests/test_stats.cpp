#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "uprof/rng.hpp"
#include "uprof/stats.hpp"

using namespace uprof;
using namespace uprof::stats;

namespace {

AnswerDistribution dist(std::map<std::string, double> probs) {
    AnswerDistribution d;
    d.probs = std::move(probs);
    return d;
}

// Direct summation over the union support, straight from the definition.
double jsd_oracle(const AnswerDistribution& p, const AnswerDistribution& q) {
    std::map<std::string, std::pair<double, double>> u;
    for (auto& [a, v] : p.probs) u[a].first = v;
    for (auto& [a, v] : q.probs) u[a].second = v;
    auto kl_term = [](double x, double m) { return x > 0 ? x * std::log(x / m) : 0.0; };
    double s = 0;
    for (auto& [a, pq] : u) {
        const double m = (pq.first + pq.second) / 2;
        s += 0.5 * kl_term(pq.first, m) + 0.5 * kl_term(pq.second, m);
    }
    return s;
}

// All positive/negative pairs counted one by one.
double auroc_oracle(const std::vector<double>& scores, const std::vector<bool>& labels) {
    double wins = 0, ties = 0, pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            pairs += 1;
            if (scores[i] > scores[j]) wins += 1;
            else if (scores[i] == scores[j]) ties += 1;
        }
    }
    return (wins + 0.5 * ties) / pairs;
}

} // namespace

TEST_CASE("shannon_entropy") {
    CHECK(shannon_entropy(dist({{"A", 1.0}}), EntropyBase::two) == doctest::Approx(0.0));
    CHECK(shannon_entropy(dist({{"A", 0.5}, {"B", 0.5}}), EntropyBase::two) ==
          doctest::Approx(1.0));
    CHECK(shannon_entropy(dist({{"A", 0.25}, {"B", 0.25}, {"C", 0.25}, {"D", 0.25}}),
                          EntropyBase::two) == doctest::Approx(2.0));
    const std::vector<double> bad{0.5, 0.6};
    CHECK_THROWS_AS(shannon_entropy(bad, EntropyBase::e), Error);
    const std::vector<double> neg{1.5, -0.5};
    CHECK_THROWS_AS(shannon_entropy(neg, EntropyBase::e), Error);
}

TEST_CASE("js_divergence worked examples") {
    const auto p = dist({{"A", 0.5}, {"B", 0.5}});
    CHECK(js_divergence(p, p) == doctest::Approx(0.0));
    CHECK(js_divergence(dist({{"A", 1.0}}), dist({{"B", 1.0}})) ==
          doctest::Approx(std::log(2.0)));
    const auto q = dist({{"A", 1.0}});
    CHECK(js_divergence(p, q) == doctest::Approx(jsd_oracle(p, q)).epsilon(1e-12));
}

TEST_CASE("js_divergence properties: symmetric, bounded, 0 iff equal") {
    Rng rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        const size_t k = 1 + rng.next_index(5);
        std::map<std::string, double> pm, qm;
        double ps = 0, qs = 0;
        for (size_t i = 0; i < k; ++i) {
            pm[std::string(1, static_cast<char>('a' + i))] = rng.next_double() + 1e-3;
            qm[std::string(1, static_cast<char>('a' + i))] = rng.next_double() + 1e-3;
        }
        for (auto& [a, v] : pm) ps += v;
        for (auto& [a, v] : qm) qs += v;
        for (auto& [a, v] : pm) v /= ps;
        for (auto& [a, v] : qm) v /= qs;
        const auto p = dist(pm), q = dist(qm);
        const double d1 = js_divergence(p, q);
        const double d2 = js_divergence(q, p);
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
        CHECK(d1 >= 0.0);
        CHECK(d1 <= std::log(2.0) + 1e-12);
        CHECK(d1 == doctest::Approx(jsd_oracle(p, q)).epsilon(1e-12));
        CHECK(js_divergence(p, p) == doctest::Approx(0.0));
    }
}

TEST_CASE("mutual_information identical series: H of binned values") {
    std::vector<double> xs(1000);
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i) * 1.7 + 0.3;
    const double mi = mutual_information(xs, xs, BinningSpec{});
    CHECK(mi == doctest::Approx(std::log(10.0)).epsilon(1e-9));
}

TEST_CASE("mutual_information independent and constant series") {
    Rng rng(7);
    std::vector<double> xs(10000), ys(10000);
    for (auto& x : xs) x = rng.next_double();
    for (auto& y : ys) y = rng.next_double();
    CHECK(mutual_information(xs, ys, BinningSpec{}) < 0.05);

    std::vector<double> cs(100, 3.0), zs(100);
    for (size_t i = 0; i < zs.size(); ++i) zs[i] = static_cast<double>(i);
    // constant series occupies one bin under equal-width binning
    BinningSpec ew;
    ew.strategy = BinningSpec::Strategy::equal_width;
    CHECK(mutual_information(zs, cs, ew) == doctest::Approx(0.0));
}

TEST_CASE("mutual_information preconditions and invariants") {
    std::vector<double> shorty(5, 1.0);
    CHECK_THROWS_AS(mutual_information(shorty, shorty, BinningSpec{}), Error);
    std::vector<double> a(30), b(29);
    CHECK_THROWS_AS(mutual_information(a, b, BinningSpec{}), Error);

    // MI >= 0 and invariant under strictly monotone transforms (quantile bins)
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const size_t n = 40 + rng.next_index(100);
        std::vector<double> xs(n), ys(n);
        for (auto& x : xs) x = rng.next_double();
        for (auto& y : ys) y = rng.next_double();
        const double mi = mutual_information(xs, ys, BinningSpec{});
        CHECK(mi >= 0.0);
        std::vector<double> xt(n);
        for (size_t i = 0; i < n; ++i) xt[i] = std::exp(3.0 * xs[i]) + 1.0;
        CHECK(mutual_information(xt, ys, BinningSpec{}) ==
              doctest::Approx(mi).epsilon(1e-12));
    }
}

TEST_CASE("minmax_columns") {
    const auto out = minmax_columns({{1.0}, {2.0}, {3.0}});
    CHECK(out[0][0] == doctest::Approx(0.0));
    CHECK(out[1][0] == doctest::Approx(0.5));
    CHECK(out[2][0] == doctest::Approx(1.0));

    const auto constant = minmax_columns({{4.0}, {4.0}});
    CHECK(constant[0][0] == 0.5);
    CHECK(constant[1][0] == 0.5);

    const auto single = minmax_columns({{0.3, 0.9, 0.1, 0.5}});
    for (double v : single[0]) CHECK(v == 0.5);

    // idempotence
    Rng rng(3);
    std::vector<std::vector<double>> m(6, std::vector<double>(4));
    for (auto& row : m)
        for (auto& v : row) v = rng.next_double() * 10 - 5;
    const auto once = minmax_columns(m);
    const auto twice = minmax_columns(once);
    for (size_t r = 0; r < m.size(); ++r)
        for (size_t c = 0; c < 4; ++c) {
            CHECK(once[r][c] >= 0.0);
            CHECK(once[r][c] <= 1.0);
            CHECK(twice[r][c] == doctest::Approx(once[r][c]).epsilon(1e-12));
        }
}

TEST_CASE("cosine_similarity") {
    const std::vector<double> u{0.2, 0.4, 0.1, 0.3};
    CHECK(cosine_similarity(u, u) == doctest::Approx(1.0));
    const std::vector<double> e1{1, 0, 0, 0}, e2{0, 1, 0, 0}, zero{0, 0, 0, 0};
    CHECK(cosine_similarity(e1, e2) == doctest::Approx(0.0));
    CHECK(cosine_similarity(zero, u) == 0.0);
    const std::vector<double> two{1.0, 2.0}, three{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(cosine_similarity(two, three), Error);
}

TEST_CASE("auroc worked examples") {
    const std::vector<double> s4{0.9, 0.8, 0.7, 0.6};
    CHECK(auroc(s4, {true, false, true, false}) == doctest::Approx(0.75));
    const std::vector<double> s2{0.9, 0.1};
    CHECK(auroc(s2, {true, false}) == doctest::Approx(1.0));
    const std::vector<double> same_class{0.5, 0.6};
    CHECK_THROWS_AS(auroc(same_class, {true, true}), Error);

    // label-independent scores hover near 0.5
    Rng rng(21);
    std::vector<double> scores(500);
    std::vector<bool> labels(500);
    for (auto& s : scores) s = rng.next_double();
    for (size_t i = 0; i < labels.size(); ++i) labels[i] = rng.next_double() < 0.4;
    const double a = auroc(scores, labels);
    CHECK(a > 0.43);
    CHECK(a < 0.57);
    CHECK(a == auroc_oracle(scores, labels));
}

TEST_CASE("auroc equals pair counting exactly on random instances") {
    Rng rng(2025);
    for (int trial = 0; trial < 300; ++trial) {
        const size_t n = 2 + rng.next_index(199);
        std::vector<double> scores(n);
        std::vector<bool> labels(n);
        bool has_pos = false, has_neg = false;
        for (size_t i = 0; i < n; ++i) {
            // ties likely: quantize scores
            scores[i] = std::floor(rng.next_double() * 10) / 10.0;
            labels[i] = rng.next_double() < 0.5;
            (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) continue;
        CHECK(auroc(scores, labels) == auroc_oracle(scores, labels));
    }
}

TEST_CASE("auprc worked examples") {
    // perfect separation, 3 positives of 10
    std::vector<double> scores{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
    std::vector<bool> labels{true, true, true, false, false,
                             false, false, false, false, false};
    CHECK(auprc(scores, labels) == doctest::Approx(1.0));

    const std::vector<double> s3{0.9, 0.8, 0.7};
    CHECK(auprc(s3, {true, false, true}) ==
          doctest::Approx((1.0 / 1.0 + 2.0 / 3.0) / 2.0));

    // all-equal scores with positives at every 5th rank: AP = pi exactly
    std::vector<double> eq(100, 1.0);
    std::vector<bool> every5(100, false);
    for (size_t i = 4; i < 100; i += 5) every5[i] = true;
    CHECK(auprc(eq, every5) == doctest::Approx(0.2).epsilon(1e-9));

    const std::vector<double> neg2{0.1, 0.2};
    CHECK_THROWS_AS(auprc(neg2, {false, false}), Error);
}

TEST_CASE("ndcg worked examples") {
    const std::map<std::string, double> rel{{"a", 3.0}, {"b", 2.0}, {"c", 1.0}};
    CHECK(ndcg({"a", "b", "c"}, rel) == doctest::Approx(1.0));

    // hand DCG arithmetic: (1/1 + 2/log2(3) + 3/2) / (3/1 + 2/log2(3) + 1/2)
    const double num = 1.0 + 2.0 / std::log2(3.0) + 1.5;
    const double den = 3.0 + 2.0 / std::log2(3.0) + 0.5;
    CHECK(ndcg({"c", "b", "a"}, rel) == doctest::Approx(num / den).epsilon(1e-12));
    CHECK(num / den == doctest::Approx(0.790).epsilon(1e-3));

    CHECK(ndcg({"a", "c", "b"}, rel, 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(ndcg({"a"}, {{"a", 0.0}}), Error);

    // permutations never exceed 1; equality only for descending relevance
    std::vector<std::string> ids{"a", "b", "c"};
    std::sort(ids.begin(), ids.end());
    do {
        const double v = ndcg(ids, rel);
        CHECK(v <= 1.0 + 1e-12);
        if (ids == std::vector<std::string>{"a", "b", "c"}) CHECK(v == doctest::Approx(1.0));
        else CHECK(v < 1.0);
    } while (std::next_permutation(ids.begin(), ids.end()));
}

TEST_CASE("geometric_mean") {
    CHECK(geometric_mean(1.0, 1.0) == 1.0);
    CHECK(geometric_mean(0.0, 0.73) == 0.0);
    CHECK(geometric_mean(0.5, 0.98) == doctest::Approx(0.7));
    CHECK(geometric_mean(-0.5, 0.5) == 0.0);
}

TEST_CASE("bootstrap") {
    std::vector<double> constant(10, 2.5);
    const auto c = bootstrap_mean(constant, 7);
    CHECK(c.point == doctest::Approx(2.5));
    CHECK(c.ci_low == doctest::Approx(2.5));
    CHECK(c.ci_high == doctest::Approx(2.5));

    std::vector<double> values(100);
    for (size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
    const auto r1 = bootstrap_mean(values, 12345);
    const auto r2 = bootstrap_mean(values, 12345);
    CHECK(r1.point == r2.point);
    CHECK(r1.ci_low == r2.ci_low);
    CHECK(r1.ci_high == r2.ci_high);
    CHECK(r1.point == doctest::Approx(49.5));
    CHECK(r1.ci_low <= 49.5);
    CHECK(r1.ci_high >= 49.5);

    std::vector<double> tiny{1.0};
    CHECK_THROWS_AS(bootstrap_mean(tiny, 1), Error);
}
