#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "uprof/estimators.hpp"
#include "uprof/mock_backend.hpp"
#include "uprof/rng.hpp"
#include "uprof/stats.hpp"

using namespace uprof;
using namespace uprof::est;

namespace {

AnswerDistribution dist(std::map<std::string, double> probs) {
    AnswerDistribution d;
    d.probs = std::move(probs);
    return d;
}

AnswerDistribution uniform_over(int k) {
    AnswerDistribution d;
    for (int i = 0; i < k; ++i)
        d.probs[std::string(1, static_cast<char>('a' + i))] = 1.0 / k;
    return d;
}

Embedder hash_embedder() {
    return [](const std::string& t) { return hash_embedding(t, 16); };
}

double jsd_oracle(const AnswerDistribution& p, const AnswerDistribution& q) {
    std::map<std::string, std::pair<double, double>> u;
    for (auto& [a, v] : p.probs) u[a].first = v;
    for (auto& [a, v] : q.probs) u[a].second = v;
    double s = 0;
    for (auto& [a, pq] : u) {
        const double m = (pq.first + pq.second) / 2;
        if (pq.first > 0) s += 0.5 * pq.first * std::log(pq.first / m);
        if (pq.second > 0) s += 0.5 * pq.second * std::log(pq.second / m);
    }
    return s;
}

} // namespace

TEST_CASE("estimate_su") {
    const std::vector<std::string> same{"the cat sat", "the cat sat"};
    CHECK(estimate_su("the cat sat", same) == doctest::Approx(0.0));

    // distances 0.2 and 0.4 from the rouge oracle values
    // "the cat sat" vs "the cat" -> 0.2; vs "the" -> 1-2*(1/1)*(1/3)/(1+1/3)=0.5
    const std::vector<std::string> two{"the cat", "the cat"};
    CHECK(estimate_su("the cat sat", two) == doctest::Approx(0.2));

    const std::vector<std::string> mixed{"the cat", "the cat sat"};
    CHECK(estimate_su("the cat sat", mixed) == doctest::Approx(0.1));

    const std::vector<std::string> disjoint{"xyz qqq", "zzz www"};
    CHECK(estimate_su("the cat sat", disjoint) == doctest::Approx(1.0));

    CHECK_THROWS_AS(estimate_su("q", {}), Error);
}

TEST_CASE("estimate_su order invariance") {
    Rng rng(4);
    std::vector<std::string> paras{"alpha beta", "beta gamma", "gamma delta",
                                   "the cat sat"};
    const double base = estimate_su("alpha beta gamma", paras);
    std::sort(paras.begin(), paras.end());
    do {
        CHECK(estimate_su("alpha beta gamma", paras) == doctest::Approx(base));
    } while (std::next_permutation(paras.begin(), paras.end()));
}

TEST_CASE("estimate_au: identical texts give zero") {
    const std::vector<std::string> p{"one question", "two question"};
    CHECK(estimate_au(p, p, hash_embedder()) == doctest::Approx(0.0));
}

TEST_CASE("estimate_au: antipodal embeddings give one") {
    // an embedder that maps two marker texts to opposite vectors
    Embedder embed = [](const std::string& t) {
        std::vector<double> v(4, 0.0);
        v[0] = t == "neg" ? -1.0 : 1.0;
        return v;
    };
    const std::vector<std::string> paras{"pos", "pos"};
    const std::vector<std::string> clars{"neg", "neg"};
    CHECK(estimate_au(paras, clars, embed) == doctest::Approx(1.0));
}

TEST_CASE("estimate_au: mean then divide by two") {
    // one pair at cosine distance 1 (orthogonal), one at 0 -> 0.25
    Embedder embed = [](const std::string& t) {
        std::vector<double> v(2, 0.0);
        if (t == "x") v = {1.0, 0.0};
        else if (t == "y") v = {0.0, 1.0};
        else v = {1.0, 0.0};
        return v;
    };
    const std::vector<std::string> paras{"x", "z"};
    const std::vector<std::string> clars{"y", "z"};
    CHECK(estimate_au(paras, clars, embed) == doctest::Approx(0.25));
    const std::vector<std::string> solo{"x"};
    CHECK_THROWS_AS(estimate_au(paras, solo, embed), Error);
}

TEST_CASE("estimate_eu closed forms") {
    CHECK(estimate_eu(dist({{"A", 1.0}})) == doctest::Approx(0.0));
    CHECK(estimate_eu(uniform_over(2)) == doctest::Approx(0.5));
    CHECK(estimate_eu(uniform_over(4)) == doctest::Approx(0.75));
    for (int k : {1, 2, 3, 4, 8})
        CHECK(estimate_eu(uniform_over(k)) ==
              doctest::Approx(1.0 - 1.0 / k).epsilon(1e-12));
}

TEST_CASE("estimate_eu: invariant to answer renaming") {
    const auto d1 = dist({{"A", 0.5}, {"B", 0.3}, {"C", 0.2}});
    const auto d2 = dist({{"zebra", 0.5}, {"yak", 0.3}, {"x", 0.2}});
    CHECK(estimate_eu(d1) == doctest::Approx(estimate_eu(d2)).epsilon(1e-15));
}

TEST_CASE("estimate_eu: merging mass never increases entropy") {
    // enumerate 3-support distributions on a coarse grid; merging the two
    // smallest supports into one never increases estimate_eu
    for (int i = 1; i <= 8; ++i) {
        for (int j = 1; i + j <= 9; ++j) {
            const int k = 10 - i - j;
            if (k < 1) continue;
            const auto three =
                dist({{"a", i / 10.0}, {"b", j / 10.0}, {"c", k / 10.0}});
            const auto merged = dist({{"a", i / 10.0}, {"bc", (j + k) / 10.0}});
            CHECK(estimate_eu(merged) <= estimate_eu(three) + 1e-12);
        }
    }
}

TEST_CASE("estimate_ou") {
    const auto p = dist({{"A", 0.5}, {"B", 0.5}});
    CHECK(estimate_ou(p, p) == doctest::Approx(0.0));
    CHECK(estimate_ou(dist({{"A", 1.0}}), dist({{"B", 1.0}})) == doctest::Approx(1.0));

    const auto q = dist({{"A", 1.0}});
    CHECK(estimate_ou(p, q) ==
          doctest::Approx(jsd_oracle(p, q) / std::log(2.0)).epsilon(1e-12));

    // symmetry under swapping P_FT and P_SC
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, double> pm{{"a", 0.0}, {"b", 0.0}, {"c", 0.0}};
        std::map<std::string, double> qm = pm;
        double ps = 0, qs = 0;
        for (auto& [a, v] : pm) { v = rng.next_double() + 1e-6; ps += v; }
        for (auto& [a, v] : qm) { v = rng.next_double() + 1e-6; qs += v; }
        for (auto& [a, v] : pm) v /= ps;
        for (auto& [a, v] : qm) v /= qs;
        const auto dp = dist(pm), dq = dist(qm);
        CHECK(estimate_ou(dp, dq) == doctest::Approx(estimate_ou(dq, dp)).epsilon(1e-12));
        CHECK(estimate_ou(dp, dq) >= 0.0);
        CHECK(estimate_ou(dp, dq) <= 1.0 + 1e-12);
    }
}

TEST_CASE("profile_question composition") {
    // fully certain: echo stages, single answer
    ChainSet set;
    set.question_id = "q";
    for (int i = 0; i < 4; ++i) {
        ChainRecord c;
        c.chain_id = i;
        c.question_id = "q";
        c.paraphrase = "the original question";
        c.clarification = "the original question";
        c.first_trial_answer = "A";
        c.self_checked_answer = "A";
        set.chains.push_back(c);
    }
    set.first_trial_dist = dist({{"A", 1.0}});
    set.self_check_dist = dist({{"A", 1.0}});
    auto prof = profile_question(set, "the original question", hash_embedder());
    CHECK(prof.su == doctest::Approx(0.0));
    CHECK(prof.au == doctest::Approx(0.0));
    CHECK(prof.eu == doctest::Approx(0.0));
    CHECK(prof.ou == doctest::Approx(0.0));

    // disjoint paraphrase tokens, echoed clarifications, single answer
    for (auto& c : set.chains) {
        c.paraphrase = "zz qq ww ee";
        c.clarification = "zz qq ww ee";
    }
    prof = profile_question(set, "the original question", hash_embedder());
    CHECK(prof.su == doctest::Approx(1.0));
    CHECK(prof.au == doctest::Approx(0.0));
    CHECK(prof.eu == doctest::Approx(0.0));
    CHECK(prof.ou == doctest::Approx(0.0));

    // persistent 2-way self-check split with P_FT = P_SC
    for (auto& c : set.chains) {
        c.paraphrase = "the original question";
        c.clarification = "the original question";
    }
    set.first_trial_dist = dist({{"A", 0.5}, {"B", 0.5}});
    set.self_check_dist = dist({{"A", 0.5}, {"B", 0.5}});
    prof = profile_question(set, "the original question", hash_embedder());
    CHECK(prof.eu == doctest::Approx(0.5));
    CHECK(prof.ou == doctest::Approx(0.0));
}

TEST_CASE("all four estimates stay in [0,1] on fuzzed inputs") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + static_cast<int>(rng.next_index(4));
        std::map<std::string, double> pm, qm;
        double ps = 0, qs = 0;
        for (int i = 0; i < k; ++i) {
            pm[std::string(1, static_cast<char>('a' + i))] = rng.next_double() + 1e-6;
            qm[std::string(1, static_cast<char>('a' + i))] = rng.next_double() + 1e-6;
        }
        for (auto& [a, v] : pm) ps += v;
        for (auto& [a, v] : qm) qs += v;
        for (auto& [a, v] : pm) v /= ps;
        for (auto& [a, v] : qm) v /= qs;
        const double eu = estimate_eu(dist(pm));
        const double ou = estimate_ou(dist(pm), dist(qm));
        CHECK(eu >= 0.0);
        CHECK(eu < 1.0);  // strictly below 1 for finite support
        CHECK(ou >= 0.0);
        CHECK(ou <= 1.0);
    }
}
