#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "uprof/rng.hpp"
#include "uprof/textdist.hpp"

using namespace uprof;
using namespace uprof::text;

namespace {

// Independent LCS oracle: plain recursion with memoization, deliberately a
// different shape from the rolling-array DP in textdist.
size_t lcs_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::pair<size_t, size_t>, size_t> memo;
    std::function<size_t(size_t, size_t)> rec = [&](size_t i, size_t j) -> size_t {
        if (i == a.size() || j == b.size()) return 0;
        auto it = memo.find({i, j});
        if (it != memo.end()) return it->second;
        size_t v;
        if (a[i] == b[j]) v = 1 + rec(i + 1, j + 1);
        else v = std::max(rec(i + 1, j), rec(i, j + 1));
        memo[{i, j}] = v;
        return v;
    };
    return rec(0, 0);
}

double rouge_from_lcs(size_t lcs, size_t na, size_t nb) {
    if (lcs == 0 || na == 0 || nb == 0) return 0.0;
    const double p = static_cast<double>(lcs) / static_cast<double>(nb);
    const double r = static_cast<double>(lcs) / static_cast<double>(na);
    return 2.0 * p * r / (p + r);
}

// Independent smoothed-BLEU reference written straight from the definition.
double bleu_oracle(const std::vector<std::string>& ref,
                   const std::vector<std::string>& cand, int n) {
    if (cand.empty()) return 0.0;
    double logsum = 0.0;
    for (int k = 1; k <= n; ++k) {
        std::map<std::vector<std::string>, int> rc, cc;
        for (int i = 0; i + k <= static_cast<int>(ref.size()); ++i)
            rc[std::vector<std::string>(ref.begin() + i, ref.begin() + i + k)]++;
        for (int i = 0; i + k <= static_cast<int>(cand.size()); ++i)
            cc[std::vector<std::string>(cand.begin() + i, cand.begin() + i + k)]++;
        double total = 0, matched = 0;
        for (auto& [g, c] : cc) {
            total += c;
            matched += std::min(c, rc.count(g) ? rc[g] : 0);
        }
        logsum += std::log((matched + 1.0) / (total + 1.0));
    }
    const double bp = std::exp(
        std::min(0.0, 1.0 - static_cast<double>(ref.size()) / cand.size()));
    return std::exp(logsum / n) * bp;
}

std::string join(const std::vector<std::string>& toks) {
    std::string s;
    for (const auto& t : toks) {
        if (!s.empty()) s += " ";
        s += t;
    }
    return s;
}

std::vector<std::string> random_tokens(Rng& rng, size_t max_len) {
    static const std::vector<std::string> vocab{"a", "b", "c", "d", "cat",
                                                "dog", "sun", "sky"};
    std::vector<std::string> toks(rng.next_index(max_len + 1));
    for (auto& t : toks) t = vocab[rng.next_index(vocab.size())];
    return toks;
}

} // namespace

TEST_CASE("tokenize basics") {
    CHECK(tokenize("The cat sat.") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("A  B\tC") == std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize("  hello,  WORLD! ") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("x y") == std::vector<std::string>{"x", "y"});
}

TEST_CASE("rouge_l_f worked examples") {
    CHECK(rouge_l_f("the cat sat", "the cat sat") == doctest::Approx(1.0));
    // LCS=2, P=1, R=2/3 -> F=0.8
    CHECK(rouge_l_f("the cat sat", "the cat") == doctest::Approx(0.8));
    CHECK(rouge_l_f("alpha", "beta") == doctest::Approx(0.0));
    CHECK(rouge_l_f("", "x") == 0.0);
}

TEST_CASE("rouge_l_f equals the brute-force LCS oracle exactly") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto ta = random_tokens(rng, 12);
        const auto tb = random_tokens(rng, 12);
        const double expected = rouge_from_lcs(lcs_oracle(ta, tb), ta.size(), tb.size());
        CHECK(rouge_l_f(join(ta), join(tb)) == expected);
    }
}

TEST_CASE("rouge symmetry") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = join(random_tokens(rng, 10));
        const auto b = join(random_tokens(rng, 10));
        CHECK(rouge_l_f(a, b) == rouge_l_f(b, a));
    }
}

TEST_CASE("bleu_n worked examples") {
    CHECK(bleu_n("the cat sat here", "the cat sat here", 2) >= 0.99);
    // zero-match unigrams: (0+1)/(4+1) = 0.2, BP = 1
    CHECK(bleu_n("a b c d", "w x y z", 1) == doctest::Approx(0.2));
    CHECK(bleu_n("a b c", "", 3) == 0.0);
    CHECK_THROWS_AS(bleu_n("a", "a", 0), Error);
    CHECK_THROWS_AS(bleu_n("a", "a", 6), Error);
}

TEST_CASE("bleu_n matches the independent reference implementation") {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const auto ta = random_tokens(rng, 10);
        const auto tb = random_tokens(rng, 10);
        const int n = 1 + static_cast<int>(rng.next_index(5));
        CHECK(bleu_n(join(ta), join(tb), n) ==
              doctest::Approx(bleu_oracle(ta, tb, n)).epsilon(1e-12));
    }
}

TEST_CASE("rouge_n_f basics") {
    CHECK(rouge_n_f("the cat sat", "the cat sat", 2) == doctest::Approx(1.0));
    CHECK(rouge_n_f("a b", "c d", 1) == 0.0);
    CHECK_THROWS_AS(rouge_n_f("a", "a", 6), Error);
}

TEST_CASE("lexical_distance") {
    CHECK(lexical_distance("same text", "same text", LexMethod::rouge_l()) == 0.0);
    CHECK(lexical_distance("the cat sat", "the cat", LexMethod::rouge_l()) ==
          doctest::Approx(0.2));
    CHECK(lexical_distance("alpha beta", "gamma delta", LexMethod::rouge_l()) == 1.0);
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = join(random_tokens(rng, 8));
        const auto b = join(random_tokens(rng, 8));
        const double d = lexical_distance(a, b, LexMethod::rouge_l());
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("semantic_distance") {
    const std::vector<double> u{1.0, 0.0}, v{0.0, 1.0};
    CHECK(semantic_distance(u, u, SemMethod::cosine) == doctest::Approx(0.0));
    const std::vector<double> nu{-1.0, 0.0};
    CHECK(semantic_distance(u, nu, SemMethod::cosine) == doctest::Approx(2.0));
    CHECK(semantic_distance(u, v, SemMethod::l2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(semantic_distance(u, v, SemMethod::l1) == doctest::Approx(2.0));

    const std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS_AS(semantic_distance(u, zero, SemMethod::cosine), Error);
    const std::vector<double> w{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(semantic_distance(u, w, SemMethod::l2), Error);

    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(4), y(4);
        for (auto& e : x) e = rng.next_double() * 2 - 1;
        for (auto& e : y) e = rng.next_double() * 2 - 1;
        for (auto m : {SemMethod::cosine, SemMethod::l1, SemMethod::l2}) {
            CHECK(semantic_distance(x, y, m) ==
                  doctest::Approx(semantic_distance(y, x, m)));
        }
    }
}
