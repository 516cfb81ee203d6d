#pragma once
// Lexical and semantic distances. Pure functions, no shared state.

#include <span>
#include <string>
#include <vector>

#include "uprof/errors.hpp"

namespace uprof::text {

// Lexical similarity family. `order` is only meaningful for rouge_n/bleu_n.
struct LexMethod {
    enum class Kind { rouge_l, rouge_n, bleu_n };
    Kind kind = Kind::rouge_l;
    int order = 1;  // n in 1..5

    static LexMethod rouge_l() { return {Kind::rouge_l, 1}; }
    static LexMethod rouge_n(int n) { return {Kind::rouge_n, n}; }
    static LexMethod bleu_n(int n) { return {Kind::bleu_n, n}; }
};

enum class SemMethod { cosine, l1, l2 };

// Lowercased, whitespace-split, edge punctuation stripped. Handles common
// Unicode space code points; lowercasing is ASCII-only.
std::vector<std::string> tokenize(const std::string& text);

// Longest common subsequence length over token vectors.
size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// F1 of LCS length: P = LCS/|b|, R = LCS/|a|. 0 if either side empty.
double rouge_l_f(const std::string& a, const std::string& b);

// n-gram overlap F1 with clipped counts.
double rouge_n_f(const std::string& a, const std::string& b, int n);

// Geometric mean of add-one-smoothed modified k-gram precisions (k=1..n)
// of candidate b against reference a, times brevity penalty
// exp(min(0, 1 - |a|/|b|)). Directional: a = reference, b = candidate.
double bleu_n(const std::string& a, const std::string& b, int n);

// 1 - similarity(a, b) under the method; in [0,1].
double lexical_distance(const std::string& a, const std::string& b, LexMethod method);

// cosine -> 1 - u.v/(|u||v|) in [0,2]; l1 -> sum |ui-vi|; l2 -> |u-v|_2.
double semantic_distance(std::span<const double> u, std::span<const double> v,
                         SemMethod method);

} // namespace uprof::text
