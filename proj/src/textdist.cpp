#include "uprof/textdist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace uprof::text {
namespace {

bool is_space_cp(uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_edge_punct(char c) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

// Decodes one UTF-8 code point; malformed bytes pass through as-is.
uint32_t decode_utf8(const std::string& s, size_t& i) {
    unsigned char c = s[i];
    if (c < 0x80) { i += 1; return c; }
    size_t len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
    if (len == 1 || i + len > s.size()) { i += 1; return c; }
    uint32_t cp = c & (0xFF >> (len + 1));
    for (size_t k = 1; k < len; ++k) {
        unsigned char cc = s[i + k];
        if ((cc & 0xC0) != 0x80) { i += 1; return c; }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += len;
    return cp;
}

std::string finish_token(std::string raw) {
    size_t b = 0, e = raw.size();
    while (b < e && is_edge_punct(raw[b])) ++b;
    while (e > b && is_edge_punct(raw[e - 1])) --e;
    return raw.substr(b, e - b);
}

using Ngram = std::vector<std::string>;

std::map<Ngram, int> ngram_counts(const std::vector<std::string>& toks, int n) {
    std::map<Ngram, int> counts;
    if (static_cast<int>(toks.size()) < n) return counts;
    for (size_t i = 0; i + n <= toks.size(); ++i)
        counts[Ngram(toks.begin() + i, toks.begin() + i + n)] += 1;
    return counts;
}

} // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    size_t i = 0;
    auto flush = [&] {
        if (!cur.empty()) {
            std::string t = finish_token(std::move(cur));
            if (!t.empty()) tokens.push_back(std::move(t));
            cur.clear();
        }
    };
    while (i < text.size()) {
        size_t start = i;
        uint32_t cp = decode_utf8(text, i);
        if (is_space_cp(cp)) {
            flush();
        } else if (cp < 0x80) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
        } else {
            cur.append(text, start, i - start);
        }
    }
    flush();
    return tokens;
}

size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
        for (size_t j = 1; j <= b.size(); ++j) {
            cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1
                                            : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l_f(const std::string& a, const std::string& b) {
    const auto ta = tokenize(a);
    const auto tb = tokenize(b);
    if (ta.empty() || tb.empty()) return 0.0;
    const double lcs = static_cast<double>(lcs_length(ta, tb));
    if (lcs == 0.0) return 0.0;
    const double p = lcs / static_cast<double>(tb.size());
    const double r = lcs / static_cast<double>(ta.size());
    return 2.0 * p * r / (p + r);
}

double rouge_n_f(const std::string& a, const std::string& b, int n) {
    if (n < 1 || n > 5) fail(Errc::invalid_order, "rouge_n order must be in 1..5");
    const auto ca = ngram_counts(tokenize(a), n);
    const auto cb = ngram_counts(tokenize(b), n);
    if (ca.empty() || cb.empty()) return 0.0;
    double match = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [g, c] : ca) na += c;
    for (const auto& [g, c] : cb) {
        nb += c;
        auto it = ca.find(g);
        if (it != ca.end()) match += std::min(c, it->second);
    }
    if (match == 0.0) return 0.0;
    const double p = match / nb;
    const double r = match / na;
    return 2.0 * p * r / (p + r);
}

double bleu_n(const std::string& a, const std::string& b, int n) {
    if (n < 1 || n > 5) fail(Errc::invalid_order, "bleu order must be in 1..5");
    const auto ref = tokenize(a);
    const auto cand = tokenize(b);
    if (cand.empty()) return 0.0;
    double log_sum = 0.0;
    for (int k = 1; k <= n; ++k) {
        const auto rc = ngram_counts(ref, k);
        const auto cc = ngram_counts(cand, k);
        double total = 0.0, matched = 0.0;
        for (const auto& [g, c] : cc) {
            total += c;
            auto it = rc.find(g);
            if (it != rc.end()) matched += std::min(c, it->second);
        }
        // add-one smoothing on each k-gram precision
        log_sum += std::log((matched + 1.0) / (total + 1.0));
    }
    const double gm = std::exp(log_sum / n);
    const double bp = std::exp(std::min(
        0.0, 1.0 - static_cast<double>(ref.size()) / static_cast<double>(cand.size())));
    return gm * bp;
}

double lexical_distance(const std::string& a, const std::string& b, LexMethod method) {
    double sim = 0.0;
    switch (method.kind) {
        case LexMethod::Kind::rouge_l: sim = rouge_l_f(a, b); break;
        case LexMethod::Kind::rouge_n: sim = rouge_n_f(a, b, method.order); break;
        case LexMethod::Kind::bleu_n: sim = bleu_n(a, b, method.order); break;
    }
    return std::clamp(1.0 - sim, 0.0, 1.0);
}

double semantic_distance(std::span<const double> u, std::span<const double> v,
                         SemMethod method) {
    if (u.size() != v.size() || u.empty())
        fail(Errc::dimension_mismatch, "vectors must have equal non-zero length");
    switch (method) {
        case SemMethod::cosine: {
            double dot = 0.0, nu = 0.0, nv = 0.0;
            for (size_t i = 0; i < u.size(); ++i) {
                dot += u[i] * v[i];
                nu += u[i] * u[i];
                nv += v[i] * v[i];
            }
            if (nu == 0.0 || nv == 0.0)
                fail(Errc::zero_vector, "cosine distance undefined for zero vector");
            const double d = 1.0 - dot / (std::sqrt(nu) * std::sqrt(nv));
            return std::clamp(d, 0.0, 2.0);
        }
        case SemMethod::l1: {
            double s = 0.0;
            for (size_t i = 0; i < u.size(); ++i) s += std::fabs(u[i] - v[i]);
            return s;
        }
        case SemMethod::l2: {
            double s = 0.0;
            for (size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
            return std::sqrt(s);
        }
    }
    return 0.0;
}

} // namespace uprof::text
