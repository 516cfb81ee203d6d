#include "uprof/mock_backend.hpp"

#include <algorithm>
#include <cmath>

#include "uprof/rng.hpp"
#include "uprof/textdist.hpp"

namespace uprof {
namespace {

std::string extract_between(const std::string& s, const std::string& after,
                            const std::string& before) {
    const size_t a = s.find(after);
    if (a == std::string::npos) return s;
    const size_t start = a + after.size();
    const size_t b = s.find(before, start);
    if (b == std::string::npos) return s.substr(start);
    return s.substr(start, b - start);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Last complete \boxed{...} with brace matching.
std::optional<std::string> last_boxed(const std::string& s) {
    static const std::string kMarker = "\\boxed{";
    std::optional<std::string> found;
    size_t pos = 0;
    while ((pos = s.find(kMarker, pos)) != std::string::npos) {
        size_t i = pos + kMarker.size();
        int depth = 1;
        std::string inner;
        for (; i < s.size(); ++i) {
            if (s[i] == '{') ++depth;
            if (s[i] == '}') {
                --depth;
                if (depth == 0) break;
            }
            inner.push_back(s[i]);
        }
        if (depth == 0) found = inner;
        pos += kMarker.size();
    }
    return found;
}

std::string expand_placeholders(const std::string& text, const GenRequest& req) {
    std::string out = text;
    auto replace_all = [&](const std::string& slot, const std::string& value) {
        size_t pos = 0;
        while ((pos = out.find(slot, pos)) != std::string::npos) {
            out.replace(pos, slot.size(), value);
            pos += value.size();
        }
    };
    if (out.find("{input}") != std::string::npos) {
        std::string input;
        if (req.prompt.find("Paraphrased Question:") != std::string::npos) {
            input = extract_between(req.prompt, "Question: ", "\nParaphrased Question:");
        } else if (req.prompt.find("Clarified Question:") != std::string::npos) {
            input = extract_between(req.prompt, "Original Question: ", "\nClarified Question:");
        } else {
            input = req.prompt;
        }
        replace_all("{input}", trim(input));
    }
    if (out.find("{boxed_prev}") != std::string::npos) {
        const std::string segment =
            extract_between(req.prompt, "Your previous response: ",
                            "\nCheck your previous response");
        auto boxed = last_boxed(segment);
        replace_all("{boxed_prev}", boxed.value_or(""));
    }
    return out;
}

void validate_pool(const std::string& where, const MockPool& pool) {
    if (pool.options.empty())
        fail(Errc::invalid_script, where + ": empty pool");
    double sum = 0.0;
    for (const auto& opt : pool.options) {
        if (opt.prob < 0.0)
            fail(Errc::invalid_script, where + ": negative probability");
        sum += opt.prob;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        fail(Errc::invalid_script,
             where + ": pool probabilities sum to " + std::to_string(sum));
}

int whitespace_token_count(const std::string& s) {
    int n = 0;
    bool in_tok = false;
    for (char c : s) {
        const bool sp = (c == ' ' || c == '\t' || c == '\n' || c == '\r');
        if (!sp && !in_tok) ++n;
        in_tok = !sp;
    }
    return std::max(n, 1);
}

} // namespace

MockPool MockPool::uniform(std::vector<std::string> texts) {
    MockPool pool;
    const double p = 1.0 / static_cast<double>(texts.size());
    for (auto& t : texts) pool.options.push_back(MockOption{std::move(t), p, {}, {}, {}});
    return pool;
}

MockBackend::MockBackend(MockScript script, std::string model_name)
    : script_(std::move(script)) {
    for (const auto& q : script_.questions) {
        if (q.match.empty())
            fail(Errc::invalid_script, "question '" + q.question_id + "': empty match");
        for (const auto& [stage, pool] : q.pools)
            validate_pool("question '" + q.question_id + "' stage '" + stage + "'", pool);
    }
    for (const auto& [stage, pool] : script_.default_pools)
        validate_pool("default stage '" + stage + "'", pool);
    desc_.kind = BackendDescriptor::Kind::mock;
    desc_.model_name = std::move(model_name);
}

const MockQuestionScript* MockBackend::find_question(const std::string& prompt) const {
    for (const auto& q : script_.questions) {
        if (prompt.find(q.match) != std::string::npos) return &q;
    }
    return nullptr;
}

const MockPool* MockBackend::find_pool(const std::string& prompt,
                                       const std::string& purpose) const {
    auto lookup = [&](const std::map<std::string, MockPool>& pools) -> const MockPool* {
        auto it = pools.find(purpose);
        if (it != pools.end()) return &it->second;
        it = pools.find("answer");
        return it != pools.end() ? &it->second : nullptr;
    };
    if (const auto* q = find_question(prompt)) {
        if (const auto* p = lookup(q->pools)) return p;
    }
    return lookup(script_.default_pools);
}

GenResponse MockBackend::generate(const GenRequest& req) {
    if (req.prompt.empty()) fail(Errc::server_error, "empty prompt");
    if (req.want_logprobs && !script_.logprobs_supported)
        fail(Errc::logprobs_unavailable, "mock configured without logprobs");
    const MockPool* pool = find_pool(req.prompt, req.purpose);
    if (pool == nullptr)
        fail(Errc::server_error,
             "no pool matches prompt (purpose '" + req.purpose + "')");

    const uint64_t seed = derive_seed(script_.salt,
                                      req.seed.value_or(fnv1a64(req.prompt)),
                                      req.purpose);
    Rng rng(seed);
    GenResponse resp;
    resp.completions.reserve(req.n);
    for (int i = 0; i < req.n; ++i) {
        const double u = rng.next_double();
        double acc = 0.0;
        const MockOption* chosen = &pool->options.back();
        for (const auto& opt : pool->options) {
            acc += opt.prob;
            if (u < acc) {
                chosen = &opt;
                break;
            }
        }
        Completion c;
        c.text = expand_placeholders(chosen->text, req);
        if (req.want_logprobs) {
            c.sum_logprob = chosen->sum_logprob.value_or(
                chosen->prob > 0.0 ? std::log(chosen->prob) : -30.0);
            c.token_count = chosen->token_count.value_or(whitespace_token_count(c.text));
            c.first_token_top_logprobs = chosen->first_token_top_logprobs;
        }
        resp.completions.push_back(std::move(c));
    }
    return resp;
}

std::vector<double> hash_embedding(const std::string& text, int dim) {
    Rng rng(splitmix64(fnv1a64(text)));
    std::vector<double> v(dim);
    double norm = 0.0;
    for (auto& x : v) {
        x = rng.next_gauss();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        v[0] = 1.0;
        return v;
    }
    for (auto& x : v) x /= norm;
    return v;
}

std::vector<double> MockBackend::embed(const std::string& text) {
    if (text.empty()) fail(Errc::server_error, "embed: empty text");
    return hash_embedding(text, script_.embed_dim);
}

BackendPtr make_mock_backend(MockScript script, std::string model_name) {
    return std::make_shared<MockBackend>(std::move(script), std::move(model_name));
}

std::string BackendDescriptor::to_string() const {
    if (kind == Kind::mock) return "mock:" + model_name;
    return "http:" + base_url.value_or("") + "#" + model_name;
}

} // namespace uprof
