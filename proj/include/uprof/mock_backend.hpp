#pragma once
// Deterministic scripted backend for tests and the synthetic lab.
// generate/embed are pure functions of (script, seed, request).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uprof/backend.hpp"

namespace uprof {

// One weighted output. `text` may contain placeholders expanded at
// generation time:
//   {input}      the question extracted from a paraphrase/clarify prompt
//   {boxed_prev} the boxed answer found in the prompt's previous-response
//                section (self-check copy-through)
struct MockOption {
    std::string text;
    double prob = 1.0;
    std::optional<double> sum_logprob;
    std::optional<int> token_count;
    std::map<std::string, double> first_token_top_logprobs;
};

struct MockPool {
    std::vector<MockOption> options;

    static MockPool single(std::string text) {
        return MockPool{{MockOption{std::move(text), 1.0, {}, {}, {}}}};
    }
    static MockPool uniform(std::vector<std::string> texts);
};

// Pools for one question, keyed by request purpose ("paraphrase",
// "clarify", "answer", "self_check", "label", metric names...). Lookup
// falls back to "answer" when the purpose has no dedicated pool.
struct MockQuestionScript {
    std::string question_id;
    std::string match;  // substring identifying this question's prompts
    std::map<std::string, MockPool> pools;
};

struct MockScript {
    std::vector<MockQuestionScript> questions;
    std::map<std::string, MockPool> default_pools;  // used when no question matches
    bool logprobs_supported = true;
    int embed_dim = 16;
    uint64_t salt = 0;  // folded into every per-request seed
};

class MockBackend final : public Backend {
public:
    // Validates the script (pool probabilities must sum to 1).
    // Throws Errc::invalid_script.
    explicit MockBackend(MockScript script, std::string model_name = "mock-model");

    GenResponse generate(const GenRequest& req) override;
    std::vector<double> embed(const std::string& text) override;
    bool supports_logprobs() const override { return script_.logprobs_supported; }
    const BackendDescriptor& descriptor() const override { return desc_; }

    const MockScript& script() const { return script_; }

private:
    const MockQuestionScript* find_question(const std::string& prompt) const;
    const MockPool* find_pool(const std::string& prompt, const std::string& purpose) const;

    MockScript script_;
    BackendDescriptor desc_;
};

// Deterministic unit-norm vector from the text hash; independent of any
// backend instance so tests can predict values.
std::vector<double> hash_embedding(const std::string& text, int dim);

BackendPtr make_mock_backend(MockScript script, std::string model_name = "mock-model");

} // namespace uprof
