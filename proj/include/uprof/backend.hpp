#pragma once
// Text generation / embedding abstraction. Handles are shareable; generate
// and embed may be called concurrently.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uprof/errors.hpp"

namespace uprof {

struct GenRequest {
    std::string prompt;
    double temperature = 1.0;
    int max_tokens = 256;
    double top_p = 1.0;
    int n = 1;
    bool want_logprobs = false;
    std::optional<uint64_t> seed;
    // Caller hint (pipeline stage, "label", metric name). The HTTP backend
    // ignores it; mock scripts may route pools on it.
    std::string purpose;
};

struct Completion {
    std::string text;
    std::optional<double> sum_logprob;  // nats, <= 0
    std::optional<int> token_count;     // >= 1 when sum_logprob present
    // Top-token logprobs at the first generated position, when available.
    std::map<std::string, double> first_token_top_logprobs;
};

struct GenResponse {
    std::vector<Completion> completions;  // exactly n entries
};

struct BackendDescriptor {
    enum class Kind { http, mock };
    Kind kind = Kind::mock;
    std::optional<std::string> base_url;  // required for http
    std::string model_name;
    std::optional<std::string> api_key;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 3;
    int max_concurrency = 8;

    std::string to_string() const;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual GenResponse generate(const GenRequest& req) = 0;
    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual bool supports_logprobs() const = 0;
    virtual const BackendDescriptor& descriptor() const = 0;
};

using BackendPtr = std::shared_ptr<Backend>;

} // namespace uprof
