#include "uprof/http_backend.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "uprof/serde.hpp"

namespace uprof {
namespace {

using nlohmann::json;

const char* env_or_null(const char* name) { return std::getenv(name); }

class Semaphore {
public:
    explicit Semaphore(int count) : count_(count) {}
    void acquire() {
        std::unique_lock lock(m_);
        cv_.wait(lock, [&] { return count_ > 0; });
        --count_;
    }
    void release() {
        {
            std::lock_guard lock(m_);
            ++count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex m_;
    std::condition_variable cv_;
    int count_;
};

struct SemaphoreGuard {
    Semaphore& sem;
    explicit SemaphoreGuard(Semaphore& s) : sem(s) { sem.acquire(); }
    ~SemaphoreGuard() { sem.release(); }
};

class HttpBackend final : public Backend {
public:
    explicit HttpBackend(BackendDescriptor desc)
        : desc_(std::move(desc)), limiter_(std::max(desc_.max_concurrency, 1)) {
        if (!desc_.base_url || desc_.base_url->empty())
            fail(Errc::schema_error, "http backend requires base_url");
    }

    GenResponse generate(const GenRequest& req) override {
        if (req.prompt.empty()) fail(Errc::server_error, "empty prompt");
        json body = {
            {"model", desc_.model_name},
            {"messages", json::array({json{{"role", "user"}, {"content", req.prompt}}})},
            {"temperature", req.temperature},
            {"top_p", req.top_p},
            {"max_tokens", req.max_tokens},
            {"n", req.n},
        };
        if (req.want_logprobs) {
            body["logprobs"] = true;
            body["top_logprobs"] = 5;
        }
        if (req.seed) body["seed"] = *req.seed;

        const json resp = post_json("/v1/chat/completions", body);
        GenResponse out;
        if (!resp.contains("choices") || !resp["choices"].is_array())
            fail(Errc::server_error, "response missing choices array");
        for (const auto& choice : resp["choices"]) {
            Completion c;
            c.text = choice.value("message", json::object()).value("content", "");
            if (req.want_logprobs) {
                const auto lp = choice.value("logprobs", json());
                if (lp.is_null() || !lp.contains("content"))
                    fail(Errc::logprobs_unavailable,
                         "server returned no token logprobs");
                double sum = 0.0;
                int count = 0;
                for (const auto& tok : lp["content"]) {
                    sum += tok.value("logprob", 0.0);
                    ++count;
                    if (count == 1 && tok.contains("top_logprobs")) {
                        for (const auto& top : tok["top_logprobs"]) {
                            c.first_token_top_logprobs[top.value("token", "")] =
                                top.value("logprob", 0.0);
                        }
                    }
                }
                if (count == 0)
                    fail(Errc::logprobs_unavailable, "empty logprob content");
                if (sum > 1e-9)
                    fail(Errc::server_error,
                         "positive sum logprob from server (data corruption)");
                c.sum_logprob = std::min(sum, 0.0);
                c.token_count = count;
            }
            out.completions.push_back(std::move(c));
        }
        if (static_cast<int>(out.completions.size()) != req.n)
            fail(Errc::server_error, "server returned " +
                                         std::to_string(out.completions.size()) +
                                         " completions, expected " + std::to_string(req.n));
        return out;
    }

    std::vector<double> embed(const std::string& text) override {
        if (text.empty()) fail(Errc::server_error, "embed: empty text");
        const json resp = post_json(
            "/v1/embeddings", json{{"model", desc_.model_name}, {"input", text}});
        if (!resp.contains("data") || resp["data"].empty() ||
            !resp["data"][0].contains("embedding"))
            fail(Errc::server_error, "embeddings response missing data[0].embedding");
        std::vector<double> v = resp["data"][0]["embedding"].get<std::vector<double>>();
        {
            std::lock_guard lock(dim_mutex_);
            if (embed_dim_ == 0) {
                embed_dim_ = static_cast<int>(v.size());
            } else if (embed_dim_ != static_cast<int>(v.size())) {
                fail(Errc::dimension_drift,
                     "embedding dimension changed from " + std::to_string(embed_dim_) +
                         " to " + std::to_string(v.size()));
            }
        }
        return v;
    }

    bool supports_logprobs() const override { return true; }
    const BackendDescriptor& descriptor() const override { return desc_; }

private:
    json post_json(const std::string& path, const json& body) {
        SemaphoreGuard guard(limiter_);
        const std::string payload = body.dump();
        int attempt = 0;
        std::chrono::milliseconds backoff{1000};
        for (;;) {
            httplib::Client client(*desc_.base_url);
            client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(
                desc_.timeout));
            client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(
                desc_.timeout));
            httplib::Headers headers;
            if (desc_.api_key && !desc_.api_key->empty())
                headers.emplace("Authorization", "Bearer " + *desc_.api_key);
            auto res = client.Post(path, headers, payload, "application/json");

            const bool transport_failure = !res;
            const bool retryable_status =
                res && (res->status == 429 || res->status >= 500);
            if (!transport_failure && !retryable_status) {
                if (res->status != 200)
                    fail(Errc::server_error,
                         "HTTP " + std::to_string(res->status) + ": " +
                             res->body.substr(0, 200));
                return json::parse(res->body, nullptr, false).is_discarded()
                           ? throw Error(Errc::server_error, "invalid JSON response")
                           : json::parse(res->body);
            }
            if (attempt >= desc_.max_retries) {
                if (transport_failure)
                    fail(Errc::timeout, "request to " + path + " failed after " +
                                            std::to_string(attempt + 1) + " attempts");
                if (res->status == 429)
                    fail(Errc::rate_limited, "rate limited after retries");
                fail(Errc::server_error,
                     "HTTP " + std::to_string(res->status) + " after retries: " +
                         res->body.substr(0, 200));
            }
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
            ++attempt;
        }
    }

    BackendDescriptor desc_;
    Semaphore limiter_;
    std::mutex dim_mutex_;
    int embed_dim_ = 0;
};

} // namespace

BackendDescriptor http_descriptor_from_env(BackendDescriptor base) {
    base.kind = BackendDescriptor::Kind::http;
    if (!base.base_url || base.base_url->empty()) {
        if (const char* url = env_or_null("UPROF_BASE_URL")) base.base_url = url;
    }
    if (!base.api_key || base.api_key->empty()) {
        if (const char* key = env_or_null("UPROF_API_KEY")) base.api_key = key;
    }
    if (base.model_name.empty()) {
        if (const char* model = env_or_null("UPROF_MODEL")) base.model_name = model;
    }
    return base;
}

BackendPtr make_http_backend(BackendDescriptor desc) {
    return std::make_shared<HttpBackend>(std::move(desc));
}

BackendPtr make_backend_from_spec(const std::string& spec, const std::string& model_name) {
    const auto colon = spec.find(':');
    const std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "mock") {
        std::ifstream in(rest);
        if (!in) fail(Errc::io_error, "cannot open mock script '" + rest + "'");
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded()) fail(Errc::schema_error, "mock script is not valid JSON");
        return make_mock_backend(mock_script_from_json(j),
                                 model_name.empty() ? "mock-model" : model_name);
    }
    if (kind == "http") {
        BackendDescriptor desc;
        desc.kind = BackendDescriptor::Kind::http;
        if (!rest.empty()) desc.base_url = rest;
        desc.model_name = model_name;
        return make_http_backend(http_descriptor_from_env(std::move(desc)));
    }
    fail(Errc::usage_error, "unknown backend spec '" + spec + "' (use mock:FILE or http:URL)");
}

} // namespace uprof
