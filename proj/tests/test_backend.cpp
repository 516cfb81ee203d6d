#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "uprof/http_backend.hpp"
#include "uprof/mock_backend.hpp"
#include "uprof/serde.hpp"
#include "uprof/stats.hpp"
#include "uprof/textdist.hpp"

using namespace uprof;
using nlohmann::json;

namespace {

MockScript basic_script() {
    MockScript s;
    MockQuestionScript q;
    q.question_id = "q1";
    q.match = "capital of France";
    q.pools["answer"] = MockPool::uniform({"It is \\boxed{A}.", "It is \\boxed{B}."});
    s.questions.push_back(q);
    return s;
}

GenRequest request_for(const std::string& prompt, int n = 1, uint64_t seed = 7) {
    GenRequest req;
    req.prompt = prompt;
    req.n = n;
    req.seed = seed;
    req.purpose = "answer";
    return req;
}

} // namespace

TEST_CASE("mock determinism: same seed, same request, identical response") {
    MockBackend backend(basic_script());
    const auto req = request_for("What is the capital of France?", 5, 99);
    const auto r1 = backend.generate(req);
    const auto r2 = backend.generate(req);
    REQUIRE(r1.completions.size() == 5);
    for (size_t i = 0; i < 5; ++i)
        CHECK(r1.completions[i].text == r2.completions[i].text);
}

TEST_CASE("mock returns exactly n texts") {
    MockBackend backend(basic_script());
    CHECK(backend.generate(request_for("capital of France", 3)).completions.size() == 3);
}

TEST_CASE("mock without logprobs rejects want_logprobs") {
    MockScript s = basic_script();
    s.logprobs_supported = false;
    MockBackend backend(s);
    auto req = request_for("capital of France");
    req.want_logprobs = true;
    try {
        backend.generate(req);
        FAIL("expected LogprobsUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::logprobs_unavailable);
    }
}

TEST_CASE("mock pool probabilities must sum to 1") {
    MockScript s;
    MockQuestionScript q;
    q.question_id = "bad";
    q.match = "bad";
    MockPool pool;
    pool.options = {{"\\boxed{A}", 0.6, {}, {}, {}}, {"\\boxed{B}", 0.5, {}, {}, {}}};
    q.pools["answer"] = pool;
    s.questions.push_back(q);
    try {
        MockBackend backend(s);
        FAIL("expected InvalidScript");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_script);
    }
}

TEST_CASE("mock degenerate pool always yields the scripted answer") {
    MockScript s;
    MockQuestionScript q;
    q.question_id = "q1";
    q.match = "pick";
    q.pools["answer"] = MockPool::single("The answer is \\boxed{A}.");
    s.questions.push_back(q);
    MockBackend backend(s);
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const auto resp = backend.generate(request_for("pick one now", 1, seed));
        CHECK(resp.completions[0].text.find("\\boxed{A}") != std::string::npos);
    }
}

TEST_CASE("mock 50/50 pool: both answers appear over 32 seeded draws") {
    MockBackend backend(basic_script());
    int a = 0, b = 0;
    for (uint64_t seed = 0; seed < 32; ++seed) {
        const auto text =
            backend.generate(request_for("capital of France", 1, seed)).completions[0].text;
        if (text.find("\\boxed{A}") != std::string::npos) ++a;
        if (text.find("\\boxed{B}") != std::string::npos) ++b;
    }
    CHECK(a > 0);
    CHECK(b > 0);
    CHECK(a + b == 32);
}

TEST_CASE("mock embed: deterministic, separating, unit norm") {
    MockBackend backend(basic_script());
    const auto e1 = backend.embed("x");
    const auto e2 = backend.embed("x");
    const auto e3 = backend.embed("y");
    CHECK(e1 == e2);
    CHECK(e1.size() == 16);
    CHECK(text::semantic_distance(e1, e3, text::SemMethod::cosine) > 0.0);
    double norm = 0;
    for (double v : e1) norm += v * v;
    CHECK(norm == doctest::Approx(1.0));
}

TEST_CASE("mock placeholder transforms") {
    MockScript s;
    MockQuestionScript q;
    q.question_id = "q1";
    q.match = "my question";
    q.pools["paraphrase"] = MockPool::single("{input}");
    q.pools["self_check"] = MockPool::single("Same: \\boxed{{boxed_prev}}.");
    s.questions.push_back(q);
    MockBackend backend(s);

    GenRequest para;
    para.prompt = "Paraphrase...\nQuestion: my question here\nParaphrased Question:";
    para.purpose = "paraphrase";
    para.seed = 1;
    CHECK(backend.generate(para).completions[0].text == "my question here");

    GenRequest check;
    check.prompt = "Q: my question\nYour previous response: I think \\boxed{C}.\n"
                   "Check your previous response carefully... like: \\boxed{A}.\nOutput:";
    check.purpose = "self_check";
    check.seed = 1;
    CHECK(backend.generate(check).completions[0].text == "Same: \\boxed{C}.");
}

TEST_CASE("mock logprob defaults derive from option weight") {
    MockScript s;
    MockQuestionScript q;
    q.question_id = "q1";
    q.match = "weighted";
    MockPool pool;
    pool.options = {{"alpha beta gamma", 1.0, {}, {}, {}}};
    q.pools["answer"] = pool;
    s.questions.push_back(q);
    MockBackend backend(s);
    auto req = request_for("weighted", 1);
    req.want_logprobs = true;
    const auto resp = backend.generate(req);
    CHECK(resp.completions[0].sum_logprob == doctest::Approx(0.0));  // ln 1
    CHECK(resp.completions[0].token_count == 3);
}

TEST_CASE("mock script JSON round-trip") {
    MockScript s = basic_script();
    s.salt = 42;
    s.embed_dim = 8;
    const auto j = mock_script_to_json(s);
    const MockScript back = mock_script_from_json(j);
    CHECK(back.salt == 42);
    CHECK(back.embed_dim == 8);
    REQUIRE(back.questions.size() == 1);
    CHECK(back.questions[0].match == "capital of France");
    CHECK(back.questions[0].pools.at("answer").options.size() == 2);
    MockBackend b1(s), b2(back);
    const auto req = request_for("capital of France", 4, 5);
    CHECK(b1.generate(req).completions[2].text == b2.generate(req).completions[2].text);
}

// --- HTTP backend against a local scripted server ---

namespace {

struct TestServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::atomic<int> chat_calls{0};

    explicit TestServer(bool fail_first_with_500 = false) {
        server.Post("/v1/chat/completions", [this, fail_first_with_500](
                                                const httplib::Request& req,
                                                httplib::Response& res) {
            const int call = ++chat_calls;
            if (fail_first_with_500 && call == 1) {
                res.status = 500;
                res.set_content("boom", "text/plain");
                return;
            }
            const json body = json::parse(req.body);
            const int n = body.value("n", 1);
            json choices = json::array();
            for (int i = 0; i < n; ++i) {
                json choice{{"message", {{"role", "assistant"},
                                         {"content", "reply \\boxed{A}"}}}};
                if (body.value("logprobs", false)) {
                    choice["logprobs"] = {
                        {"content",
                         json::array({json{{"token", "reply"},
                                           {"logprob", -0.5},
                                           {"top_logprobs",
                                            json::array({json{{"token", "True"},
                                                              {"logprob", -0.2231}},
                                                         json{{"token", "False"},
                                                              {"logprob", -1.6094}}})}},
                                      json{{"token", "x"}, {"logprob", -1.0}}})}};
                }
                choices.push_back(std::move(choice));
            }
            res.set_content(json{{"choices", choices}}.dump(), "application/json");
        });
        server.Post("/v1/embeddings", [](const httplib::Request& req,
                                         httplib::Response& res) {
            const json body = json::parse(req.body);
            const std::string input = body.value("input", "");
            const double x = input.size() % 2 == 0 ? 1.0 : 0.5;
            res.set_content(
                json{{"data", json::array({json{{"embedding", {x, 0.25, 0.125}}}})}}.dump(),
                "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~TestServer() {
        server.stop();
        thread.join();
    }

    BackendDescriptor descriptor() const {
        BackendDescriptor d;
        d.kind = BackendDescriptor::Kind::http;
        d.base_url = "http://127.0.0.1:" + std::to_string(port);
        d.model_name = "test-model";
        d.max_retries = 2;
        return d;
    }
};

} // namespace

TEST_CASE("http backend: chat completions with logprobs") {
    TestServer server;
    auto backend = make_http_backend(server.descriptor());
    GenRequest req;
    req.prompt = "hello";
    req.n = 2;
    req.want_logprobs = true;
    const auto resp = backend->generate(req);
    REQUIRE(resp.completions.size() == 2);
    CHECK(resp.completions[0].text == "reply \\boxed{A}");
    CHECK(*resp.completions[0].sum_logprob == doctest::Approx(-1.5));
    CHECK(*resp.completions[0].token_count == 2);
    CHECK(resp.completions[0].first_token_top_logprobs.at("True") ==
          doctest::Approx(-0.2231));
}

TEST_CASE("http backend: retries a 500 then succeeds") {
    TestServer server(/*fail_first_with_500=*/true);
    auto desc = server.descriptor();
    auto backend = make_http_backend(desc);
    GenRequest req;
    req.prompt = "hello";
    const auto resp = backend->generate(req);
    CHECK(resp.completions.size() == 1);
    CHECK(server.chat_calls.load() == 2);
}

TEST_CASE("http backend: embeddings and dimension drift") {
    TestServer server;
    auto backend = make_http_backend(server.descriptor());
    const auto e = backend->embed("ab");  // even length -> 3 dims
    CHECK(e.size() == 3);
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK_NOTHROW(backend->embed("cd"));
    // the test server always returns 3 dims, so no drift here; a second
    // backend against a drifting payload is covered in acceptance smoke
}
