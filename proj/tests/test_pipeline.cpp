#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uprof/mock_backend.hpp"
#include "uprof/pipeline.hpp"
#include "uprof/serde.hpp"

using namespace uprof;

namespace {

QuestionRecord mc_question() {
    QuestionRecord q;
    q.id = "q1";
    q.task_type = TaskType::mc;
    q.text = "What color is the clear daytime sky?";
    q.choices = std::vector<std::string>{"blue", "green", "red"};
    q.gold_answers = {"A"};
    return q;
}

// echo paraphrase/clarify, scripted answer pools, copy-through self-check
MockScript echo_script(MockPool answer_pool, MockPool self_check_pool) {
    MockScript s;
    MockQuestionScript q;
    q.question_id = "q1";
    q.match = "daytime sky";
    q.pools["paraphrase"] = MockPool::single("{input}");
    q.pools["clarify"] = MockPool::single("{input}");
    q.pools["answer"] = std::move(answer_pool);
    q.pools["self_check"] = std::move(self_check_pool);
    s.questions.push_back(std::move(q));
    return s;
}

PipelineContext context_for(MockScript script, uint64_t seed = 7, int n_chains = 4) {
    PipelineContext ctx;
    ctx.backend = make_mock_backend(std::move(script));
    ctx.manifest.model_id = "mock";
    ctx.manifest.dataset_id = "test";
    ctx.manifest.n_chains = n_chains;
    ctx.manifest.seed = seed;
    return ctx;
}

} // namespace

TEST_CASE("render_prompt: paraphrase template carries its suffix line") {
    const auto& reg = PromptRegistry::embedded();
    const auto prompt = reg.render_stage(Stage::paraphrase, TaskType::mc, {{"q", "Q1?"}});
    CHECK(prompt.find("Q1?") != std::string::npos);
    CHECK(prompt.find("Paraphrased Question:") != std::string::npos);
    CHECK(prompt.rfind("Paraphrase the following question", 0) == 0);
}

TEST_CASE("render_prompt: missing slot") {
    const auto& reg = PromptRegistry::embedded();
    try {
        reg.render_stage(Stage::answer, TaskType::mc, {{"q", "pick"}});  // no {c}
        FAIL("expected MissingSlot");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_slot);
    }
}

TEST_CASE("render_prompt: rc self-check carries the previous-response line") {
    const auto& reg = PromptRegistry::embedded();
    const auto prompt = reg.render_stage(
        Stage::self_check, TaskType::rc,
        {{"q", "who?"}, {"p", "passage text"}, {"a", "old answer"}});
    CHECK(prompt.find("Your previous response: old answer") != std::string::npos);
    CHECK(prompt.find("Passage : passage text") != std::string::npos);
}

TEST_CASE("extract_answer") {
    CHECK(extract_answer("so \\boxed{A}.", TaskType::mc) == "A");
    CHECK(extract_answer("\\boxed{B} ... revised: \\boxed{C}", TaskType::mc) == "C");
    CHECK(extract_answer("answer \\boxed{ 42.0 }", TaskType::essay) == "42");
    CHECK(extract_answer("x \\boxed{The Nile}", TaskType::rc) == "nile");
    CHECK(extract_answer("\\boxed{3.50}", TaskType::essay) == "3.5");
    CHECK(extract_answer("\\boxed{\\frac{1}{2}}", TaskType::essay) == "\\frac{1}{2}");

    try {
        extract_answer("no boxed content", TaskType::mc);
        FAIL("expected NoBoxedAnswer");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::no_boxed_answer);
    }
    try {
        extract_answer("\\boxed{F}", TaskType::mc);
        FAIL("expected InvalidChoice");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_choice);
    }
}

TEST_CASE("grade") {
    CHECK(grade("A", {"A"}, TaskType::mc));
    CHECK_FALSE(grade("B", {"A"}, TaskType::mc));
    // canonicalization maps both sides to "nile"
    CHECK(grade(canonicalize_answer("the nile", TaskType::rc), {"Nile"}, TaskType::rc));
    CHECK_FALSE(grade("41", {"42"}, TaskType::essay));
    CHECK(grade("42", {"42.0000000001"}, TaskType::essay));  // relative 1e-6
    CHECK(grade("1000000", {"1000000.5"}, TaskType::essay));
    CHECK_FALSE(grade("1000000", {"1000002"}, TaskType::essay));
}

TEST_CASE("run_chain: stage dataflow and answers") {
    auto ctx = context_for(echo_script(MockPool::single("I pick \\boxed{A}."),
                                       MockPool::single("Still \\boxed{{boxed_prev}}.")));
    const auto rec = run_chain(mc_question(), ctx, 0);
    CHECK_FALSE(rec.failed_stage.has_value());
    // echo transforms: paraphrase equals the original, clarification equals
    // the paraphrase (chain structure, never the original directly)
    CHECK(rec.paraphrase == mc_question().text);
    CHECK(rec.clarification == rec.paraphrase);
    CHECK(rec.first_trial_answer == "A");
    CHECK(rec.self_checked_answer == "A");
    CHECK(rec.first_trial_raw.find("\\boxed{A}") != std::string::npos);
}

TEST_CASE("run_chain: failure at clarify leaves later fields empty") {
    MockScript s;
    MockQuestionScript q;
    q.question_id = "q1";
    q.match = "daytime sky";
    q.pools["paraphrase"] = MockPool::single("{input}");
    // no clarify/answer pool anywhere and no default -> clarify stage fails
    s.questions.push_back(q);
    auto ctx = context_for(std::move(s));
    const auto rec = run_chain(mc_question(), ctx, 0);
    REQUIRE(rec.failed_stage.has_value());
    CHECK(*rec.failed_stage == "clarify");
    CHECK(rec.first_trial_raw.empty());
    CHECK_FALSE(rec.first_trial_answer.has_value());
    CHECK_FALSE(rec.self_checked_answer.has_value());
    CHECK(!rec.paraphrase.empty());
}

TEST_CASE("run_question: deterministic single-answer pools") {
    auto ctx = context_for(echo_script(MockPool::single("I pick \\boxed{A}."),
                                       MockPool::single("Still \\boxed{A}.")));
    const auto set = run_question(mc_question(), ctx);
    REQUIRE(set.chains.size() == 4);
    CHECK(set.first_trial_dist.probs.at("A") == 1.0);
    CHECK(set.self_check_dist.probs.at("A") == 1.0);
}

TEST_CASE("run_question: split first trial, concentrated self-check") {
    auto ctx = context_for(
        echo_script(MockPool::uniform({"I pick \\boxed{A}.", "I pick \\boxed{B}."}),
                    MockPool::single("Still \\boxed{A}.")),
        /*seed=*/3, /*n_chains=*/8);
    const auto set = run_question(mc_question(), ctx);
    CHECK(set.self_check_dist.probs.at("A") == 1.0);
    CHECK(set.first_trial_dist.probs.size() == 2);
    // re-count from the recorded chains
    int a = 0, b = 0;
    for (const auto& c : set.chains) {
        if (c.first_trial_answer == "A") ++a;
        if (c.first_trial_answer == "B") ++b;
    }
    CHECK(a + b == 8);
    CHECK(set.first_trial_dist.probs.at("A") == doctest::Approx(a / 8.0));
}

TEST_CASE("run_question: insufficient chains") {
    // answers never contain a boxed answer -> extraction fails everywhere
    auto ctx = context_for(echo_script(MockPool::single("no boxed text"),
                                       MockPool::single("still none")));
    try {
        run_question(mc_question(), ctx);
        FAIL("expected InsufficientChains");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::insufficient_chains);
    }
}

TEST_CASE("run_question determinism: identical serialized chains") {
    auto make = [] {
        return context_for(
            echo_script(MockPool::uniform({"I pick \\boxed{A}.", "I pick \\boxed{B}."}),
                        MockPool::single("Still \\boxed{{boxed_prev}}.")),
            /*seed=*/11, /*n_chains=*/6);
    };
    auto c1 = make();
    auto c2 = make();
    const auto s1 = run_question(mc_question(), c1);
    const auto s2 = run_question(mc_question(), c2);
    REQUIRE(s1.chains.size() == s2.chains.size());
    for (size_t i = 0; i < s1.chains.size(); ++i) {
        CHECK(chain_to_json(s1.chains[i]).dump() == chain_to_json(s2.chains[i]).dump());
    }
    // copy-through self-check reproduces the first trial exactly
    for (const auto& c : s1.chains) CHECK(c.self_checked_answer == c.first_trial_answer);
}

TEST_CASE("label_question: accuracy and the strict 70% rule") {
    auto ctx = context_for(echo_script(MockPool::single("I pick \\boxed{A}."),
                                       MockPool::single("Still \\boxed{A}.")));
    ctx.manifest.label_samples = 32;
    const auto ex = label_question(mc_question(), ctx);
    CHECK(ex.empirical_accuracy == 1.0);
    CHECK_FALSE(ex.uncertain);

    // a pool that is wrong 60% of the time in expectation
    auto make_ctx = [] {
        auto c = context_for(echo_script(
            MockPool{{{"I pick \\boxed{A}.", 0.4, {}, {}, {}},
                      {"I pick \\boxed{B}.", 0.6, {}, {}, {}}}},
            MockPool::single("x")));
        c.manifest.label_samples = 32;
        c.manifest.seed = 77;
        return c;
    };
    auto ctx2 = make_ctx();
    const auto ex2 = label_question(mc_question(), ctx2);
    auto ctx3 = make_ctx();
    const auto replay = label_question(mc_question(), ctx3);
    CHECK(ex2.empirical_accuracy == replay.empirical_accuracy);
    CHECK(ex2.uncertain == (ex2.empirical_accuracy < 0.70));

    // exactly at the threshold is NOT uncertain (strict <)
    LabeledExample at;
    at.empirical_accuracy = 0.70;
    at.uncertain = at.empirical_accuracy < 0.70;
    CHECK_FALSE(at.uncertain);
}

TEST_CASE("label_question: failed extraction counts incorrect") {
    auto ctx = context_for(echo_script(
        MockPool{{{"I pick \\boxed{A}.", 0.5, {}, {}, {}},
                  {"no boxed here", 0.5, {}, {}, {}}}},
        MockPool::single("x")));
    ctx.manifest.label_samples = 40;
    ctx.manifest.seed = 5;
    const auto ex = label_question(mc_question(), ctx);
    CHECK(ex.empirical_accuracy < 1.0);
    CHECK(ex.empirical_accuracy > 0.0);
}

TEST_CASE("prompt templates exist for every stage/task combination") {
    const auto& reg = PromptRegistry::embedded();
    for (auto stage : {Stage::paraphrase, Stage::clarify, Stage::answer,
                       Stage::self_check}) {
        for (auto task : {TaskType::mc, TaskType::rc, TaskType::essay}) {
            CHECK_FALSE(reg.raw(reg.stage_key(stage, task)).empty());
        }
    }
}
