#include "uprof/synthlab.hpp"

#include <algorithm>

#include "uprof/estimators.hpp"
#include "uprof/rng.hpp"
#include "uprof/stats.hpp"

namespace uprof::synth {
namespace {

// Disjoint word groups: question bodies draw from kQuestionWords, injected
// paraphrase/clarification variants from the others, so token overlap
// between an original and an injected variant is exactly the "item <id>"
// tag (2 of ~12 tokens, SU ~= 0.82 by the ROUGE-L formula).
const std::vector<std::string> kQuestionWords = {
    "gradient", "harbor",  "lattice", "meadow", "copper",  "violet",
    "anchor",   "prism",   "timber",  "quartz", "breeze",  "canyon",
    "ember",    "fjord",   "glacier", "hollow", "island",  "juniper"};
const std::vector<std::string> kParaphraseWords = {
    "nebula", "orchid", "pylon",  "ridge",  "saffron", "tundra",
    "umbra",  "vertex", "willow", "xenon",  "yonder",  "zephyr"};
const std::vector<std::string> kClarifyWords = {
    "basalt", "cinder", "delta",  "estuary", "flint",  "grove",
    "heath",  "inlet",  "jetty",  "knoll",   "lagoon", "mesa"};

std::string pick_words(Rng& rng, const std::vector<std::string>& vocab, int count) {
    std::string out;
    for (int i = 0; i < count; ++i) {
        if (i > 0) out += " ";
        out += vocab[rng.next_index(vocab.size())];
    }
    return out;
}

std::string boxed_answer_text(const std::string& letter) {
    return "Considering the options, the answer is \\boxed{" + letter + "}.";
}

MockPool echo_pool() { return MockPool::single("{input}"); }

MockPool copy_prev_pool() {
    return MockPool::single("Rechecked; the answer stands: \\boxed{{boxed_prev}}.");
}

MockPool letter_pool(const std::vector<std::string>& letters) {
    std::vector<std::string> texts;
    texts.reserve(letters.size());
    for (const auto& l : letters) texts.push_back(boxed_answer_text(l));
    return MockPool::uniform(std::move(texts));
}

} // namespace

const char* scenario_kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::knowledge_gap: return "knowledge_gap";
        case ScenarioKind::execution_noise: return "execution_noise";
        case ScenarioKind::phrasing_sensitive: return "phrasing_sensitive";
        case ScenarioKind::ambiguous_input: return "ambiguous_input";
        case ScenarioKind::certain: return "certain";
    }
    return "certain";
}

ScenarioKind scenario_kind_from(const std::string& name) {
    for (ScenarioKind k :
         {ScenarioKind::knowledge_gap, ScenarioKind::execution_noise,
          ScenarioKind::phrasing_sensitive, ScenarioKind::ambiguous_input,
          ScenarioKind::certain}) {
        if (name == scenario_kind_name(k)) return k;
    }
    fail(Errc::usage_error, "unknown scenario kind '" + name + "'");
}

Population make_population(ScenarioKind kind, int n_questions, double positive_rate,
                           uint64_t seed) {
    if (!(positive_rate > 0.0 && positive_rate < 1.0))
        fail(Errc::invalid_rate, "positive_rate must be in (0,1)");
    if (n_questions < 20)
        fail(Errc::too_few_questions, "population needs at least 20 questions");

    Population pop;
    pop.kind = kind;
    pop.script.salt = seed;
    pop.script.embed_dim = 16;

    // exact positive count, seeded placement
    const int n_pos = std::max(
        1, static_cast<int>(positive_rate * static_cast<double>(n_questions) + 0.5));
    std::vector<bool> positive(n_questions, false);
    std::fill(positive.begin(), positive.begin() + std::min(n_pos, n_questions), true);
    Rng place(derive_seed(seed, "placement"));
    for (size_t i = positive.size(); i > 1; --i)
        std::swap(positive[i - 1], positive[place.next_index(i)]);

    static const std::vector<std::string> kLetters{"A", "B", "C"};
    for (int i = 0; i < n_questions; ++i) {
        Rng rng(derive_seed(seed, "question", static_cast<uint64_t>(i)));
        const bool pos = positive[i];
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "%s-%03d", scenario_kind_name(kind), i);
        const std::string id = idbuf;
        const std::string tag = "item " + id;
        const std::string gold = kLetters[rng.next_index(kLetters.size())];

        QuestionRecord q;
        q.id = id;
        q.task_type = TaskType::mc;
        q.text = "Which option is right for " + tag + ": " +
                 pick_words(rng, kQuestionWords, 5) + "?";
        q.choices = std::vector<std::string>{"first option", "second option",
                                             "third option"};
        q.gold_answers = {gold};
        q.metadata["injected"] = pos ? "true" : "false";
        pop.questions.push_back(q);
        pop.ground_truth[id] = pos;

        MockQuestionScript script;
        script.question_id = id;
        script.match = tag;

        // stage defaults: echo transforms, copy-through self-check,
        // always-correct answers
        script.pools["paraphrase"] = echo_pool();
        script.pools["clarify"] = echo_pool();
        script.pools["answer"] = letter_pool({gold});
        script.pools["self_check"] = copy_prev_pool();
        script.pools["label"] = letter_pool({gold});

        if (pos) {
            switch (kind) {
                case ScenarioKind::knowledge_gap:
                    script.pools["answer"] = letter_pool(kLetters);
                    script.pools["label"] = letter_pool(kLetters);
                    break;
                case ScenarioKind::execution_noise:
                    script.pools["answer"] = letter_pool(kLetters);
                    script.pools["self_check"] = letter_pool({gold});
                    script.pools["label"] = letter_pool(kLetters);
                    break;
                case ScenarioKind::phrasing_sensitive: {
                    std::vector<std::string> variants;
                    for (int v = 0; v < 4; ++v)
                        variants.push_back(tag + " " +
                                           pick_words(rng, kParaphraseWords, 8));
                    script.pools["paraphrase"] = MockPool::uniform(std::move(variants));
                    script.pools["label"] = letter_pool(kLetters);
                    break;
                }
                case ScenarioKind::ambiguous_input: {
                    std::vector<std::string> variants;
                    for (int v = 0; v < 4; ++v)
                        variants.push_back(tag + " clarified " +
                                           pick_words(rng, kClarifyWords, 6));
                    script.pools["clarify"] = MockPool::uniform(std::move(variants));
                    script.pools["label"] = letter_pool(kLetters);
                    break;
                }
                case ScenarioKind::certain:
                    break;
            }
        }
        pop.script.questions.push_back(std::move(script));
    }
    return pop;
}

const EstimatorScore& ValidationReport::row(const std::string& estimator) const {
    for (const auto& r : rows)
        if (r.estimator == estimator) return r;
    fail(Errc::usage_error, "no estimator row '" + estimator + "'");
}

ValidationReport validate_estimators(const Population& population,
                                     const RunManifest& manifest) {
    PipelineContext ctx;
    ctx.backend = make_mock_backend(population.script);
    ctx.manifest = manifest;
    ctx.manifest.backend_descriptor = ctx.backend->descriptor().to_string();

    est::Embedder embed = [&](const std::string& text) {
        return ctx.backend->embed(text);
    };

    ValidationReport report;
    report.kind = population.kind;
    std::vector<double> su, au, eu, ou;
    std::vector<bool> labels;
    for (const auto& q : population.questions) {
        const ChainSet set = run_question(q, ctx);
        const SourceProfile prof = est::profile_question(set, q.text, embed);
        report.profiles[q.id] = prof;
        su.push_back(prof.su);
        au.push_back(prof.au);
        eu.push_back(prof.eu);
        ou.push_back(prof.ou);
        const bool pos = population.ground_truth.at(q.id);
        labels.push_back(pos);
        if (pos)
            ++report.positives;
        else
            ++report.negatives;
    }

    auto score = [&](const std::string& name, const std::vector<double>& xs) {
        EstimatorScore s;
        s.estimator = name;
        s.auroc = stats::auroc(xs, labels);
        s.auprc = stats::auprc(xs, labels);
        return s;
    };
    report.rows = {score("su", su), score("au", au), score("eu", eu), score("ou", ou)};
    return report;
}

} // namespace uprof::synth
