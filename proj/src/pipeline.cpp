#include "uprof/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <future>

#include "uprof/rng.hpp"

namespace uprof {
namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<std::string> find_last_boxed(const std::string& raw) {
    static const std::string kMarker = "\\boxed{";
    std::optional<std::string> found;
    size_t pos = 0;
    while ((pos = raw.find(kMarker, pos)) != std::string::npos) {
        size_t i = pos + kMarker.size();
        int depth = 1;
        std::string inner;
        for (; i < raw.size(); ++i) {
            if (raw[i] == '{') ++depth;
            if (raw[i] == '}') {
                --depth;
                if (depth == 0) break;
            }
            inner.push_back(raw[i]);
        }
        if (depth == 0) found = inner;
        pos += kMarker.size();
    }
    return found;
}

std::string strip_edge_punct(std::string s) {
    size_t b = 0, e = s.size();
    auto punct = [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; };
    while (b < e && punct(s[b])) ++b;
    while (e > b && punct(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::string collapse_spaces(const std::string& s) {
    std::string out;
    bool prev_space = false;
    for (char c : s) {
        const bool sp = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (sp) {
            if (!prev_space && !out.empty()) out.push_back(' ');
        } else {
            out.push_back(c);
        }
        prev_space = sp;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::optional<double> parse_full_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + s.size()) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::string render_number(double v) {
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string strip_leading_article(std::string s) {
    for (const char* art : {"a ", "an ", "the "}) {
        const size_t len = std::strlen(art);
        if (s.size() > len && s.compare(0, len, art) == 0) return s.substr(len);
    }
    return s;
}

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct StageCall {
    std::string text;
    std::optional<LogprobInfo> logprob;
};

StageCall call_stage(const QuestionRecord& q, const PipelineContext& ctx,
                     Stage stage, int chain_id, const PromptSlots& slots,
                     bool want_logprobs) {
    GenRequest req;
    req.prompt = ctx.prompts->render_stage(stage, q.task_type, slots);
    req.temperature = ctx.manifest.decoding.temperature;
    req.top_p = ctx.manifest.decoding.top_p;
    req.max_tokens = ctx.manifest.decoding.max_tokens > 0
                         ? ctx.manifest.decoding.max_tokens
                         : default_max_tokens(q.task_type);
    req.n = 1;
    req.want_logprobs = want_logprobs && ctx.backend->supports_logprobs();
    req.seed = derive_seed(ctx.manifest.seed, q.id,
                           static_cast<uint64_t>(chain_id), stage_name(stage));
    req.purpose = stage_name(stage);
    GenResponse resp = ctx.backend->generate(req);
    StageCall call;
    call.text = resp.completions.at(0).text;
    if (resp.completions[0].sum_logprob) {
        if (*resp.completions[0].sum_logprob > 1e-9)
            fail(Errc::server_error, "positive sum logprob (data corruption)");
        call.logprob = LogprobInfo{*resp.completions[0].sum_logprob,
                                   resp.completions[0].token_count.value_or(1)};
    }
    return call;
}

} // namespace

std::string canonicalize_answer(const std::string& s, TaskType task) {
    std::string t = trim(s);
    if (task == TaskType::mc) {
        t = strip_edge_punct(t);
        if (t.size() == 1) {
            const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
            if (c >= 'A' && c <= 'E') return std::string(1, c);
        }
        fail(Errc::invalid_choice, "'" + s + "' is not a choice letter A-E");
    }
    t = collapse_spaces(t);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    t = strip_edge_punct(t);
    t = strip_leading_article(t);
    t = trim(t);
    if (auto num = parse_full_number(t)) return render_number(*num);
    return t;
}

std::string extract_answer(const std::string& raw, TaskType task) {
    auto boxed = find_last_boxed(raw);
    if (!boxed) fail(Errc::no_boxed_answer, "no \\boxed{...} in output");
    return canonicalize_answer(*boxed, task);
}

bool grade(const std::string& answer, const std::vector<std::string>& gold,
           TaskType task) {
    if (task == TaskType::mc) {
        return std::find(gold.begin(), gold.end(), answer) != gold.end();
    }
    const auto num_ans = parse_full_number(answer);
    for (const auto& g : gold) {
        std::string cg;
        try {
            cg = canonicalize_answer(g, task);
        } catch (const Error&) {
            continue;
        }
        if (cg == answer) return true;
        if (num_ans) {
            if (auto num_gold = parse_full_number(cg)) {
                const double scale = std::max(std::fabs(*num_ans), std::fabs(*num_gold));
                if (std::fabs(*num_ans - *num_gold) <= 1e-6 * std::max(scale, 1e-300))
                    return true;
            }
        }
    }
    return false;
}

ChainRecord run_chain(const QuestionRecord& q, const PipelineContext& ctx, int chain_id) {
    ChainRecord rec;
    rec.chain_id = chain_id;
    rec.question_id = q.id;

    PromptSlots base;
    if (q.choices) base["c"] = format_choices(*q.choices);
    if (q.passage) base["p"] = *q.passage;

    auto run_stage = [&](Stage stage, const std::string& q_text,
                         const std::string& prev_answer,
                         bool want_logprobs) -> std::optional<StageCall> {
        PromptSlots slots = base;
        slots["q"] = q_text;
        if (stage == Stage::self_check) slots["a"] = prev_answer;
        const double t0 = now_seconds();
        try {
            StageCall call = call_stage(q, ctx, stage, chain_id, slots, want_logprobs);
            rec.stage_seconds[stage_name(stage)] = now_seconds() - t0;
            return call;
        } catch (const Error& e) {
            rec.stage_seconds[stage_name(stage)] = now_seconds() - t0;
            rec.failed_stage = stage_name(stage);
            rec.failure_cause = e.what();
            return std::nullopt;
        }
    };

    auto para = run_stage(Stage::paraphrase, q.text, "", false);
    if (!para) return rec;
    rec.paraphrase = trim(para->text);

    // clarification consumes the paraphrase, never the original
    auto clar = run_stage(Stage::clarify, rec.paraphrase, "", false);
    if (!clar) return rec;
    rec.clarification = trim(clar->text);

    auto ans = run_stage(Stage::answer, rec.clarification, "", true);
    if (!ans) return rec;
    rec.first_trial_raw = ans->text;
    rec.first_trial_logprob = ans->logprob;
    try {
        rec.first_trial_answer = extract_answer(rec.first_trial_raw, q.task_type);
    } catch (const Error&) {
        rec.first_trial_answer = std::nullopt;
    }

    auto check = run_stage(Stage::self_check, rec.clarification, rec.first_trial_raw, false);
    if (!check) return rec;
    rec.self_checked_raw = check->text;
    try {
        rec.self_checked_answer = extract_answer(rec.self_checked_raw, q.task_type);
    } catch (const Error&) {
        rec.self_checked_answer = std::nullopt;
    }
    return rec;
}

ChainSet assemble_chain_set(const std::string& question_id,
                            std::vector<ChainRecord> chains) {
    std::sort(chains.begin(), chains.end(),
              [](const ChainRecord& a, const ChainRecord& b) {
                  return a.chain_id < b.chain_id;
              });
    ChainSet set;
    set.question_id = question_id;
    std::vector<std::string> ft, sc;
    for (const auto& c : chains) {
        if (c.first_trial_answer)
            ft.push_back(*c.first_trial_answer);
        else
            set.extraction_failures["answer"] += 1;
        if (c.self_checked_answer)
            sc.push_back(*c.self_checked_answer);
        else
            set.extraction_failures["self_check"] += 1;
    }
    set.chains = std::move(chains);
    size_t both = 0;
    for (const auto& c : set.chains)
        if (c.first_trial_answer && c.self_checked_answer) ++both;
    if (both < 2)
        fail(Errc::insufficient_chains,
             "question '" + question_id + "': only " + std::to_string(both) +
                 " chains produced both answers");
    set.first_trial_dist = empirical_distribution(ft);
    set.self_check_dist = empirical_distribution(sc);
    return set;
}

std::vector<ChainRecord> run_chains(const QuestionRecord& q, const PipelineContext& ctx) {
    ctx.manifest.validate();
    const int n = ctx.manifest.n_chains;
    std::vector<std::future<ChainRecord>> futures;
    futures.reserve(n);
    for (int i = 0; i < n; ++i) {
        futures.push_back(std::async(std::launch::async,
                                     [&q, &ctx, i] { return run_chain(q, ctx, i); }));
    }
    std::vector<ChainRecord> chains;
    chains.reserve(n);
    for (auto& f : futures) chains.push_back(f.get());
    return chains;
}

ChainSet run_question(const QuestionRecord& q, const PipelineContext& ctx) {
    return assemble_chain_set(q.id, run_chains(q, ctx));
}

LabeledExample label_question(const QuestionRecord& q, const PipelineContext& ctx) {
    ctx.manifest.validate();
    PromptSlots slots;
    slots["q"] = q.text;
    if (q.choices) slots["c"] = format_choices(*q.choices);
    if (q.passage) slots["p"] = *q.passage;
    const std::string prompt =
        ctx.prompts->render_stage(Stage::answer, q.task_type, slots);

    int correct = 0;
    for (int i = 0; i < ctx.manifest.label_samples; ++i) {
        GenRequest req;
        req.prompt = prompt;
        req.temperature = ctx.manifest.decoding.temperature;
        req.top_p = ctx.manifest.decoding.top_p;
        req.max_tokens = ctx.manifest.decoding.max_tokens > 0
                             ? ctx.manifest.decoding.max_tokens
                             : default_max_tokens(q.task_type);
        req.n = 1;
        req.seed = derive_seed(ctx.manifest.seed, q.id, "label",
                               static_cast<uint64_t>(i));
        req.purpose = "label";
        GenResponse resp = ctx.backend->generate(req);
        try {
            const std::string ans =
                extract_answer(resp.completions.at(0).text, q.task_type);
            if (grade(ans, q.gold_answers, q.task_type)) ++correct;
        } catch (const Error&) {
            // failed extraction counts incorrect
        }
    }
    LabeledExample ex;
    ex.question_id = q.id;
    ex.empirical_accuracy =
        static_cast<double>(correct) / static_cast<double>(ctx.manifest.label_samples);
    ex.uncertain = ex.empirical_accuracy < ctx.manifest.label_threshold;
    return ex;
}

} // namespace uprof
