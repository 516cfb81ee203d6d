#include "uprof/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "uprof/mock_backend.hpp"
#include "uprof/pipeline.hpp"
#include "uprof/rng.hpp"
#include "uprof/stats.hpp"
#include "uprof/textdist.hpp"

namespace uprof::metrics {
namespace {

PromptSlots question_slots(const QuestionRecord& q) {
    PromptSlots slots;
    slots["q"] = q.text;
    if (q.choices) slots["c"] = format_choices(*q.choices);
    if (q.passage) slots["p"] = *q.passage;
    return slots;
}

GenRequest base_request(const QuestionRecord& q, const MetricContext& ctx,
                        const MetricSpec& spec, const std::string& prompt,
                        uint64_t call_index) {
    GenRequest req;
    req.prompt = prompt;
    req.temperature = ctx.decoding.temperature;
    req.top_p = ctx.decoding.top_p;
    req.max_tokens = ctx.decoding.max_tokens > 0 ? ctx.decoding.max_tokens
                                                 : default_max_tokens(q.task_type);
    req.n = 1;
    req.seed = derive_seed(ctx.run_seed, metric_name(spec.name), q.id, call_index);
    req.purpose = metric_name(spec.name);
    return req;
}

std::string answer_prompt(const QuestionRecord& q, const MetricContext& ctx) {
    return ctx.prompts->render_stage(Stage::answer, q.task_type, question_slots(q));
}

// M samples of the answer-stage prompt on the original question.
std::vector<Completion> sample_answers(const QuestionRecord& q, const MetricContext& ctx,
                                       const MetricSpec& spec, int m,
                                       bool want_logprobs) {
    const std::string prompt = answer_prompt(q, ctx);
    std::vector<Completion> out;
    out.reserve(m);
    for (int i = 0; i < m; ++i) {
        GenRequest req = base_request(q, ctx, spec, prompt, static_cast<uint64_t>(i));
        req.want_logprobs = want_logprobs;
        GenResponse resp = ctx.backend->generate(req);
        out.push_back(std::move(resp.completions.at(0)));
    }
    return out;
}

std::string candidate_answer(const QuestionRecord& q, const Completion& completion) {
    try {
        return extract_answer(completion.text, q.task_type);
    } catch (const Error&) {
        return completion.text;
    }
}

double checked_sum_logprob(const Completion& c) {
    if (!c.sum_logprob)
        fail(Errc::logprobs_unavailable, "backend returned no logprobs");
    if (*c.sum_logprob > 1e-9)
        fail(Errc::server_error, "positive sum logprob (data corruption)");
    return std::min(*c.sum_logprob, 0.0);
}

} // namespace

std::optional<int> parse_last_confidence(const std::string& reply) {
    std::optional<int> last;
    size_t i = 0;
    while (i < reply.size()) {
        if (std::isdigit(static_cast<unsigned char>(reply[i]))) {
            size_t j = i;
            while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j])))
                ++j;
            if (j - i <= 3) {
                const int v = std::stoi(reply.substr(i, j - i));
                if (v >= 0 && v <= 100) last = v;
            }
            i = j;
        } else {
            ++i;
        }
    }
    return last;
}

// First true/false occurrence, case-insensitive.
std::optional<bool> parse_verdict(const std::string& reply) {
    std::string lower(reply.size(), '\0');
    std::transform(reply.begin(), reply.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const size_t t = lower.find("true");
    const size_t f = lower.find("false");
    if (t == std::string::npos && f == std::string::npos) return std::nullopt;
    if (f == std::string::npos) return true;
    if (t == std::string::npos) return false;
    return t < f;
}

double lexsim_from_texts(const std::vector<std::string>& texts) {
    if (texts.size() < 2)
        fail(Errc::too_few_samples, "lexsim needs at least 2 responses");
    double sum = 0.0;
    int pairs = 0;
    for (size_t i = 0; i < texts.size(); ++i) {
        for (size_t j = i + 1; j < texts.size(); ++j) {
            sum += text::rouge_l_f(texts[i], texts[j]);
            ++pairs;
        }
    }
    return std::clamp(1.0 - sum / static_cast<double>(pairs), 0.0, 1.0);
}

double spuq_from_answers(const std::string& original_answer,
                         const std::vector<std::string>& perturbed_answers) {
    if (perturbed_answers.empty())
        fail(Errc::too_few_samples, "spuq needs at least 1 perturbation");
    double sim = 0.0;
    for (const auto& a : perturbed_answers)
        sim += text::rouge_l_f(original_answer, a);
    return std::clamp(1.0 - sim / static_cast<double>(perturbed_answers.size()), 0.0,
                      1.0);
}

const char* metric_name(MetricName m) {
    switch (m) {
        case MetricName::npe: return "npe";
        case MetricName::lnpe: return "lnpe";
        case MetricName::se: return "se";
        case MetricName::lexsim: return "lexsim";
        case MetricName::vc_neg: return "vc_neg";
        case MetricName::ptrue_comp: return "ptrue_comp";
        case MetricName::spuq_comp: return "spuq_comp";
        case MetricName::ipt_eu: return "ipt_eu";
    }
    return "npe";
}

MetricName metric_from(const std::string& name) {
    for (MetricName m : all_metrics())
        if (name == metric_name(m)) return m;
    fail(Errc::usage_error, "unknown metric '" + name + "'");
}

std::vector<MetricName> all_metrics() {
    return {MetricName::npe,    MetricName::lnpe,       MetricName::se,
            MetricName::lexsim, MetricName::vc_neg,     MetricName::ptrue_comp,
            MetricName::spuq_comp, MetricName::ipt_eu};
}

int MetricSpec::effective_samples() const {
    if (samples > 0) return samples;
    switch (name) {
        case MetricName::npe:
        case MetricName::lnpe:
        case MetricName::se:
        case MetricName::lexsim:
            return 32;
        case MetricName::vc_neg:
        case MetricName::ptrue_comp:
            return 3;
        case MetricName::spuq_comp:
            return spuq_perturbations;
        case MetricName::ipt_eu:
            return ipt_chains;
    }
    return 1;
}

double npe(const QuestionRecord& q, const MetricContext& ctx, const MetricSpec& spec) {
    if (!ctx.backend->supports_logprobs())
        fail(Errc::logprobs_unavailable, "NPE requires sequence logprobs");
    const auto samples = sample_answers(q, ctx, spec, spec.effective_samples(), true);
    double sum = 0.0;
    for (const auto& s : samples) sum += checked_sum_logprob(s);
    return -sum / static_cast<double>(samples.size());
}

double lnpe(const QuestionRecord& q, const MetricContext& ctx, const MetricSpec& spec) {
    if (!ctx.backend->supports_logprobs())
        fail(Errc::logprobs_unavailable, "LNPE requires sequence logprobs");
    const auto samples = sample_answers(q, ctx, spec, spec.effective_samples(), true);
    double sum = 0.0;
    for (const auto& s : samples) {
        const double lp = checked_sum_logprob(s);
        const int tokens = std::max(s.token_count.value_or(1), 1);
        sum += lp / static_cast<double>(tokens);
    }
    return -sum / static_cast<double>(samples.size());
}

double semantic_entropy(const QuestionRecord& q, const MetricContext& ctx,
                        const MetricSpec& spec) {
    const auto samples = sample_answers(q, ctx, spec, spec.effective_samples(), false);
    std::map<std::string, int> exact_clusters;
    std::vector<std::string> freeform;
    for (const auto& s : samples) {
        try {
            exact_clusters[extract_answer(s.text, q.task_type)] += 1;
        } catch (const Error&) {
            freeform.push_back(s.text);
        }
    }
    std::vector<int> counts;
    for (const auto& [a, c] : exact_clusters) counts.push_back(c);
    // greedy agglomeration of unparseable outputs under cosine similarity
    std::vector<std::pair<std::vector<double>, int>> agglom;
    for (const auto& text : freeform) {
        const auto emb = ctx.backend->embed(text);
        bool placed = false;
        for (auto& [rep, count] : agglom) {
            if (stats::cosine_similarity(rep, emb) >= spec.se_cluster_threshold) {
                ++count;
                placed = true;
                break;
            }
        }
        if (!placed) agglom.emplace_back(emb, 1);
    }
    for (const auto& [rep, c] : agglom) counts.push_back(c);

    const double m = static_cast<double>(samples.size());
    double h = 0.0;
    for (int c : counts) {
        const double p = static_cast<double>(c) / m;
        h -= p * std::log(p);
    }
    return std::max(h, 0.0);
}

double lexsim_uncertainty(const QuestionRecord& q, const MetricContext& ctx,
                          const MetricSpec& spec) {
    const int m = spec.effective_samples();
    if (m < 2) fail(Errc::too_few_samples, "lexsim needs at least 2 samples");
    const auto samples = sample_answers(q, ctx, spec, m, false);
    std::vector<std::string> texts;
    texts.reserve(samples.size());
    for (const auto& s : samples) texts.push_back(s.text);
    return lexsim_from_texts(texts);
}

double vc_neg(const QuestionRecord& q, const MetricContext& ctx, const MetricSpec& spec) {
    const auto first = sample_answers(q, ctx, spec, 1, false);
    PromptSlots slots = question_slots(q);
    slots["a"] = candidate_answer(q, first.at(0));
    const std::string prompt = ctx.prompts->render("vc", slots);
    double sum = 0.0;
    int parsed = 0;
    const int m = spec.effective_samples();
    for (int i = 0; i < m; ++i) {
        GenRequest req = base_request(q, ctx, spec, prompt, 1000 + static_cast<uint64_t>(i));
        req.purpose = "vc";
        const auto resp = ctx.backend->generate(req);
        if (auto conf = parse_last_confidence(resp.completions.at(0).text)) {
            sum += static_cast<double>(*conf);
            ++parsed;
        }
    }
    if (parsed == 0)
        fail(Errc::unparseable_confidence, "no reply contained an integer in [0,100]");
    return -sum / static_cast<double>(parsed);
}

double ptrue_from_verdict_logprobs(double logprob_true, double logprob_false) {
    const double pt = std::exp(logprob_true);
    const double pf = std::exp(logprob_false);
    return pt / (pt + pf);
}

double ptrue_comp(const QuestionRecord& q, const MetricContext& ctx,
                  const MetricSpec& spec) {
    const auto first = sample_answers(q, ctx, spec, 1, false);
    PromptSlots slots = question_slots(q);
    slots["a"] = candidate_answer(q, first.at(0));
    const std::string prompt = ctx.prompts->render("ptrue", slots);

    if (ctx.backend->supports_logprobs()) {
        GenRequest req = base_request(q, ctx, spec, prompt, 2000);
        req.purpose = "ptrue";
        req.want_logprobs = true;
        const auto resp = ctx.backend->generate(req);
        const auto& top = resp.completions.at(0).first_token_top_logprobs;
        std::optional<double> lp_true, lp_false;
        for (const auto& [token, lp] : top) {
            std::string t = token;
            std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) {
                return static_cast<char>(std::tolower(c));
            });
            while (!t.empty() && t.front() == ' ') t.erase(t.begin());
            if (t == "true" && !lp_true) lp_true = lp;
            if (t == "false" && !lp_false) lp_false = lp;
        }
        if (lp_true && lp_false)
            return 1.0 - ptrue_from_verdict_logprobs(*lp_true, *lp_false);
        // fall through to sampling when the decision tokens are absent
    }

    int trues = 0, parsed = 0;
    const int m = spec.effective_samples();
    for (int i = 0; i < m; ++i) {
        GenRequest req = base_request(q, ctx, spec, prompt, 2000 + static_cast<uint64_t>(i));
        req.purpose = "ptrue";
        const auto resp = ctx.backend->generate(req);
        if (auto verdict = parse_verdict(resp.completions.at(0).text)) {
            ++parsed;
            if (*verdict) ++trues;
        }
    }
    if (parsed == 0)
        fail(Errc::unparseable_verdict, "no reply contained True or False");
    return 1.0 - static_cast<double>(trues) / static_cast<double>(parsed);
}

double spuq_comp(const QuestionRecord& q, const MetricContext& ctx,
                 const MetricSpec& spec) {
    const auto original = sample_answers(q, ctx, spec, 1, false);
    const std::string& original_answer = original.at(0).text;

    const int k = spec.spuq_perturbations;
    std::vector<std::string> perturbed_answers;
    perturbed_answers.reserve(k);
    for (int i = 0; i < k; ++i) {
        PromptSlots pslots{{"q", q.text}};
        GenRequest preq = base_request(q, ctx, spec,
                                       ctx.prompts->render("paraphrase", pslots),
                                       3000 + static_cast<uint64_t>(i));
        preq.purpose = "paraphrase";
        const std::string perturbed =
            ctx.backend->generate(preq).completions.at(0).text;

        QuestionRecord pq = q;
        pq.text = perturbed;
        GenRequest areq = base_request(q, ctx, spec, answer_prompt(pq, ctx),
                                       4000 + static_cast<uint64_t>(i));
        perturbed_answers.push_back(ctx.backend->generate(areq).completions.at(0).text);
    }
    return spuq_from_answers(original_answer, perturbed_answers);
}

double ipt_score_from_transcripts(const std::vector<std::vector<std::string>>& chains) {
    if (chains.empty()) return 0.0;
    // marginal frequencies over all chain-steps
    std::map<std::string, double> marginal;
    double total = 0.0;
    for (const auto& chain : chains) {
        for (const auto& a : chain) {
            marginal[a] += 1.0;
            total += 1.0;
        }
    }
    if (total == 0.0) return 0.0;
    for (auto& [a, c] : marginal) c /= total;

    double score_sum = 0.0;
    for (const auto& chain : chains) {
        double chain_sum = 0.0;
        for (size_t t = 1; t < chain.size(); ++t) {
            // conditional: among chains sharing this exact t-prefix history,
            // frequency of the answer taken at step t
            double hits = 0.0, base = 0.0;
            for (const auto& other : chains) {
                if (other.size() <= t) continue;
                if (!std::equal(chain.begin(), chain.begin() + t, other.begin()))
                    continue;
                base += 1.0;
                if (other[t] == chain[t]) hits += 1.0;
            }
            if (base == 0.0) continue;
            const double cond = hits / base;
            const double marg = marginal[chain[t]];
            if (cond > 0.0 && marg > 0.0) chain_sum += std::log(cond / marg);
        }
        score_sum += std::max(chain_sum, 0.0);
    }
    return score_sum / static_cast<double>(chains.size());
}

double ipt_eu(const QuestionRecord& q, const MetricContext& ctx, const MetricSpec& spec) {
    const std::string base_prompt = answer_prompt(q, ctx);
    std::vector<std::vector<std::string>> transcripts;
    for (int c = 0; c < spec.ipt_chains; ++c) {
        std::vector<std::string> answers;
        for (int t = 0; t < spec.ipt_depth; ++t) {
            std::string prompt = base_prompt;
            if (!answers.empty()) {
                std::string prev;
                for (size_t i = 0; i < answers.size(); ++i) {
                    if (i > 0) prev += ", ";
                    prev += answers[i];
                }
                prompt += ctx.prompts->render("ipt_suffix", {{"prev", prev}});
            }
            GenRequest req = base_request(
                q, ctx, spec, prompt,
                5000 + static_cast<uint64_t>(c) * 100 + static_cast<uint64_t>(t));
            req.purpose = t == 0 ? std::string(metric_name(spec.name)) : "ipt";
            const auto resp = ctx.backend->generate(req);
            std::string ans;
            try {
                ans = extract_answer(resp.completions.at(0).text, q.task_type);
            } catch (const Error&) {
                ans = "<extraction_failed>";
            }
            answers.push_back(std::move(ans));
        }
        transcripts.push_back(std::move(answers));
    }
    return ipt_score_from_transcripts(transcripts);
}

double score_one(const QuestionRecord& q, const MetricContext& ctx,
                 const MetricSpec& spec) {
    switch (spec.name) {
        case MetricName::npe: return npe(q, ctx, spec);
        case MetricName::lnpe: return lnpe(q, ctx, spec);
        case MetricName::se: return semantic_entropy(q, ctx, spec);
        case MetricName::lexsim: return lexsim_uncertainty(q, ctx, spec);
        case MetricName::vc_neg: return vc_neg(q, ctx, spec);
        case MetricName::ptrue_comp: return ptrue_comp(q, ctx, spec);
        case MetricName::spuq_comp: return spuq_comp(q, ctx, spec);
        case MetricName::ipt_eu: return ipt_eu(q, ctx, spec);
    }
    fail(Errc::usage_error, "unknown metric");
}

BatchResult score_metric(const MetricSpec& spec,
                         const std::vector<QuestionRecord>& questions,
                         const MetricContext& ctx) {
    BatchResult result;
    for (const auto& q : questions) {
        try {
            result.scores[q.id] = score_one(q, ctx, spec);
        } catch (const std::exception& e) {
            result.errors[q.id] = e.what();
        }
    }
    return result;
}

} // namespace uprof::metrics
