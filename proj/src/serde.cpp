#include "uprof/serde.hpp"

namespace uprof {

using nlohmann::json;

json question_to_json(const QuestionRecord& q) {
    json j{{"schema_version", kSchemaVersion},
           {"id", q.id},
           {"task_type", task_type_name(q.task_type)},
           {"question", q.text},
           {"answers", q.gold_answers}};
    if (q.choices) j["choices"] = *q.choices;
    if (q.passage) j["passage"] = *q.passage;
    if (!q.metadata.empty()) j["meta"] = q.metadata;
    return j;
}

QuestionRecord question_from_json(const json& j) {
    QuestionRecord q;
    q.id = j.at("id").get<std::string>();
    q.task_type = task_type_from(j.at("task_type").get<std::string>());
    q.text = j.at("question").get<std::string>();
    q.gold_answers = j.at("answers").get<std::vector<std::string>>();
    if (j.contains("choices") && !j["choices"].is_null())
        q.choices = j["choices"].get<std::vector<std::string>>();
    if (j.contains("passage") && !j["passage"].is_null())
        q.passage = j["passage"].get<std::string>();
    if (j.contains("meta") && !j["meta"].is_null())
        q.metadata = j["meta"].get<std::map<std::string, std::string>>();
    q.validate();
    return q;
}

json chain_to_json(const ChainRecord& c) {
    json j{{"schema_version", kSchemaVersion},
           {"chain_id", c.chain_id},
           {"question_id", c.question_id},
           {"paraphrase", c.paraphrase},
           {"clarification", c.clarification},
           {"first_trial_raw", c.first_trial_raw},
           {"self_checked_raw", c.self_checked_raw}};
    if (c.first_trial_answer) j["first_trial_answer"] = *c.first_trial_answer;
    if (c.self_checked_answer) j["self_checked_answer"] = *c.self_checked_answer;
    if (c.first_trial_logprob) {
        j["first_trial_logprob"] = {{"sum_logprob", c.first_trial_logprob->sum_logprob},
                                    {"token_count", c.first_trial_logprob->token_count}};
    }
    if (c.failed_stage) j["failed_stage"] = *c.failed_stage;
    if (c.failure_cause) j["failure_cause"] = *c.failure_cause;
    return j;
}

ChainRecord chain_from_json(const json& j) {
    ChainRecord c;
    c.chain_id = j.at("chain_id").get<int>();
    c.question_id = j.at("question_id").get<std::string>();
    c.paraphrase = j.value("paraphrase", "");
    c.clarification = j.value("clarification", "");
    c.first_trial_raw = j.value("first_trial_raw", "");
    c.self_checked_raw = j.value("self_checked_raw", "");
    if (j.contains("first_trial_answer"))
        c.first_trial_answer = j["first_trial_answer"].get<std::string>();
    if (j.contains("self_checked_answer"))
        c.self_checked_answer = j["self_checked_answer"].get<std::string>();
    if (j.contains("first_trial_logprob")) {
        LogprobInfo lp;
        lp.sum_logprob = j["first_trial_logprob"].at("sum_logprob").get<double>();
        lp.token_count = j["first_trial_logprob"].at("token_count").get<int>();
        c.first_trial_logprob = lp;
    }
    if (j.contains("failed_stage"))
        c.failed_stage = j["failed_stage"].get<std::string>();
    if (j.contains("failure_cause"))
        c.failure_cause = j["failure_cause"].get<std::string>();
    return c;
}

json label_to_json(const LabeledExample& ex) {
    return json{{"schema_version", kSchemaVersion},
                {"question_id", ex.question_id},
                {"empirical_accuracy", ex.empirical_accuracy},
                {"uncertain", ex.uncertain}};
}

LabeledExample label_from_json(const json& j) {
    LabeledExample ex;
    ex.question_id = j.at("question_id").get<std::string>();
    ex.empirical_accuracy = j.at("empirical_accuracy").get<double>();
    ex.uncertain = j.at("uncertain").get<bool>();
    return ex;
}

json profile_to_json(const std::string& question_id, const SourceProfile& p) {
    return json{{"schema_version", kSchemaVersion},
                {"question_id", question_id},
                {"su", p.su},
                {"au", p.au},
                {"eu", p.eu},
                {"ou", p.ou}};
}

std::pair<std::string, SourceProfile> profile_from_json(const json& j) {
    SourceProfile p;
    p.su = j.at("su").get<double>();
    p.au = j.at("au").get<double>();
    p.eu = j.at("eu").get<double>();
    p.ou = j.at("ou").get<double>();
    return {j.at("question_id").get<std::string>(), p};
}

json manifest_to_json(const RunManifest& m) {
    return json{{"schema_version", kSchemaVersion},
                {"model_id", m.model_id},
                {"dataset_id", m.dataset_id},
                {"n_chains", m.n_chains},
                {"label_samples", m.label_samples},
                {"label_threshold", m.label_threshold},
                {"decoding",
                 {{"temperature", m.decoding.temperature},
                  {"max_tokens", m.decoding.max_tokens},
                  {"top_p", m.decoding.top_p}}},
                {"seed", m.seed},
                {"backend_descriptor", m.backend_descriptor}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    m.model_id = j.at("model_id").get<std::string>();
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.n_chains = j.at("n_chains").get<int>();
    m.label_samples = j.at("label_samples").get<int>();
    m.label_threshold = j.at("label_threshold").get<double>();
    m.decoding.temperature = j.at("decoding").at("temperature").get<double>();
    m.decoding.max_tokens = j.at("decoding").at("max_tokens").get<int>();
    m.decoding.top_p = j.at("decoding").at("top_p").get<double>();
    m.seed = j.at("seed").get<uint64_t>();
    m.backend_descriptor = j.value("backend_descriptor", "");
    m.validate();
    return m;
}

json profile_vector_to_json(const ProfileVector& v) {
    return json{{"schema_version", kSchemaVersion},
                {"kind", profile_kind_name(v.kind)},
                {"label", v.label},
                {"values", v.values},
                {"scaled", v.scaled}};
}

ProfileVector profile_vector_from_json(const json& j) {
    ProfileVector v;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dataset") v.kind = ProfileKind::dataset;
    else if (kind == "model") v.kind = ProfileKind::model;
    else if (kind == "metric") v.kind = ProfileKind::metric;
    else fail(Errc::schema_error, "unknown profile kind '" + kind + "'");
    v.label = j.at("label").get<std::string>();
    const auto vals = j.at("values").get<std::vector<double>>();
    if (vals.size() != 4)
        fail(Errc::schema_error, "profile vector must have exactly 4 components");
    std::copy(vals.begin(), vals.end(), v.values.begin());
    v.scaled = j.value("scaled", false);
    if (v.scaled) {
        for (double x : v.values)
            if (x < 0.0 || x > 1.0)
                fail(Errc::schema_error, "scaled profile component outside [0,1]");
    }
    return v;
}

namespace {

json pool_to_json(const MockPool& pool) {
    json arr = json::array();
    for (const auto& opt : pool.options) {
        json o{{"text", opt.text}, {"prob", opt.prob}};
        if (opt.sum_logprob) o["sum_logprob"] = *opt.sum_logprob;
        if (opt.token_count) o["token_count"] = *opt.token_count;
        if (!opt.first_token_top_logprobs.empty())
            o["first_token_top_logprobs"] = opt.first_token_top_logprobs;
        arr.push_back(std::move(o));
    }
    return arr;
}

MockPool pool_from_json(const json& j) {
    MockPool pool;
    for (const auto& o : j) {
        MockOption opt;
        opt.text = o.at("text").get<std::string>();
        opt.prob = o.value("prob", 1.0);
        if (o.contains("sum_logprob")) opt.sum_logprob = o["sum_logprob"].get<double>();
        if (o.contains("token_count")) opt.token_count = o["token_count"].get<int>();
        if (o.contains("first_token_top_logprobs"))
            opt.first_token_top_logprobs =
                o["first_token_top_logprobs"].get<std::map<std::string, double>>();
        pool.options.push_back(std::move(opt));
    }
    return pool;
}

json pools_to_json(const std::map<std::string, MockPool>& pools) {
    json j = json::object();
    for (const auto& [stage, pool] : pools) j[stage] = pool_to_json(pool);
    return j;
}

std::map<std::string, MockPool> pools_from_json(const json& j) {
    std::map<std::string, MockPool> pools;
    for (const auto& [stage, pool] : j.items()) pools[stage] = pool_from_json(pool);
    return pools;
}

} // namespace

json mock_script_to_json(const MockScript& s) {
    json qs = json::array();
    for (const auto& q : s.questions) {
        qs.push_back(json{{"question_id", q.question_id},
                          {"match", q.match},
                          {"pools", pools_to_json(q.pools)}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"questions", std::move(qs)},
                {"default_pools", pools_to_json(s.default_pools)},
                {"logprobs_supported", s.logprobs_supported},
                {"embed_dim", s.embed_dim},
                {"salt", s.salt}};
}

MockScript mock_script_from_json(const json& j) {
    MockScript s;
    for (const auto& q : j.value("questions", json::array())) {
        MockQuestionScript qs;
        qs.question_id = q.at("question_id").get<std::string>();
        qs.match = q.value("match", qs.question_id);
        qs.pools = pools_from_json(q.value("pools", json::object()));
        s.questions.push_back(std::move(qs));
    }
    if (j.contains("default_pools")) s.default_pools = pools_from_json(j["default_pools"]);
    s.logprobs_supported = j.value("logprobs_supported", true);
    s.embed_dim = j.value("embed_dim", 16);
    s.salt = j.value("salt", static_cast<uint64_t>(0));
    return s;
}

json population_to_json(const synth::Population& p) {
    json qs = json::array();
    for (const auto& q : p.questions) qs.push_back(question_to_json(q));
    return json{{"schema_version", kSchemaVersion},
                {"kind", synth::scenario_kind_name(p.kind)},
                {"questions", std::move(qs)},
                {"script", mock_script_to_json(p.script)},
                {"ground_truth", p.ground_truth}};
}

synth::Population population_from_json(const json& j) {
    synth::Population p;
    p.kind = synth::scenario_kind_from(j.at("kind").get<std::string>());
    for (const auto& q : j.at("questions")) p.questions.push_back(question_from_json(q));
    p.script = mock_script_from_json(j.at("script"));
    p.ground_truth = j.at("ground_truth").get<std::map<std::string, bool>>();
    return p;
}

} // namespace uprof
