#include "uprof/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uprof/serde.hpp"

namespace uprof::io {

using nlohmann::json;
namespace fs = std::filesystem;

Adapter adapter_from(const std::string& name) {
    if (name == "generic") return Adapter::generic;
    if (name == "mc_csqa_like") return Adapter::mc_csqa_like;
    if (name == "rc_trivia_like") return Adapter::rc_trivia_like;
    if (name == "essay_math_like") return Adapter::essay_math_like;
    fail(Errc::usage_error, "unknown adapter '" + name + "'");
}

namespace {

json parse_line(const std::string& line, int line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
        fail(Errc::schema_error,
             "line " + std::to_string(line_no) + ": invalid JSON");
    return j;
}

// csqa-like: {"id", "question": {"stem", "choices": [{"label","text"},..]},
// "answerKey"}. Assumes labels are A..E in order.
QuestionRecord adapt_csqa(const json& j, int line_no) {
    QuestionRecord q;
    q.id = j.at("id").get<std::string>();
    q.task_type = TaskType::mc;
    q.text = j.at("question").at("stem").get<std::string>();
    std::vector<std::string> choices;
    for (const auto& c : j.at("question").at("choices"))
        choices.push_back(c.at("text").get<std::string>());
    q.choices = std::move(choices);
    q.gold_answers = {j.at("answerKey").get<std::string>()};
    (void)line_no;
    return q;
}

// trivia-like: {"question_id"|"id", "question", "answer": {"value",
// "aliases": [..]}, "evidence"|"passage"}. Aliases become gold answers.
QuestionRecord adapt_trivia(const json& j, int line_no) {
    QuestionRecord q;
    q.id = j.contains("question_id") ? j["question_id"].get<std::string>()
                                     : j.at("id").get<std::string>();
    q.task_type = TaskType::rc;
    q.text = j.at("question").get<std::string>();
    if (j.contains("passage"))
        q.passage = j["passage"].get<std::string>();
    else if (j.contains("evidence"))
        q.passage = j["evidence"].get<std::string>();
    else
        fail(Errc::schema_error,
             "line " + std::to_string(line_no) + ": missing passage/evidence");
    const auto& ans = j.at("answer");
    q.gold_answers.push_back(ans.at("value").get<std::string>());
    if (ans.contains("aliases"))
        for (const auto& a : ans["aliases"])
            q.gold_answers.push_back(a.get<std::string>());
    return q;
}

// math-like: {"id"?, "problem", "answer"|"solution"}. The boxed content of
// the solution becomes the gold answer when "answer" is absent.
QuestionRecord adapt_math(const json& j, int line_no) {
    QuestionRecord q;
    q.id = j.contains("id") ? j["id"].get<std::string>()
                            : "math-" + std::to_string(line_no);
    q.task_type = TaskType::essay;
    q.text = j.at("problem").get<std::string>();
    if (j.contains("answer")) {
        q.gold_answers = {j["answer"].get<std::string>()};
    } else if (j.contains("solution")) {
        const std::string sol = j["solution"].get<std::string>();
        try {
            q.gold_answers = {extract_answer(sol, TaskType::essay)};
        } catch (const Error&) {
            fail(Errc::schema_error,
                 "line " + std::to_string(line_no) +
                     ": solution has no \\boxed{...} answer");
        }
    } else {
        fail(Errc::schema_error,
             "line " + std::to_string(line_no) + ": missing answer/solution");
    }
    return q;
}

} // namespace

IngestReport ingest(const std::string& path, Adapter adapter) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
    IngestReport report;
    std::map<std::string, int> first_line_of_id;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const json j = parse_line(line, line_no);
        QuestionRecord q;
        try {
            switch (adapter) {
                case Adapter::generic: q = question_from_json(j); break;
                case Adapter::mc_csqa_like: q = adapt_csqa(j, line_no); break;
                case Adapter::rc_trivia_like: q = adapt_trivia(j, line_no); break;
                case Adapter::essay_math_like: q = adapt_math(j, line_no); break;
            }
            q.validate();
        } catch (const Error& e) {
            if (e.code() == Errc::schema_error)
                fail(Errc::schema_error,
                     "line " + std::to_string(line_no) + ": " + e.what());
            throw;
        } catch (const json::exception& e) {
            fail(Errc::schema_error,
                 "line " + std::to_string(line_no) + ": " + e.what());
        }
        auto [it, inserted] = first_line_of_id.emplace(q.id, line_no);
        if (!inserted)
            fail(Errc::duplicate_id, "id '" + q.id + "' on lines " +
                                         std::to_string(it->second) + " and " +
                                         std::to_string(line_no));
        report.counts_per_task[task_type_name(q.task_type)] += 1;
        report.records.push_back(std::move(q));
    }
    return report;
}

std::vector<QuestionRecord> load_dataset(const std::string& path) {
    return ingest(path, Adapter::generic).records;
}

void save_dataset(const std::string& path, const std::vector<QuestionRecord>& records) {
    std::ofstream out(path);
    if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
    for (const auto& q : records) out << question_to_json(q).dump() << "\n";
}

RunStore::RunStore(fs::path dir, bool writer) : dir_(std::move(dir)), writer_(writer) {
    fs::create_directories(dir_);
    fs::create_directories(dir_ / "metric_scores");
    fs::create_directories(dir_ / "reports");
    if (writer_) {
        const fs::path lock = dir_ / ".lock";
        if (fs::exists(lock))
            fail(Errc::io_error,
                 "run directory is locked by another writer (" + lock.string() + ")");
        std::ofstream out(lock);
        out << "locked\n";
    }
}

RunStore::~RunStore() {
    if (writer_) {
        std::error_code ec;
        fs::remove(dir_ / ".lock", ec);
    }
}

namespace {

void append_line(const fs::path& path, const std::string& line) {
    std::ofstream out(path, std::ios::app);
    if (!out) fail(Errc::io_error, "cannot append to '" + path.string() + "'");
    out << line << "\n";
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::vector<json> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            fail(Errc::schema_error, path.string() + " line " +
                                         std::to_string(line_no) + ": invalid JSON");
        out.push_back(std::move(j));
    }
    return out;
}

} // namespace

void RunStore::write_manifest(const RunManifest& m) {
    write_text_file(dir_ / "manifest.json", manifest_to_json(m).dump(2) + "\n");
}

std::optional<RunManifest> RunStore::read_manifest() const {
    const fs::path p = dir_ / "manifest.json";
    if (!fs::exists(p)) return std::nullopt;
    return manifest_from_json(json::parse(read_text_file(p)));
}

void RunStore::append_chains(const std::vector<ChainRecord>& chains) {
    std::ostringstream block;
    for (const auto& c : chains) block << chain_to_json(c).dump() << "\n";
    std::ofstream out(dir_ / "chains.jsonl", std::ios::app);
    if (!out) fail(Errc::io_error, "cannot append chains");
    out << block.str();
    out.flush();
}

std::vector<ChainRecord> RunStore::read_chains() const {
    std::vector<ChainRecord> chains;
    for (const auto& j : read_jsonl(dir_ / "chains.jsonl"))
        chains.push_back(chain_from_json(j));
    return chains;
}

std::vector<std::string> RunStore::completed_question_ids(int n_chains) const {
    std::map<std::string, int> counts;
    std::vector<std::string> order;
    for (const auto& c : read_chains()) {
        if (counts[c.question_id] == 0) order.push_back(c.question_id);
        counts[c.question_id] += 1;
    }
    std::vector<std::string> done;
    for (const auto& id : order)
        if (counts[id] >= n_chains) done.push_back(id);
    return done;
}

void RunStore::prune_incomplete_chains(int n_chains) {
    const auto chains = read_chains();
    std::map<std::string, int> counts;
    for (const auto& c : chains) counts[c.question_id] += 1;
    bool has_partial = false;
    for (const auto& [id, n] : counts)
        if (n < n_chains) has_partial = true;
    if (!has_partial) return;
    std::ostringstream keep;
    for (const auto& c : chains)
        if (counts[c.question_id] >= n_chains) keep << chain_to_json(c).dump() << "\n";
    write_text_file(dir_ / "chains.jsonl", keep.str());
}

void RunStore::append_label(const LabeledExample& ex) {
    append_line(dir_ / "labels.jsonl", label_to_json(ex).dump());
}

std::vector<LabeledExample> RunStore::read_labels() const {
    std::vector<LabeledExample> labels;
    for (const auto& j : read_jsonl(dir_ / "labels.jsonl"))
        labels.push_back(label_from_json(j));
    return labels;
}

void RunStore::append_profile(const std::string& question_id, const SourceProfile& p) {
    append_line(dir_ / "profiles.jsonl", profile_to_json(question_id, p).dump());
}

std::map<std::string, SourceProfile> RunStore::read_profiles() const {
    std::map<std::string, SourceProfile> profiles;
    for (const auto& j : read_jsonl(dir_ / "profiles.jsonl"))
        profiles.insert(profile_from_json(j));
    return profiles;
}

void RunStore::write_metric_scores(const std::string& metric,
                                   const std::map<std::string, double>& scores,
                                   const std::map<std::string, std::string>& errors) {
    std::ostringstream body;
    for (const auto& [id, score] : scores) {
        body << json{{"schema_version", kSchemaVersion},
                     {"question_id", id},
                     {"metric", metric},
                     {"score", score}}
                    .dump()
             << "\n";
    }
    for (const auto& [id, message] : errors) {
        body << json{{"schema_version", kSchemaVersion},
                     {"question_id", id},
                     {"metric", metric},
                     {"error", message}}
                    .dump()
             << "\n";
    }
    write_text_file(dir_ / "metric_scores" / (metric + ".jsonl"), body.str());
}

std::map<std::string, double> RunStore::read_metric_scores(const std::string& metric) const {
    std::map<std::string, double> scores;
    const fs::path p = dir_ / "metric_scores" / (metric + ".jsonl");
    if (!fs::exists(p))
        fail(Errc::missing_runs, "no metric scores for '" + metric + "'");
    for (const auto& j : read_jsonl(p)) {
        if (j.contains("score"))
            scores[j.at("question_id").get<std::string>()] = j["score"].get<double>();
    }
    return scores;
}

std::vector<std::string> RunStore::available_metrics() const {
    std::vector<std::string> metrics;
    const fs::path dir = dir_ / "metric_scores";
    if (!fs::is_directory(dir)) return metrics;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() == ".jsonl")
            metrics.push_back(entry.path().stem().string());
    }
    std::sort(metrics.begin(), metrics.end());
    return metrics;
}

void RunStore::append_timing(const std::string& question_id,
                             const std::map<std::string, double>& stage_seconds) {
    append_line(dir_ / "timings.jsonl",
                json{{"question_id", question_id}, {"stage_seconds", stage_seconds}}.dump());
}

fs::path RunStore::reports_dir() const { return dir_ / "reports"; }

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write '" + path.string() + "'");
    out << content;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot read '" + path.string() + "'");
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

} // namespace uprof::io
