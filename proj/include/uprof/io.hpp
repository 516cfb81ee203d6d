#pragma once
// Dataset ingestion and run persistence. A RunStore is a directory:
//   manifest.json, chains.jsonl, labels.jsonl, profiles.jsonl,
//   timings.jsonl, metric_scores/<metric>.jsonl, reports/
// Single writer (lock file), append-only during a run.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uprof/core.hpp"
#include "uprof/pipeline.hpp"

namespace uprof::io {

enum class Adapter { generic, mc_csqa_like, rc_trivia_like, essay_math_like };

Adapter adapter_from(const std::string& name);

struct IngestReport {
    std::vector<QuestionRecord> records;
    std::map<std::string, int> counts_per_task;  // task name -> count
    std::vector<std::string> warnings;
};

// Reads `path`, normalizes through the adapter, validates every record.
// Throws Errc::schema_error with the line number, Errc::duplicate_id with
// the id and both lines.
IngestReport ingest(const std::string& path, Adapter adapter);

std::vector<QuestionRecord> load_dataset(const std::string& path);
void save_dataset(const std::string& path, const std::vector<QuestionRecord>& records);

class RunStore {
public:
    // Opens (creating if needed) the run directory. `writer` acquires the
    // lock file; concurrent writers fail.
    RunStore(std::filesystem::path dir, bool writer);
    ~RunStore();

    RunStore(const RunStore&) = delete;
    RunStore& operator=(const RunStore&) = delete;

    const std::filesystem::path& dir() const { return dir_; }

    void write_manifest(const RunManifest& m);
    std::optional<RunManifest> read_manifest() const;

    // Appends one question's chains as a contiguous block.
    void append_chains(const std::vector<ChainRecord>& chains);
    std::vector<ChainRecord> read_chains() const;
    // question ids with a full block of n_chains records
    std::vector<std::string> completed_question_ids(int n_chains) const;
    // Drops trailing partial blocks left by an interrupted run.
    void prune_incomplete_chains(int n_chains);

    void append_label(const LabeledExample& ex);
    std::vector<LabeledExample> read_labels() const;

    void append_profile(const std::string& question_id, const SourceProfile& p);
    std::map<std::string, SourceProfile> read_profiles() const;

    void write_metric_scores(const std::string& metric,
                             const std::map<std::string, double>& scores,
                             const std::map<std::string, std::string>& errors);
    std::map<std::string, double> read_metric_scores(const std::string& metric) const;
    std::vector<std::string> available_metrics() const;

    void append_timing(const std::string& question_id,
                       const std::map<std::string, double>& stage_seconds);

    std::filesystem::path reports_dir() const;

private:
    std::filesystem::path dir_;
    bool writer_ = false;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace uprof::io
