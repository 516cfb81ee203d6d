#pragma once
// CLI subcommand implementations. The uprof binary is a thin flag parser
// over these, and the acceptance suite drives the same code paths.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uprof/backend.hpp"
#include "uprof/core.hpp"
#include "uprof/io.hpp"
#include "uprof/synthlab.hpp"

namespace uprof::cmd {

struct IngestOptions {
    std::string input;
    std::string output;
    std::string adapter = "generic";
    std::optional<int> sample;      // subsample size (App-B.3-style protocol)
    std::optional<uint64_t> seed;   // required when sample set
};
void ingest(const IngestOptions& opt, std::ostream& log);

struct RunPipelineOptions {
    std::string dataset;
    std::string backend_spec;  // mock:FILE or http:URL
    std::string run_dir;
    std::string model_id = "model";
    int n_chains = 8;
    uint64_t seed = 0;
    bool resume = false;
    std::optional<int> limit;  // process at most this many pending questions
    DecodingParams decoding;
    std::optional<std::string> prompt_dir;
};
void run_pipeline(const RunPipelineOptions& opt, std::ostream& log);

struct LabelOptions {
    std::string dataset;
    std::string backend_spec;
    std::string run_dir;
    std::string model_id = "model";
    int samples = 32;
    double threshold = 0.70;
    uint64_t seed = 0;
    DecodingParams decoding;
};
void label(const LabelOptions& opt, std::ostream& log);

struct EstimateOptions {
    std::string dataset;
    std::string backend_spec;  // embeddings
    std::string run_dir;
    std::string lex_method = "rouge_l";  // rouge_l | rouge_n | bleu_n
    int lex_order = 1;
    std::string sem_method = "cosine";   // cosine | l1 | l2
};
void estimate(const EstimateOptions& opt, std::ostream& log);

struct MetricsOptions {
    std::string dataset;
    std::string backend_spec;
    std::string run_dir;
    std::vector<std::string> metrics;  // empty = all eight
    uint64_t seed = 0;
    std::optional<int> samples;
    DecodingParams decoding;
};
void metrics(const MetricsOptions& opt, std::ostream& log);

struct ProfileOptions {
    std::vector<std::string> runs;
    std::string out_dir;
    bool bootstrap = true;
    int bootstrap_resamples = 500;
    int difficulty_bins = 4;
};
void profile(const ProfileOptions& opt, std::ostream& log);

struct SelectOptions {
    int scenario = 1;
    std::string dataset_vec_file;
    std::string model_vec_file;    // scenario 3
    std::string candidates_file;   // metric vecs (s1/s3) or model vecs (s2)
    std::string out_csv;
};
void select(const SelectOptions& opt, std::ostream& log);

struct EvaluateOptions {
    int scenario = 1;
    std::vector<std::string> runs;
    std::string out_dir;
    int random_samplings = 100;
    uint64_t seed = 0;
    int ndcg_k_max = 0;  // 0 = full list (fig-6 heatmap covers 1..n)
};
void evaluate(const EvaluateOptions& opt, std::ostream& log);

struct ReportOptions {
    std::vector<std::string> runs;
    std::string out_dir;
    bool bootstrap = true;
    uint64_t seed = 0;
};
void report(const ReportOptions& opt, std::ostream& log);

struct SynthlabOptions {
    std::string kind = "knowledge_gap";
    int n_questions = 200;
    double positive_rate = 0.4;
    uint64_t seed = 0;
    int n_chains = 8;
    std::string out_dir;
    std::optional<std::string> emit_script;  // dump population JSON here
};
synth::ValidationReport synthlab(const SynthlabOptions& opt, std::ostream& log);

// Maps an Errc to the documented exit codes: 1 usage, 2 data/schema,
// 3 backend, 4 insufficient data.
int exit_code_for(Errc code);

} // namespace uprof::cmd
