// uprof: decompose LLM response uncertainty into four sources, profile
// tasks/models/metrics, and run profile-guided metric/model selection.

#include <iostream>

#include <CLI11.hpp>

#include "uprof/commands.hpp"

namespace {

using namespace uprof;

void add_decoding_flags(CLI::App* app, DecodingParams& decoding) {
    app->add_option("--temperature", decoding.temperature, "sampling temperature");
    app->add_option("--top-p", decoding.top_p, "nucleus sampling threshold");
    app->add_option("--max-tokens", decoding.max_tokens,
                    "completion budget (0 = per-task default)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uncertainty profiling and profile-guided selection"};
    app.require_subcommand(1);

    cmd::IngestOptions ingest_opt;
    auto* ingest = app.add_subcommand("ingest", "normalize a dataset to JSONL");
    ingest->add_option("--input", ingest_opt.input, "source file")->required();
    ingest->add_option("--output", ingest_opt.output, "normalized JSONL")->required();
    ingest->add_option("--adapter", ingest_opt.adapter,
                       "generic|mc_csqa_like|rc_trivia_like|essay_math_like");
    int sample = 0;
    uint64_t sample_seed = 0;
    ingest->add_option("--sample", sample, "subsample this many questions");
    ingest->add_option("--seed", sample_seed, "seed for --sample");

    cmd::RunPipelineOptions pipe_opt;
    auto* pipe = app.add_subcommand("run-pipeline", "run the four-stage chains");
    pipe->add_option("--dataset", pipe_opt.dataset, "dataset JSONL")->required();
    pipe->add_option("--backend", pipe_opt.backend_spec, "mock:FILE or http:URL")
        ->required();
    pipe->add_option("--run", pipe_opt.run_dir, "run directory")->required();
    pipe->add_option("--model", pipe_opt.model_id, "model id recorded in artifacts");
    pipe->add_option("--n-chains", pipe_opt.n_chains, "chains per question (N)");
    pipe->add_option("--seed", pipe_opt.seed, "run seed")->required();
    pipe->add_flag("--resume", pipe_opt.resume, "skip completed question ids");
    int limit = 0;
    pipe->add_option("--limit", limit, "stop after this many pending questions");
    std::string prompt_dir;
    pipe->add_option("--prompts", prompt_dir, "template override directory");
    add_decoding_flags(pipe, pipe_opt.decoding);

    cmd::LabelOptions label_opt;
    auto* label = app.add_subcommand("label", "32-sample accuracy labeling");
    label->add_option("--dataset", label_opt.dataset, "dataset JSONL")->required();
    label->add_option("--backend", label_opt.backend_spec, "backend spec")->required();
    label->add_option("--run", label_opt.run_dir, "run directory")->required();
    label->add_option("--model", label_opt.model_id, "model id");
    label->add_option("--samples", label_opt.samples, "responses per question");
    label->add_option("--threshold", label_opt.threshold, "uncertain below this accuracy");
    label->add_option("--seed", label_opt.seed, "run seed")->required();
    add_decoding_flags(label, label_opt.decoding);

    cmd::EstimateOptions est_opt;
    auto* est = app.add_subcommand("estimate", "profiles from stored chains");
    est->add_option("--dataset", est_opt.dataset, "dataset JSONL")->required();
    est->add_option("--backend", est_opt.backend_spec, "backend spec (embeddings)")
        ->required();
    est->add_option("--run", est_opt.run_dir, "run directory")->required();
    est->add_option("--lex-method", est_opt.lex_method, "rouge_l|rouge_n|bleu_n");
    est->add_option("--lex-order", est_opt.lex_order, "n for rouge_n/bleu_n");
    est->add_option("--sem-method", est_opt.sem_method, "cosine|l1|l2");

    cmd::MetricsOptions met_opt;
    auto* met = app.add_subcommand("metrics", "score benchmark uncertainty metrics");
    met->add_option("--dataset", met_opt.dataset, "dataset JSONL")->required();
    met->add_option("--backend", met_opt.backend_spec, "backend spec")->required();
    met->add_option("--run", met_opt.run_dir, "run directory")->required();
    met->add_option("--metric", met_opt.metrics,
                    "metric names (default: all eight)");
    met->add_option("--seed", met_opt.seed, "run seed")->required();
    int met_samples = 0;
    met->add_option("--samples", met_samples, "override per-metric sample count");
    add_decoding_flags(met, met_opt.decoding);

    cmd::ProfileOptions prof_opt;
    auto* prof = app.add_subcommand("profile", "build profile vectors and tables");
    prof->add_option("--run", prof_opt.runs, "run directories")->required();
    prof->add_option("--out", prof_opt.out_dir, "output directory")->required();
    bool no_bootstrap = false;
    prof->add_flag("--no-bootstrap", no_bootstrap, "skip bootstrap CIs");
    prof->add_option("--bins", prof_opt.difficulty_bins, "difficulty bins");

    cmd::SelectOptions sel_opt;
    auto* sel = app.add_subcommand("select", "rank candidates for a query profile");
    sel->add_option("--scenario", sel_opt.scenario, "1, 2 or 3")->required();
    sel->add_option("--dataset-vec", sel_opt.dataset_vec_file, "query dataset vector")
        ->required();
    sel->add_option("--model-vec", sel_opt.model_vec_file, "query model vector (s3)");
    sel->add_option("--candidates", sel_opt.candidates_file,
                    "metric vecs (s1/s3) or model vecs (s2)")
        ->required();
    sel->add_option("--out", sel_opt.out_csv, "ranking CSV")->required();

    cmd::EvaluateOptions eval_opt;
    auto* eval = app.add_subcommand("evaluate", "NDCG vs worst/random baselines");
    eval->add_option("--scenario", eval_opt.scenario, "1, 2 or 3")->required();
    eval->add_option("--run", eval_opt.runs, "run directories")->required();
    eval->add_option("--out", eval_opt.out_dir, "output directory")->required();
    eval->add_option("--samplings", eval_opt.random_samplings, "random baselines");
    eval->add_option("--seed", eval_opt.seed, "baseline seed")->required();
    eval->add_option("--k-max", eval_opt.ndcg_k_max, "heatmap cutoff (0 = all)");

    cmd::ReportOptions rep_opt;
    auto* rep = app.add_subcommand("report", "emit all table/figure-shaped outputs");
    rep->add_option("--run", rep_opt.runs, "run directories")->required();
    rep->add_option("--out", rep_opt.out_dir, "output directory")->required();
    bool rep_no_bootstrap = false;
    rep->add_flag("--no-bootstrap", rep_no_bootstrap, "skip bootstrap CIs");
    rep->add_option("--seed", rep_opt.seed, "baseline seed")->required();

    cmd::SynthlabOptions synth_opt;
    auto* synth = app.add_subcommand("synthlab", "synthetic estimator validation");
    synth->add_option("--kind", synth_opt.kind,
                      "knowledge_gap|execution_noise|phrasing_sensitive|"
                      "ambiguous_input|certain");
    synth->add_option("--n", synth_opt.n_questions, "population size");
    synth->add_option("--rate", synth_opt.positive_rate, "positive rate in (0,1)");
    synth->add_option("--seed", synth_opt.seed, "population seed")->required();
    synth->add_option("--n-chains", synth_opt.n_chains, "chains per question");
    synth->add_option("--out", synth_opt.out_dir, "output directory");
    std::string emit_script;
    synth->add_option("--emit-script", emit_script, "dump population JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*ingest) {
            if (sample > 0) {
                ingest_opt.sample = sample;
                ingest_opt.seed = sample_seed;
            }
            cmd::ingest(ingest_opt, std::cout);
        } else if (*pipe) {
            if (limit > 0) pipe_opt.limit = limit;
            if (!prompt_dir.empty()) pipe_opt.prompt_dir = prompt_dir;
            cmd::run_pipeline(pipe_opt, std::cout);
        } else if (*label) {
            cmd::label(label_opt, std::cout);
        } else if (*est) {
            cmd::estimate(est_opt, std::cout);
        } else if (*met) {
            if (met_samples > 0) met_opt.samples = met_samples;
            cmd::metrics(met_opt, std::cout);
        } else if (*prof) {
            prof_opt.bootstrap = !no_bootstrap;
            cmd::profile(prof_opt, std::cout);
        } else if (*sel) {
            cmd::select(sel_opt, std::cout);
        } else if (*eval) {
            cmd::evaluate(eval_opt, std::cout);
        } else if (*rep) {
            rep_opt.bootstrap = !rep_no_bootstrap;
            cmd::report(rep_opt, std::cout);
        } else if (*synth) {
            if (!emit_script.empty()) synth_opt.emit_script = emit_script;
            cmd::synthlab(synth_opt, std::cout);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cmd::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
