#include "uprof/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uprof/estimators.hpp"
#include "uprof/http_backend.hpp"
#include "uprof/metrics.hpp"
#include "uprof/pipeline.hpp"
#include "uprof/profiling.hpp"
#include "uprof/rng.hpp"
#include "uprof/selection.hpp"
#include "uprof/serde.hpp"
#include "uprof/stats.hpp"

namespace uprof::cmd {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v, int decimals = 6) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(decimals) << v;
    return out.str();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

est::EstimatorConfig estimator_config(const std::string& lex, int order,
                                      const std::string& sem) {
    est::EstimatorConfig cfg;
    if (lex == "rouge_l") cfg.lex_method = text::LexMethod::rouge_l();
    else if (lex == "rouge_n") cfg.lex_method = text::LexMethod::rouge_n(order);
    else if (lex == "bleu_n") cfg.lex_method = text::LexMethod::bleu_n(order);
    else fail(Errc::usage_error, "unknown lex method '" + lex + "'");
    if (sem == "cosine") cfg.sem_method = text::SemMethod::cosine;
    else if (sem == "l1") cfg.sem_method = text::SemMethod::l1;
    else if (sem == "l2") cfg.sem_method = text::SemMethod::l2;
    else fail(Errc::usage_error, "unknown sem method '" + sem + "'");
    return cfg;
}

struct RunArtifacts {
    std::string dir;
    RunManifest manifest;
    std::map<std::string, SourceProfile> profiles;
    std::vector<LabeledExample> labels;
    std::map<std::string, std::map<std::string, double>> metric_scores;
};

RunArtifacts load_run(const std::string& dir) {
    io::RunStore store(dir, /*writer=*/false);
    RunArtifacts art;
    art.dir = dir;
    auto manifest = store.read_manifest();
    if (!manifest) fail(Errc::missing_runs, "no manifest.json in '" + dir + "'");
    art.manifest = *manifest;
    art.profiles = store.read_profiles();
    art.labels = store.read_labels();
    for (const auto& m : store.available_metrics())
        art.metric_scores[m] = store.read_metric_scores(m);
    return art;
}

json vectors_to_json(const std::vector<ProfileVector>& vecs) {
    json arr = json::array();
    for (const auto& v : vecs) arr.push_back(profile_vector_to_json(v));
    return json{{"schema_version", kSchemaVersion}, {"vectors", std::move(arr)}};
}

std::vector<ProfileVector> vectors_from_file(const std::string& path) {
    const json j = json::parse(io::read_text_file(path));
    std::vector<ProfileVector> vecs;
    if (j.contains("vectors")) {
        for (const auto& v : j["vectors"]) vecs.push_back(profile_vector_from_json(v));
    } else if (j.is_array()) {
        for (const auto& v : j) vecs.push_back(profile_vector_from_json(v));
    } else {
        vecs.push_back(profile_vector_from_json(j));
    }
    return vecs;
}

} // namespace

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::usage_error:
        case Errc::invalid_order:
            return 1;
        case Errc::schema_error:
        case Errc::duplicate_id:
        case Errc::io_error:
        case Errc::invalid_script:
        case Errc::invalid_distribution:
        case Errc::invalid_rate:
            return 2;
        case Errc::timeout:
        case Errc::server_error:
        case Errc::rate_limited:
        case Errc::logprobs_unavailable:
        case Errc::dimension_drift:
        case Errc::stage_failure:
            return 3;
        default:
            return 4;
    }
}

void ingest(const IngestOptions& opt, std::ostream& log) {
    auto report = io::ingest(opt.input, io::adapter_from(opt.adapter));
    if (opt.sample) {
        if (!opt.seed) fail(Errc::usage_error, "--sample requires --seed");
        Rng rng(derive_seed(*opt.seed, "sample"));
        auto& recs = report.records;
        for (size_t i = recs.size(); i > 1; --i)
            std::swap(recs[i - 1], recs[rng.next_index(i)]);
        if (recs.size() > static_cast<size_t>(*opt.sample))
            recs.resize(static_cast<size_t>(*opt.sample));
        std::sort(recs.begin(), recs.end(),
                  [](const QuestionRecord& a, const QuestionRecord& b) {
                      return a.id < b.id;
                  });
    }
    io::save_dataset(opt.output, report.records);
    log << "ingested " << report.records.size() << " records";
    for (const auto& [task, count] : report.counts_per_task)
        log << " " << task << "=" << count;
    log << " -> " << opt.output << "\n";
}

namespace {

PipelineContext make_pipeline_context(const std::string& backend_spec,
                                      const std::string& model_id, int n_chains,
                                      uint64_t seed, const DecodingParams& decoding,
                                      const std::string& dataset_id,
                                      int label_samples = 32,
                                      double label_threshold = 0.70) {
    PipelineContext ctx;
    ctx.backend = make_backend_from_spec(backend_spec, model_id);
    ctx.manifest.model_id = model_id;
    ctx.manifest.dataset_id = dataset_id;
    ctx.manifest.n_chains = n_chains;
    ctx.manifest.label_samples = label_samples;
    ctx.manifest.label_threshold = label_threshold;
    ctx.manifest.decoding = decoding;
    ctx.manifest.seed = seed;
    ctx.manifest.backend_descriptor = ctx.backend->descriptor().to_string();
    return ctx;
}

std::string dataset_id_from_path(const std::string& path) {
    return fs::path(path).stem().string();
}

} // namespace

void run_pipeline(const RunPipelineOptions& opt, std::ostream& log) {
    const auto questions = io::load_dataset(opt.dataset);
    PipelineContext ctx = make_pipeline_context(
        opt.backend_spec, opt.model_id, opt.n_chains, opt.seed, opt.decoding,
        dataset_id_from_path(opt.dataset));
    PromptRegistry registry;
    if (opt.prompt_dir) {
        for (const auto& w : registry.load_overrides(*opt.prompt_dir))
            log << "warning: " << w << "\n";
        ctx.prompts = &registry;
    }

    io::RunStore store(opt.run_dir, /*writer=*/true);
    if (!opt.resume && !store.read_chains().empty())
        fail(Errc::usage_error,
             "chains.jsonl already exists in '" + opt.run_dir + "' (use --resume)");
    if (opt.resume) {
        if (auto existing = store.read_manifest()) {
            if (existing->seed != ctx.manifest.seed ||
                existing->n_chains != ctx.manifest.n_chains)
                fail(Errc::usage_error,
                     "--resume with a different seed or n_chains than the manifest");
        }
        store.prune_incomplete_chains(opt.n_chains);
    }
    store.write_manifest(ctx.manifest);

    std::set<std::string> done;
    for (const auto& id : store.completed_question_ids(opt.n_chains)) done.insert(id);

    int processed = 0;
    for (const auto& q : questions) {
        if (done.count(q.id)) continue;
        if (opt.limit && processed >= *opt.limit) break;
        const auto chains = run_chains(q, ctx);
        store.append_chains(chains);
        std::map<std::string, double> seconds;
        for (const auto& c : chains)
            for (const auto& [stage, s] : c.stage_seconds) seconds[stage] += s;
        store.append_timing(q.id, seconds);
        ++processed;
    }
    log << "pipeline: " << processed << " questions, " << opt.n_chains
        << " chains each -> " << opt.run_dir << "/chains.jsonl\n";
}

void label(const LabelOptions& opt, std::ostream& log) {
    const auto questions = io::load_dataset(opt.dataset);
    PipelineContext ctx = make_pipeline_context(
        opt.backend_spec, opt.model_id, 2, opt.seed, opt.decoding,
        dataset_id_from_path(opt.dataset), opt.samples, opt.threshold);
    io::RunStore store(opt.run_dir, /*writer=*/true);
    if (!store.read_manifest()) store.write_manifest(ctx.manifest);
    int positives = 0;
    std::set<std::string> already;
    for (const auto& ex : store.read_labels()) already.insert(ex.question_id);
    for (const auto& q : questions) {
        if (already.count(q.id)) continue;
        const LabeledExample ex = label_question(q, ctx);
        store.append_label(ex);
        if (ex.uncertain) ++positives;
    }
    log << "labeled " << questions.size() << " questions, " << positives
        << " uncertain (threshold " << opt.threshold << ")\n";
}

void estimate(const EstimateOptions& opt, std::ostream& log) {
    const auto questions = io::load_dataset(opt.dataset);
    BackendPtr backend = make_backend_from_spec(opt.backend_spec, "embedder");
    const est::EstimatorConfig cfg =
        estimator_config(opt.lex_method, opt.lex_order, opt.sem_method);
    est::Embedder embed = [&](const std::string& t) { return backend->embed(t); };

    io::RunStore store(opt.run_dir, /*writer=*/true);
    std::map<std::string, std::vector<ChainRecord>> by_question;
    for (auto& c : store.read_chains()) by_question[c.question_id].push_back(c);

    int ok = 0, skipped = 0;
    for (const auto& q : questions) {
        auto it = by_question.find(q.id);
        if (it == by_question.end()) continue;
        try {
            const ChainSet set = assemble_chain_set(q.id, it->second);
            const SourceProfile prof = est::profile_question(set, q.text, embed, cfg);
            store.append_profile(q.id, prof);
            ++ok;
        } catch (const Error& e) {
            log << "skipping '" << q.id << "': " << e.what() << "\n";
            ++skipped;
        }
    }
    log << "estimated " << ok << " profiles (" << skipped << " skipped)\n";
}

void metrics(const MetricsOptions& opt, std::ostream& log) {
    const auto questions = io::load_dataset(opt.dataset);
    metrics::MetricContext ctx;
    ctx.backend = make_backend_from_spec(opt.backend_spec, "metric-model");
    ctx.run_seed = opt.seed;
    ctx.decoding = opt.decoding;

    std::vector<metrics::MetricName> names;
    if (opt.metrics.empty()) {
        names = metrics::all_metrics();
    } else {
        for (const auto& n : opt.metrics) names.push_back(metrics::metric_from(n));
    }

    io::RunStore store(opt.run_dir, /*writer=*/true);
    for (const auto name : names) {
        metrics::MetricSpec spec = metrics::MetricSpec::defaults(name);
        if (opt.samples) spec.samples = *opt.samples;
        const auto result = metrics::score_metric(spec, questions, ctx);
        store.write_metric_scores(metrics::metric_name(name), result.scores,
                                  result.errors);
        log << metrics::metric_name(name) << ": " << result.scores.size()
            << " scores, " << result.errors.size() << " errors\n";
    }
}

namespace {

void write_profile_vec_csv(const fs::path& path,
                           const std::vector<ProfileVector>& vecs,
                           const std::map<std::string, stats::BootstrapResult>*
                               ci_by_label_axis /* "label/axis" keys */) {
    std::ostringstream out;
    out << "kind,label,su,au,eu,ou";
    if (ci_by_label_axis) out << ",su_ci,au_ci,eu_ci,ou_ci";
    out << "\n";
    for (const auto& v : vecs) {
        out << profile_kind_name(v.kind) << "," << csv_escape(v.label);
        for (double x : v.values) out << "," << fmt(x);
        if (ci_by_label_axis) {
            for (const char* axis : profiling::kSourceNames) {
                auto it = ci_by_label_axis->find(v.label + "/" + axis);
                if (it == ci_by_label_axis->end()) {
                    out << ",";
                } else {
                    out << "," << fmt(it->second.ci_low) << ".."
                        << fmt(it->second.ci_high);
                }
            }
        }
        out << "\n";
    }
    io::write_text_file(path, out.str());
}

} // namespace

void profile(const ProfileOptions& opt, std::ostream& log) {
    if (opt.runs.empty()) fail(Errc::usage_error, "profile needs at least one --run");
    fs::create_directories(opt.out_dir);
    std::vector<RunArtifacts> runs;
    for (const auto& dir : opt.runs) runs.push_back(load_run(dir));

    // Dataset-Vec: profiles grouped by model within each dataset.
    std::map<std::string, std::map<std::string, std::vector<SourceProfile>>> by_dataset;
    std::map<std::string, std::map<std::string, std::vector<SourceProfile>>> by_model;
    for (const auto& run : runs) {
        for (const auto& [id, prof] : run.profiles) {
            by_dataset[run.manifest.dataset_id][run.manifest.model_id].push_back(prof);
            by_model[run.manifest.model_id][run.manifest.dataset_id].push_back(prof);
        }
    }
    std::vector<ProfileVector> dataset_vecs, model_vecs;
    std::map<std::string, stats::BootstrapResult> dataset_cis, model_cis;
    const uint64_t ci_seed = runs.front().manifest.seed;
    auto attach_cis = [&](const std::map<std::string, std::vector<SourceProfile>>& groups,
                          const std::string& label,
                          std::map<std::string, stats::BootstrapResult>& out) {
        if (!opt.bootstrap) return;
        std::array<std::vector<double>, 4> cols;
        for (const auto& [g, profs] : groups)
            for (const auto& p : profs) {
                const auto vals = profiling::profile_values(p);
                for (size_t k = 0; k < 4; ++k) cols[k].push_back(vals[k]);
            }
        for (size_t k = 0; k < 4; ++k) {
            if (cols[k].size() < 2) continue;
            out[label + "/" + profiling::kSourceNames[k]] = stats::bootstrap_mean(
                cols[k], derive_seed(ci_seed, label, profiling::kSourceNames[k]),
                opt.bootstrap_resamples);
        }
    };
    for (const auto& [dataset, groups] : by_dataset) {
        dataset_vecs.push_back(profiling::dataset_vec(groups, dataset));
        attach_cis(groups, dataset, dataset_cis);
    }
    for (const auto& [model, groups] : by_model) {
        model_vecs.push_back(profiling::model_vec(groups, model));
        attach_cis(groups, model, model_cis);
    }

    // Metric-Vec: per-run MI tuples averaged per metric, then normalized
    // within each source column.
    std::map<std::string, std::array<double, 4>> mi_sum;
    std::map<std::string, int> mi_count;
    for (const auto& run : runs) {
        for (const auto& [metric, scores] : run.metric_scores) {
            try {
                const auto mi = profiling::metric_source_mi(scores, run.profiles);
                auto& acc = mi_sum[metric];
                for (size_t k = 0; k < 4; ++k) acc[k] += mi[k];
                mi_count[metric] += 1;
            } catch (const Error& e) {
                log << "skipping MI for '" << metric << "' in " << run.dir << ": "
                    << e.what() << "\n";
            }
        }
    }
    std::vector<std::string> metric_names;
    std::vector<std::array<double, 4>> mi_matrix;
    for (auto& [metric, sum] : mi_sum) {
        for (size_t k = 0; k < 4; ++k) sum[k] /= mi_count[metric];
        metric_names.push_back(metric);
        mi_matrix.push_back(sum);
    }
    std::vector<ProfileVector> metric_vecs;
    if (!mi_matrix.empty()) {
        const auto normalized = profiling::normalize_within_source(mi_matrix);
        for (size_t i = 0; i < metric_names.size(); ++i) {
            ProfileVector v;
            v.kind = ProfileKind::metric;
            v.label = metric_names[i];
            v.values = normalized[i];
            metric_vecs.push_back(v);
        }
    }

    // Difficulty bins per dataset, pooled across models on (model, qid).
    json fig4 = json::array();
    std::ostringstream fig4_csv;
    fig4_csv << "dataset,bin,accuracy_min,accuracy_max,count,su,au,eu,ou\n";
    std::map<std::string, std::map<std::string, double>> acc_by_dataset;
    std::map<std::string, std::map<std::string, SourceProfile>> prof_by_dataset;
    for (const auto& run : runs) {
        for (const auto& ex : run.labels) {
            acc_by_dataset[run.manifest.dataset_id]
                          [run.manifest.model_id + "/" + ex.question_id] =
                              ex.empirical_accuracy;
        }
        for (const auto& [id, prof] : run.profiles) {
            prof_by_dataset[run.manifest.dataset_id]
                           [run.manifest.model_id + "/" + id] = prof;
        }
    }
    for (const auto& [dataset, accs] : acc_by_dataset) {
        try {
            const auto bins = profiling::difficulty_bins(accs, prof_by_dataset[dataset],
                                                         opt.difficulty_bins);
            for (size_t b = 0; b < bins.size(); ++b) {
                const auto& bin = bins[b];
                fig4.push_back(json{{"dataset", dataset},
                                    {"bin", b},
                                    {"accuracy_min", bin.accuracy_min},
                                    {"accuracy_max", bin.accuracy_max},
                                    {"count", bin.count},
                                    {"su", bin.mean.su},
                                    {"au", bin.mean.au},
                                    {"eu", bin.mean.eu},
                                    {"ou", bin.mean.ou}});
                fig4_csv << csv_escape(dataset) << "," << b << ","
                         << fmt(bin.accuracy_min) << "," << fmt(bin.accuracy_max) << ","
                         << bin.count << "," << fmt(bin.mean.su) << ","
                         << fmt(bin.mean.au) << "," << fmt(bin.mean.eu) << ","
                         << fmt(bin.mean.ou) << "\n";
            }
        } catch (const Error& e) {
            log << "difficulty bins skipped for '" << dataset << "': " << e.what()
                << "\n";
        }
    }

    const fs::path out(opt.out_dir);
    io::write_text_file(out / "dataset_vecs.json", vectors_to_json(dataset_vecs).dump(2) + "\n");
    io::write_text_file(out / "model_vecs.json", vectors_to_json(model_vecs).dump(2) + "\n");
    io::write_text_file(out / "metric_vecs.json", vectors_to_json(metric_vecs).dump(2) + "\n");
    write_profile_vec_csv(out / "figure3_dataset_profiles.csv", dataset_vecs,
                          opt.bootstrap ? &dataset_cis : nullptr);
    write_profile_vec_csv(out / "figure3_model_profiles.csv", model_vecs,
                          opt.bootstrap ? &model_cis : nullptr);

    // Figure-2 shape: normalized MI per metric/source as grouped-bar series.
    std::ostringstream fig2_csv;
    fig2_csv << "metric,su,au,eu,ou\n";
    json fig2_series = json::array();
    for (const auto& v : metric_vecs) {
        fig2_csv << csv_escape(v.label);
        for (double x : v.values) fig2_csv << "," << fmt(x);
        fig2_csv << "\n";
        fig2_series.push_back(json{{"metric", v.label},
                                   {"values", v.values},
                                   {"axes", {"su", "au", "eu", "ou"}}});
    }
    io::write_text_file(out / "figure2_metric_source_mi.csv", fig2_csv.str());
    io::write_text_file(out / "figure2_metric_source_mi.json",
                        json{{"schema_version", kSchemaVersion},
                             {"series", std::move(fig2_series)}}
                                .dump(2) +
                            "\n");
    io::write_text_file(out / "figure4_difficulty_bins.json",
                        json{{"schema_version", kSchemaVersion}, {"bins", std::move(fig4)}}
                                .dump(2) +
                            "\n");
    io::write_text_file(out / "figure4_difficulty_bins.csv", fig4_csv.str());
    log << "profiles: " << dataset_vecs.size() << " dataset vecs, "
        << model_vecs.size() << " model vecs, " << metric_vecs.size()
        << " metric vecs -> " << opt.out_dir << "\n";
}

void select(const SelectOptions& opt, std::ostream& log) {
    const auto queries = vectors_from_file(opt.dataset_vec_file);
    if (queries.empty()) fail(Errc::schema_error, "no dataset vector in file");
    const auto candidates = vectors_from_file(opt.candidates_file);
    sel::Ranking ranking;
    switch (opt.scenario) {
        case 1:
            ranking = sel::select_metric_for_task(queries.front(), candidates);
            break;
        case 2:
            ranking = sel::select_model_for_task(queries.front(), candidates);
            break;
        case 3: {
            const auto models = vectors_from_file(opt.model_vec_file);
            if (models.empty()) fail(Errc::schema_error, "no model vector in file");
            ranking = sel::select_metric_for_task_model(queries.front(), models.front(),
                                                        candidates);
            break;
        }
        default:
            fail(Errc::usage_error, "scenario must be 1, 2 or 3");
    }
    std::ostringstream out;
    out << "rank,id,score\n";
    for (size_t i = 0; i < ranking.ordered_ids.size(); ++i) {
        const auto& id = ranking.ordered_ids[i];
        out << (i + 1) << "," << csv_escape(id) << "," << fmt(ranking.scores.at(id))
            << "\n";
    }
    io::write_text_file(opt.out_csv, out.str());
    log << "scenario " << opt.scenario << ": ranked " << ranking.ordered_ids.size()
        << " candidates -> " << opt.out_csv << "\n";
}

namespace {

struct ScenarioRow {
    std::string dataset;
    sel::SelectionEval eval;
};

// Build profile vectors straight from run artifacts (shared by evaluate).
struct EvalInputs {
    std::map<std::string, ProfileVector> dataset_vecs;
    std::map<std::string, ProfileVector> model_vecs;
    std::vector<ProfileVector> metric_vecs;
    // dataset -> model -> run index
    std::map<std::string, std::map<std::string, size_t>> run_index;
    std::vector<RunArtifacts> runs;
};

EvalInputs gather_eval_inputs(const std::vector<std::string>& run_dirs,
                              std::ostream& log) {
    EvalInputs in;
    for (const auto& dir : run_dirs) in.runs.push_back(load_run(dir));
    std::map<std::string, std::map<std::string, std::vector<SourceProfile>>> by_dataset;
    std::map<std::string, std::map<std::string, std::vector<SourceProfile>>> by_model;
    for (size_t i = 0; i < in.runs.size(); ++i) {
        const auto& run = in.runs[i];
        in.run_index[run.manifest.dataset_id][run.manifest.model_id] = i;
        for (const auto& [id, prof] : run.profiles) {
            by_dataset[run.manifest.dataset_id][run.manifest.model_id].push_back(prof);
            by_model[run.manifest.model_id][run.manifest.dataset_id].push_back(prof);
        }
    }
    for (const auto& [dataset, groups] : by_dataset)
        in.dataset_vecs[dataset] = profiling::dataset_vec(groups, dataset);
    for (const auto& [model, groups] : by_model)
        in.model_vecs[model] = profiling::model_vec(groups, model);

    std::map<std::string, std::array<double, 4>> mi_sum;
    std::map<std::string, int> mi_count;
    for (const auto& run : in.runs) {
        for (const auto& [metric, scores] : run.metric_scores) {
            try {
                const auto mi = profiling::metric_source_mi(scores, run.profiles);
                auto& acc = mi_sum[metric];
                for (size_t k = 0; k < 4; ++k) acc[k] += mi[k];
                mi_count[metric] += 1;
            } catch (const Error& e) {
                log << "MI skipped for '" << metric << "': " << e.what() << "\n";
            }
        }
    }
    std::vector<std::string> names;
    std::vector<std::array<double, 4>> matrix;
    for (auto& [metric, sum] : mi_sum) {
        for (size_t k = 0; k < 4; ++k) sum[k] /= mi_count[metric];
        names.push_back(metric);
        matrix.push_back(sum);
    }
    if (!matrix.empty()) {
        const auto normalized = profiling::normalize_within_source(matrix);
        for (size_t i = 0; i < names.size(); ++i) {
            ProfileVector v;
            v.kind = ProfileKind::metric;
            v.label = names[i];
            v.values = normalized[i];
            in.metric_vecs.push_back(v);
        }
    }
    return in;
}

// mean metric AUROC across the dataset's runs
std::map<std::string, double> metric_relevance_for_dataset(
    const EvalInputs& in, const std::string& dataset,
    const std::vector<std::string>& metric_names) {
    std::map<std::string, double> sums;
    std::map<std::string, int> counts;
    for (const auto& [model, run_idx] : in.run_index.at(dataset)) {
        const auto& run = in.runs[run_idx];
        if (run.labels.empty())
            fail(Errc::missing_runs,
                 "run '" + run.dir + "' has no labels.jsonl (run `uprof label`)");
        const auto rel =
            sel::relevance_for_metrics(metric_names, run.metric_scores, run.labels);
        for (const auto& [name, auroc] : rel) {
            sums[name] += auroc;
            counts[name] += 1;
        }
    }
    std::map<std::string, double> out;
    for (const auto& [name, s] : sums) out[name] = s / counts[name];
    return out;
}

} // namespace

void evaluate(const EvaluateOptions& opt, std::ostream& log) {
    if (opt.runs.empty()) fail(Errc::usage_error, "evaluate needs at least one --run");
    fs::create_directories(opt.out_dir);
    EvalInputs in = gather_eval_inputs(opt.runs, log);

    std::vector<std::string> metric_names;
    for (const auto& v : in.metric_vecs) metric_names.push_back(v.label);

    std::vector<ScenarioRow> rows;
    json fig6 = json::array();
    auto heatmap = [&](const std::string& dataset, const sel::Ranking& ranking,
                       const std::map<std::string, double>& relevance) {
        const int n = static_cast<int>(ranking.ordered_ids.size());
        const int kmax = opt.ndcg_k_max > 0 ? std::min(opt.ndcg_k_max, n) : n;
        for (int k = 1; k <= kmax; ++k) {
            const auto ev = sel::evaluate_selection(
                ranking, relevance, k, opt.random_samplings,
                derive_seed(opt.seed, dataset, static_cast<uint64_t>(k)));
            fig6.push_back(json{{"scenario", opt.scenario},
                                {"dataset", dataset},
                                {"k", k},
                                {"ours", ev.ndcg},
                                {"random", ev.random_mean}});
        }
    };

    for (const auto& [dataset, models] : in.run_index) {
        switch (opt.scenario) {
            case 1: {
                if (in.metric_vecs.size() < 2)
                    fail(Errc::missing_runs,
                         "scenario 1 needs metric scores for >= 2 metrics");
                const auto ranking =
                    sel::select_metric_for_task(in.dataset_vecs.at(dataset),
                                                in.metric_vecs);
                const auto relevance =
                    metric_relevance_for_dataset(in, dataset, metric_names);
                rows.push_back({dataset,
                                sel::evaluate_selection(ranking, relevance,
                                                        stats::kAllRanks,
                                                        opt.random_samplings,
                                                        derive_seed(opt.seed, dataset))});
                heatmap(dataset, ranking, relevance);
                break;
            }
            case 2: {
                std::vector<ProfileVector> model_vecs;
                std::map<std::string, std::vector<LabeledExample>> labels_by_model;
                for (const auto& [model, run_idx] : models) {
                    model_vecs.push_back(in.model_vecs.at(model));
                    labels_by_model[model] = in.runs[run_idx].labels;
                }
                if (model_vecs.size() < 2)
                    fail(Errc::missing_runs, "scenario 2 needs >= 2 models per dataset");
                const auto ranking =
                    sel::select_model_for_task(in.dataset_vecs.at(dataset), model_vecs);
                const auto relevance = sel::relevance_for_models(labels_by_model);
                rows.push_back({dataset,
                                sel::evaluate_selection(ranking, relevance,
                                                        stats::kAllRanks,
                                                        opt.random_samplings,
                                                        derive_seed(opt.seed, dataset))});
                heatmap(dataset, ranking, relevance);
                break;
            }
            case 3: {
                if (in.metric_vecs.size() < 2)
                    fail(Errc::missing_runs,
                         "scenario 3 needs metric scores for >= 2 metrics");
                sel::SelectionEval mean_eval;
                int count = 0;
                for (const auto& [model, run_idx] : models) {
                    const auto ranking = sel::select_metric_for_task_model(
                        in.dataset_vecs.at(dataset), in.model_vecs.at(model),
                        in.metric_vecs);
                    const auto& run = in.runs[run_idx];
                    if (run.labels.empty())
                        fail(Errc::missing_runs,
                             "run '" + run.dir + "' has no labels.jsonl");
                    const auto relevance = sel::relevance_for_metrics(
                        metric_names, run.metric_scores, run.labels);
                    const auto ev = sel::evaluate_selection(
                        ranking, relevance, stats::kAllRanks, opt.random_samplings,
                        derive_seed(opt.seed, dataset, model));
                    mean_eval.ndcg += ev.ndcg;
                    mean_eval.worst += ev.worst;
                    mean_eval.random_mean += ev.random_mean;
                    ++count;
                    heatmap(dataset + "/" + model, ranking, relevance);
                }
                mean_eval.ndcg /= count;
                mean_eval.worst /= count;
                mean_eval.random_mean /= count;
                mean_eval.gain_percent =
                    mean_eval.random_mean > 0.0
                        ? (mean_eval.ndcg - mean_eval.random_mean) /
                              mean_eval.random_mean * 100.0
                        : 0.0;
                rows.push_back({dataset, mean_eval});
                break;
            }
            default:
                fail(Errc::usage_error, "scenario must be 1, 2 or 3");
        }
    }

    // Table-2-shaped CSV: 3 decimals plus signed percentage.
    std::ostringstream csv;
    csv << "dataset,scenario,ours,worst,random,gain\n";
    char gainbuf[32];
    for (const auto& row : rows) {
        std::snprintf(gainbuf, sizeof(gainbuf), "%+.1f%%", row.eval.gain_percent);
        csv << csv_escape(row.dataset) << "," << opt.scenario << ","
            << fmt(row.eval.ndcg, 3) << "," << fmt(row.eval.worst, 3) << ","
            << fmt(row.eval.random_mean, 3) << "," << gainbuf << "\n";
    }
    const fs::path out(opt.out_dir);
    io::write_text_file(out / ("table2_scenario" + std::to_string(opt.scenario) + ".csv"),
                        csv.str());
    io::write_text_file(
        out / ("figure6_ndcg_at_k_scenario" + std::to_string(opt.scenario) + ".json"),
        json{{"schema_version", kSchemaVersion}, {"cells", std::move(fig6)}}.dump(2) +
            "\n");
    for (const auto& row : rows) {
        log << "scenario " << opt.scenario << " " << row.dataset << ": ours "
            << fmt(row.eval.ndcg, 3) << " worst " << fmt(row.eval.worst, 3)
            << " random " << fmt(row.eval.random_mean, 3) << " gain "
            << fmt(row.eval.gain_percent, 2) << "%\n";
    }
}

void report(const ReportOptions& opt, std::ostream& log) {
    if (opt.runs.empty()) fail(Errc::usage_error, "report needs at least one --run");
    ProfileOptions prof_opt;
    prof_opt.runs = opt.runs;
    prof_opt.out_dir = opt.out_dir;
    prof_opt.bootstrap = opt.bootstrap;
    profile(prof_opt, log);
    // Selection tables are emitted when metric scores + labels are present.
    for (int scenario : {1, 2, 3}) {
        EvaluateOptions ev;
        ev.scenario = scenario;
        ev.runs = opt.runs;
        ev.out_dir = opt.out_dir;
        ev.seed = opt.seed;
        try {
            evaluate(ev, log);
        } catch (const Error& e) {
            log << "scenario " << scenario << " skipped: " << e.what() << "\n";
        }
    }
}

synth::ValidationReport synthlab(const SynthlabOptions& opt, std::ostream& log) {
    const auto population = synth::make_population(
        synth::scenario_kind_from(opt.kind), opt.n_questions, opt.positive_rate,
        opt.seed);
    if (opt.emit_script) {
        io::write_text_file(*opt.emit_script,
                            population_to_json(population).dump(2) + "\n");
        log << "population script -> " << *opt.emit_script << "\n";
    }
    RunManifest manifest;
    manifest.model_id = "synthlab";
    manifest.dataset_id = opt.kind;
    manifest.n_chains = opt.n_chains;
    manifest.seed = opt.seed;
    const auto report = synth::validate_estimators(population, manifest);

    std::ostringstream csv;
    csv << "estimator,auroc,auprc,p_n\n";
    for (const auto& row : report.rows) {
        csv << row.estimator << "," << fmt(row.auroc, 3) << "," << fmt(row.auprc, 3)
            << "," << report.positives << ":" << report.negatives << "\n";
    }
    if (!opt.out_dir.empty()) {
        fs::create_directories(opt.out_dir);
        io::write_text_file(fs::path(opt.out_dir) / "table1_synthetic.csv", csv.str());
        json rows = json::array();
        for (const auto& row : report.rows)
            rows.push_back(json{{"estimator", row.estimator},
                                {"auroc", row.auroc},
                                {"auprc", row.auprc},
                                {"positives", report.positives},
                                {"negatives", report.negatives}});
        io::write_text_file(fs::path(opt.out_dir) / "table1_synthetic.json",
                            json{{"schema_version", kSchemaVersion},
                                 {"kind", opt.kind},
                                 {"rows", std::move(rows)}}
                                    .dump(2) +
                                "\n");
    }
    log << csv.str();
    return report;
}

} // namespace uprof::cmd
