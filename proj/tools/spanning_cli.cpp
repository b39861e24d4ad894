// spanning: knowledge-spanning and disruption analytics for categorized corpora.
//
//   spanning synth    --output corpus.jsonl [--papers N ...]
//   spanning pipeline --input corpus.jsonl --out results/
//   spanning ingest | train | metrics | disrupt | correlate | regress | curves
//
// Every stage reads the previous stage's artifacts from --out and writes its
// own plus a manifest_<stage>.json.

#include "spanning/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using spanning::PipelineConfig;

// CLI flags, applied on top of the config file.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> input;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> dim;
    std::optional<int> epochs;
    std::optional<int> negatives;
    std::optional<double> learning_rate;
    std::optional<bool> nondeterministic;
    std::optional<unsigned> threads;
    std::optional<bool> exclude_self;
    std::optional<std::string> d_variant;
    std::optional<std::string> center;
    std::optional<bool> loss_log;
    std::optional<bool> tree_export;
    std::optional<int> dataset_end_year;
    std::optional<std::string> moderator_levels;
    std::optional<std::size_t> curve_points;
    std::optional<std::string> report;
    std::vector<std::string> models;

    // synth
    std::optional<std::string> output;
    std::optional<std::size_t> papers, codes, blocks, codes_per_paper, min_codes_per_paper, journals;
    std::optional<int> year_min, year_max;
    std::optional<double> citation_density, leakage;
    std::optional<double> planted_quadratic_sign, planted_moderator_sign, planted_strength;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "key = value config file");
    cmd->add_option("--out", o.out, "output directory holding stage artifacts");
    cmd->add_option("--threads", o.threads, "worker threads for per-paper stages (0 = all cores)");
}

void add_training(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "training seed");
    cmd->add_option("--dim", o.dim, "embedding dimension");
    cmd->add_option("--epochs", o.epochs, "training epochs");
    cmd->add_option("--negatives", o.negatives, "negative samples per positive pair");
    cmd->add_option("--learning-rate", o.learning_rate, "initial learning rate");
    cmd->add_flag("--nondeterministic", o.nondeterministic, "multi-threaded training, not reproducible");
    cmd->add_flag("--loss-log", o.loss_log, "write loss.csv with the per-epoch mean loss");
}

void add_analysis(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--center", o.center, "centering before squares/products: none|mean");
    cmd->add_option("--model", o.models, "model preset(s) to fit (default: all)");
    cmd->add_option("--moderator-levels", o.moderator_levels, "comma-separated team sizes for curves");
    cmd->add_option("--curve-points", o.curve_points, "grid points per curve");
}

PipelineConfig resolve(const Overrides& o) {
    PipelineConfig cfg;
    if (o.config) cfg.load_file(*o.config);
    if (o.input) cfg.input = *o.input;
    if (o.out) cfg.out_dir = *o.out;
    if (o.seed) cfg.training.seed = *o.seed;
    if (o.dim) cfg.training.dim = *o.dim;
    if (o.epochs) cfg.training.epochs = *o.epochs;
    if (o.negatives) cfg.training.negatives_per_positive = *o.negatives;
    if (o.learning_rate) cfg.training.initial_learning_rate = *o.learning_rate;
    if (o.nondeterministic && *o.nondeterministic) cfg.training.deterministic = false;
    if (o.threads) cfg.threads = cfg.training.threads = *o.threads;
    if (o.exclude_self) cfg.exclude_self = *o.exclude_self;
    if (o.d_variant) cfg.set("d_variant", *o.d_variant);
    if (o.center) cfg.set("center", *o.center);
    if (o.loss_log) cfg.loss_log = *o.loss_log;
    if (o.tree_export) cfg.tree_export = *o.tree_export;
    if (o.dataset_end_year) cfg.parse.dataset_end_year = *o.dataset_end_year;
    if (o.moderator_levels) cfg.set("moderator_levels", *o.moderator_levels);
    if (o.curve_points) cfg.curve_points = *o.curve_points;

    auto& s = cfg.synth;
    if (o.seed) s.seed = *o.seed;
    if (o.papers) s.n_papers = *o.papers;
    if (o.codes) s.n_codes = *o.codes;
    if (o.blocks) s.n_blocks = *o.blocks;
    if (o.codes_per_paper) s.codes_per_paper = *o.codes_per_paper;
    if (o.min_codes_per_paper) s.min_codes_per_paper = *o.min_codes_per_paper;
    if (o.journals) s.n_journals = *o.journals;
    if (o.year_min) s.year_min = *o.year_min;
    if (o.year_max) s.year_max = *o.year_max;
    if (o.citation_density) s.citation_density = *o.citation_density;
    if (o.leakage) s.leakage = *o.leakage;
    if (o.planted_quadratic_sign || o.planted_moderator_sign || o.planted_strength) {
        if (!s.planted_effect) s.planted_effect.emplace();
        if (o.planted_quadratic_sign) s.planted_effect->quadratic_sign = *o.planted_quadratic_sign;
        if (o.planted_moderator_sign) s.planted_effect->moderator_sign = *o.planted_moderator_sign;
        if (o.planted_strength) s.planted_effect->strength = *o.planted_strength;
    }
    return cfg;
}

int fail(std::string_view type, const std::string& message, const nlohmann::json& extra = {}) {
    nlohmann::ordered_json err;
    err["type"] = type;
    err["message"] = message;
    for (const auto& [k, v] : extra.items()) err[k] = v;
    std::cerr << nlohmann::ordered_json{{"error", err}}.dump() << '\n';
    return type == "missing_artifact" ? 3 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-spanning and disruption analytics for categorized paper corpora"};
    app.require_subcommand(1);
    Overrides o;

    auto* ingest = app.add_subcommand("ingest", "validate the corpus and write corpus.jsonl + parse report");
    add_common(ingest, o);
    ingest->add_option("--input", o.input, "line-delimited JSON corpus")->required();
    ingest->add_option("--report", o.report, "also copy the parse report here (default: stderr)");
    ingest->add_option("--dataset-end-year", o.dataset_end_year, "reference year for paper age");

    auto* train = app.add_subcommand("train", "train category embeddings");
    add_common(train, o);
    add_training(train, o);

    auto* metrics = app.add_subcommand("metrics", "journal, article and network distance per paper");
    add_common(metrics, o);
    metrics->add_flag("--exclude-self", o.exclude_self, "leave the focal paper out of its journal-year vector");
    metrics->add_flag("--tree-export", o.tree_export, "write the knowledge tree edge list");

    auto* disrupt = app.add_subcommand("disrupt", "disruption scores and the unified metrics.csv");
    add_common(disrupt, o);
    disrupt->add_option("--d-variant", o.d_variant, "partitioned|overlapping");

    auto* correlate = app.add_subcommand("correlate", "correlation matrix of the key variables");
    add_common(correlate, o);

    auto* regress = app.add_subcommand("regress", "fit regression model presets");
    add_common(regress, o);
    add_analysis(regress, o);

    auto* curves = app.add_subcommand("curves", "predicted curves for U-shape and moderation plots");
    add_common(curves, o);
    add_analysis(curves, o);

    auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");
    add_common(pipeline, o);
    add_training(pipeline, o);
    add_analysis(pipeline, o);
    pipeline->add_option("--input", o.input, "line-delimited JSON corpus")->required();
    pipeline->add_option("--dataset-end-year", o.dataset_end_year, "reference year for paper age");
    pipeline->add_flag("--exclude-self", o.exclude_self, "leave the focal paper out of its journal-year vector");
    pipeline->add_flag("--tree-export", o.tree_export, "write the knowledge tree edge list");
    pipeline->add_option("--d-variant", o.d_variant, "partitioned|overlapping");

    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic corpus");
    synth->add_option("--config", o.config, "key = value config file (synth.* keys)");
    synth->add_option("--output", o.output, "where to write the corpus")->required();
    synth->add_option("--seed", o.seed, "generator seed");
    synth->add_option("--papers", o.papers, "number of papers");
    synth->add_option("--codes", o.codes, "number of distinct codes");
    synth->add_option("--blocks", o.blocks, "number of code blocks");
    synth->add_option("--codes-per-paper", o.codes_per_paper, "maximum codes per paper");
    synth->add_option("--min-codes-per-paper", o.min_codes_per_paper, "minimum codes per paper");
    synth->add_option("--journals", o.journals, "number of journals");
    synth->add_option("--year-min", o.year_min, "first publication year");
    synth->add_option("--year-max", o.year_max, "last publication year");
    synth->add_option("--citation-density", o.citation_density, "mean references per paper");
    synth->add_option("--leakage", o.leakage, "maximum cross-block probability per code");
    synth->add_option("--planted-quadratic-sign", o.planted_quadratic_sign, "plant a citation quadratic of this sign");
    synth->add_option("--planted-moderator-sign", o.planted_moderator_sign, "team-size moderation of the planted quadratic");
    synth->add_option("--planted-strength", o.planted_strength, "strength of the planted effect");

    CLI11_PARSE(app, argc, argv);

    try {
        const PipelineConfig cfg = resolve(o);
        if (ingest->parsed()) {
            spanning::run_ingest(cfg);
            const auto report = cfg.out_dir / spanning::artifact::kParseReport;
            if (o.report) std::filesystem::copy_file(report, *o.report, std::filesystem::copy_options::overwrite_existing);
            else std::cerr << std::ifstream(report).rdbuf();
        } else if (train->parsed()) {
            spanning::run_train(cfg);
        } else if (metrics->parsed()) {
            spanning::run_metrics(cfg);
        } else if (disrupt->parsed()) {
            spanning::run_disrupt(cfg);
        } else if (correlate->parsed()) {
            spanning::run_correlate(cfg);
        } else if (regress->parsed()) {
            spanning::run_regress(cfg, o.models);
        } else if (curves->parsed()) {
            spanning::run_curves(cfg, o.models);
        } else if (pipeline->parsed()) {
            spanning::run_pipeline(cfg);
        } else if (synth->parsed()) {
            spanning::run_synth(cfg, *o.output);
        }
    } catch (const spanning::MissingArtifactError& e) {
        return fail("missing_artifact", e.what(), {{"file", e.file()}, {"producer", e.producer()}});
    } catch (const spanning::ConfigError& e) {
        return fail("config", e.what());
    } catch (const std::exception& e) {
        return fail("runtime", e.what());
    }
    return 0;
}
