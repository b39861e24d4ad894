#include "spanning/pipeline.hpp"

#include "spanning/csv.hpp"
#include "spanning/knowledge_tree.hpp"
#include "spanning/metrics_space.hpp"
#include "spanning/parallel.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace spanning {
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kControls{"n_pages", "years", "title_length"};
constexpr std::string_view kModerator = "team_size";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in{std::string(s)};
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
    return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    T x{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty())
        throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key));
    return x;
}

bool parse_bool(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("bad boolean '" + v + "' for " + std::string(key));
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

fs::path artifact_path(const PipelineConfig& cfg, std::string_view name) { return cfg.out_dir / fs::path(name); }

fs::path require_artifact(const PipelineConfig& cfg, std::string_view name, std::string_view producer) {
    fs::path p = artifact_path(cfg, name);
    if (!fs::exists(p)) throw MissingArtifactError(p.string(), std::string(producer));
    return p;
}

void ensure_out_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec || !fs::is_directory(cfg.out_dir))
        throw std::runtime_error("cannot create output directory " + cfg.out_dir.string());
}

// Inputs and outputs are keyed by file name so manifests do not depend on
// where the output directory lives.
void write_manifest(const PipelineConfig& cfg, std::string_view stage, const std::vector<fs::path>& inputs,
                    const std::vector<fs::path>& outputs) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["stage"] = stage;
    j["seed"] = cfg.training.seed;
    j["deterministic"] = cfg.training.deterministic;
    j["config_hash"] = sha256_hex(cfg.canonical_text());
    nlohmann::ordered_json in = nlohmann::ordered_json::object();
    for (const auto& p : inputs) in[p.filename().string()] = sha256_file(p);
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& p : outputs) out[p.filename().string()] = sha256_file(p);
    j["inputs"] = std::move(in);
    j["outputs"] = std::move(out);
    write_file(cfg.out_dir / ("manifest_" + std::string(stage) + ".json"), j.dump(2) + "\n");
}

ParsedCorpus load_corpus(const PipelineConfig& cfg) {
    std::ifstream in(require_artifact(cfg, artifact::kCorpus, "ingest"), std::ios::binary);
    return parse_corpus(in, cfg.parse);
}

EmbeddingMatrix load_embedding(const PipelineConfig& cfg) {
    std::ifstream in(require_artifact(cfg, artifact::kEmbedding, "train"), std::ios::binary);
    return EmbeddingMatrix::read(in);
}

std::vector<RegressionSpec> selected_models(const PipelineConfig& cfg, const std::vector<std::string>& names) {
    std::vector<RegressionSpec> out;
    if (names.empty()) out = cfg.models;
    else
        for (const auto& n : names) out.push_back(cfg.model(n));
    for (auto& m : out) m.centering = cfg.center;
    return out;
}

std::string format_int(long v) { return std::to_string(v); }

} // namespace

const std::vector<std::string>& metrics_columns() {
    static const std::vector<std::string> cols{
        "paper_id",     "journal_distance", "article_distance", "article_distance_log", "network_distance",
        "team_size",    "citation_count",   "log_citations",    "d_score",              "d_percentile",
        "d_n_i",        "d_n_j",            "d_n_k",            "years",                "n_pages",
        "title_length"};
    return cols;
}

const std::vector<std::string>& correlation_columns() {
    static const std::vector<std::string> cols{"journal_distance", "article_distance_log", "network_distance",
                                               "team_size",        "log_citations",        "d_percentile"};
    return cols;
}

std::vector<RegressionSpec> default_model_presets() {
    const std::vector<std::vector<std::string>> predictor_sets{{"network_distance"},
                                                               {"article_distance_log"},
                                                               {"journal_distance"},
                                                               {"network_distance", "article_distance_log", "journal_distance"}};
    std::vector<RegressionSpec> models;
    int number = 1;
    for (const char* outcome : {"log_citations", "d_percentile"}) {
        for (const auto& predictors : predictor_sets) {
            RegressionSpec s;
            s.name = "model" + std::to_string(number++);
            s.outcome = outcome;
            s.controls = kControls;
            s.predictors = predictors;
            s.moderator = std::string(kModerator);
            models.push_back(std::move(s));
        }
    }
    return models;
}

MissingArtifactError::MissingArtifactError(std::string file, std::string producer)
    : std::runtime_error("missing " + file + "; run the '" + producer + "' subcommand first"),
      file_(std::move(file)),
      producer_(std::move(producer)) {}

void PipelineConfig::set(std::string_view raw_key, std::string_view value) {
    const std::string key = trim(raw_key);
    const std::string v = trim(value);

    if (key.rfind("model.", 0) == 0) {
        const auto dot = key.find('.', 6);
        if (dot == std::string::npos) throw ConfigError("model keys look like model.<name>.<field>: " + key);
        const std::string name = key.substr(6, dot - 6);
        const std::string field = key.substr(dot + 1);
        auto it = std::find_if(models.begin(), models.end(), [&](const auto& m) { return m.name == name; });
        if (it == models.end()) {
            RegressionSpec fresh;
            fresh.name = name;
            models.push_back(std::move(fresh));
            it = models.end() - 1;
        }
        if (field == "outcome") it->outcome = v;
        else if (field == "predictors") it->predictors = split_list(v);
        else if (field == "controls") it->controls = split_list(v);
        else if (field == "moderator") it->moderator = v.empty() || v == "none" ? std::nullopt : std::optional(v);
        else throw ConfigError("unknown model field '" + field + "'");
        return;
    }

    if (key.rfind("synth.", 0) == 0) {
        const std::string f = key.substr(6);
        auto planted = [&]() -> PlantedEffect& {
            if (!synth.planted_effect) synth.planted_effect.emplace();
            return *synth.planted_effect;
        };
        if (f == "seed") synth.seed = parse_number<std::uint64_t>(key, v);
        else if (f == "n_papers") synth.n_papers = parse_number<std::size_t>(key, v);
        else if (f == "n_codes") synth.n_codes = parse_number<std::size_t>(key, v);
        else if (f == "n_blocks") synth.n_blocks = parse_number<std::size_t>(key, v);
        else if (f == "codes_per_paper") synth.codes_per_paper = parse_number<std::size_t>(key, v);
        else if (f == "min_codes_per_paper") synth.min_codes_per_paper = parse_number<std::size_t>(key, v);
        else if (f == "n_journals") synth.n_journals = parse_number<std::size_t>(key, v);
        else if (f == "year_min") synth.year_min = parse_number<int>(key, v);
        else if (f == "year_max") synth.year_max = parse_number<int>(key, v);
        else if (f == "citation_density") synth.citation_density = parse_number<double>(key, v);
        else if (f == "leakage") synth.leakage = parse_number<double>(key, v);
        else if (f == "journal_affinity") synth.journal_affinity = parse_number<double>(key, v);
        else if (f == "external_reference_rate") synth.external_reference_rate = parse_number<double>(key, v);
        else if (f == "block_weights") {
            synth.block_weights.clear();
            for (const auto& w : split_list(v)) synth.block_weights.push_back(parse_number<double>(key, w));
        } else if (f == "planted_quadratic_sign") planted().quadratic_sign = parse_number<double>(key, v);
        else if (f == "planted_moderator_sign") planted().moderator_sign = parse_number<double>(key, v);
        else if (f == "planted_strength") planted().strength = parse_number<double>(key, v);
        else throw ConfigError("unknown setting '" + key + "'");
        return;
    }

    if (key == "input") input = v;
    else if (key == "out_dir") out_dir = v;
    else if (key == "seed") training.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "dim") training.dim = parse_number<int>(key, v);
    else if (key == "negatives") training.negatives_per_positive = parse_number<int>(key, v);
    else if (key == "epochs") training.epochs = parse_number<int>(key, v);
    else if (key == "learning_rate") training.initial_learning_rate = parse_number<double>(key, v);
    else if (key == "final_learning_rate") training.final_learning_rate = parse_number<double>(key, v);
    else if (key == "noise_exponent") training.noise_exponent = parse_number<double>(key, v);
    else if (key == "deterministic") training.deterministic = parse_bool(key, v);
    else if (key == "threads") threads = training.threads = parse_number<unsigned>(key, v);
    else if (key == "min_year") parse.min_year = parse_number<int>(key, v);
    else if (key == "max_year") parse.max_year = parse_number<int>(key, v);
    else if (key == "dataset_end_year") parse.dataset_end_year = parse_number<int>(key, v);
    else if (key == "exclude_self") exclude_self = parse_bool(key, v);
    else if (key == "d_variant") {
        try {
            d_variant = parse_disruption_variant(v);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "center") {
        try {
            center = parse_centering(v);
        } catch (const StatsError& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "loss_log") loss_log = parse_bool(key, v);
    else if (key == "tree_export") tree_export = parse_bool(key, v);
    else if (key == "curve_points") curve_points = parse_number<std::size_t>(key, v);
    else if (key == "moderator_levels") {
        moderator_levels.clear();
        for (const auto& l : split_list(v)) moderator_levels.push_back(parse_number<double>(key, l));
    } else throw ConfigError("unknown setting '" + key + "'");
}

void PipelineConfig::load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

std::string PipelineConfig::canonical_text() const {
    std::ostringstream s;
    s << std::setprecision(17);
    s << "seed=" << training.seed << '\n'
      << "dim=" << training.dim << '\n'
      << "negatives=" << training.negatives_per_positive << '\n'
      << "epochs=" << training.epochs << '\n'
      << "learning_rate=" << training.initial_learning_rate << '\n'
      << "final_learning_rate=" << training.final_learning_rate << '\n'
      << "noise_exponent=" << training.noise_exponent << '\n'
      << "deterministic=" << training.deterministic << '\n'
      << "min_year=" << parse.min_year << '\n'
      << "max_year=" << parse.max_year << '\n'
      << "dataset_end_year=" << parse.dataset_end_year << '\n'
      << "exclude_self=" << exclude_self << '\n'
      << "d_variant=" << to_string(d_variant) << '\n'
      << "center=" << (center == Centering::Mean ? "mean" : "none") << '\n'
      << "loss_log=" << loss_log << '\n'
      << "tree_export=" << tree_export << '\n'
      << "curve_points=" << curve_points << '\n'
      << "moderator_levels=";
    for (double l : moderator_levels) s << l << ',';
    s << '\n';
    for (const auto& m : models) {
        s << "model." << m.name << ".outcome=" << m.outcome << '\n'
          << "model." << m.name << ".controls=" << join(m.controls) << '\n'
          << "model." << m.name << ".predictors=" << join(m.predictors) << '\n'
          << "model." << m.name << ".moderator=" << m.moderator.value_or("none") << '\n';
    }
    return s.str();
}

const RegressionSpec& PipelineConfig::model(std::string_view name) const {
    for (const auto& m : models)
        if (m.name == name) return m;
    throw ConfigError("no model named '" + std::string(name) + "'");
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

void run_ingest(const PipelineConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("ingest needs an input corpus (--input)");
    if (!fs::exists(cfg.input)) throw std::runtime_error("input corpus " + cfg.input.string() + " does not exist");
    ensure_out_dir(cfg);

    ParsedCorpus parsed = [&] {
        std::ifstream in(cfg.input, std::ios::binary);
        return parse_corpus(in, cfg.parse);
    }();
    const CitationGraph graph = build_citation_graph(parsed.corpus);

    std::string corpus_text;
    for (const Paper& p : parsed.corpus.papers()) corpus_text += serialize_paper(p) + "\n";
    const fs::path corpus_path = artifact_path(cfg, artifact::kCorpus);
    write_file(corpus_path, corpus_text);

    auto report = nlohmann::ordered_json::parse(parsed.report.to_json());
    report["dataset_end_year"] = parsed.corpus.dataset_end_year();
    report["citation_graph"] = {{"kept_edges", graph.report().kept_edges},
                                {"dropped_out_of_corpus", graph.report().dropped_out_of_corpus},
                                {"dropped_year_order", graph.report().dropped_year_order}};
    const fs::path report_path = artifact_path(cfg, artifact::kParseReport);
    write_file(report_path, report.dump(2) + "\n");
    write_manifest(cfg, "ingest", {cfg.input}, {corpus_path, report_path});
}

void run_train(const PipelineConfig& cfg) {
    const ParsedCorpus parsed = load_corpus(cfg);
    const TrainingResult trained = train_embeddings(build_training_pairs(parsed.corpus), cfg.training);

    std::ostringstream emb;
    trained.matrix.write(emb);
    const fs::path emb_path = artifact_path(cfg, artifact::kEmbedding);
    write_file(emb_path, emb.str());
    std::vector<fs::path> outputs{emb_path};
    if (cfg.loss_log) {
        std::ostringstream loss;
        csv::write_row(loss, {"epoch", "mean_loss"});
        for (std::size_t e = 0; e < trained.epoch_loss.size(); ++e)
            csv::write_row(loss, {std::to_string(e + 1), csv::format(trained.epoch_loss[e])});
        outputs.push_back(artifact_path(cfg, artifact::kLossLog));
        write_file(outputs.back(), loss.str());
    }
    write_manifest(cfg, "train", {artifact_path(cfg, artifact::kCorpus)}, outputs);
}

void run_metrics(const PipelineConfig& cfg) {
    const ParsedCorpus parsed = load_corpus(cfg);
    const EmbeddingMatrix emb = load_embedding(cfg);
    const Corpus& corpus = parsed.corpus;
    for (const Paper& p : corpus.papers())
        for (const PacsCode& c : p.pacs_codes)
            if (!emb.contains(c))
                throw EmbeddingError("code '" + c.canonical() + "' of paper '" + p.id +
                                     "' is missing from the embedding; rerun 'train'");

    const KnowledgeTree tree = build_tree(corpus);
    const JournalVectorCache cache(corpus, emb);
    struct Row {
        double journal = std::nan("");
        double article = 0.0;
        double network = 0.0;
    };
    std::vector<Row> rows(corpus.size());
    parallel_for(corpus.size(), cfg.threads, [&](std::size_t i) {
        const auto idx = static_cast<PaperIndex>(i);
        const Paper& p = corpus.paper(idx);
        try {
            rows[i].journal = journal_distance(idx, cache, corpus, emb, cfg.exclude_self);
        } catch (const MetricsError&) {
            // sole member of its journal-year with exclude_self
        } catch (const EmbeddingError&) {
            // zero-norm paper or journal vector
        }
        rows[i].article = article_distance(p, emb);
        rows[i].network = network_distance(p, tree);
    });

    std::ostringstream out;
    csv::write_row(out, {"paper_id", "journal_distance", "article_distance", "article_distance_log", "network_distance"});
    for (std::size_t i = 0; i < rows.size(); ++i)
        csv::write_row(out, {corpus.paper(static_cast<PaperIndex>(i)).id, csv::format(rows[i].journal),
                             csv::format(rows[i].article), csv::format(article_distance_log(rows[i].article)),
                             csv::format(rows[i].network)});
    const fs::path path = artifact_path(cfg, artifact::kSpanning);
    write_file(path, out.str());
    std::vector<fs::path> outputs{path};
    if (cfg.tree_export) {
        std::ostringstream edges;
        tree.write_edges(edges);
        outputs.push_back(artifact_path(cfg, artifact::kTreeEdges));
        write_file(outputs.back(), edges.str());
    }
    write_manifest(cfg, "metrics", {artifact_path(cfg, artifact::kCorpus), artifact_path(cfg, artifact::kEmbedding)},
                   outputs);
}

void run_disrupt(const PipelineConfig& cfg) {
    const ParsedCorpus parsed = load_corpus(cfg);
    const fs::path spanning_path = require_artifact(cfg, artifact::kSpanning, "metrics");
    const Corpus& corpus = parsed.corpus;
    const CitationGraph graph = build_citation_graph(corpus);
    const auto scores = score_corpus(corpus, graph, cfg.d_variant, cfg.threads);

    std::ostringstream dis;
    csv::write_row(dis, {"paper_id", "d_score", "d_percentile", "d_n_i", "d_n_j", "d_n_k", "years"});
    for (PaperIndex i = 0; i < corpus.size(); ++i) {
        const auto& s = scores[i];
        csv::write_row(dis, {corpus.paper(i).id, csv::format(s.d), csv::format(s.percentile), format_int(s.counts.n_i),
                             format_int(s.counts.n_j), format_int(s.counts.n_k),
                             format_int(corpus.years_since_publication(i))});
    }
    const fs::path dis_path = artifact_path(cfg, artifact::kDisruption);
    write_file(dis_path, dis.str());

    csv::Table spanning_table = [&] {
        std::ifstream in(spanning_path, std::ios::binary);
        return csv::read(in);
    }();
    if (spanning_table.rows.size() != corpus.size())
        throw std::runtime_error(spanning_path.string() + " does not match the ingested corpus; rerun 'metrics'");
    const std::size_t c_id = spanning_table.index("paper_id");
    const std::size_t c_jd = spanning_table.index("journal_distance");
    const std::size_t c_ad = spanning_table.index("article_distance");
    const std::size_t c_adl = spanning_table.index("article_distance_log");
    const std::size_t c_nd = spanning_table.index("network_distance");

    std::ostringstream met;
    csv::write_row(met, metrics_columns());
    for (PaperIndex i = 0; i < corpus.size(); ++i) {
        const Paper& p = corpus.paper(i);
        const auto& row = spanning_table.rows[i];
        if (row[c_id] != p.id)
            throw std::runtime_error(spanning_path.string() + " row " + std::to_string(i + 1) +
                                     " does not match paper '" + p.id + "'; rerun 'metrics'");
        const auto& s = scores[i];
        const std::size_t citations = citation_count(i, graph);
        csv::write_row(met, {p.id, row[c_jd], row[c_ad], row[c_adl], row[c_nd], format_int(team_size(p)),
                             format_int(static_cast<long>(citations)), csv::format(log_citation_count(i, graph)),
                             csv::format(s.d), csv::format(s.percentile), format_int(s.counts.n_i),
                             format_int(s.counts.n_j), format_int(s.counts.n_k),
                             format_int(corpus.years_since_publication(i)), format_int(p.n_pages),
                             format_int(p.title_length)});
    }
    const fs::path met_path = artifact_path(cfg, artifact::kMetrics);
    write_file(met_path, met.str());
    write_manifest(cfg, "disrupt", {artifact_path(cfg, artifact::kCorpus), spanning_path}, {dis_path, met_path});
}

AnalysisTable read_metrics_table(const fs::path& metrics_csv) {
    std::ifstream in(metrics_csv, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + metrics_csv.string());
    const csv::Table t = csv::read(in);
    AnalysisTable table;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (t.header[c] == "paper_id") continue;
        std::vector<double> values;
        values.reserve(t.rows.size());
        for (const auto& row : t.rows) values.push_back(csv::parse_double(row[c]));
        table.add_column(t.header[c], std::move(values));
    }
    return table;
}

void run_correlate(const PipelineConfig& cfg) {
    const fs::path met = require_artifact(cfg, artifact::kMetrics, "disrupt");
    const AnalysisTable table = read_metrics_table(met);
    const CorrelationMatrix m = pearson_matrix(table, correlation_columns());
    std::ostringstream out;
    m.write_csv(out);
    const fs::path path = artifact_path(cfg, artifact::kCorrelation);
    write_file(path, out.str());
    write_manifest(cfg, "correlate", {met}, {path});
}

void run_regress(const PipelineConfig& cfg, const std::vector<std::string>& models) {
    const fs::path met = require_artifact(cfg, artifact::kMetrics, "disrupt");
    const AnalysisTable table = read_metrics_table(met);
    std::vector<fs::path> outputs;
    for (const auto& spec : selected_models(cfg, models)) {
        const RegressionResult res = fit_model(spec, table);
        std::ostringstream out;
        res.write_csv(out);
        outputs.push_back(cfg.out_dir / ("regression_" + spec.name + ".csv"));
        write_file(outputs.back(), out.str());
    }
    write_manifest(cfg, "regress", {met}, outputs);
}

void run_curves(const PipelineConfig& cfg, const std::vector<std::string>& models) {
    const fs::path met = require_artifact(cfg, artifact::kMetrics, "disrupt");
    const AnalysisTable table = read_metrics_table(met);
    if (cfg.curve_points < 2) throw ConfigError("curve_points must be at least 2");
    std::vector<fs::path> outputs;
    for (const auto& spec : selected_models(cfg, models)) {
        const RegressionResult res = fit_model(spec, table);
        std::vector<double> levels = cfg.moderator_levels;
        if (spec.moderator && levels.empty()) {
            const AnalysisTable used = table.complete_cases(spec.columns());
            const auto& z = used.column(*spec.moderator);
            double mean = 0.0, var = 0.0;
            for (double v : z) mean += v;
            mean /= static_cast<double>(z.size());
            for (double v : z) var += (v - mean) * (v - mean);
            const double sd = std::sqrt(var / static_cast<double>(z.size() - 1));
            const auto [lo, hi] = res.raw_ranges.at(*spec.moderator);
            levels = {std::max(lo, mean - sd), mean, std::min(hi, mean + sd)};
        }
        std::vector<CurvePoint> points;
        for (const auto& predictor : spec.predictors) {
            const auto [lo, hi] = res.raw_ranges.at(predictor);
            std::vector<double> grid(cfg.curve_points);
            for (std::size_t g = 0; g < grid.size(); ++g)
                grid[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid.size() - 1);
            auto curve = predicted_curve(res, predictor, grid, levels);
            points.insert(points.end(), curve.begin(), curve.end());
        }
        std::ostringstream out;
        write_curve_csv(out, points);
        outputs.push_back(cfg.out_dir / ("curves_" + spec.name + ".csv"));
        write_file(outputs.back(), out.str());
    }
    write_manifest(cfg, "curves", {met}, outputs);
}

void run_pipeline(const PipelineConfig& cfg) {
    run_ingest(cfg);
    run_train(cfg);
    run_metrics(cfg);
    run_disrupt(cfg);
    run_correlate(cfg);
    run_regress(cfg);
    run_curves(cfg);
}

void run_synth(const PipelineConfig& cfg, const fs::path& output) {
    std::ostringstream out;
    generate(cfg.synth, out);
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    write_file(output, out.str());
}

} // namespace spanning
