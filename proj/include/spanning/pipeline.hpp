#pragma once

#include "spanning/corpus.hpp"
#include "spanning/disruption.hpp"
#include "spanning/embedding.hpp"
#include "spanning/stats.hpp"
#include "spanning/synthgen.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spanning {

inline constexpr std::string_view kToolName = "spanning";
inline constexpr std::string_view kToolVersion = "1.0.0";

// Stage artifacts, relative to the output directory.
namespace artifact {
inline constexpr std::string_view kCorpus = "corpus.jsonl";
inline constexpr std::string_view kParseReport = "parse_report.json";
inline constexpr std::string_view kEmbedding = "embedding.txt";
inline constexpr std::string_view kLossLog = "loss.csv";
inline constexpr std::string_view kSpanning = "spanning.csv";
inline constexpr std::string_view kTreeEdges = "tree_edges.csv";
inline constexpr std::string_view kDisruption = "disruption.csv";
inline constexpr std::string_view kMetrics = "metrics.csv";
inline constexpr std::string_view kCorrelation = "correlation.csv";
} // namespace artifact

// Column contract of metrics.csv, in order.
const std::vector<std::string>& metrics_columns();
// Variables of the correlation table.
const std::vector<std::string>& correlation_columns();

// model1-4: log citations; model5-8: disruption percentile. Each has controls
// {n_pages, years, title_length} and team_size as moderator; models 1/5 use
// network distance, 2/6 log article distance, 3/7 journal distance and 4/8
// all three.
std::vector<RegressionSpec> default_model_presets();

class MissingArtifactError : public std::runtime_error {
public:
    MissingArtifactError(std::string file, std::string producer);
    const std::string& file() const { return file_; }
    const std::string& producer() const { return producer_; }

private:
    std::string file_;
    std::string producer_;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct PipelineConfig {
    std::filesystem::path input;
    std::filesystem::path out_dir = "out";
    ParseConfig parse;
    TrainingConfig training;
    bool exclude_self = false;
    DisruptionVariant d_variant = DisruptionVariant::Partitioned;
    Centering center = Centering::None;
    bool loss_log = false;
    bool tree_export = false;
    std::vector<RegressionSpec> models = default_model_presets();
    std::vector<double> moderator_levels;  // empty: mean - sd, mean, mean + sd
    std::size_t curve_points = 50;
    unsigned threads = 0;  // per-paper fan-out; 0 = hardware concurrency
    SynthConfig synth;

    // Applies one "key = value" setting. Throws ConfigError for unknown keys
    // or bad values.
    void set(std::string_view key, std::string_view value);
    // Reads a key = value file; '#' starts a comment.
    void load_file(const std::filesystem::path& path);
    // Stable text of every setting that affects outputs (paths excluded).
    std::string canonical_text() const;

    const RegressionSpec& model(std::string_view name) const;
};

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

void run_ingest(const PipelineConfig& cfg);
void run_train(const PipelineConfig& cfg);
void run_metrics(const PipelineConfig& cfg);
void run_disrupt(const PipelineConfig& cfg);
void run_correlate(const PipelineConfig& cfg);
// Empty `models` fits every configured model.
void run_regress(const PipelineConfig& cfg, const std::vector<std::string>& models = {});
void run_curves(const PipelineConfig& cfg, const std::vector<std::string>& models = {});
void run_pipeline(const PipelineConfig& cfg);
// Writes the synthetic corpus described by cfg.synth to `output`.
void run_synth(const PipelineConfig& cfg, const std::filesystem::path& output);

// Numeric columns of metrics.csv (paper_id dropped, empty cells as NaN).
AnalysisTable read_metrics_table(const std::filesystem::path& metrics_csv);

} // namespace spanning
