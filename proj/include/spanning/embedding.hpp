#pragma once

#include "spanning/corpus.hpp"
#include "spanning/pacs_code.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace spanning {

class EmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Codes sorted canonically, with the number of papers carrying each.
struct Vocabulary {
    std::vector<PacsCode> codes;
    std::vector<std::uint64_t> counts;

    std::size_t size() const { return codes.size(); }
};

struct TrainingPair {
    std::uint32_t center;
    std::uint32_t context;

    friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

struct TrainingData {
    Vocabulary vocabulary;
    std::vector<TrainingPair> pairs;  // indices into vocabulary.codes
};

// Papers are documents and codes are words. The context window is the whole
// paper: m codes give all m(m-1) ordered pairs, a single code gives none.
TrainingData build_training_pairs(const Corpus& corpus);

struct TrainingConfig {
    int dim = 50;
    int negatives_per_positive = 5;
    int epochs = 5;
    double initial_learning_rate = 0.025;
    double final_learning_rate = 1e-4;
    double noise_exponent = 0.75;
    std::uint64_t seed = 1;
    // Single-threaded and bit-reproducible. When false, workers update shared
    // weights without coordination and results vary run to run.
    bool deterministic = true;
    unsigned threads = 0;  // 0 = hardware concurrency; ignored when deterministic

    // Throws EmbeddingError describing the first violated constraint.
    void validate() const;
};

class EmbeddingMatrix {
public:
    EmbeddingMatrix(std::size_t dim, std::vector<PacsCode> codes, std::vector<double> values);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return codes_.size(); }
    std::span<const PacsCode> codes() const { return codes_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
    // Throws EmbeddingError naming the code when it is not in the vocabulary.
    std::span<const double> vector(const PacsCode& code) const;
    bool contains(const PacsCode& code) const { return index_.contains(code.canonical()); }

    // "dim=<M> vocab=<V>" header, then "<code> <M floats>" per line. Values are
    // written in shortest round-trip form, so read(write(m)) == m exactly.
    void write(std::ostream& out) const;
    static EmbeddingMatrix read(std::istream& in);

    EmbeddingMatrix scaled(double factor) const;

    friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
        return a.dim_ == b.dim_ && a.codes_ == b.codes_ && a.values_ == b.values_;
    }

private:
    std::size_t dim_;
    std::vector<PacsCode> codes_;
    std::vector<double> values_;  // row-major, size() x dim()
    std::unordered_map<std::string, std::size_t> index_;
};

struct TrainingResult {
    EmbeddingMatrix matrix;       // input (center-side) vectors
    std::vector<double> epoch_loss;  // mean loss per positive pair, one entry per epoch
};

TrainingResult train_embeddings(const TrainingData& data, const TrainingConfig& config);

// Negative-sampling loss for one positive pair and its sampled negatives:
//   -log s(u_o . v) - sum_k log s(-u_k . v)
// with v the center's input vector and u the output vectors.
struct SgnsGradient {
    double loss = 0.0;
    std::vector<double> center;
    std::vector<double> context;
    std::vector<std::vector<double>> negatives;
};

SgnsGradient sgns_loss_and_gradient(std::span<const double> center, std::span<const double> context,
                                    std::span<const std::vector<double>> negatives);

// The in-place SGD update the trainer applies: every vector moves by
// -learning_rate times its gradient, evaluated at the pre-update point.
// Returns the loss before the update.
double sgns_step(std::span<double> center, std::span<double> context, std::span<std::vector<double>> negatives,
                 double learning_rate);

double cosine_similarity(std::span<const double> u, std::span<const double> v);
// 1 - cos(u, v), clamped to [0, 2]. Throws EmbeddingError on zero-norm input
// or mismatched lengths.
double cosine_distance(std::span<const double> u, std::span<const double> v);

} // namespace spanning
