#pragma once

#include "spanning/corpus.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace spanning {

// Among papers published no earlier than the focal paper:
//   n_i  cite the focal paper but none of its references
//   n_j  cite the focal paper and at least one reference
//   n_k  cite at least one reference but not the focal paper
struct DisruptionCounts {
    long n_i = 0;
    long n_j = 0;
    long n_k = 0;

    long total() const { return n_i + n_j + n_k; }
    friend bool operator==(const DisruptionCounts&, const DisruptionCounts&) = default;
};

enum class DisruptionVariant {
    // Disjoint classes; D in [-1, 1].
    Partitioned,
    // n_i counts every citer of the focal paper, overlapping n_j.
    Overlapping,
};

DisruptionVariant parse_disruption_variant(std::string_view name);
std::string_view to_string(DisruptionVariant v);

DisruptionCounts disruption_counts(PaperIndex focal, const Corpus& corpus, const CitationGraph& graph,
                                   DisruptionVariant variant = DisruptionVariant::Partitioned);

// (n_i - n_j) / (n_i + n_j + n_k); nullopt when all counts are zero.
std::optional<double> d_score(const DisruptionCounts& counts);

// Midrank percentiles: 100 * (midrank - 0.5) / N, ties sharing the average of
// their ranks. Output is aligned with the input.
std::vector<double> percentile_ranks(std::span<const double> scores);

struct DisruptionScore {
    DisruptionCounts counts;
    std::optional<double> d;
    std::optional<double> percentile;
};

// Scores for every paper; percentiles are ranked over the defined D values only.
std::vector<DisruptionScore> score_corpus(const Corpus& corpus, const CitationGraph& graph,
                                          DisruptionVariant variant = DisruptionVariant::Partitioned,
                                          unsigned threads = 1);

} // namespace spanning
