#include "spanning/disruption.hpp"

#include "spanning/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace spanning {

DisruptionVariant parse_disruption_variant(std::string_view name) {
    if (name == "partitioned") return DisruptionVariant::Partitioned;
    if (name == "overlapping") return DisruptionVariant::Overlapping;
    throw std::invalid_argument("unknown disruption variant '" + std::string(name) +
                                "' (expected partitioned or overlapping)");
}

std::string_view to_string(DisruptionVariant v) {
    return v == DisruptionVariant::Partitioned ? "partitioned" : "overlapping";
}

DisruptionCounts disruption_counts(PaperIndex focal, const Corpus& corpus, const CitationGraph& graph,
                                   DisruptionVariant variant) {
    const int focal_year = corpus.paper(focal).year;
    auto qualifies = [&](PaperIndex c) { return c != focal && corpus.paper(c).year >= focal_year; };

    std::vector<PaperIndex> citers;
    for (PaperIndex c : graph.cited_by(focal))
        if (qualifies(c)) citers.push_back(c);

    std::vector<PaperIndex> ref_citers;
    for (PaperIndex r : graph.cites(focal))
        for (PaperIndex c : graph.cited_by(r))
            if (qualifies(c)) ref_citers.push_back(c);
    std::sort(ref_citers.begin(), ref_citers.end());
    ref_citers.erase(std::unique(ref_citers.begin(), ref_citers.end()), ref_citers.end());

    // cited_by lists are sorted, so `citers` is too.
    DisruptionCounts counts;
    std::size_t a = 0, b = 0;
    while (a < citers.size() || b < ref_citers.size()) {
        if (b == ref_citers.size() || (a < citers.size() && citers[a] < ref_citers[b])) {
            ++counts.n_i;
            ++a;
        } else if (a == citers.size() || ref_citers[b] < citers[a]) {
            ++counts.n_k;
            ++b;
        } else {
            ++counts.n_j;
            ++a;
            ++b;
        }
    }
    if (variant == DisruptionVariant::Overlapping) counts.n_i += counts.n_j;
    return counts;
}

std::optional<double> d_score(const DisruptionCounts& counts) {
    if (counts.n_i < 0 || counts.n_j < 0 || counts.n_k < 0) throw std::invalid_argument("negative disruption count");
    const long total = counts.total();
    if (total == 0) return std::nullopt;
    return static_cast<double>(counts.n_i - counts.n_j) / static_cast<double>(total);
}

std::vector<double> percentile_ranks(std::span<const double> scores) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    std::vector<double> pct(n);
    const double count = static_cast<double>(n);
    for (std::size_t lo = 0; lo < n;) {
        std::size_t hi = lo + 1;
        while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
        // 1-based ranks lo+1 .. hi share their average.
        const double midrank = (static_cast<double>(lo + 1) + static_cast<double>(hi)) / 2.0;
        const double value = 100.0 * (midrank - 0.5) / count;
        for (std::size_t k = lo; k < hi; ++k) pct[order[k]] = value;
        lo = hi;
    }
    return pct;
}

std::vector<DisruptionScore> score_corpus(const Corpus& corpus, const CitationGraph& graph,
                                          DisruptionVariant variant, unsigned threads) {
    std::vector<DisruptionScore> out(corpus.size());
    parallel_for(corpus.size(), threads, [&](std::size_t i) {
        out[i].counts = disruption_counts(static_cast<PaperIndex>(i), corpus, graph, variant);
        out[i].d = d_score(out[i].counts);
    });

    std::vector<double> defined;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!out[i].d) continue;
        defined.push_back(*out[i].d);
        where.push_back(i);
    }
    const auto pct = percentile_ranks(defined);
    for (std::size_t k = 0; k < where.size(); ++k) out[where[k]].percentile = pct[k];
    return out;
}

} // namespace spanning
