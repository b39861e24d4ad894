#include "spanning/metrics_space.hpp"

#include <cmath>
#include <mutex>

namespace spanning {
namespace {

void accumulate(std::vector<double>& sum, std::span<const double> v) {
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += v[d];
}

std::vector<double> divided(std::vector<double> v, std::size_t n) {
    const double count = static_cast<double>(n);
    for (double& x : v) x /= count;
    return v;
}

std::vector<double> paper_sum(const Paper& paper, const EmbeddingMatrix& emb) {
    std::vector<double> sum(emb.dim(), 0.0);
    for (const PacsCode& c : paper.pacs_codes) accumulate(sum, emb.vector(c));
    return sum;
}

} // namespace

PaperVector paper_vector(const Paper& paper, const EmbeddingMatrix& emb) {
    if (paper.pacs_codes.empty()) throw MetricsError("paper '" + paper.id + "' has no codes");
    return {paper.id, divided(paper_sum(paper, emb), paper.pacs_codes.size())};
}

JournalVector journal_vector(const std::string& journal, int year, const Corpus& corpus, const EmbeddingMatrix& emb) {
    std::span<const PaperIndex> members;
    try {
        members = corpus.journal_year_members(journal, year);
    } catch (const CorpusError& e) {
        throw MetricsError(e.what());
    }
    std::vector<double> sum(emb.dim(), 0.0);
    for (PaperIndex i : members) accumulate(sum, paper_vector(corpus.paper(i), emb).vector);
    return {journal, year, divided(std::move(sum), members.size()), members.size()};
}

const JournalVectorCache::Entry& JournalVectorCache::entry(const std::string& journal, int year) const {
    const Corpus::JournalYear key{journal, year};
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    std::span<const PaperIndex> members;
    try {
        members = corpus_.journal_year_members(journal, year);
    } catch (const CorpusError& err) {
        throw MetricsError(err.what());
    }
    Entry e{std::vector<double>(emb_.dim(), 0.0), members.size()};
    for (PaperIndex i : members) accumulate(e.sum, paper_vector(corpus_.paper(i), emb_).vector);
    std::unique_lock lock(mutex_);
    // std::map references stay valid across later insertions.
    return entries_.try_emplace(key, std::move(e)).first->second;
}

JournalVector JournalVectorCache::get(const std::string& journal, int year) const {
    const Entry& e = entry(journal, year);
    return {journal, year, divided(e.sum, e.n), e.n};
}

std::vector<double> JournalVectorCache::mean_excluding(PaperIndex paper) const {
    const Paper& p = corpus_.paper(paper);
    const Entry& e = entry(p.journal, p.year);
    if (e.n < 2)
        throw MetricsError("paper '" + p.id + "' is the only member of " + p.journal + " " + std::to_string(p.year));
    std::vector<double> sum = e.sum;
    const auto own = paper_vector(p, emb_).vector;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] -= own[d];
    return divided(std::move(sum), e.n - 1);
}

double journal_distance(PaperIndex paper, const JournalVectorCache& cache, const Corpus& corpus,
                        const EmbeddingMatrix& emb, bool exclude_self) {
    const Paper& p = corpus.paper(paper);
    const auto v = paper_vector(p, emb).vector;
    const auto journal = exclude_self ? cache.mean_excluding(paper) : cache.get(p.journal, p.year).vector;
    return cosine_distance(v, journal);
}

double journal_distance(PaperIndex paper, const Corpus& corpus, const EmbeddingMatrix& emb, bool exclude_self) {
    const JournalVectorCache cache(corpus, emb);
    return journal_distance(paper, cache, corpus, emb, exclude_self);
}

double article_distance(const Paper& paper, const EmbeddingMatrix& emb) {
    const auto& codes = paper.pacs_codes;
    if (codes.empty()) throw MetricsError("paper '" + paper.id + "' has no codes");
    std::vector<std::span<const double>> vecs;
    vecs.reserve(codes.size());
    for (const PacsCode& c : codes) vecs.push_back(emb.vector(c));
    if (vecs.size() == 1) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = i + 1; j < vecs.size(); ++j) total += cosine_distance(vecs[i], vecs[j]);
    return total * 2.0 / static_cast<double>(vecs.size() * (vecs.size() - 1));
}

double article_distance_log(double article_distance) { return std::log1p(article_distance); }

} // namespace spanning
