#pragma once

#include "spanning/corpus.hpp"
#include "spanning/embedding.hpp"

#include <map>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace spanning {

class MetricsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PaperVector {
    std::string paper_id;
    std::vector<double> vector;
};

struct JournalVector {
    std::string journal;
    int year = 0;
    std::vector<double> vector;
    std::size_t n_members = 0;
};

// Mean of the paper's code vectors. Unknown codes raise EmbeddingError.
PaperVector paper_vector(const Paper& paper, const EmbeddingMatrix& emb);

// Mean of the paper vectors of everything `journal` published in `year`.
JournalVector journal_vector(const std::string& journal, int year, const Corpus& corpus, const EmbeddingMatrix& emb);

// Memoizes journal-year vector sums. Lookups may run concurrently.
class JournalVectorCache {
public:
    JournalVectorCache(const Corpus& corpus, const EmbeddingMatrix& emb) : corpus_(corpus), emb_(emb) {}

    JournalVector get(const std::string& journal, int year) const;

    // Journal-year mean with `paper` removed from the members. Throws
    // MetricsError when the paper is the only member.
    std::vector<double> mean_excluding(PaperIndex paper) const;

private:
    struct Entry {
        std::vector<double> sum;
        std::size_t n = 0;
    };
    const Entry& entry(const std::string& journal, int year) const;

    const Corpus& corpus_;
    const EmbeddingMatrix& emb_;
    mutable std::shared_mutex mutex_;
    mutable std::map<Corpus::JournalYear, Entry> entries_;
};

// Cosine distance between the paper vector and its journal-year vector. With
// exclude_self the journal vector leaves the focal paper out.
double journal_distance(PaperIndex paper, const Corpus& corpus, const EmbeddingMatrix& emb, bool exclude_self = false);
double journal_distance(PaperIndex paper, const JournalVectorCache& cache, const Corpus& corpus,
                        const EmbeddingMatrix& emb, bool exclude_self = false);

// Mean pairwise cosine distance of the paper's code vectors; 0 for m = 1.
double article_distance(const Paper& paper, const EmbeddingMatrix& emb);

// Regression form of article distance, ln(1 + d).
double article_distance_log(double article_distance);

} // namespace spanning
