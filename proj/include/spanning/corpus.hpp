#pragma once

#include "spanning/pacs_code.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spanning {

using PaperIndex = std::uint32_t;

class CorpusError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Paper {
    std::string id;
    int year = 0;
    std::string journal;
    std::vector<PacsCode> pacs_codes;  // deduplicated, input order
    int author_count = 1;
    int n_pages = 0;
    int title_length = 0;
    std::vector<std::string> references;  // raw ids, may point outside the corpus

    friend bool operator==(const Paper&, const Paper&) = default;
};

struct ParseConfig {
    int min_year = 1800;
    int max_year = 2100;
    // 0 means "latest publication year in the corpus".
    int dataset_end_year = 0;
};

// Counts by skip reason plus normalization events. Serialized as JSON.
struct ParseReport {
    std::size_t lines_read = 0;
    std::size_t accepted = 0;
    std::map<std::string, std::size_t> skipped;  // reason -> count
    std::size_t duplicate_codes_removed = 0;
    std::size_t padded_codes = 0;
    std::size_t self_references_removed = 0;
    std::vector<std::pair<std::size_t, std::string>> examples;  // (line, reason), first few only

    std::size_t total_skipped() const;
    std::string to_json() const;
};

class Corpus {
public:
    using JournalYear = std::pair<std::string, int>;

    Corpus(std::vector<Paper> papers, int dataset_end_year);

    std::span<const Paper> papers() const { return papers_; }
    const Paper& paper(PaperIndex i) const { return papers_.at(i); }
    std::size_t size() const { return papers_.size(); }

    // Throws CorpusError for unknown ids.
    PaperIndex index_of(const std::string& id) const;
    const PaperIndex* find(const std::string& id) const;

    const std::map<JournalYear, std::vector<PaperIndex>>& journal_year_index() const { return journal_years_; }
    // Throws CorpusError when the journal published nothing that year.
    std::span<const PaperIndex> journal_year_members(const std::string& journal, int year) const;

    int dataset_end_year() const { return dataset_end_year_; }
    // Paper age in years relative to the dataset end year.
    int years_since_publication(PaperIndex i) const { return dataset_end_year_ - papers_[i].year; }

private:
    std::vector<Paper> papers_;
    std::unordered_map<std::string, PaperIndex> by_id_;
    std::map<JournalYear, std::vector<PaperIndex>> journal_years_;
    int dataset_end_year_;
};

struct ParsedCorpus {
    Corpus corpus;
    ParseReport report;
};

// Reads line-delimited JSON records. Invalid records are skipped and counted;
// a duplicate id or an empty result throws CorpusError.
ParsedCorpus parse_corpus(std::istream& in, const ParseConfig& config = {});

// One JSON object, no trailing newline. Parsing the result reproduces the paper.
std::string serialize_paper(const Paper& paper);

struct GraphReport {
    std::size_t kept_edges = 0;
    std::size_t dropped_out_of_corpus = 0;
    std::size_t dropped_year_order = 0;
};

// Citing -> cited edges restricted to in-corpus ids with year(citing) >= year(cited).
class CitationGraph {
public:
    std::span<const PaperIndex> cites(PaperIndex i) const { return cites_[i]; }
    std::span<const PaperIndex> cited_by(PaperIndex i) const { return cited_by_[i]; }
    std::size_t size() const { return cites_.size(); }
    const GraphReport& report() const { return report_; }

    // Both adjacency lists are sorted and duplicate free.
    bool has_edge(PaperIndex citing, PaperIndex cited) const;

private:
    friend CitationGraph build_citation_graph(const Corpus& corpus);

    std::vector<std::vector<PaperIndex>> cites_;
    std::vector<std::vector<PaperIndex>> cited_by_;
    GraphReport report_;
};

CitationGraph build_citation_graph(const Corpus& corpus);

int team_size(const Paper& paper);
std::size_t citation_count(PaperIndex paper, const CitationGraph& graph);
// ln(1 + citations), so uncited papers map to 0.
double log_citation_count(PaperIndex paper, const CitationGraph& graph);

} // namespace spanning
