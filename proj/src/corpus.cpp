#include "spanning/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace spanning {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxReportExamples = 20;

// Record-level rejection; the line is skipped and counted under `reason`.
struct Skip {
    std::string reason;
};

const json& require(const json& rec, const char* key) {
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) throw Skip{"missing_field"};
    return *it;
}

int require_int(const json& rec, const char* key) {
    const json& v = require(rec, key);
    if (!v.is_number_integer()) throw Skip{"invalid_field"};
    auto value = v.get<std::int64_t>();
    if (value < 0) throw Skip{"negative_value"};
    if (value > std::numeric_limits<int>::max()) throw Skip{"invalid_field"};
    return static_cast<int>(value);
}

std::string require_string(const json& rec, const char* key) {
    const json& v = require(rec, key);
    if (!v.is_string()) throw Skip{"invalid_field"};
    auto s = v.get<std::string>();
    if (s.empty()) throw Skip{"invalid_field"};
    return s;
}

int word_count(const std::string& title) {
    std::istringstream words(title);
    int n = 0;
    for (std::string w; words >> w;) ++n;
    return n;
}

Paper paper_from_json(const json& rec, const ParseConfig& config, ParseReport& report) {
    if (!rec.is_object()) throw Skip{"not_object"};

    Paper p;
    p.id = require_string(rec, "id");

    const json& year = require(rec, "year");
    if (!year.is_number_integer()) throw Skip{"invalid_field"};
    auto y = year.get<std::int64_t>();
    if (y < config.min_year || y > config.max_year) throw Skip{"year_out_of_range"};
    p.year = static_cast<int>(y);

    p.journal = require_string(rec, "journal");

    const json& codes = require(rec, "pacs_codes");
    if (!codes.is_array()) throw Skip{"invalid_field"};
    std::size_t padded = 0;
    std::size_t duplicates = 0;
    for (const json& c : codes) {
        if (!c.is_string()) throw Skip{"invalid_code"};
        auto parsed = PacsCode::try_parse_lenient(c.get<std::string>());
        if (!parsed) throw Skip{"invalid_code"};
        if (std::find(p.pacs_codes.begin(), p.pacs_codes.end(), parsed->code) != p.pacs_codes.end()) {
            ++duplicates;
            continue;
        }
        padded += parsed->padded;
        p.pacs_codes.push_back(parsed->code);
    }
    if (p.pacs_codes.empty()) throw Skip{"no_codes"};

    if (auto it = rec.find("author_count"); it != rec.end() && !it->is_null()) {
        p.author_count = require_int(rec, "author_count");
    } else {
        const json& authors = require(rec, "authors");
        if (!authors.is_array()) throw Skip{"invalid_field"};
        p.author_count = static_cast<int>(authors.size());
    }
    if (p.author_count == 0) throw Skip{"zero_authors"};

    p.n_pages = require_int(rec, "n_pages");

    if (auto it = rec.find("title_length"); it != rec.end() && !it->is_null()) {
        p.title_length = require_int(rec, "title_length");
    } else {
        const json& title = require(rec, "title");
        if (!title.is_string()) throw Skip{"invalid_field"};
        p.title_length = word_count(title.get<std::string>());
    }

    const json& refs = require(rec, "references");
    if (!refs.is_array()) throw Skip{"invalid_field"};
    std::size_t self_refs = 0;
    for (const json& r : refs) {
        if (!r.is_string()) throw Skip{"invalid_field"};
        auto ref = r.get<std::string>();
        if (ref == p.id) {
            ++self_refs;
            continue;
        }
        p.references.push_back(std::move(ref));
    }

    report.padded_codes += padded;
    report.duplicate_codes_removed += duplicates;
    report.self_references_removed += self_refs;
    return p;
}

} // namespace

std::size_t ParseReport::total_skipped() const {
    std::size_t n = 0;
    for (const auto& [reason, count] : skipped) n += count;
    return n;
}

std::string ParseReport::to_json() const {
    nlohmann::ordered_json j;
    j["lines_read"] = lines_read;
    j["accepted"] = accepted;
    j["skipped_total"] = total_skipped();
    j["skipped"] = skipped;
    j["duplicate_codes_removed"] = duplicate_codes_removed;
    j["padded_codes"] = padded_codes;
    j["self_references_removed"] = self_references_removed;
    auto ex = nlohmann::ordered_json::array();
    for (const auto& [line, reason] : examples) ex.push_back({{"line", line}, {"reason", reason}});
    j["examples"] = std::move(ex);
    return j.dump(2);
}

Corpus::Corpus(std::vector<Paper> papers, int dataset_end_year)
    : papers_(std::move(papers)), dataset_end_year_(dataset_end_year) {
    if (papers_.empty()) throw CorpusError("corpus is empty");
    if (papers_.size() > std::numeric_limits<PaperIndex>::max()) throw CorpusError("corpus too large");
    int latest = papers_.front().year;
    by_id_.reserve(papers_.size());
    for (PaperIndex i = 0; i < papers_.size(); ++i) {
        const Paper& p = papers_[i];
        if (!by_id_.emplace(p.id, i).second) throw CorpusError("duplicate paper id '" + p.id + "'");
        journal_years_[{p.journal, p.year}].push_back(i);
        latest = std::max(latest, p.year);
    }
    if (dataset_end_year_ == 0) dataset_end_year_ = latest;
}

PaperIndex Corpus::index_of(const std::string& id) const {
    if (const PaperIndex* i = find(id)) return *i;
    throw CorpusError("unknown paper id '" + id + "'");
}

const PaperIndex* Corpus::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &it->second;
}

std::span<const PaperIndex> Corpus::journal_year_members(const std::string& journal, int year) const {
    auto it = journal_years_.find({journal, year});
    if (it == journal_years_.end())
        throw CorpusError("journal '" + journal + "' has no papers in " + std::to_string(year));
    return it->second;
}

ParsedCorpus parse_corpus(std::istream& in, const ParseConfig& config) {
    ParseReport report;
    std::vector<Paper> papers;
    std::unordered_map<std::string, std::size_t> first_line;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++report.lines_read;
        try {
            json rec;
            try {
                rec = json::parse(line);
            } catch (const json::parse_error&) {
                throw Skip{"malformed_json"};
            }
            Paper p = paper_from_json(rec, config, report);
            auto [it, fresh] = first_line.emplace(p.id, line_no);
            if (!fresh)
                throw CorpusError("duplicate paper id '" + p.id + "' on lines " + std::to_string(it->second) +
                                  " and " + std::to_string(line_no));
            papers.push_back(std::move(p));
            ++report.accepted;
        } catch (const Skip& skip) {
            ++report.skipped[skip.reason];
            if (report.examples.size() < kMaxReportExamples) report.examples.emplace_back(line_no, skip.reason);
        }
    }
    if (papers.empty()) throw CorpusError("corpus is empty after validation");
    return {Corpus(std::move(papers), config.dataset_end_year), std::move(report)};
}

std::string serialize_paper(const Paper& p) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["year"] = p.year;
    j["journal"] = p.journal;
    auto codes = nlohmann::ordered_json::array();
    for (const auto& c : p.pacs_codes) codes.push_back(c.canonical());
    j["pacs_codes"] = std::move(codes);
    j["author_count"] = p.author_count;
    j["n_pages"] = p.n_pages;
    j["title_length"] = p.title_length;
    j["references"] = p.references;
    return j.dump();
}

bool CitationGraph::has_edge(PaperIndex citing, PaperIndex cited) const {
    const auto& out = cites_[citing];
    return std::binary_search(out.begin(), out.end(), cited);
}

CitationGraph build_citation_graph(const Corpus& corpus) {
    CitationGraph g;
    const std::size_t n = corpus.size();
    g.cites_.resize(n);
    g.cited_by_.resize(n);
    for (PaperIndex a = 0; a < n; ++a) {
        const Paper& citing = corpus.paper(a);
        auto& out = g.cites_[a];
        for (const auto& ref : citing.references) {
            const PaperIndex* b = corpus.find(ref);
            if (!b) {
                ++g.report_.dropped_out_of_corpus;
                continue;
            }
            if (citing.year < corpus.paper(*b).year) {
                ++g.report_.dropped_year_order;
                continue;
            }
            out.push_back(*b);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        for (PaperIndex b : out) g.cited_by_[b].push_back(a);
        g.report_.kept_edges += out.size();
    }
    // Citers are appended in increasing index order, so cited_by is already sorted.
    return g;
}

int team_size(const Paper& paper) {
    if (paper.author_count < 1) throw CorpusError("paper '" + paper.id + "' has no authors");
    return paper.author_count;
}

std::size_t citation_count(PaperIndex paper, const CitationGraph& graph) {
    return graph.cited_by(paper).size();
}

double log_citation_count(PaperIndex paper, const CitationGraph& graph) {
    return std::log1p(static_cast<double>(citation_count(paper, graph)));
}

} // namespace spanning
