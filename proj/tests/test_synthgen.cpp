#include "spanning/knowledge_tree.hpp"
#include "spanning/stats.hpp"
#include "spanning/synthgen.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace spanning;

namespace {

std::string generate_text(const SynthConfig& cfg) {
    std::ostringstream out;
    generate(cfg, out);
    return out.str();
}

std::size_t block_of(const PacsCode& code) {
    const auto s = code.significant();
    return static_cast<std::size_t>(s[0] - '0') + 10 * static_cast<std::size_t>(s[1] - '0');
}

// The bundled corpus: default generator settings with a planted inverted U.
SynthConfig bundled_config() {
    SynthConfig cfg;
    cfg.planted_effect = PlantedEffect{};
    return cfg;
}

} // namespace

TEST_CASE("same seed gives byte-identical output") {
    SynthConfig cfg;
    cfg.n_papers = 800;
    CHECK(generate_text(cfg) == generate_text(cfg));
    auto other = cfg;
    other.seed = 8;
    CHECK(generate_text(other) != generate_text(cfg));
}

TEST_CASE("code table follows the block layout") {
    SynthConfig cfg;
    const auto table = generated_code_table(cfg);
    CHECK(table.size() == cfg.n_codes);
    CHECK(std::set<std::string>(table.begin(), table.end()).size() == table.size());
    for (std::size_t i = 0; i < table.size(); ++i) CHECK(block_of(PacsCode::parse(table[i])) == i % cfg.n_blocks);
}

TEST_CASE("zero leakage keeps every paper inside one block") {
    SynthConfig cfg;
    cfg.n_blocks = 2;
    cfg.leakage = 0;
    cfg.n_papers = 2000;
    for (const auto& p : generate_papers(cfg)) {
        std::set<std::size_t> blocks;
        for (const auto& c : p.pacs_codes) blocks.insert(block_of(c));
        REQUIRE(blocks.size() == 1);
    }
}

TEST_CASE("generated records parse with zero skips and cite backward") {
    SynthConfig cfg;
    cfg.n_papers = 3000;
    std::istringstream in(generate_text(cfg));
    const auto parsed = parse_corpus(in);
    CHECK(parsed.report.total_skipped() == 0);
    CHECK(parsed.report.self_references_removed == 0);
    CHECK(parsed.report.duplicate_codes_removed == 0);
    CHECK(parsed.corpus.size() == 3000);
    const auto graph = build_citation_graph(parsed.corpus);
    CHECK(graph.report().dropped_year_order == 0);
    CHECK(graph.report().kept_edges > 0);
    for (const auto& p : parsed.corpus.papers()) {
        CHECK(p.pacs_codes.size() >= cfg.min_codes_per_paper);
        CHECK(p.pacs_codes.size() <= cfg.codes_per_paper);
        CHECK(p.year >= cfg.year_min);
        CHECK(p.year <= cfg.year_max);
        CHECK(p.author_count >= 1);
        CHECK(p.author_count <= 25);
        for (const auto& r : p.references) {
            if (const PaperIndex* j = parsed.corpus.find(r)) CHECK(parsed.corpus.paper(*j).year <= p.year);
        }
    }
}

TEST_CASE("block frequencies follow the configured weights") {
    SynthConfig cfg;
    cfg.n_papers = 10000;
    cfg.n_blocks = 4;
    cfg.leakage = 0;
    cfg.block_weights = {0.1, 0.2, 0.3, 0.4};
    std::vector<double> observed(4, 0.0);
    for (const auto& p : generate_papers(cfg)) observed[block_of(p.pacs_codes.front())] += 1;
    double chi2 = 0;
    for (std::size_t b = 0; b < 4; ++b) {
        const double expected = cfg.block_weights[b] * cfg.n_papers;
        chi2 += (observed[b] - expected) * (observed[b] - expected) / expected;
    }
    MESSAGE("chi-square = " << chi2);
    // 99.9th percentile of chi-square with 3 degrees of freedom.
    CHECK(chi2 < 16.266);
}

TEST_CASE("infeasible configurations are rejected") {
    SynthConfig cfg;
    cfg.n_codes = 12;
    cfg.n_blocks = 6;
    cfg.codes_per_paper = 3;
    cfg.leakage = 0;
    CHECK_THROWS_AS(cfg.validate(), SynthConfigError);
    CHECK_THROWS_AS(generate_papers(cfg), SynthConfigError);

    SynthConfig empty_years;
    empty_years.year_min = 2010;
    empty_years.year_max = 2000;
    CHECK_THROWS_AS(empty_years.validate(), SynthConfigError);

    SynthConfig zero;
    zero.n_papers = 0;
    CHECK_THROWS_AS(zero.validate(), SynthConfigError);

    SynthConfig too_many;
    too_many.codes_per_paper = too_many.n_codes + 1;
    CHECK_THROWS_AS(too_many.validate(), SynthConfigError);
}

TEST_CASE("planted negative quadratic is recovered at 10,000 papers") {
    auto cfg = bundled_config();
    cfg.n_papers = 10000;
    std::istringstream in(generate_text(cfg));
    const auto parsed = parse_corpus(in);
    const auto& corpus = parsed.corpus;
    const auto graph = build_citation_graph(corpus);
    const auto tree = build_tree(corpus);
    std::vector<double> nd, y;
    for (PaperIndex i = 0; i < corpus.size(); ++i) {
        nd.push_back(network_distance(corpus.paper(i), tree));
        y.push_back(log_citation_count(i, graph));
    }
    AnalysisTable t;
    t.add_column("log_citations", y);
    t.add_column("network_distance", nd);
    RegressionSpec spec;
    spec.name = "planted";
    spec.outcome = "log_citations";
    spec.predictors = {"network_distance"};
    const auto r = fit_model(spec, t);
    const auto& sq = r.coefficient("network_distance^2");
    MESSAGE("x^2 = " << sq.estimate << " p = " << sq.p);
    CHECK(sq.estimate < 0);
    CHECK(sq.p < 0.001);
}

#ifdef SPANNING_DATA_DIR
TEST_CASE("bundled corpus is the seeded generator output") {
    std::ifstream in(SPANNING_DATA_DIR "/synthetic_5000.jsonl", std::ios::binary);
    REQUIRE(in);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    CHECK(bytes.str() == generate_text(bundled_config()));
}
#endif
