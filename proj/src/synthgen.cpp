#include "spanning/synthgen.hpp"

#include "spanning/knowledge_tree.hpp"
#include "spanning/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_set>

namespace spanning {
namespace {

constexpr std::size_t kMaxBlocks = 100;
constexpr int kMaxTeam = 25;
constexpr std::uint64_t kCodeStream = 0x9e3779b97f4a7c15ULL;

std::size_t draw_weighted(Rng& rng, std::span<const double> cumulative) {
    const double x = rng.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

std::string paper_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "P%07zu", i + 1);
    return buf;
}

// Mean pairwise tree distance scaled to [0, 1].
double spanning_proxy(const std::vector<PacsCode>& codes) {
    if (codes.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < codes.size(); ++i)
        for (std::size_t j = i + 1; j < codes.size(); ++j)
            total += 2.0 * (KnowledgeTree::kLeafLevel - lca_level(codes[i], codes[j]));
    const double pairs = static_cast<double>(codes.size() * (codes.size() - 1) / 2);
    return total / pairs / 10.0;
}

struct Draft {
    Paper paper;
    double proxy = 0.0;
};

} // namespace

std::size_t SynthConfig::block_size(std::size_t block) const {
    return n_codes / n_blocks + (block < n_codes % n_blocks ? 1 : 0);
}

void SynthConfig::validate() const {
    if (n_papers == 0 || n_codes == 0 || n_blocks == 0 || codes_per_paper == 0 || n_journals == 0)
        throw SynthConfigError("synthetic corpus counts must all be positive");
    if (n_blocks > kMaxBlocks) throw SynthConfigError("at most 100 code blocks are supported");
    if (n_blocks > n_codes) throw SynthConfigError("more blocks than codes");
    if (codes_per_paper > n_codes) throw SynthConfigError("codes_per_paper exceeds n_codes");
    if (min_codes_per_paper == 0 || min_codes_per_paper > codes_per_paper)
        throw SynthConfigError("min_codes_per_paper must be in [1, codes_per_paper]");
    if (year_min > year_max) throw SynthConfigError("year range is empty");
    if (citation_density < 0.0) throw SynthConfigError("citation_density must be nonnegative");
    for (double p : {leakage, journal_affinity, external_reference_rate})
        if (!(p >= 0.0 && p <= 1.0)) throw SynthConfigError("probabilities must lie in [0, 1]");
    if (!block_weights.empty()) {
        if (block_weights.size() != n_blocks) throw SynthConfigError("block_weights needs one weight per block");
        if (std::any_of(block_weights.begin(), block_weights.end(), [](double w) { return !(w >= 0.0); }) ||
            std::accumulate(block_weights.begin(), block_weights.end(), 0.0) <= 0.0)
            throw SynthConfigError("block_weights must be nonnegative with a positive sum");
    }
    if (leakage == 0.0 || n_blocks == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            const bool used = block_weights.empty() || block_weights[b] > 0.0;
            if (used && block_size(b) < codes_per_paper)
                throw SynthConfigError("codes_per_paper exceeds the size of block " + std::to_string(b) +
                                       " and leakage is zero");
        }
    }
}

std::vector<std::string> generated_code_table(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed ^ kCodeStream);
    std::unordered_set<std::string> used;
    std::vector<std::string> table;
    table.reserve(config.n_codes);
    for (std::size_t i = 0; i < config.n_codes; ++i) {
        const std::size_t block = i % config.n_blocks;
        std::string code(8, '.');
        code[0] = static_cast<char>('0' + block % 10);
        code[1] = static_cast<char>('0' + block / 10);
        do {
            code[3] = static_cast<char>('0' + rng.below(3));
            code[4] = static_cast<char>('0' + rng.below(10));
            code[6] = static_cast<char>('A' + rng.below(26));
            code[7] = static_cast<char>('a' + rng.below(26));
        } while (!used.insert(code).second);
        table.push_back(code);
    }
    return table;
}

std::vector<Paper> generate_papers(const SynthConfig& config) {
    config.validate();
    const auto table = generated_code_table(config);
    std::vector<std::vector<PacsCode>> blocks(config.n_blocks);
    for (std::size_t i = 0; i < table.size(); ++i) blocks[i % config.n_blocks].push_back(PacsCode::parse(table[i]));

    std::vector<double> block_cum(config.n_blocks);
    for (std::size_t b = 0; b < config.n_blocks; ++b)
        block_cum[b] = (b ? block_cum[b - 1] : 0.0) + (config.block_weights.empty() ? 1.0 : config.block_weights[b]);

    std::vector<std::vector<std::size_t>> journals_for_block(config.n_blocks);
    for (std::size_t j = 0; j < config.n_journals; ++j) journals_for_block[j % config.n_blocks].push_back(j);

    Rng rng(config.seed);
    std::vector<Draft> drafts(config.n_papers);
    std::vector<int> years(config.n_papers);
    for (auto& y : years) y = config.year_min + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.year_max - config.year_min) + 1));
    std::sort(years.begin(), years.end());

    std::vector<std::size_t> taken;
    for (std::size_t i = 0; i < config.n_papers; ++i) {
        Paper& p = drafts[i].paper;
        p.id = paper_id(i);
        p.year = years[i];

        const std::size_t home = draw_weighted(rng, block_cum);
        const auto& local = journals_for_block[home];
        const std::size_t journal = !local.empty() && rng.bernoulli(config.journal_affinity)
                                        ? local[rng.below(local.size())]
                                        : rng.below(config.n_journals);
        p.journal = "J" + std::to_string(journal + 1);

        const std::size_t m =
            config.min_codes_per_paper + rng.below(config.codes_per_paper - config.min_codes_per_paper + 1);
        const double spread = rng.uniform() * config.leakage;
        taken.clear();
        while (p.pacs_codes.size() < m) {
            std::size_t block = home;
            if (!p.pacs_codes.empty() && config.n_blocks > 1 && rng.bernoulli(spread)) {
                block = rng.below(config.n_blocks - 1);
                if (block >= home) ++block;
            }
            auto room = [&](std::size_t b) {
                const auto used = std::count_if(taken.begin(), taken.end(),
                                                [&](std::size_t key) { return key / config.n_codes == b; });
                return static_cast<std::size_t>(used) < blocks[b].size();
            };
            while (!room(block)) block = (block + 1) % config.n_blocks;
            const auto& pool = blocks[block];
            const std::size_t pick = rng.below(pool.size());
            const std::size_t key = block * config.n_codes + pick;
            if (std::find(taken.begin(), taken.end(), key) != taken.end()) continue;
            taken.push_back(key);
            p.pacs_codes.push_back(pool[pick]);
        }

        p.author_count = std::min(kMaxTeam, 1 + static_cast<int>(rng.poisson(2.5)));
        p.n_pages = 3 + static_cast<int>(rng.poisson(6.0));
        p.title_length = 4 + static_cast<int>(rng.poisson(6.0));
        drafts[i].proxy = spanning_proxy(p.pacs_codes);
    }

    // Attractiveness drives who gets cited.
    std::vector<double> weight(config.n_papers, 1.0);
    if (config.planted_effect) {
        const PlantedEffect& fx = *config.planted_effect;
        double mean_team = 0.0, var_team = 0.0;
        for (const auto& d : drafts) mean_team += d.paper.author_count;
        mean_team /= static_cast<double>(drafts.size());
        for (const auto& d : drafts) var_team += std::pow(d.paper.author_count - mean_team, 2);
        const double sd_team = std::sqrt(var_team / static_cast<double>(drafts.size()));
        for (std::size_t i = 0; i < drafts.size(); ++i) {
            const double bowl = 4.0 * std::pow(drafts[i].proxy - 0.5, 2);
            const double z = sd_team > 0.0 ? (drafts[i].paper.author_count - mean_team) / sd_team : 0.0;
            weight[i] = std::exp(fx.strength * (fx.quadratic_sign * bowl + fx.moderator_sign * z * bowl));
        }
    }
    std::vector<double> cum(config.n_papers);
    std::partial_sum(weight.begin(), weight.end(), cum.begin());

    std::size_t external = 0;
    for (std::size_t i = 1; i < config.n_papers; ++i) {
        Paper& p = drafts[i].paper;
        const std::size_t wanted = std::min<std::size_t>(rng.poisson(config.citation_density), i);
        std::set<std::size_t> refs;
        const std::span<const double> earlier(cum.data(), i);
        for (std::size_t attempt = 0; refs.size() < wanted && attempt < 4 * wanted + 8; ++attempt)
            refs.insert(draw_weighted(rng, earlier));
        for (std::size_t r : refs) p.references.push_back(paper_id(r));
        if (rng.bernoulli(config.external_reference_rate)) p.references.push_back("EXT" + std::to_string(++external));
    }

    std::vector<Paper> papers;
    papers.reserve(drafts.size());
    for (auto& d : drafts) papers.push_back(std::move(d.paper));
    return papers;
}

void generate(const SynthConfig& config, std::ostream& out) {
    for (const Paper& p : generate_papers(config)) out << serialize_paper(p) << '\n';
}

} // namespace spanning
