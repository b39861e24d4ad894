#pragma once

// Small corpus builders shared by the test binaries.

#include "spanning/corpus.hpp"
#include "spanning/random.hpp"

#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

inline spanning::Paper paper(std::string id, int year, std::vector<std::string> codes,
                             std::vector<std::string> refs = {}, std::string journal = "J") {
    spanning::Paper p;
    p.id = std::move(id);
    p.year = year;
    p.journal = std::move(journal);
    for (const auto& c : codes) p.pacs_codes.push_back(spanning::PacsCode::parse(c));
    p.references = std::move(refs);
    p.n_pages = 4;
    p.title_length = 6;
    return p;
}

inline spanning::Corpus corpus(std::vector<spanning::Paper> papers) {
    int end = 0;
    for (const auto& p : papers) end = std::max(end, p.year);
    return spanning::Corpus(std::move(papers), end);
}

// Random six-character code over a small alphabet so prefixes collide often.
inline std::string random_code(spanning::Rng& rng) {
    static constexpr std::string_view digits = "0123";
    static constexpr std::string_view letters = "ABab";
    std::string s;
    s += digits[rng.below(digits.size())];
    s += digits[rng.below(digits.size())];
    s += '.';
    s += digits[rng.below(digits.size())];
    s += digits[rng.below(digits.size())];
    s += '.';
    s += letters[rng.below(letters.size())];
    s += letters[rng.below(letters.size())];
    return s;
}

inline std::vector<std::string> distinct_codes(spanning::Rng& rng, std::size_t n) {
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < n) {
        auto c = random_code(rng);
        if (seen.insert(c).second) out.push_back(c);
    }
    return out;
}

// Two disjoint blocks of ten codes; each paper draws 2..5 codes from one block.
inline std::string block_code(int block, int i) {
    return std::string(block == 0 ? "11.11.A" : "22.22.B") + char('0' + i);
}

inline spanning::Corpus two_block_corpus(std::uint64_t seed, std::size_t n_papers = 2000) {
    spanning::Rng rng(seed);
    std::vector<spanning::Paper> papers;
    for (std::size_t k = 0; k < n_papers; ++k) {
        const int block = static_cast<int>(rng.below(2));
        std::vector<int> idx{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
        rng.shuffle(std::span<int>(idx));
        const std::size_t m = 2 + rng.below(4);
        std::vector<std::string> codes;
        for (std::size_t j = 0; j < m; ++j) codes.push_back(block_code(block, idx[j]));
        papers.push_back(paper("P" + std::to_string(k), 2000, codes));
    }
    return corpus(std::move(papers));
}

} // namespace fixtures
