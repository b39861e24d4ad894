#pragma once

#include "spanning/corpus.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spanning {

class SynthConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Citation attractiveness planted as exp(strength * shape) with
//   shape = quadratic_sign * 4 (x - 1/2)^2
//         + moderator_sign * z * 4 (x - 1/2)^2
// where x is the paper's mean code-pair tree distance divided by 10 and z is
// its standardized team size.
struct PlantedEffect {
    double quadratic_sign = -1.0;
    double moderator_sign = 0.0;
    double strength = 2.0;
};

struct SynthConfig {
    std::uint64_t seed = 7;
    std::size_t n_papers = 5000;
    std::size_t n_codes = 240;
    std::size_t n_blocks = 6;
    std::size_t codes_per_paper = 5;
    std::size_t min_codes_per_paper = 1;
    std::size_t n_journals = 8;
    int year_min = 1990;
    int year_max = 2015;
    double citation_density = 8.0;         // mean references per paper
    double leakage = 0.3;                  // max per-code probability of leaving the paper's block
    double journal_affinity = 0.7;         // chance a paper appears in a journal serving its block
    double external_reference_rate = 0.05; // references to ids outside the corpus
    std::vector<double> block_weights;     // empty means uniform
    std::optional<PlantedEffect> planted_effect;

    // Throws SynthConfigError for infeasible settings.
    void validate() const;
    std::size_t block_size(std::size_t block) const;
};

// Papers in publication order. References only point to earlier papers.
std::vector<Paper> generate_papers(const SynthConfig& config);

// Same records as line-delimited JSON, the format parse_corpus reads.
void generate(const SynthConfig& config, std::ostream& out);

// Canonical code strings in table order; code i belongs to block i % n_blocks.
std::vector<std::string> generated_code_table(const SynthConfig& config);

} // namespace spanning
