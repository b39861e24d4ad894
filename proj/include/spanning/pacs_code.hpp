#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spanning {

class InvalidCodeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Six-character hierarchical category code, stored canonically as "dd.dd.cc".
//
// Ancestry follows the character-prefix scheme of the knowledge tree:
//   level 2: first character        (discipline)
//   level 3: first two characters   (subdiscipline)
//   level 4: first three characters
//   level 5: first four characters
//   level 6: all six characters     (leaf)
class PacsCode {
public:
    static constexpr std::size_t kSignificant = 6;
    static constexpr int kLeafLevel = 6;
    // Suffix given to codes only attested at "dd.dd" granularity.
    static constexpr std::string_view kFillerSuffix = "__";

    struct ParseOutcome;

    // Throws InvalidCodeError unless the code has exactly six significant
    // characters once dots and surrounding whitespace are removed.
    static PacsCode parse(std::string_view text);

    // Like parse(), but additionally accepts four-character "dd.dd" labels by
    // padding them with kFillerSuffix. Returns nullopt for anything invalid.
    static std::optional<ParseOutcome> try_parse_lenient(std::string_view text);

    const std::string& canonical() const { return canonical_; }
    // Dotless six-character form.
    std::string_view significant() const { return {significant_.data(), kSignificant}; }

    // Label of the ancestor at `level` (2..6). Level 1 is the root.
    std::string ancestor(int level) const;
    // Labels for levels 2..6, each a strict prefix of the next.
    std::array<std::string, 5> ancestry() const;

    bool padded() const { return significant().substr(4) == kFillerSuffix; }

    friend bool operator==(const PacsCode&, const PacsCode&) = default;
    friend auto operator<=>(const PacsCode& a, const PacsCode& b) { return a.canonical_ <=> b.canonical_; }

private:
    explicit PacsCode(std::string_view six);

    std::array<char, kSignificant> significant_{};
    std::string canonical_;
};

struct PacsCode::ParseOutcome {
    PacsCode code;
    bool padded = false;
};

// Number of leading characters shared by a level label.
constexpr std::size_t prefix_length_for_level(int level) {
    switch (level) {
    case 1: return 0;
    case 2: return 1;
    case 3: return 2;
    case 4: return 3;
    case 5: return 4;
    default: return 6;
    }
}

} // namespace spanning

template <>
struct std::hash<spanning::PacsCode> {
    std::size_t operator()(const spanning::PacsCode& c) const noexcept {
        return std::hash<std::string>{}(c.canonical());
    }
};
