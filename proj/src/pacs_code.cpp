#include "spanning/pacs_code.hpp"

#include <algorithm>
#include <cctype>

namespace spanning {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool allowed_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '_';
}

std::optional<std::string> significant_chars(std::string_view text) {
    std::string out;
    for (char c : trim(text)) {
        if (c == '.') continue;
        if (!allowed_char(c)) return std::nullopt;
        out.push_back(c);
    }
    return out;
}

// "dd.dd": two dot-separated groups of two characters.
bool is_coarse_label(std::string_view text) {
    text = trim(text);
    if (text.size() == 4) return std::all_of(text.begin(), text.end(), allowed_char);
    return text.size() == 5 && text[2] == '.' && allowed_char(text[0]) && allowed_char(text[1]) &&
           allowed_char(text[3]) && allowed_char(text[4]);
}

} // namespace

PacsCode::PacsCode(std::string_view six) {
    std::copy_n(six.begin(), kSignificant, significant_.begin());
    canonical_.reserve(8);
    canonical_.append(six.substr(0, 2)).push_back('.');
    canonical_.append(six.substr(2, 2)).push_back('.');
    canonical_.append(six.substr(4, 2));
}

PacsCode PacsCode::parse(std::string_view text) {
    auto sig = significant_chars(text);
    if (!sig || sig->size() != kSignificant)
        throw InvalidCodeError("invalid category code '" + std::string(text) +
                               "': expected six significant characters");
    return PacsCode(*sig);
}

std::optional<PacsCode::ParseOutcome> PacsCode::try_parse_lenient(std::string_view text) {
    auto sig = significant_chars(text);
    if (!sig) return std::nullopt;
    if (sig->size() == kSignificant) return ParseOutcome{PacsCode(*sig), false};
    if (sig->size() == 4 && is_coarse_label(text)) {
        *sig += kFillerSuffix;
        return ParseOutcome{PacsCode(*sig), true};
    }
    return std::nullopt;
}

std::string PacsCode::ancestor(int level) const {
    if (level < 2 || level > kLeafLevel) throw std::out_of_range("ancestor level must be in [2, 6]");
    return std::string(significant().substr(0, prefix_length_for_level(level)));
}

std::array<std::string, 5> PacsCode::ancestry() const {
    return {ancestor(2), ancestor(3), ancestor(4), ancestor(5), ancestor(6)};
}

} // namespace spanning
