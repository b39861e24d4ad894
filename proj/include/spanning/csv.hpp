#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spanning::csv {

// Shortest decimal form that round-trips; NaN becomes an empty cell.
std::string format(double x);
std::string format(const std::optional<double>& x);

// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split(std::string_view line);

// Empty cell -> NaN. Throws std::invalid_argument for anything unparsable.
double parse_double(std::string_view cell);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Throws std::out_of_range when the column is absent.
    std::size_t index(std::string_view column) const;
};

// Header row plus records; lines starting with '#' are ignored.
Table read(std::istream& in);

} // namespace spanning::csv
