#include "spanning/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace spanning::csv {

std::string format(double x) {
    if (std::isnan(x)) return {};
    if (x == 0.0) return "0";  // folds -0
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string format(const std::optional<double>& x) { return x ? format(*x) : std::string{}; }

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line.push_back(',');
        line += escape(fields[i]);
    }
    line.push_back('\n');
    out << line;
}

std::vector<std::string> split(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back().push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back().push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back().push_back(c);
        }
    }
    return fields;
}

double parse_double(std::string_view cell) {
    if (cell.empty()) return std::nan("");
    double x = 0.0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
    if (ec != std::errc() || p != cell.data() + cell.size())
        throw std::invalid_argument("not a number: '" + std::string(cell) + "'");
    return x;
}

std::size_t Table::index(std::string_view column) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column) return i;
    throw std::out_of_range("CSV has no column '" + std::string(column) + "'");
}

Table read(std::istream& in) {
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        auto fields = split(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
            throw std::invalid_argument("CSV row has " + std::to_string(fields.size()) + " fields, header has " +
                                        std::to_string(t.header.size()));
        t.rows.push_back(std::move(fields));
    }
    if (!have_header) throw std::invalid_argument("CSV input has no header row");
    return t;
}

} // namespace spanning::csv
