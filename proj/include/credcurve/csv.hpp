/**
 * @file csv.hpp
 * @brief Minimal header-addressed CSV reading and number formatting
 */

#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "credcurve/error.hpp"

namespace credcurve {

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// CSV with a header row; columns are looked up by name.
class CsvTable {
public:
    static CsvTable read(std::istream& in) {
        CsvTable t;
        std::string line;
        std::size_t lineno = 0;
        bool have_header = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            auto fields = split(line);
            if (!have_header) {
                for (std::size_t i = 0; i < fields.size(); ++i) t.columns_[trim(fields[i])] = i;
                have_header = true;
                continue;
            }
            t.rows_.push_back({lineno, std::move(fields)});
        }
        require(have_header, ErrorCode::parse, "CSV input has no header row");
        return t;
    }

    bool has(const std::string& column) const { return columns_.count(column) != 0; }

    void require_columns(std::initializer_list<const char*> names) const {
        for (const char* n : names) require(has(n), ErrorCode::parse, std::string("CSV missing column '") + n + "'");
    }

    /// Field of `row` in `column`, trimmed; empty when the row is short.
    std::string get(const CsvRow& row, const std::string& column) const {
        auto it = columns_.find(column);
        require(it != columns_.end(), ErrorCode::parse, "CSV missing column '" + column + "'");
        return it->second < row.fields.size() ? trim(row.fields[it->second]) : std::string{};
    }

    const std::vector<CsvRow>& rows() const { return rows_; }

private:
    static std::string trim(std::string_view s) {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string_view::npos) return {};
        const auto e = s.find_last_not_of(" \t");
        return std::string(s.substr(b, e - b + 1));
    }

    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    cur += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                out.push_back(std::move(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        out.push_back(std::move(cur));
        return out;
    }

    std::map<std::string, std::size_t> columns_;
    std::vector<CsvRow> rows_;
};

inline double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::logic_error&) {
    }
    fail(ErrorCode::parse, what + ": not a finite number '" + text + "'");
}

inline int parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used == text.size()) return v;
    } catch (const std::logic_error&) {
    }
    fail(ErrorCode::parse, what + ": not an integer '" + text + "'");
}

inline bool parse_bool(const std::string& text, const std::string& what) {
    std::string lower;
    for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "true" || lower == "1") return true;
    if (lower == "false" || lower == "0") return false;
    fail(ErrorCode::parse, what + ": not a boolean '" + text + "'");
}

/// Decimal text with `digits` significant digits; "NA" for NaN.
inline std::string format_number(double v, int digits = 12) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace credcurve
