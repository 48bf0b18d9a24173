#pragma once

#include "swtle/errors.hpp"

#include <cctype>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace swtle {

/// Minimal CSV table: comma separated, header row required, '.' decimal,
/// UTF-8, no quoting.
struct Csv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    static Csv read(std::istream& in, const std::string& name = "<stream>") {
        Csv out;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto cells = split(line);
            if (out.columns.empty()) {
                out.columns = std::move(cells);
                continue;
            }
            if (cells.size() != out.columns.size())
                throw DataError(name + ": row at line " + std::to_string(lineno) + " has " +
                                std::to_string(cells.size()) + " cells, header has " +
                                std::to_string(out.columns.size()));
            out.rows.push_back(std::move(cells));
        }
        if (out.columns.empty()) throw DataError(name + ": missing header row");
        return out;
    }

    static Csv read_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError(path + ": cannot open");
        return read(in, path);
    }

    void write(std::ostream& out) const {
        out << join(columns) << '\n';
        for (const auto& row : rows) out << join(row) << '\n';
    }

    void write_file(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw DataError(path + ": cannot open for writing");
        write(out);
    }

    /// Exact, case-sensitive lookup; -1 when absent.
    std::ptrdiff_t find_column(std::string_view name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<std::ptrdiff_t>(i);
        return -1;
    }

    /// Case-insensitive substring lookup (UCI headers carry units and case
    /// quirks); -1 when absent.
    std::ptrdiff_t find_column_containing(std::string_view needle) const {
        const std::string low = lower(std::string(needle));
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (lower(columns[i]).find(low) != std::string::npos)
                return static_cast<std::ptrdiff_t>(i);
        return -1;
    }

    std::ptrdiff_t require_column_containing(std::string_view needle, const std::string& name) const {
        const auto idx = find_column_containing(needle);
        if (idx < 0)
            throw DataError(name + ": missing required column matching '" + std::string(needle) + "'");
        return idx;
    }

    /// Parse a whole column as finite doubles; names the offending data row
    /// (1-based, excluding the header) on failure.
    std::vector<double> numeric_column(std::size_t idx, const std::string& name = "<csv>") const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::string& cell = rows[r][idx];
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
                throw DataError(name + ": column '" + columns[idx] + "' row " + std::to_string(r + 1) +
                                ": not a finite number: '" + cell + "'");
            out.push_back(v);
        }
        return out;
    }

    static std::string format_double(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

private:
    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(trim(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        cells.push_back(trim(cur));
        return cells;
    }

    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    static std::string lower(std::string s) {
        for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    }

    static std::string join(const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out.push_back(',');
            out += cells[i];
        }
        return out;
    }
};

} // namespace swtle
