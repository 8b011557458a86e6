#ifndef HLC_CSV_HPP
#define HLC_CSV_HPP

// Comma-delimited, '.' decimal separator, independent of the global locale.
//
//   series file : quarter,value      rows like 1995Q1,89792 (empty value = missing)
//   yearly file : year,value         rows like 1995,89792
//   frame file  : quarter,<col1>,<col2>,...

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hlc/error.hpp"
#include "hlc/quarter.hpp"
#include "hlc/series.hpp"

namespace hlc::csv {

/// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw DomainError("cannot format number");
    return std::string(buf, ptr);
}

inline std::string format_cell(const Observation& v) { return v ? format_number(*v) : std::string(); }

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

}  // namespace detail

inline Observation parse_cell(std::string_view cell) {
    cell = detail::trim(cell);
    if (cell.empty() || cell == "NA" || cell == "nan") return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError("bad number '" + std::string(cell) + "'");
    }
    return v;
}

namespace detail {

/// Reads rows keyed by quarter; rows must be strictly increasing, gaps become missing.
struct KeyedRows {
    std::vector<std::string> header;
    QuarterIndex start;
    std::vector<std::vector<Observation>> rows;  // one entry per quarter from start
};

inline KeyedRows read_keyed(std::istream& in, const std::string& source, std::string_view key_name) {
    KeyedRows out;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::optional<QuarterIndex> prev;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (!have_header) {
            if (cells.empty() || cells[0] != key_name) {
                throw ParseError(where(source, lineno) + "expected header starting with '" + std::string(key_name) + "'");
            }
            for (std::size_t i = 1; i < cells.size(); ++i) out.header.emplace_back(cells[i]);
            have_header = true;
            continue;
        }
        if (cells.size() != out.header.size() + 1) {
            throw ParseError(where(source, lineno) + "expected " + std::to_string(out.header.size() + 1) +
                             " fields, got " + std::to_string(cells.size()));
        }
        QuarterIndex q;
        std::vector<Observation> row;
        try {
            q = parse_quarter(cells[0]);
            for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(parse_cell(cells[i]));
        } catch (const Error& e) {
            throw ParseError(where(source, lineno) + e.what());
        }
        if (prev && q <= *prev) {
            throw ParseError(where(source, lineno) + "quarter " + q.to_string() + " is not after " + prev->to_string());
        }
        if (!prev) {
            out.start = q;
        } else {
            for (long gap = q - *prev; gap > 1; --gap) out.rows.emplace_back(out.header.size());
        }
        out.rows.push_back(std::move(row));
        prev = q;
    }
    if (!have_header) throw ParseError(where(source, lineno) + "empty file, missing header");
    return out;
}

}  // namespace detail

inline QuarterlySeries read_series(std::istream& in, std::string name, Unit unit,
                                   const std::string& source = "<stream>") {
    auto rows = detail::read_keyed(in, source, "quarter");
    if (rows.header.size() != 1 || rows.header[0] != "value") {
        throw ParseError(detail::where(source, 1) + "expected header 'quarter,value'");
    }
    std::vector<Observation> values;
    values.reserve(rows.rows.size());
    for (auto& r : rows.rows) values.push_back(r[0]);
    return QuarterlySeries(std::move(name), unit, rows.start, std::move(values));
}

inline void write_series(std::ostream& out, const QuarterlySeries& s) {
    out << "quarter,value\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << (s.start() + static_cast<long>(i)).to_string() << ',' << format_cell(s[i]) << '\n';
    }
}

inline std::map<int, double> read_yearly(std::istream& in, const std::string& source = "<stream>") {
    std::map<int, double> out;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split(line);
        if (!have_header) {
            if (cells.size() != 2 || cells[0] != "year" || cells[1] != "value") {
                throw ParseError(detail::where(source, lineno) + "expected header 'year,value'");
            }
            have_header = true;
            continue;
        }
        if (cells.size() != 2) throw ParseError(detail::where(source, lineno) + "expected 2 fields");
        int year = 0;
        auto [ptr, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), year);
        if (ec != std::errc{} || ptr != cells[0].data() + cells[0].size()) {
            throw ParseError(detail::where(source, lineno) + "bad year '" + std::string(cells[0]) + "'");
        }
        Observation v;
        try {
            v = parse_cell(cells[1]);
        } catch (const Error& e) {
            throw ParseError(detail::where(source, lineno) + e.what());
        }
        if (!v) continue;
        if (!out.emplace(year, *v).second) {
            throw ParseError(detail::where(source, lineno) + "duplicate year " + std::to_string(year));
        }
    }
    if (!have_header) throw ParseError(detail::where(source, lineno) + "empty file, missing header");
    return out;
}

inline void write_frame(std::ostream& out, const Frame& f) {
    out << "quarter";
    for (const auto& c : f.columns()) out << ',' << c.name();
    out << '\n';
    for (std::size_t r = 0; r < f.rows(); ++r) {
        out << f.quarter(r).to_string();
        for (const auto& c : f.columns()) out << ',' << format_cell(c[r]);
        out << '\n';
    }
}

/// `unit_of` maps a column name to its unit; defaults to dimensionless.
inline Frame read_frame(std::istream& in, const std::string& source = "<stream>",
                        const std::function<Unit(std::string_view)>& unit_of = {}) {
    auto rows = detail::read_keyed(in, source, "quarter");
    std::vector<QuarterlySeries> cols;
    for (std::size_t c = 0; c < rows.header.size(); ++c) {
        std::vector<Observation> values;
        values.reserve(rows.rows.size());
        for (auto& r : rows.rows) values.push_back(r[c]);
        Unit unit = unit_of ? unit_of(rows.header[c]) : Unit::dimensionless;
        cols.emplace_back(rows.header[c], unit, rows.start, std::move(values));
    }
    if (cols.empty()) throw ParseError(detail::where(source, 1) + "frame file has no data columns");
    return align(cols);
}

// File helpers; errors carry the path.

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "' for reading");
    return in;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw DataError("write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
    auto in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace hlc::csv

#endif  // HLC_CSV_HPP
