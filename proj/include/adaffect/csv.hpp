#pragma once

#include "adaffect/types.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace adaffect::csv {

/// Splits one CSV line. Handles RFC-4180 double-quoted fields (commas and
/// doubled quotes inside); no embedded newlines.
inline std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        else q += c;
    }
    q += '"';
    return q;
}

struct Row {
    std::vector<std::string> fields;
    size_t line_no = 0; // 1-based, header included
};

/// Reads a whole CSV file; first row is the required header.
struct File {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

inline File read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    File f;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.peek() == EOF) break;
        if (line_no == 1) {
            f.header = split_line(line);
        } else {
            f.rows.push_back(Row{split_line(line), line_no});
        }
    }
    if (f.header.empty()) throw ParseError("'" + path + "': missing header");
    return f;
}

inline double parse_double(const std::string& s, const std::string& what, size_t line_no)
{
    double v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
        throw ParseError(what + ": bad number '" + s + "' at line " + std::to_string(line_no));
    }
    return v;
}

inline long parse_int(const std::string& s, const std::string& what, size_t line_no)
{
    long v = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
        throw ParseError(what + ": bad integer '" + s + "' at line " + std::to_string(line_no));
    }
    return v;
}

/// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double v)
{
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace adaffect::csv
