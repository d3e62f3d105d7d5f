#pragma once

#include "qcrawl/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace qcrawl::detail {

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line on which the row starts
};

// RFC 4180 reader: quoted fields may hold commas, doubled quotes and newlines.
inline std::vector<CsvRow> parse_csv(std::string_view data) {
    std::vector<CsvRow> rows;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = data.size();
    while (i < n) {
        CsvRow row;
        row.line = line;
        std::string field;
        bool row_done = false;
        while (!row_done) {
            field.clear();
            if (i < n && data[i] == '"') {
                ++i;
                bool closed = false;
                while (i < n) {
                    char c = data[i];
                    if (c == '"') {
                        if (i + 1 < n && data[i + 1] == '"') {
                            field.push_back('"');
                            i += 2;
                            continue;
                        }
                        ++i;
                        closed = true;
                        break;
                    }
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
                if (!closed)
                    throw Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": unterminated quoted field");
                if (i < n && data[i] != ',' && data[i] != '\n' && data[i] != '\r')
                    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": text after closing quote");
            } else {
                while (i < n && data[i] != ',' && data[i] != '\n' && data[i] != '\r') {
                    if (data[i] == '"')
                        throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": stray quote in unquoted field");
                    field.push_back(data[i]);
                    ++i;
                }
            }
            row.fields.push_back(field);
            if (i >= n) {
                row_done = true;
            } else if (data[i] == ',') {
                ++i;
            } else {
                if (data[i] == '\r') ++i;
                if (i < n && data[i] == '\n') ++i;
                ++line;
                row_done = true;
            }
        }
        // blank lines carry no record
        if (!(row.fields.size() == 1 && row.fields[0].empty())) rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string csv_escape(std::string_view field) {
    bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos ||
                 (!field.empty() && (field.front() == ' ' || field.back() == ' '));
    if (!quote) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    out.push_back('\n');
    return out;
}

} // namespace qcrawl::detail
