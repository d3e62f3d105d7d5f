#pragma once

// Generic record files: JSON-lines or CSV. Rows keep every field of the
// input so tools can append columns without losing data.

#include "qcrawl/detail/csv.hpp"
#include "qcrawl/detail/io.hpp"
#include "qcrawl/detail/text.hpp"
#include "qcrawl/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qcrawl {

using ordered_json = nlohmann::ordered_json;

enum class RecordFormat { Jsonl, Csv };

inline RecordFormat parse_record_format(std::string_view name) {
    if (name == "jsonl" || name == "json") return RecordFormat::Jsonl;
    if (name == "csv") return RecordFormat::Csv;
    throw Error(ErrorCode::InvalidArgument, "unknown record format '" + std::string(name) + "'");
}

inline std::string_view to_string(RecordFormat f) { return f == RecordFormat::Jsonl ? "jsonl" : "csv"; }

/// Guesses the format from the extension; anything but .csv is JSON-lines.
inline RecordFormat record_format_for(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? RecordFormat::Csv : RecordFormat::Jsonl;
}

struct RecordRow {
    ordered_json fields; // always an object
    std::size_t line = 0;
};

namespace detail {

inline std::string dump_json(const ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline std::string csv_cell(const ordered_json& v) {
    if (v.is_null()) return {};
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) {
            if (!out.empty()) out.push_back(' ');
            out += e.is_string() ? e.get<std::string>() : dump_json(e);
        }
        return out;
    }
    return dump_json(v);
}

} // namespace detail

inline std::vector<RecordRow> parse_rows(std::string_view data, RecordFormat format) {
    std::vector<RecordRow> rows;
    if (format == RecordFormat::Jsonl) {
        std::size_t line_no = 0;
        for (auto line : detail::split(data, '\n')) {
            ++line_no;
            if (detail::trim(line).empty()) continue;
            ordered_json j;
            try {
                j = ordered_json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
            }
            if (!j.is_object())
                throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected a JSON object");
            rows.push_back({std::move(j), line_no});
        }
        return rows;
    }

    auto csv = detail::parse_csv(data);
    if (csv.empty()) throw Error(ErrorCode::Parse, "line 1: missing CSV header");
    const auto& header = csv.front().fields;
    for (std::size_t r = 1; r < csv.size(); ++r) {
        const auto& cells = csv[r].fields;
        if (cells.size() != header.size())
            throw Error(ErrorCode::Parse, "line " + std::to_string(csv[r].line) + ": expected " +
                                              std::to_string(header.size()) + " fields, got " +
                                              std::to_string(cells.size()));
        ordered_json obj = ordered_json::object();
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == "outlinks") {
                ordered_json arr = ordered_json::array();
                for (auto tok : detail::split_ws(cells[c])) arr.push_back(std::string(tok));
                obj[header[c]] = std::move(arr);
            } else {
                obj[header[c]] = cells[c];
            }
        }
        rows.push_back({std::move(obj), csv[r].line});
    }
    return rows;
}

inline std::vector<RecordRow> read_rows(const std::filesystem::path& path, RecordFormat format) {
    return parse_rows(detail::read_file(path), format);
}

inline std::string format_rows(const std::vector<RecordRow>& rows, RecordFormat format) {
    std::string out;
    if (format == RecordFormat::Jsonl) {
        for (const auto& r : rows) {
            out += detail::dump_json(r.fields);
            out.push_back('\n');
        }
        return out;
    }
    // Header is the union of keys in first-seen order.
    std::vector<std::string> header;
    for (const auto& r : rows)
        for (auto it = r.fields.begin(); it != r.fields.end(); ++it)
            if (std::find(header.begin(), header.end(), it.key()) == header.end()) header.push_back(it.key());
    out += detail::csv_line(header);
    for (const auto& r : rows) {
        std::vector<std::string> cells;
        cells.reserve(header.size());
        for (const auto& h : header) cells.push_back(r.fields.contains(h) ? detail::csv_cell(r.fields.at(h)) : "");
        out += detail::csv_line(cells);
    }
    return out;
}

inline void write_rows(const std::vector<RecordRow>& rows, const std::filesystem::path& path, RecordFormat format) {
    detail::write_file(path, format_rows(rows, format));
}

} // namespace qcrawl
