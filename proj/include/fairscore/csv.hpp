#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fairscore/calibration.hpp"
#include "fairscore/errors.hpp"
#include "fairscore/score_model.hpp"

namespace fairscore::csv {

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

inline double parse_double(const std::string& field, const std::string& where) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw Error(ErrorCode::BadInput, where + ": '" + field + "' is not a number");
    }
    return value;
}

inline long parse_long(const std::string& field, const std::string& where) {
    long value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || field.empty()) {
        throw Error(ErrorCode::BadInput, where + ": '" + field + "' is not an integer");
    }
    return value;
}

struct Table {
    std::vector<std::vector<std::string>> rows;
    std::vector<size_t> line_numbers;
};

inline Table read_table(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadInput, "cannot open '" + path + "'");
    Table table;
    std::string line;
    size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        std::vector<std::string> fields = split_fields(stripped);
        if (!saw_header) {
            if (fields != header) {
                std::string expect;
                for (size_t i = 0; i < header.size(); ++i) {
                    if (i) expect += ',';
                    expect += header[i];
                }
                throw Error(ErrorCode::BadInput,
                            path + ":" + std::to_string(line_no) + ": expected header '" +
                                expect + "'");
            }
            saw_header = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::BadInput, path + ":" + std::to_string(line_no) +
                                                 ": expected " + std::to_string(header.size()) +
                                                 " fields");
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (!saw_header) throw Error(ErrorCode::BadInput, path + ": empty file");
    return table;
}

}  // namespace detail

/// Aggregated input: header `group,score,weight`, one row per (group, bin).
inline std::map<int, GroupDistribution> read_distributions(const std::string& path) {
    const detail::Table table = detail::read_table(path, {"group", "score", "weight"});
    std::map<int, std::vector<ScoreBin>> bins;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        const std::string where = path + ":" + std::to_string(table.line_numbers[r]);
        const long group = detail::parse_long(table.rows[r][0], where);
        if (group != 0 && group != 1) {
            throw Error(ErrorCode::BadInput, where + ": group must be 0 or 1");
        }
        const double score = detail::parse_double(table.rows[r][1], where);
        const double weight = detail::parse_double(table.rows[r][2], where);
        bins[static_cast<int>(group)].push_back({score, weight});
    }
    std::map<int, GroupDistribution> dists;
    for (auto& [group, group_bins] : bins) {
        try {
            dists.emplace(group, build_group_distribution(std::move(group_bins)));
        } catch (const Error& e) {
            throw Error(e.code(), path + ": group " + std::to_string(group) + ": " + e.what());
        }
    }
    if (dists.empty()) throw Error(ErrorCode::EmptyInput, path + ": no data rows");
    return dists;
}

/// Raw input: header `group,bin,label`, one row per observation. Bin ids
/// are opaque strings (no embedded commas).
inline std::vector<RawRow> read_raw_rows(const std::string& path) {
    const detail::Table table = detail::read_table(path, {"group", "bin", "label"});
    std::vector<RawRow> rows;
    rows.reserve(table.rows.size());
    for (size_t r = 0; r < table.rows.size(); ++r) {
        const std::string where = path + ":" + std::to_string(table.line_numbers[r]);
        RawRow row;
        const long group = detail::parse_long(table.rows[r][0], where);
        const long label = detail::parse_long(table.rows[r][2], where);
        if (group != 0 && group != 1) {
            throw Error(ErrorCode::BadInput, where + ": group must be 0 or 1");
        }
        if (label != 0 && label != 1) {
            throw Error(ErrorCode::BadInput, where + ": label must be 0 or 1");
        }
        row.group = static_cast<int>(group);
        row.label = static_cast<int>(label);
        row.bin_id = table.rows[r][1];
        if (row.bin_id.empty()) {
            throw Error(ErrorCode::BadInput, where + ": empty bin id");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, path + ": no data rows");
    return rows;
}

}  // namespace fairscore::csv
