#include "pspp/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pspp/config.hpp"

namespace pspp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

std::vector<Vector> ingest_csv(const std::string& path,
                               const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open data file: " + path);

    std::string line;
    if (!std::getline(in, line)) {
        throw data_error(path + ": empty file");
    }
    const std::vector<std::string> header_raw = split_line(line);
    std::vector<std::string> header;
    header.reserve(header_raw.size());
    for (const auto& h : header_raw) header.push_back(trimmed(h));

    std::vector<std::size_t> selected;
    std::size_t time_idx = header.size();
    if (schema.time_column) {
        const auto it =
            std::find(header.begin(), header.end(), *schema.time_column);
        if (it == header.end()) {
            throw data_error(path + ": time column '" + *schema.time_column +
                             "' not found in header");
        }
        time_idx = static_cast<std::size_t>(it - header.begin());
    }
    if (schema.value_columns.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i != time_idx) selected.push_back(i);
        }
    } else {
        for (const auto& name : schema.value_columns) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) {
                throw data_error(path + ": value column '" + name +
                                 "' not found in header");
            }
            selected.push_back(static_cast<std::size_t>(it - header.begin()));
        }
    }
    if (selected.empty()) {
        throw data_error(path + ": no value columns selected");
    }

    std::vector<Vector> rows;
    int row_no = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row_no;
        if (trimmed(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw data_error(path + ": row " + std::to_string(row_no) +
                             " has " + std::to_string(cells.size()) +
                             " cells, header has " +
                             std::to_string(header.size()));
        }
        Vector v(static_cast<Index>(selected.size()));
        for (std::size_t k = 0; k < selected.size(); ++k) {
            const std::string cell = trimmed(cells[selected[k]]);
            double out = 0.0;
            const char* begin = cell.data();
            const char* end = begin + cell.size();
            auto [ptr, ec] = std::from_chars(begin, end, out);
            if (cell.empty() || ec != std::errc{} || ptr != end) {
                throw data_error(path + ": non-numeric cell at row " +
                                 std::to_string(row_no) + ", column '" +
                                 header[selected[k]] + "'");
            }
            v[static_cast<Index>(k)] = out;
        }
        rows.push_back(std::move(v));
    }
    if (rows.empty()) {
        throw data_error(path + ": no data rows");
    }
    return rows;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot open output file: " + tmp.string());
        out << content;
        if (!out) throw data_error("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw data_error("cannot rename " + tmp.string() + " to " + path +
                         ": " + ec.message());
    }
}

void write_csv(const std::string& path,
               const std::vector<std::string>& header,
               const std::vector<Vector>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) os << ',';
        os << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        if (static_cast<std::size_t>(row.size()) != header.size()) {
            throw dimension_error("write_csv: row width does not match header");
        }
        for (Index j = 0; j < row.size(); ++j) {
            if (j) os << ',';
            os << format_double(row[j]);
        }
        os << '\n';
    }
    write_file_atomic(path, os.str());
}

}  // namespace pspp
