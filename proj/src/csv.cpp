#include "sbrc/csv.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "sbrc/config.hpp"
#include "sbrc/errors.hpp"

namespace sbrc {

namespace {

std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
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
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header.size())
        throw ArgumentError("CsvTable: row has " + std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
    rows.push_back(std::move(cells));
}

void CsvTable::add_numeric_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<double> CsvTable::numeric_column(int index) const {
    if (index < 0 || index >= static_cast<int>(header.size()))
        throw ArgumentError("CsvTable: column index out of range");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const std::string& s = row[static_cast<std::size_t>(index)];
        double x = std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") {
            x = std::numeric_limits<double>::infinity();
        } else if (s == "-inf") {
            x = -std::numeric_limits<double>::infinity();
        } else {
            double y = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), y);
            if (ec == std::errc() && ptr == s.data() + s.size()) x = y;
        }
        out.push_back(x);
    }
    return out;
}

std::string CsvTable::to_string() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += quote(cells[i]);
        }
        out += '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << table.to_string();
    if (!out) throw IoError("write failed for " + path.string());
}

CsvTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    CsvTable table;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
        } else {
            if (cells.size() != table.header.size())
                throw ArgumentError("parse_csv: ragged row " + std::to_string(table.rows.size() + 2));
            table.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw ArgumentError("parse_csv: empty document");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace sbrc
