// csv.hpp — numeric tables with a header row, written with LF endings and
// 17 significant digits.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sbrc {

struct CsvTable {
    std::vector<std::string> header;
    // Cells are kept as text so error rows can carry messages.
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);
    void add_numeric_row(const std::vector<double>& values);

    // Index of a header column, or -1.
    int column(const std::string& name) const;
    // Column as numbers; cells that are not numbers become NaN.
    std::vector<double> numeric_column(int index) const;

    std::string to_string() const;
};

// Throws IoError.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// Throws ArgumentError on an empty document or ragged rows.
CsvTable parse_csv(const std::string& text);

}  // namespace sbrc
