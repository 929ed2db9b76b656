// plot.hpp — minimal deterministic SVG line plots of CSV columns.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sbrc/csv.hpp"

namespace sbrc {

struct PlotSpec {
    std::string x;
    std::vector<std::string> y;
    std::string title;
    int width = 800;
    int height = 500;
};

// One polyline per y column, legend when there is more than one. Non-finite
// points break the line. Throws ArgumentError for a table without rows or a
// missing column (the message lists the available ones).
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

void plot_csv(const std::filesystem::path& csv, const PlotSpec& spec, const std::filesystem::path& svg);

}  // namespace sbrc
