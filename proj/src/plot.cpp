#include "sbrc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "sbrc/errors.hpp"

namespace sbrc {

namespace {

const char* const kColors[] = {"#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// 1-2-5 tick spacing giving roughly `target` intervals.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double nice = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
    return nice * mag;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            const double d = std::max(1e-3, 0.05 * std::abs(hi));
            lo -= d;
            hi += d;
        }
    }
};

int require_column(const CsvTable& table, const std::string& name) {
    const int idx = table.column(name);
    if (idx < 0) {
        std::string available;
        for (const auto& h : table.header) available += (available.empty() ? "" : ", ") + h;
        throw ArgumentError("plot: no column '" + name + "' (available: " + available + ")");
    }
    return idx;
}

}  // namespace

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
    if (table.rows.empty()) throw ArgumentError("plot: CSV has no data rows");
    if (spec.y.empty()) throw ArgumentError("plot: no y columns requested");
    const auto xs = table.numeric_column(require_column(table, spec.x));
    std::vector<std::vector<double>> ys;
    for (const auto& name : spec.y) ys.push_back(table.numeric_column(require_column(table, name)));

    Range xr, yr;
    for (double v : xs) xr.add(v);
    for (const auto& col : ys)
        for (double v : col) yr.add(v);
    xr.pad();
    yr.pad();

    const double left = 70, right = 20, top = spec.title.empty() ? 20 : 40, bottom = 50;
    const double pw = spec.width - left - right, ph = spec.height - top - bottom;
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
             escape(spec.title) + "</text>\n";
    s += "<rect x=\"" + fmt(left) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(pw) + "\" height=\"" + fmt(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xstep = nice_step(xr.hi - xr.lo, 8), ystep = nice_step(yr.hi - yr.lo, 6);
    for (double t = std::ceil(xr.lo / xstep) * xstep; t <= xr.hi + 1e-9 * xstep; t += xstep) {
        s += "<line x1=\"" + fmt(px(t)) + "\" y1=\"" + fmt(top + ph) + "\" x2=\"" + fmt(px(t)) + "\" y2=\"" +
             fmt(top + ph + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(px(t)) + "\" y=\"" + fmt(top + ph + 18) + "\" text-anchor=\"middle\">" +
             tick_label(t) + "</text>\n";
    }
    for (double t = std::ceil(yr.lo / ystep) * ystep; t <= yr.hi + 1e-9 * ystep; t += ystep) {
        s += "<line x1=\"" + fmt(left - 5) + "\" y1=\"" + fmt(py(t)) + "\" x2=\"" + fmt(left) + "\" y2=\"" +
             fmt(py(t)) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + fmt(left - 8) + "\" y=\"" + fmt(py(t) + 4) + "\" text-anchor=\"end\">" +
             tick_label(t) + "</text>\n";
    }
    s += "<text x=\"" + fmt(left + pw / 2) + "\" y=\"" + fmt(spec.height - 10.0) + "\" text-anchor=\"middle\">" +
         escape(spec.x) + "</text>\n";

    for (std::size_t k = 0; k < ys.size(); ++k) {
        const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
        std::string points;
        auto flush = [&] {
            if (!points.empty())
                s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
                     points + "\"/>\n";
            points.clear();
        };
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!std::isfinite(xs[i]) || !std::isfinite(ys[k][i])) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += fmt(px(xs[i])) + "," + fmt(py(ys[k][i]));
        }
        flush();
    }

    if (ys.size() > 1) {
        const double lx = left + pw - 170, ly = top + 10;
        s += "<g class=\"legend\">\n";
        for (std::size_t k = 0; k < ys.size(); ++k) {
            const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
            const double y = ly + 16.0 * static_cast<double>(k);
            s += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(lx + 20) + "\" y2=\"" + fmt(y) +
                 "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
            s += "<text x=\"" + fmt(lx + 26) + "\" y=\"" + fmt(y + 4) + "\">" + escape(spec.y[k]) + "</text>\n";
        }
        s += "</g>\n";
    }
    s += "</svg>\n";
    return s;
}

void plot_csv(const std::filesystem::path& csv, const PlotSpec& spec, const std::filesystem::path& svg) {
    const std::string doc = render_svg(read_csv(csv), spec);
    std::ofstream out(svg, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + svg.string());
    out << doc;
    if (!out) throw IoError("write failed for " + svg.string());
}

}  // namespace sbrc
