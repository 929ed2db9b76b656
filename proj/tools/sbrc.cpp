// sbrc command line front end.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbrc/config.hpp"
#include "sbrc/errors.hpp"
#include "sbrc/mapping.hpp"
#include "sbrc/plot.hpp"
#include "sbrc/scenario.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 2, kSolver = 3, kIo = 4 };

struct Common {
    std::string config;
    std::string out = "sbrc-out";
    std::string solver;
    std::vector<std::string> overrides;
    std::optional<double> tol;
    std::optional<double> ratio;
    int threads = 1;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "Scenario file (see README for the format)");
    app->add_option("--out", c.out, "Output directory")->capture_default_str();
    app->add_option("--solver", c.solver, "Comma-separated solvers: rcme, weak, heom");
    app->add_option("--tol", c.tol, "Integrator tolerance for the RCME and HEOM runs");
    app->add_option("--ratio", c.ratio, "Mapping ratio Omega/omega_c");
    app->add_option("--threads", c.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--set", c.overrides, "Override a config key, e.g. --set params.beta=1.5");
}

// alpha and pi_alpha are two spellings of one field; the later one wins.
void drop_alias(sbrc::ConfigDocument& doc, const std::string& key) {
    if (key == "params.alpha") doc.erase("params.pi_alpha");
    if (key == "params.pi_alpha") doc.erase("params.alpha");
}

// File values first, then --set, then the dedicated flags.
sbrc::ConfigDocument resolve(const Common& c, sbrc::ConfigDocument doc) {
    if (!c.config.empty()) {
        const sbrc::ConfigDocument file = sbrc::ConfigDocument::load(c.config);
        for (const auto& [k, v] : file.values()) {
            drop_alias(doc, k);
            doc.set(k, v);
        }
    }
    for (const auto& o : c.overrides) {
        std::string key = o.substr(0, o.find('='));
        key.erase(key.find_last_not_of(" \t") + 1);
        drop_alias(doc, key);
        sbrc::apply_override(doc, o);
    }
    if (!c.solver.empty()) doc.set("solvers", c.solver);
    if (c.tol) {
        doc.set("rcme.tol", sbrc::format_number(*c.tol));
        doc.set("heom.rtol", sbrc::format_number(*c.tol));
    }
    if (c.ratio) doc.set("mapping.ratio", sbrc::format_number(*c.ratio));
    return doc;
}

void report(const sbrc::RunReport& r) {
    for (const auto& s : r.summary) std::cout << s << "\n";
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : r.files) std::cout << "wrote " << f.string() << "\n";
}

int run_mode(const Common& c, sbrc::ConfigDocument defaults) {
    const sbrc::ScenarioConfig cfg = sbrc::ScenarioConfig::from_document(resolve(c, std::move(defaults)));
    report(sbrc::run_scenario(cfg, c.out, c.threads));
    return kOk;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        std::string item = text.substr(start, end - start);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
        start = end + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-boson dynamics with reaction-coordinate, weak-coupling and HEOM solvers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sbrc::kSoftwareVersion));

    Common dyn, steady, meas, swp, map, scen;
    auto* c_dyn = app.add_subcommand("dynamics", "Population dynamics (dynamics.csv)");
    add_common(c_dyn, dyn);
    auto* c_steady = app.add_subcommand("steady", "Steady-state observables (steady.csv)");
    add_common(c_steady, steady);
    auto* c_meas = app.add_subcommand("measures", "QMI and non-Gaussianity along the RCME trajectory");
    add_common(c_meas, meas);
    auto* c_sweep = app.add_subcommand("sweep", "Steady-state sweep over pi*alpha or beta (sweep.csv)");
    add_common(c_sweep, swp);
    std::string axis;
    std::string values;
    c_sweep->add_option("--axis", axis, "alpha (values are pi*alpha) or beta");
    c_sweep->add_option("--values", values, "Comma-separated sweep values");

    auto* c_map = app.add_subcommand("map", "Reaction-coordinate mapping and J_SB reconstruction (mapping.csv)");
    add_common(c_map, map);
    int map_points = 200;
    c_map->add_option("--points", map_points, "Frequency samples on (0, 10 omega_c]")->capture_default_str();

    auto* c_plot = app.add_subcommand("plot", "SVG line plot of CSV columns");
    std::string plot_csv, plot_x, plot_y, plot_out, plot_title;
    c_plot->add_option("csv", plot_csv, "Input CSV")->required();
    c_plot->add_option("--x", plot_x, "x column")->required();
    c_plot->add_option("--y", plot_y, "Comma-separated y columns")->required();
    c_plot->add_option("--out", plot_out, "Output SVG path")->required();
    c_plot->add_option("--title", plot_title, "Plot title");

    auto* c_scen = app.add_subcommand("scenario", "Run a builtin scenario: fig1a, fig1b, fig2, fig3, fig4a, fig4b");
    add_common(c_scen, scen);
    std::string scen_name;
    bool list = false;
    c_scen->add_option("name", scen_name, "Scenario name");
    c_scen->add_flag("--list", list, "List the builtin scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (c_dyn->parsed()) {
            sbrc::ConfigDocument d;
            d.set("mode", "dynamics");
            return run_mode(dyn, d);
        }
        if (c_steady->parsed()) {
            sbrc::ConfigDocument d;
            d.set("mode", "steady");
            d.set("measures", "steady, eigenbasis");
            return run_mode(steady, d);
        }
        if (c_meas->parsed()) {
            sbrc::ConfigDocument d;
            d.set("mode", "dynamics");
            d.set("measures", "population, qmi, nongauss, steady");
            d.set("grid.t_max", "300");
            d.set("grid.samples", "601");
            return run_mode(meas, d);
        }
        if (c_sweep->parsed()) {
            sbrc::ConfigDocument d;
            d.set("mode", "sweep");
            d.set("measures", "steady, eigenbasis, qmi, nongauss");
            Common c = swp;
            if (!axis.empty()) c.overrides.push_back("sweep.axis=" + axis);
            if (!values.empty()) c.overrides.push_back("sweep.values=" + values);
            return run_mode(c, d);
        }
        if (c_map->parsed()) {
            const sbrc::ScenarioConfig cfg = sbrc::ScenarioConfig::from_document(resolve(map, {}));
            const sbrc::MappedParams m = sbrc::map_to_rc(cfg.params, cfg.ratio);
            std::filesystem::create_directories(map.out);
            const auto path = std::filesystem::path(map.out) / "mapping.csv";
            sbrc::write_csv(path, sbrc::mapping_table(cfg.params, cfg.ratio, map_points));
            std::cout << "lambda = " << sbrc::format_number(m.lambda) << "\n"
                      << "Omega = " << sbrc::format_number(m.Omega) << "\n"
                      << "gamma = " << sbrc::format_number(m.gamma) << "\n"
                      << "wrote " << path.string() << "\n";
            return kOk;
        }
        if (c_plot->parsed()) {
            sbrc::PlotSpec spec;
            spec.x = plot_x;
            spec.y = split_list(plot_y);
            spec.title = plot_title;
            sbrc::plot_csv(plot_csv, spec, plot_out);
            std::cout << "wrote " << plot_out << "\n";
            return kOk;
        }
        if (c_scen->parsed()) {
            if (list || scen_name.empty()) {
                for (const auto& n : sbrc::builtin_scenario_names()) std::cout << n << "\n";
                return scen_name.empty() && !list ? kValidation : kOk;
            }
            const auto runs = sbrc::builtin_scenario(scen_name);
            for (const auto& base : runs) {
                const sbrc::ScenarioConfig cfg =
                    sbrc::ScenarioConfig::from_document(resolve(scen, base.to_document()));
                std::filesystem::path out = scen.out;
                if (runs.size() > 1) out /= base.name;
                report(sbrc::run_scenario(cfg, out, scen.threads));
            }
            return kOk;
        }
    } catch (const sbrc::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const sbrc::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolver;
    }
    return kOk;
}
