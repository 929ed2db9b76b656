// config.hpp — the scenario file format.
//
//   # comment
//   name = fig1a
//   [params]               section header: later keys become params.<key>
//   pi_alpha = 0.1
//   grid.t_max = 35        dotted keys work anywhere
//   solvers = rcme, weak   lists are comma separated
//
// Keys may appear once. Values are trimmed strings, converted on access.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbrc {

class ConfigDocument {
public:
    // Throws ValidationError (field "<source>:<line>") on malformed lines.
    static ConfigDocument parse(std::string_view text, const std::string& source = "<config>");
    // Throws IoError when the file cannot be read.
    static ConfigDocument load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    void erase(const std::string& key) { values_.erase(key); }

    // Typed accessors throw ValidationError naming the key.
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback) const;

    // Every key must be one of `known`.
    void check_keys(const std::vector<std::string>& known) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    // Canonical text: sorted dotted keys, one per line. parse(to_text()) round-trips.
    std::string to_text() const;

private:
    std::map<std::string, std::string> values_;
};

// "key=value" override as given on the command line.
void apply_override(ConfigDocument& doc, const std::string& assignment);

// %.17g: enough digits to round-trip any double.
std::string format_number(double x);

}  // namespace sbrc
