#pragma once
// Key/value config files mirroring SourceSpec + ScanConfig. Format: one
// `key = value` pair per line, `#` starts a comment, blank lines ignored.
// Schema violations are reported with file:line positions.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "noonsi/core.hpp"

namespace noonsi {

struct ConfigError : Error {
    using Error::Error;
};

/// Parsed source + scan settings, starting from the toolkit defaults so a
/// config file only needs the keys it wants to change.
struct Config {
    SourceSpec source = default_source();
    ScanConfig scan = default_coarse_scan();
    bool mode_set = false;   ///< whether the file/flags chose a scan mode
    bool start_set = false;  ///< grid fields explicitly provided
    bool step_set = false;
    bool count_set = false;

    /// Reset grid fields to the canonical sweep for the current mode unless
    /// they were provided explicitly.
    void apply_mode_defaults() {
        ScanConfig defaults = scan.mode == ScanMode::coarse_path
                                  ? default_coarse_scan()
                                  : default_fine_scan();
        if (!start_set) scan.start = defaults.start;
        if (!step_set) scan.step = defaults.step;
        if (!count_set) scan.count = defaults.count;
    }
};

namespace detail {

inline std::string strip(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline double parse_number(const std::string& file, int line, const std::string& key,
                           const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError(file + ":" + std::to_string(line) + ": key '" + key +
                          "' expects a number, got '" + value + "'");
    return v;
}

inline int parse_int(const std::string& file, int line, const std::string& key,
                     const std::string& value) {
    const double v = parse_number(file, line, key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError(file + ":" + std::to_string(line) + ": key '" + key +
                          "' expects an integer, got '" + value + "'");
    return i;
}

}  // namespace detail

/// Parse a config stream. `name` is used in diagnostics.
inline Config parse_config(std::istream& in, const std::string& name) {
    Config cfg;
    std::map<std::string, int> seen;  // key -> first line

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::strip(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = detail::strip(line.substr(0, eq));
        const std::string value = detail::strip(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key or value");

        if (auto [it, inserted] = seen.emplace(key, lineno); !inserted)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' (first set on line " + std::to_string(it->second) + ")");

        if (key == "omega0") cfg.source.omega0 = detail::parse_number(name, lineno, key, value);
        else if (key == "delta_omega") cfg.source.delta_omega = detail::parse_number(name, lineno, key, value);
        else if (key == "mu") cfg.source.mu = detail::parse_number(name, lineno, key, value);
        else if (key == "rep_rate") cfg.source.rep_rate = detail::parse_number(name, lineno, key, value);
        else if (key == "mode") {
            if (value == "coarse") cfg.scan.mode = ScanMode::coarse_path;
            else if (value == "fine") cfg.scan.mode = ScanMode::fine_phase;
            else
                throw ConfigError(name + ":" + std::to_string(lineno) +
                                  ": mode must be 'coarse' or 'fine', got '" + value + "'");
            cfg.mode_set = true;
        }
        else if (key == "start") { cfg.scan.start = detail::parse_number(name, lineno, key, value); cfg.start_set = true; }
        else if (key == "step") { cfg.scan.step = detail::parse_number(name, lineno, key, value); cfg.step_set = true; }
        else if (key == "count") { cfg.scan.count = detail::parse_int(name, lineno, key, value); cfg.count_set = true; }
        else if (key == "eta") cfg.scan.eta = detail::parse_number(name, lineno, key, value);
        else if (key == "dc") cfg.scan.dc = detail::parse_number(name, lineno, key, value);
        else if (key == "integration_time") cfg.scan.integration_time = detail::parse_number(name, lineno, key, value);
        else if (key == "path_multiplier") cfg.scan.path_multiplier = detail::parse_number(name, lineno, key, value);
        else
            throw ConfigError(name + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }

    cfg.apply_mode_defaults();
    return cfg;
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

}  // namespace noonsi
