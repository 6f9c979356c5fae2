#pragma once
// Scan CSV files and analysis reports. Scan CSVs are self-describing: a
// comment block carries the full configuration, so analysis never needs the
// original config file. Plain two- or three-column CSVs (delay, value[,
// counts]) are accepted on ingest as well.

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "noonsi/config.hpp"
#include "noonsi/core.hpp"

namespace noonsi::io {

/// Shortest round-trippable decimal representation.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Everything a scan file knows about its own origin. Optional fields stay
/// empty when a plain CSV was ingested.
struct ScanMeta {
    std::string engine;  ///< analytic | oracle | gaussian, or empty
    std::optional<SourceSpec> source;
    std::optional<DetectionScheme> scheme;
    std::optional<ScanConfig> scan_config;
    std::optional<std::uint64_t> seed;
};

inline ScanMeta meta_for(const std::string& engine, const Bundle& bundle,
                         std::optional<std::uint64_t> seed = std::nullopt) {
    return ScanMeta{engine, bundle.source, bundle.scheme, bundle.scan, seed};
}

inline void write_scan_csv(std::ostream& os, const PatternScan& scan, const ScanMeta& meta) {
    const bool with_counts = !scan.points.empty() && scan.points.front().counts.has_value();
    os << "# noonsi-scan v1\n";
    if (!meta.engine.empty()) os << "# engine = " << meta.engine << "\n";
    if (meta.scheme) os << "# scheme = " << meta.scheme->label() << "\n";
    os << "# mode = " << to_string(scan.unit) << "\n";
    if (meta.source) {
        os << "# omega0 = " << fmt(meta.source->omega0) << "\n";
        os << "# delta_omega = " << fmt(meta.source->delta_omega) << "\n";
        os << "# mu = " << fmt(meta.source->mu) << "\n";
        os << "# rep_rate = " << fmt(meta.source->rep_rate) << "\n";
    }
    if (meta.scan_config) {
        os << "# start = " << fmt(meta.scan_config->start) << "\n";
        os << "# step = " << fmt(meta.scan_config->step) << "\n";
        os << "# count = " << meta.scan_config->count << "\n";
        os << "# eta = " << fmt(meta.scan_config->eta) << "\n";
        os << "# dc = " << fmt(meta.scan_config->dc) << "\n";
        os << "# integration_time = " << fmt(meta.scan_config->integration_time) << "\n";
        os << "# path_multiplier = " << fmt(meta.scan_config->path_multiplier) << "\n";
    }
    if (meta.seed) os << "# seed = " << *meta.seed << "\n";
    os << "delay," << "probability" << (with_counts ? ",counts" : "") << "\n";
    for (const auto& p : scan.points) {
        os << fmt(p.delay) << ',' << fmt(p.probability);
        if (with_counts) os << ',' << *p.counts;
        os << "\n";
    }
}

inline void write_scan_csv(const std::string& path, const PatternScan& scan, const ScanMeta& meta) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write '" + path + "'");
    write_scan_csv(os, scan, meta);
    if (!os) throw IoError("write failed for '" + path + "'");
}

/// Sampled counts alone (delay, counts), same header block.
inline void write_counts_csv(const std::string& path, const PatternScan& scan, const ScanMeta& meta) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write '" + path + "'");
    os << "# noonsi-counts v1\n";
    if (!meta.engine.empty()) os << "# engine = " << meta.engine << "\n";
    if (meta.scheme) os << "# scheme = " << meta.scheme->label() << "\n";
    os << "# mode = " << to_string(scan.unit) << "\n";
    if (meta.seed) os << "# seed = " << *meta.seed << "\n";
    os << "delay,counts\n";
    for (const auto& p : scan.points)
        os << fmt(p.delay) << ',' << (p.counts ? *p.counts : 0) << "\n";
    if (!os) throw IoError("write failed for '" + path + "'");
}

struct LoadedScan {
    PatternScan scan;
    ScanMeta meta;
};

namespace detail {

inline DetectionScheme parse_scheme_label(const std::string& text, const std::string& where) {
    const auto slash = text.find('/');
    if (slash == std::string::npos)
        throw IoError(where + ": scheme must look like m/n, got '" + text + "'");
    try {
        return DetectionScheme{std::stoi(text.substr(0, slash)), std::stoi(text.substr(slash + 1))};
    } catch (const std::exception&) {
        throw IoError(where + ": scheme must look like m/n, got '" + text + "'");
    }
}

}  // namespace detail

/// Reads a scan CSV, honoring the self-describing header when present.
inline LoadedScan read_scan_csv(std::istream& in, const std::string& name) {
    LoadedScan out;
    std::map<std::string, std::string> header;
    std::string line;
    int lineno = 0;
    bool saw_columns = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = name + ":" + std::to_string(lineno);

        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = noonsi::detail::strip(line.substr(1, eq - 1));
                header[key] = noonsi::detail::strip(line.substr(eq + 1));
            }
            continue;
        }
        if (!saw_columns && line.find_first_not_of("-+.0123456789eE, \t") != std::string::npos) {
            saw_columns = true;  // column-name row
            continue;
        }
        saw_columns = true;

        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(noonsi::detail::strip(cell));
        if (cells.size() < 2 || cells.size() > 3)
            throw IoError(where + ": expected 2 or 3 comma-separated columns, got " +
                          std::to_string(cells.size()));
        ScanPoint p;
        try {
            p.delay = std::stod(cells[0]);
            p.probability = std::stod(cells[1]);
            if (cells.size() == 3) p.counts = static_cast<std::uint64_t>(std::stoull(cells[2]));
        } catch (const std::exception&) {
            throw IoError(where + ": cannot parse numeric row '" + line + "'");
        }
        out.scan.points.push_back(p);
    }
    if (out.scan.points.size() < 2)
        throw IoError(name + ": scan needs at least two data rows");

    // Header-driven metadata.
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = header.find(key);
        if (it == header.end()) return std::nullopt;
        return it->second;
    };
    try {
        if (auto v = get("mode"))
            out.scan.unit = *v == "fine" ? ScanMode::fine_phase : ScanMode::coarse_path;
        if (auto v = get("engine")) out.meta.engine = *v;
        if (auto v = get("scheme")) {
            out.meta.scheme = detail::parse_scheme_label(*v, name);
            out.scan.scheme = *out.meta.scheme;
        }
        if (get("omega0")) {
            SourceSpec s;
            s.omega0 = std::stod(*get("omega0"));
            if (auto v = get("delta_omega")) s.delta_omega = std::stod(*v);
            if (auto v = get("mu")) s.mu = std::stod(*v);
            if (auto v = get("rep_rate")) s.rep_rate = std::stod(*v);
            out.meta.source = s;
        }
        if (get("step")) {
            ScanConfig c;
            c.mode = out.scan.unit;
            c.step = std::stod(*get("step"));
            if (auto v = get("start")) c.start = std::stod(*v);
            if (auto v = get("count")) c.count = std::stoi(*v);
            if (auto v = get("eta")) c.eta = std::stod(*v);
            if (auto v = get("dc")) c.dc = std::stod(*v);
            if (auto v = get("integration_time")) c.integration_time = std::stod(*v);
            if (auto v = get("path_multiplier")) c.path_multiplier = std::stod(*v);
            out.meta.scan_config = c;
        }
        if (auto v = get("seed")) out.meta.seed = std::stoull(*v);
    } catch (const IoError&) {
        throw;
    } catch (const std::exception&) {
        throw IoError(name + ": malformed metadata header");
    }
    return out;
}

inline LoadedScan read_scan_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scan file '" + path + "'");
    return read_scan_csv(in, path);
}

// ---------------------------------------------------------------------------
// Pattern reports
// ---------------------------------------------------------------------------

inline nlohmann::json stats_to_json(const EnvelopeStats& st) {
    nlohmann::json j;
    if (st.shape) j["shape"] = to_string(*st.shape);
    if (st.baseline) j["baseline"] = *st.baseline;
    if (st.upper_fwhm) j["upper_fwhm"] = *st.upper_fwhm;
    if (st.lower_fwhm) j["lower_fwhm"] = *st.lower_fwhm;
    if (st.coherence_length) j["coherence_length_m"] = *st.coherence_length;
    if (st.coherence_time) j["coherence_time_s"] = *st.coherence_time;
    if (st.visibility) j["visibility"] = *st.visibility;
    return j;
}

inline std::string stats_to_text(const EnvelopeStats& st, const std::string& label) {
    std::ostringstream os;
    char buf[96];
    if (!label.empty()) os << "scheme             " << label << "\n";
    if (st.shape) os << "shape              " << to_string(*st.shape) << "\n";
    if (st.baseline) {
        std::snprintf(buf, sizeof(buf), "%.6g", *st.baseline);
        os << "baseline           " << buf << "\n";
    }
    if (st.coherence_length) {
        std::snprintf(buf, sizeof(buf), "%.4g mm", *st.coherence_length * 1e3);
        os << "coherence length   " << buf << "\n";
    }
    if (st.coherence_time) {
        std::snprintf(buf, sizeof(buf), "%.4g ps", *st.coherence_time * 1e12);
        os << "coherence time     " << buf << "\n";
    }
    if (st.visibility) {
        std::snprintf(buf, sizeof(buf), "%.4f", *st.visibility);
        os << "visibility         " << buf << "\n";
    }
    return os.str();
}

}  // namespace noonsi::io
