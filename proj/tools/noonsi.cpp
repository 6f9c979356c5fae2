// Command-line front end: scan simulation (analytic / oracle / gaussian
// engines), pattern analysis, and engine cross-checks with plot-ready CSV
// output.
//
// Exit codes: 0 success, 2 config error, 3 numeric-invariant failure,
// 4 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "noonsi/analysis.hpp"
#include "noonsi/analytic.hpp"
#include "noonsi/config.hpp"
#include "noonsi/core.hpp"
#include "noonsi/fock.hpp"
#include "noonsi/gaussian.hpp"
#include "noonsi/scan_io.hpp"
#include "noonsi/simulate.hpp"

namespace {

using namespace noonsi;

DetectionScheme parse_scheme(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos)
        throw ValidationError({"scheme must look like m/n, got '" + text + "'"});
    try {
        return {std::stoi(text.substr(0, slash)), std::stoi(text.substr(slash + 1))};
    } catch (const std::exception&) {
        throw ValidationError({"scheme must look like m/n, got '" + text + "'"});
    }
}

// Reference experimental pattern parameters (1584 nm SPDC NOON
// interference measured with six SNSPDs), used by --compare-table1.
struct ReferenceRow {
    const char* scheme;
    const char* shape;
    double coherence_length_mm;
    double coherence_time_ps;
    double visibility;
};

constexpr ReferenceRow kReferenceTable[] = {
    {"1/0", "symmetric", 0.75, 2.50, 0.99}, {"1/1", "symmetric", 0.53, 1.77, 0.92},
    {"2/0", "symmetric", 0.53, 1.77, 0.98}, {"2/2", "bump", 0.46, 1.53, 0.85},
    {"3/1", "dip", 0.40, 1.33, 0.53},       {"4/0", "bump", 0.63, 2.10, 0.98},
    {"3/3", "dip", 0.81, 2.70, 0.63},       {"4/2", "dip", 0.62, 2.07, 0.35},
    {"5/1", "bump", 0.92, 3.07, 0.73},      {"6/0", "bump", 0.65, 2.17, 0.98},
};

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanArgs {
    std::string config_path;
    std::string engine = "analytic";
    std::string scheme;
    std::string mode;
    std::string out = "scan.csv";
    std::string counts_out;
    bool sample = false;
    std::uint64_t seed = 1;
    std::optional<double> mu, eta, dc, omega0, delta_omega, rep_rate;
    std::optional<double> integration_time, start, step, path_multiplier;
    std::optional<int> count;
};

int cmd_scan(const ScanArgs& args) {
    Config cfg;
    if (!args.config_path.empty()) cfg = load_config(args.config_path);

    if (!args.mode.empty()) {
        if (args.mode != "coarse" && args.mode != "fine")
            throw ValidationError({"mode must be 'coarse' or 'fine', got '" + args.mode + "'"});
        cfg.scan.mode = args.mode == "coarse" ? ScanMode::coarse_path : ScanMode::fine_phase;
        cfg.apply_mode_defaults();
    }
    if (args.mu) cfg.source.mu = *args.mu;
    if (args.omega0) cfg.source.omega0 = *args.omega0;
    if (args.delta_omega) cfg.source.delta_omega = *args.delta_omega;
    if (args.rep_rate) cfg.source.rep_rate = *args.rep_rate;
    if (args.eta) cfg.scan.eta = *args.eta;
    if (args.dc) cfg.scan.dc = *args.dc;
    if (args.integration_time) cfg.scan.integration_time = *args.integration_time;
    if (args.start) cfg.scan.start = *args.start;
    if (args.step) cfg.scan.step = *args.step;
    if (args.count) cfg.scan.count = *args.count;
    if (args.path_multiplier) cfg.scan.path_multiplier = *args.path_multiplier;

    const Engine engine = engine_from_name(args.engine);
    const Bundle bundle = validate(cfg.source, parse_scheme(args.scheme), cfg.scan);

    PatternScan scan = run_scan(engine, bundle);
    std::optional<std::uint64_t> seed;
    if (args.sample) {
        seed = args.seed;
        sample_counts(scan, bundle.source, bundle.scan, args.seed);
    }

    const io::ScanMeta meta = io::meta_for(args.engine, bundle, seed);
    io::write_scan_csv(args.out, scan, meta);
    if (args.sample) {
        std::string counts_path = args.counts_out;
        if (counts_path.empty()) {
            counts_path = args.out;
            const auto dot = counts_path.rfind(".csv");
            if (dot != std::string::npos) counts_path.insert(dot, "_counts");
            else counts_path += "_counts.csv";
        }
        io::write_counts_csv(counts_path, scan, meta);
        std::cout << "wrote " << args.out << " and " << counts_path << "\n";
    } else {
        std::cout << "wrote " << args.out << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string scan_path;
    std::string fine_path;
    std::string report_path;
    bool compare_table1 = false;
    double symmetric_tol = 0.15;
    std::optional<double> omega0;
    std::optional<double> path_multiplier;
};

int cmd_analyze(const AnalyzeArgs& args) {
    const io::LoadedScan primary = io::read_scan_csv(args.scan_path);
    std::optional<io::LoadedScan> fine_file;
    if (!args.fine_path.empty()) fine_file = io::read_scan_csv(args.fine_path);

    const PatternScan* coarse = nullptr;
    const PatternScan* fine = nullptr;
    if (primary.scan.unit == ScanMode::coarse_path) coarse = &primary.scan;
    else fine = &primary.scan;
    if (fine_file) {
        if (fine_file->scan.unit != ScanMode::fine_phase)
            throw IoError("--fine expects a fine-phase scan");
        fine = &fine_file->scan;
    }

    analysis::AnalysisOptions opts;
    opts.symmetric_tol = args.symmetric_tol;
    if (args.omega0) opts.omega0 = *args.omega0;
    else if (primary.meta.source) opts.omega0 = primary.meta.source->omega0;
    if (args.path_multiplier) opts.path_multiplier = *args.path_multiplier;
    else if (primary.meta.scan_config) opts.path_multiplier = primary.meta.scan_config->path_multiplier;

    const EnvelopeStats stats = analysis::metrics(coarse, fine, opts);
    const std::string label = primary.meta.scheme ? primary.meta.scheme->label() : "";
    std::cout << io::stats_to_text(stats, label);

    if (args.compare_table1) {
        const ReferenceRow* ref = nullptr;
        for (const auto& row : kReferenceTable)
            if (label == row.scheme) ref = &row;
        if (!ref) {
            std::cout << "no reference row for scheme '" << label << "'\n";
        } else {
            std::printf("\n%-22s%-14s%s\n", "", "computed", "reference");
            std::printf("%-22s%-14s%s\n", "shape",
                        stats.shape ? to_string(*stats.shape) : "-", ref->shape);
            if (stats.coherence_length)
                std::printf("%-22s%-14.3g%.3g\n", "coherence length (mm)",
                            *stats.coherence_length * 1e3, ref->coherence_length_mm);
            if (stats.coherence_time)
                std::printf("%-22s%-14.3g%.3g\n", "coherence time (ps)",
                            *stats.coherence_time * 1e12, ref->coherence_time_ps);
            if (stats.visibility)
                std::printf("%-22s%-14.3g%.3g\n", "visibility", *stats.visibility,
                            ref->visibility);
        }
    }

    if (!args.report_path.empty()) {
        nlohmann::json j = io::stats_to_json(stats);
        if (!label.empty()) j["scheme"] = label;
        std::ofstream os(args.report_path);
        if (!os) throw IoError("cannot write report '" + args.report_path + "'");
        os << j.dump(2) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// crosscheck
// ---------------------------------------------------------------------------

struct CrosscheckArgs {
    std::string schemes = "all";
    std::string grid = "5x17";
    double mu = 1e-3;
    double tol = 1e-9;
    bool print_forms = false;
    std::string dump_grid;
};

std::vector<DetectionScheme> scheme_list(const std::string& arg) {
    if (arg == "all")
        return {{1, 0}, {1, 1}, {2, 0}, {2, 2}, {3, 1}, {4, 0}, {3, 3}, {4, 2}, {5, 1}, {6, 0}};
    std::vector<DetectionScheme> out;
    std::istringstream in(arg);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_scheme(item));
    return out;
}

int cmd_crosscheck(const CrosscheckArgs& args) {
    int ni = 5, nphi = 17;
    if (std::sscanf(args.grid.c_str(), "%dx%d", &ni, &nphi) != 2 || ni < 2 || nphi < 2)
        throw ValidationError({"grid must look like 5x17"});

    std::ofstream dump;
    if (!args.dump_grid.empty()) {
        dump.open(args.dump_grid, std::ios::binary);
        if (!dump) throw IoError("cannot write '" + args.dump_grid + "'");
        dump << "# noonsi oracle grid\nscheme,I,phi,oracle\n";
    }

    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, double worst, const char* unit) {
        std::printf("[%s] %-44s worst %.3e %s\n", ok ? "PASS" : "FAIL", name.c_str(), worst, unit);
        all_ok = all_ok && ok;
    };

    for (const auto& scheme : scheme_list(args.schemes)) {
        const int total = scheme.total();
        if (total <= 4) {
            // Closed form vs brute-force Fock model.
            double worst = 0.0;
            for (int i = 0; i < ni; ++i) {
                const double ii = double(i) / (ni - 1);
                for (int j = 0; j < nphi; ++j) {
                    const double phi = 2.0 * M_PI * j / (nphi - 1);
                    const double reference = scheme.single_photon()
                                                 ? fock::single_photon_probability(ii, phi)
                                                 : fock::oracle_probability(scheme, ii, phi);
                    worst = std::max(worst,
                                     std::abs(analytic::closed_form(scheme, ii, phi) - reference));
                    if (dump.is_open())
                        dump << scheme.label() << ',' << io::fmt(ii) << ',' << io::fmt(phi) << ','
                             << io::fmt(reference) << "\n";
                }
            }
            report("closed form vs oracle " + scheme.label(), worst <= args.tol, worst, "abs");
        } else {
            // Reconstructed six-photon form vs oracle on a dense grid.
            const auto& form = analytic::six_photon_form(scheme);
            double worst = 0.0;
            for (int i = 0; i <= 20; ++i)
                for (int j = 0; j < 33; ++j) {
                    const double ii = i / 20.0, phi = 2.0 * M_PI * j / 33.0;
                    const double reference = fock::oracle_probability(scheme, ii, phi);
                    worst = std::max(worst, std::abs(form.eval(ii, phi) - reference));
                    if (dump.is_open())
                        dump << scheme.label() << ',' << io::fmt(ii) << ',' << io::fmt(phi) << ','
                             << io::fmt(reference) << "\n";
                }
            report("six-photon form vs oracle " + scheme.label(), worst <= args.tol, worst, "abs");
            if (args.print_forms)
                std::cout << form.format("scheme " + scheme.label() +
                                         " (reconstructed numerically from the Fock model)");
        }

        // Gaussian engine at small mu vs the analytic fringe, for the
        // schemes with closed forms.
        if (total >= 2 && total <= 4) {
            Bundle b{default_source(), scheme, default_fine_scan()};
            b.source.mu = args.mu;
            b.scan.eta = 0.2;
            b.scan.dc = 1e-4;
            const PatternScan gscan = gaussian::multipair_pattern(b);
            const PatternScan ascan = analytic::pattern(b);
            const double vg = analysis::visibility(gscan);
            const double va = analysis::visibility(ascan);
            const double vis_err = std::abs(vg - va);
            report("gaussian visibility vs analytic " + scheme.label(), vis_err <= 0.02, vis_err,
                   "");

            double gmin = 1e300, gmax = -1e300, amin = 1e300, amax = -1e300;
            for (int i = 0; i < b.scan.count; ++i) {
                gmin = std::min(gmin, gscan.points[i].probability);
                gmax = std::max(gmax, gscan.points[i].probability);
                amin = std::min(amin, ascan.points[i].probability);
                amax = std::max(amax, ascan.points[i].probability);
            }
            double shape_dev = 0.0;
            for (int i = 0; i < b.scan.count; ++i) {
                const double g = (gscan.points[i].probability - gmin) / (gmax - gmin);
                const double a = (ascan.points[i].probability - amin) / (amax - amin);
                shape_dev = std::max(shape_dev, std::abs(g - a));
            }
            report("gaussian fringe shape vs analytic " + scheme.label(), shape_dev <= 0.02,
                   shape_dev, "norm");
        }
    }

    if (!all_ok) throw NumericError("crosscheck found equivalence failures");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NOON-state interference simulation toolkit"};
    app.require_subcommand(1);

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "simulate an interference scan and write CSV");
    scan->add_option("--config", scan_args.config_path, "config file (key = value)");
    scan->add_option("--engine", scan_args.engine, "analytic | oracle | gaussian");
    scan->add_option("--scheme", scan_args.scheme, "detector split m/n")->required();
    scan->add_option("--mode", scan_args.mode, "coarse | fine");
    scan->add_option("--out", scan_args.out, "output CSV path");
    scan->add_option("--counts-out", scan_args.counts_out, "sampled-counts CSV path");
    scan->add_flag("--sample", scan_args.sample, "draw Poisson counts per point");
    scan->add_option("--seed", scan_args.seed, "RNG seed for --sample");
    auto opt = [&](const char* name, std::optional<double>& slot, const char* help) {
        scan->add_option_function<double>(name, [&slot](double v) { slot = v; }, help);
    };
    opt("--mu", scan_args.mu, "mean photon pairs per pulse");
    opt("--eta", scan_args.eta, "total efficiency per detector");
    opt("--dc", scan_args.dc, "dark-count probability per gate");
    opt("--omega0", scan_args.omega0, "central angular frequency (rad/s)");
    opt("--delta-omega", scan_args.delta_omega, "spectral width (rad/s)");
    opt("--rep-rate", scan_args.rep_rate, "pulses per second");
    opt("--integration-time", scan_args.integration_time, "seconds per point");
    opt("--start", scan_args.start, "grid start (m coarse, rad fine)");
    opt("--step", scan_args.step, "grid step");
    opt("--path-multiplier", scan_args.path_multiplier, "optical path per unit of stage travel");
    scan->add_option_function<int>(
        "--count", [&](int v) { scan_args.count = v; }, "number of grid points");

    AnalyzeArgs an_args;
    auto* analyze = app.add_subcommand("analyze", "extract pattern metrics from scan CSVs");
    analyze->add_option("scan", an_args.scan_path, "scan CSV (coarse or fine)")->required();
    analyze->add_option("--fine", an_args.fine_path, "fine scan CSV for visibility");
    analyze->add_option("--report", an_args.report_path, "write machine-readable JSON report");
    analyze->add_flag("--compare-table1", an_args.compare_table1,
                      "print side-by-side with the reference experimental values");
    analyze->add_option("--symmetric-tol", an_args.symmetric_tol,
                        "relative envelope tolerance for the symmetric class");
    analyze->add_option_function<double>(
        "--omega0", [&](double v) { an_args.omega0 = v; }, "carrier frequency for plain CSVs");
    analyze->add_option_function<double>(
        "--path-multiplier", [&](double v) { an_args.path_multiplier = v; },
        "optical path per unit of coarse delay");

    CrosscheckArgs cc_args;
    auto* cross = app.add_subcommand("crosscheck", "run engine equivalence suites");
    cross->add_option("--schemes", cc_args.schemes, "all or comma list (e.g. 1/1,3/3)");
    cross->add_option("--grid", cc_args.grid, "I x phi grid, e.g. 5x17");
    cross->add_option("--mu", cc_args.mu, "mean pair number for the gaussian check");
    cross->add_option("--tol", cc_args.tol, "absolute tolerance for oracle equivalence");
    cross->add_flag("--print-forms", cc_args.print_forms, "print derived six-photon forms");
    cross->add_option("--dump-grid", cc_args.dump_grid,
                      "export the oracle (scheme, I, phi) grid as CSV");

    try {
        app.parse(argc, argv);
        if (scan->parsed()) return cmd_scan(scan_args);
        if (analyze->parsed()) return cmd_analyze(an_args);
        if (cross->parsed()) return cmd_crosscheck(cc_args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric invariant failure: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
