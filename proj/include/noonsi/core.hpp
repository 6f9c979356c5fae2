#pragma once
// Shared domain types, unit conventions and validation for the NOON-state
// interference toolkit. All quantities are SI: angular frequencies in rad/s,
// path delays in meters of optical path, times in seconds.
//
// Sign convention: tau > 0 means the delayed polarization arm is longer.
// The phase-delay link is phi = omega0 * tau throughout; the same tau drives
// the indistinguishability envelope.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace noonsi {

inline constexpr double speed_of_light = 299792458.0;  // m/s, exact

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when domain inputs violate invariants; carries every violation.
struct ValidationError : Error {
    std::vector<std::string> issues;
    explicit ValidationError(std::vector<std::string> list)
        : Error(join(list)), issues(std::move(list)) {}

    static std::string join(const std::vector<std::string>& list) {
        std::ostringstream os;
        os << "invalid input (" << list.size() << " issue" << (list.size() == 1 ? "" : "s") << "):";
        for (const auto& s : list) os << "\n  - " << s;
        return os.str();
    }
};

/// Raised when a numeric invariant breaks mid-computation (bad covariance
/// pivot, non-unitary element, fit residual above tolerance, ...).
struct NumericError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Photon-pair source parameters.
struct SourceSpec {
    double omega0 = 0.0;       ///< central angular frequency (rad/s)
    double delta_omega = 0.0;  ///< spectral width (rad/s)
    double mu = 0.0;           ///< mean photon pairs per pulse
    double rep_rate = 0.0;     ///< pulses per second
};

/// The m/n split of threshold detectors across the two output channels.
struct DetectionScheme {
    int m = 0;  ///< detectors on channel 1
    int n = 0;  ///< detectors on channel 2

    int total() const { return m + n; }
    bool single_photon() const { return m == 1 && n == 0; }

    std::string label() const { return std::to_string(m) + "/" + std::to_string(n); }

    friend bool operator==(const DetectionScheme&, const DetectionScheme&) = default;
};

enum class ScanMode {
    coarse_path,  ///< delay grid in meters of optical path
    fine_phase,   ///< delay grid in radians of phase, phi = omega0 * tau
};

inline const char* to_string(ScanMode m) {
    return m == ScanMode::coarse_path ? "coarse" : "fine";
}

/// Delay sweep description plus the detector model parameters.
struct ScanConfig {
    ScanMode mode = ScanMode::coarse_path;
    double start = 0.0;  ///< first grid value (m for coarse, rad for fine)
    double step = 0.0;   ///< grid spacing, > 0
    int count = 0;       ///< number of points, >= 2
    double eta = 1.0;    ///< total efficiency per detector, [0,1]
    double dc = 0.0;     ///< dark-count probability per gate, [0,1)
    double integration_time = 1.0;  ///< seconds per point, for count sampling
    /// Optical-path change per unit of motor travel. The stage geometry is
    /// not part of the model; by default grid values are already optical path.
    double path_multiplier = 1.0;

    double grid_value(int i) const { return start + step * i; }
};

/// Standard Fig.-2-style sweep defaults: 1000 x 2 um coarse, 0..4pi fine.
inline ScanConfig default_coarse_scan() {
    ScanConfig cfg;
    cfg.mode = ScanMode::coarse_path;
    cfg.start = -1.0e-3;
    cfg.step = 2.0e-6;
    cfg.count = 1000;
    return cfg;
}

inline ScanConfig default_fine_scan() {
    ScanConfig cfg;
    cfg.mode = ScanMode::fine_phase;
    cfg.start = 0.0;
    cfg.step = 4.0 * M_PI / 200.0;
    cfg.count = 200;
    return cfg;
}

struct ScanPoint {
    double delay = 0.0;        ///< grid value in the scan's unit
    double probability = 0.0;  ///< detection probability at this delay
    std::optional<std::uint64_t> counts;  ///< sampled counts, when drawn
};

/// Ordered series of (delay, probability[, counts]) produced by an engine
/// or ingested from CSV. Delay values are strictly monotonic.
struct PatternScan {
    DetectionScheme scheme;
    ScanMode unit = ScanMode::coarse_path;
    std::vector<ScanPoint> points;
};

enum class ShapeClass { symmetric, dip, bump };

inline const char* to_string(ShapeClass s) {
    switch (s) {
        case ShapeClass::symmetric: return "symmetric";
        case ShapeClass::dip: return "dip";
        default: return "bump";
    }
}

/// Pattern metrics in the style of the experimental summary table. Envelope
/// fields come from a coarse scan, visibility from a fine scan; fields are
/// absent when the corresponding scan was not supplied.
struct EnvelopeStats {
    std::optional<ShapeClass> shape;
    std::optional<double> upper_fwhm;     ///< same unit as the coarse scan
    std::optional<double> lower_fwhm;
    std::optional<double> coherence_length;  ///< meters of optical path
    std::optional<double> coherence_time;    ///< seconds, = length / c
    std::optional<double> baseline;          ///< probability at large delay
    std::optional<double> visibility;        ///< (max-min)/(max+min), fine scan
};

// ---------------------------------------------------------------------------
// Unit conversions and calibration
// ---------------------------------------------------------------------------

/// Optical path delay (s) for a coarse grid value x (m of stage travel).
inline double tau_from_path(const ScanConfig& cfg, double x) {
    return cfg.path_multiplier * x / speed_of_light;
}

/// Delay (s) assigned to a grid value under either scan mode.
inline double tau_of_grid(const SourceSpec& src, const ScanConfig& cfg, double value) {
    if (cfg.mode == ScanMode::coarse_path) return tau_from_path(cfg, value);
    return value / src.omega0;  // fine grid is phi = omega0 * tau
}

/// Interference phase phi = omega0 * tau assigned to a grid value.
inline double phi_of_grid(const SourceSpec& src, const ScanConfig& cfg, double value) {
    if (cfg.mode == ScanMode::fine_phase) return value;
    return src.omega0 * tau_from_path(cfg, value);
}

/// Squared temporal overlap between the delayed and undelayed wavepackets,
/// normalized so that zero delay gives unit overlap:
/// I(tau) = exp[-(delta_omega * tau)^2 / 2].
inline double indistinguishability(double tau, double delta_omega) {
    const double x = delta_omega * tau;
    return std::exp(-0.5 * x * x);
}

/// Spectral width that gives a two-photon coherence time (upper-envelope
/// FWHM of the 1/1 scheme) equal to fwhm_seconds.
inline double delta_omega_from_coherence_time(double fwhm_seconds) {
    return 2.0 * std::sqrt(2.0 * std::log(2.0)) / fwhm_seconds;
}

/// Source defaults used by the CLI: 1584 nm degenerate SPDC, spectral width
/// calibrated so the 1/1 coherence time is 1.77 ps, 76 MHz pump.
inline SourceSpec default_source() {
    SourceSpec s;
    s.omega0 = 2.0 * M_PI * speed_of_light / 1584.0e-9;
    s.delta_omega = delta_omega_from_coherence_time(1.77e-12);
    s.mu = 0.01;
    s.rep_rate = 76.0e6;
    return s;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Normalized, checked input bundle. Immutable after validation; safe to
/// share across threads.
struct Bundle {
    SourceSpec source;
    DetectionScheme scheme;
    ScanConfig scan;
};

namespace detail {

inline bool bad(double v) { return !std::isfinite(v); }

inline void check_source(const SourceSpec& s, std::vector<std::string>& out) {
    if (bad(s.omega0) || s.omega0 <= 0) out.push_back("omega0 must be finite and > 0");
    if (bad(s.delta_omega) || s.delta_omega <= 0) out.push_back("delta_omega must be finite and > 0");
    if (bad(s.mu) || s.mu < 0) out.push_back("mu must be finite and >= 0");
    if (bad(s.rep_rate) || s.rep_rate <= 0) out.push_back("rep_rate must be finite and > 0");
    if (s.omega0 > 0 && s.delta_omega > 0 && s.omega0 / s.delta_omega <= 10.0)
        out.push_back("narrowband assumption violated: omega0/delta_omega must exceed 10");
}

inline void check_scheme(const DetectionScheme& d, int max_total, std::vector<std::string>& out) {
    if (d.m < 0 || d.n < 0) out.push_back("detector counts must be >= 0");
    const int total = d.m + d.n;
    if (total < 1) out.push_back("at least one detector required");
    if (total > max_total)
        out.push_back("scheme " + d.label() + " exceeds the supported total of " +
                      std::to_string(max_total) + " detectors");
    if (total >= 2 && total % 2 != 0)
        out.push_back("odd photon number " + std::to_string(total) +
                      " unsupported for SPDC post-selection (scheme " + d.label() + ")");
    if (total == 1 && !d.single_photon())
        out.push_back("single-photon detection must use scheme 1/0");
}

inline void check_scan(const ScanConfig& c, std::vector<std::string>& out) {
    if (bad(c.step) || c.step <= 0) out.push_back("step must be finite and > 0");
    if (c.count < 2) out.push_back("count must be >= 2");
    if (bad(c.start)) out.push_back("start must be finite");
    if (bad(c.eta) || c.eta < 0 || c.eta > 1) out.push_back("efficiency out of range: eta must lie in [0,1]");
    if (bad(c.dc) || c.dc < 0 || c.dc >= 1) out.push_back("dark-count probability must lie in [0,1)");
    if (bad(c.integration_time) || c.integration_time <= 0)
        out.push_back("integration_time must be finite and > 0");
    if (bad(c.path_multiplier) || c.path_multiplier <= 0)
        out.push_back("path_multiplier must be finite and > 0");
}

}  // namespace detail

/// Check every invariant and return the normalized bundle; throws
/// ValidationError listing all violations. max_total raises the detector
/// ceiling for engines explicitly configured beyond the six-photon range.
inline Bundle validate(const SourceSpec& src, const DetectionScheme& scheme,
                       const ScanConfig& cfg, int max_total = 6) {
    std::vector<std::string> issues;
    detail::check_source(src, issues);
    detail::check_scheme(scheme, max_total, issues);
    detail::check_scan(cfg, issues);
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return Bundle{src, scheme, cfg};
}

/// Validation is idempotent: a validated bundle passes through unchanged.
inline Bundle validate(const Bundle& bundle, int max_total = 6) {
    return validate(bundle.source, bundle.scheme, bundle.scan, max_total);
}

}  // namespace noonsi
