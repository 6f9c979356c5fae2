#pragma once
// Extraction of pattern metrics from scans: upper/lower fringe envelopes,
// shape classification (symmetric / dip / bump), envelope FWHM and the
// derived coherence length/time, fringe visibility, and the harmonic
// content of fine scans.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "noonsi/core.hpp"

namespace noonsi::analysis {

struct AnalysisOptions {
    std::optional<double> omega0;  ///< carrier frequency, for coarse fringe location
    double path_multiplier = 1.0;  ///< optical path per unit of coarse delay
    double symmetric_tol = 0.15;   ///< |U-L| <= tol * max(U,L) classifies symmetric
    int max_harmonic = 8;
    double present_tol = 1e-3;  ///< relative magnitude for a harmonic to count
};

/// Angular fringe frequency per unit delay for harmonic k = 1: 1 for phase
/// scans, omega0 * path_multiplier / c for path scans.
inline double angular_base(const PatternScan& scan, const AnalysisOptions& opts) {
    if (scan.unit == ScanMode::fine_phase) return 1.0;
    if (!opts.omega0)
        throw NumericError("coarse-scan harmonic analysis needs omega0 (none in scan metadata)");
    return *opts.omega0 * opts.path_multiplier / speed_of_light;
}

// ---------------------------------------------------------------------------
// Harmonic content
// ---------------------------------------------------------------------------

struct HarmonicContent {
    std::map<int, double> magnitude;  ///< k >= 1 -> projected fringe amplitude
    int dominant = 0;                 ///< strongest harmonic, ties toward lower k
    std::vector<int> present;         ///< harmonics above the relative threshold
    int fundamental = 0;              ///< lowest present harmonic
};

/// Projects the scan onto cos/sin of integer multiples of the base fringe
/// frequency. Exact for uniform grids covering whole periods; leakage from
/// the slow envelope stays far below the presence threshold.
inline HarmonicContent harmonic_content(const PatternScan& scan, const AnalysisOptions& opts = {}) {
    const double base = angular_base(scan, opts);
    const auto& pts = scan.points;
    const size_t n = pts.size();
    if (n < 4) throw NumericError("too few points for harmonic analysis");

    double mean = 0.0;
    for (const auto& p : pts) mean += p.probability;
    mean /= double(n);

    HarmonicContent out;
    double best = -1.0;
    for (int k = 1; k <= opts.max_harmonic; ++k) {
        double cs = 0.0, sn = 0.0;
        for (const auto& p : pts) {
            const double arg = k * base * p.delay;
            cs += (p.probability - mean) * std::cos(arg);
            sn += (p.probability - mean) * std::sin(arg);
        }
        const double mag = 2.0 * std::hypot(cs, sn) / double(n);
        out.magnitude[k] = mag;
        if (mag > best * (1.0 + 1e-12)) {
            best = mag;
            out.dominant = k;
        }
    }
    for (const auto& [k, mag] : out.magnitude)
        if (mag > opts.present_tol * best) out.present.push_back(k);
    out.fundamental = out.present.empty() ? 0 : out.present.front();
    return out;
}

// ---------------------------------------------------------------------------
// Fringe period detection without metadata
// ---------------------------------------------------------------------------

namespace detail {

inline double projection_power(const std::vector<double>& x, const std::vector<double>& v,
                               double omega) {
    double cs = 0.0, sn = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        cs += v[i] * std::cos(omega * x[i]);
        sn += v[i] * std::sin(omega * x[i]);
    }
    return cs * cs + sn * sn;
}

}  // namespace detail

/// Estimates the angular fringe frequency of a scan without carrier
/// metadata: a windowed spectral search finds the strongest line, then
/// sub-harmonics are probed so the fundamental (lowest present line) wins.
inline double detect_fringe_frequency(const PatternScan& scan) {
    const auto& pts = scan.points;
    const size_t n = pts.size();
    if (n < 16) throw NumericError("too few points to detect the fringe period");

    // Window around the center of the scan, where fringe contrast peaks.
    const size_t w = std::min<size_t>(n, 4096);
    const size_t begin = (n - w) / 2;
    std::vector<double> x(w), v(w);
    double mean = 0.0;
    for (size_t i = 0; i < w; ++i) mean += pts[begin + i].probability;
    mean /= double(w);
    for (size_t i = 0; i < w; ++i) {
        x[i] = pts[begin + i].delay;
        v[i] = pts[begin + i].probability - mean;
    }

    const double span = x.back() - x.front();
    const double domega = 2.0 * M_PI / span;

    double best_power = -1.0;
    double best_omega = 0.0;
    const size_t bins = w / 2;
    for (size_t j = 1; j < bins; ++j) {
        const double omega = domega * double(j);
        const double p = detail::projection_power(x, v, omega);
        if (p > best_power) {
            best_power = p;
            best_omega = omega;
        }
    }
    if (best_power <= 0.0) throw NumericError("degenerate flat scan: no fringe found");

    // Parabolic refinement of the peak.
    const double pm = detail::projection_power(x, v, best_omega - domega);
    const double pp = detail::projection_power(x, v, best_omega + domega);
    const double denom = pm - 2.0 * best_power + pp;
    if (denom < 0.0) best_omega += 0.5 * domega * (pm - pp) / denom;

    // Probe sub-harmonics: the fundamental is the lowest line that carries
    // non-negligible power.
    double fundamental = best_omega;
    for (int d = 2; d <= 8; ++d) {
        const double omega = best_omega / d;
        if (omega * span < 4.0 * M_PI) break;  // need a few periods in the window
        if (detail::projection_power(x, v, omega) > 1e-6 * best_power)
            fundamental = std::min(fundamental, omega);
    }
    return fundamental;
}

// ---------------------------------------------------------------------------
// Envelopes
// ---------------------------------------------------------------------------

/// Piecewise-linear envelope through per-period extremum knots.
struct Envelope {
    std::vector<std::pair<double, double>> knots;  // (delay, value), sorted

    double eval(double delay) const {
        if (knots.empty()) return 0.0;
        if (delay <= knots.front().first) return knots.front().second;
        if (delay >= knots.back().first) return knots.back().second;
        auto hi = std::lower_bound(knots.begin(), knots.end(), delay,
                                   [](const auto& kv, double d) { return kv.first < d; });
        auto lo = std::prev(hi);
        const double t = (delay - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }

    std::pair<double, double> peak() const {  // (delay, value) of max
        auto it = std::max_element(knots.begin(), knots.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
        return *it;
    }

    std::pair<double, double> trough() const {
        auto it = std::min_element(knots.begin(), knots.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
        return *it;
    }
};

struct EnvelopePair {
    Envelope upper, lower;
    double baseline = 0.0;      ///< mean of the outermost 10% of points
    double fringe_period = 0.0; ///< period used for segmentation, delay units
};

/// Extracts upper/lower envelopes by taking the extremum per fringe period
/// and interpolating linearly between the knots.
/// Requires >= 5 fringe periods and >= 8 points per period.
inline EnvelopePair envelopes(const PatternScan& scan, const AnalysisOptions& opts = {}) {
    const auto& pts = scan.points;
    if (pts.size() < 16) throw NumericError("scan too short for envelope extraction");
    for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i].delay <= pts[i - 1].delay)
            throw NumericError("delay values must be strictly monotonic");

    double vmin = pts[0].probability, vmax = pts[0].probability;
    for (const auto& p : pts) {
        vmin = std::min(vmin, p.probability);
        vmax = std::max(vmax, p.probability);
    }
    if (vmax - vmin < 1e-15) throw NumericError("degenerate flat scan");

    // Fundamental fringe period, from metadata when available.
    double omega_fringe;
    if (scan.unit == ScanMode::fine_phase || opts.omega0) {
        const auto content = harmonic_content(scan, opts);
        if (content.fundamental == 0) throw NumericError("no fringe harmonic detected");
        omega_fringe = angular_base(scan, opts) * content.fundamental;
    } else {
        omega_fringe = detect_fringe_frequency(scan);
    }
    const double period = 2.0 * M_PI / omega_fringe;

    const double step = (pts.back().delay - pts.front().delay) / double(pts.size() - 1);
    const double span = pts.back().delay - pts.front().delay;
    if (period / step < 8.0 - 1e-9) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "insufficient sampling density: step %.3g needs to be <= %.3g "
                      "(8 points per fringe period %.3g)", step, period / 8.0, period);
        throw NumericError(buf);
    }
    if (span / period < 5.0)
        throw NumericError("scan covers fewer than 5 fringe periods");

    EnvelopePair out;
    out.fringe_period = period;

    // Baseline: outermost 10% of points (5% per edge).
    const size_t edge = std::max<size_t>(1, pts.size() / 20);
    double acc = 0.0;
    for (size_t i = 0; i < edge; ++i)
        acc += pts[i].probability + pts[pts.size() - 1 - i].probability;
    out.baseline = acc / double(2 * edge);

    // Per-period extremum knots, parabolic-refined so the discrete grid does
    // not clip the fringe peaks.
    auto refined = [&](size_t i, double sign) -> std::pair<double, double> {
        if (i == 0 || i + 1 == pts.size()) return {pts[i].delay, pts[i].probability};
        const double a = pts[i - 1].probability, b = pts[i].probability,
                     c = pts[i + 1].probability;
        const double denom = a - 2.0 * b + c;
        if (std::abs(denom) < 1e-300) return {pts[i].delay, pts[i].probability};
        const double t = 0.5 * (a - c) / denom;
        if (std::abs(t) > 1.0) return {pts[i].delay, pts[i].probability};
        const double value = b - 0.25 * (a - c) * t;
        if (sign * value < sign * b) return {pts[i].delay, pts[i].probability};
        return {pts[i].delay + t * step, value};
    };

    const double t0 = pts.front().delay;
    size_t i = 0;
    while (i < pts.size()) {
        const auto window = static_cast<size_t>((pts[i].delay - t0) / period);
        size_t imax = i, imin = i;
        size_t j = i;
        for (; j < pts.size() && static_cast<size_t>((pts[j].delay - t0) / period) == window; ++j) {
            if (pts[j].probability > pts[imax].probability) imax = j;
            if (pts[j].probability < pts[imin].probability) imin = j;
        }
        if (j - i >= 3) {  // skip fragments at the tail
            out.upper.knots.push_back(refined(imax, +1.0));
            out.lower.knots.push_back(refined(imin, -1.0));
        }
        i = j;
    }
    if (out.upper.knots.size() < 5) throw NumericError("too few fringe periods for envelopes");
    return out;
}

// ---------------------------------------------------------------------------
// Classification and metrics
// ---------------------------------------------------------------------------

/// Shape class from the envelope excursions: U = max(upper) - baseline,
/// L = baseline - min(lower); symmetric when they agree within the
/// tolerance, else bump (U > L) or dip (L > U). Affine-invariant.
inline ShapeClass classify(const EnvelopePair& env, double symmetric_tol = 0.15) {
    const double u = env.upper.peak().second - env.baseline;
    const double l = env.baseline - env.lower.trough().second;
    const double scale = std::max(u, l);
    if (scale <= 0.0) throw NumericError("degenerate envelopes: no excursion from baseline");
    if (std::abs(u - l) <= symmetric_tol * scale) return ShapeClass::symmetric;
    return u > l ? ShapeClass::bump : ShapeClass::dip;
}

inline ShapeClass classify(const PatternScan& scan, const AnalysisOptions& opts = {}) {
    return classify(envelopes(scan, opts), opts.symmetric_tol);
}

namespace detail {

/// FWHM of the envelope excursion relative to the baseline. `sign` is +1
/// for the upper envelope (peak above baseline), -1 for the lower one.
inline std::optional<double> envelope_fwhm(const Envelope& env, double baseline, double sign) {
    if (env.knots.size() < 3) return std::nullopt;
    std::vector<std::pair<double, double>> exc;  // signed excursion
    exc.reserve(env.knots.size());
    for (const auto& [d, v] : env.knots) exc.emplace_back(d, sign * (v - baseline));

    size_t ipk = 0;
    for (size_t i = 1; i < exc.size(); ++i)
        if (exc[i].second > exc[ipk].second) ipk = i;
    const double height = exc[ipk].second;
    if (height <= 0.0) return std::nullopt;
    const double half = 0.5 * height;

    auto cross = [&](int dir) -> std::optional<double> {
        size_t i = ipk;
        while (true) {
            if ((dir < 0 && i == 0) || (dir > 0 && i + 1 == exc.size())) return std::nullopt;
            const size_t j = i + dir;
            if (exc[j].second <= half) {
                const double t = (exc[i].second - half) / (exc[i].second - exc[j].second);
                return exc[i].first + t * (exc[j].first - exc[i].first);
            }
            i = j;
        }
    };
    const auto left = cross(-1), right = cross(+1);
    if (!left || !right) return std::nullopt;
    return *right - *left;
}

}  // namespace detail

/// Fringe visibility (max - min)/(max + min) of a scan, with parabolic
/// refinement of interior extrema so the discrete grid does not clip them.
inline double visibility(const PatternScan& scan) {
    const auto& pts = scan.points;
    if (pts.size() < 3) throw NumericError("too few points for visibility");

    auto refine = [&](size_t i, int sign) {
        double v = pts[i].probability;
        if (i == 0 || i + 1 == pts.size()) return v;
        const double a = pts[i - 1].probability, b = v, c = pts[i + 1].probability;
        const double denom = a - 2.0 * b + c;
        if (std::abs(denom) < 1e-300) return v;
        const double t = 0.5 * (a - c) / denom;
        if (std::abs(t) <= 1.0) {
            // Clamp at zero: scan values are probabilities or counts, and
            // the parabola must not refine a null below what is physical.
            const double refined = std::max(0.0, b - 0.25 * (a - c) * t);
            if (sign * refined > sign * v) return refined;
        }
        return v;
    };

    size_t imax = 0, imin = 0;
    for (size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].probability > pts[imax].probability) imax = i;
        if (pts[i].probability < pts[imin].probability) imin = i;
    }
    const double vmax = refine(imax, +1);
    const double vmin = refine(imin, -1);
    if (vmax + vmin <= 0.0) throw NumericError("visibility undefined for all-zero scan");
    return (vmax - vmin) / (vmax + vmin);
}

/// Table-style metrics. The coarse scan (path units) provides shape and
/// envelope widths; the fine scan provides visibility; either may be
/// omitted, leaving the corresponding fields absent.
inline EnvelopeStats metrics(const PatternScan* coarse, const PatternScan* fine,
                             const AnalysisOptions& opts = {}) {
    EnvelopeStats out;
    if (!coarse && !fine) throw NumericError("metrics need at least one scan");
    if (coarse) {
        if (coarse->unit != ScanMode::coarse_path)
            throw NumericError("envelope metrics need a coarse path-delay scan");
        const auto env = envelopes(*coarse, opts);
        out.baseline = env.baseline;
        const ShapeClass shape = classify(env, opts.symmetric_tol);
        out.shape = shape;
        out.upper_fwhm = detail::envelope_fwhm(env.upper, env.baseline, +1.0);
        out.lower_fwhm = detail::envelope_fwhm(env.lower, env.baseline, -1.0);
        // Dips are measured on the lower envelope, bumps and symmetric
        // shapes on the upper one.
        const auto& chosen = shape == ShapeClass::dip ? out.lower_fwhm : out.upper_fwhm;
        if (!chosen)
            throw NumericError("envelope does not decay to baseline inside the scan range");
        out.coherence_length = *chosen * opts.path_multiplier;
        out.coherence_time = *out.coherence_length / speed_of_light;
    }
    if (fine) {
        if (fine->unit != ScanMode::fine_phase)
            throw NumericError("visibility needs a fine phase scan");
        out.visibility = visibility(*fine);
    }
    return out;
}

}  // namespace noonsi::analysis
