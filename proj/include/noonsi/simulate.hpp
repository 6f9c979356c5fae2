#pragma once
// Engine dispatch for scan simulation plus Poisson count sampling. The
// oracle engine evaluates the brute-force Fock model point by point in
// parallel; sampling is seeded per point so identical configs and seeds
// give identical counts regardless of the worker count.

#include <random>
#include <string>

#include "noonsi/analytic.hpp"
#include "noonsi/core.hpp"
#include "noonsi/fock.hpp"
#include "noonsi/gaussian.hpp"
#include "noonsi/parallel.hpp"

namespace noonsi {

enum class Engine { analytic, oracle, gaussian };

inline Engine engine_from_name(const std::string& name) {
    if (name == "analytic") return Engine::analytic;
    if (name == "oracle") return Engine::oracle;
    if (name == "gaussian") return Engine::gaussian;
    throw ValidationError({"unknown engine '" + name + "' (use analytic, oracle or gaussian)"});
}

inline const char* to_string(Engine e) {
    switch (e) {
        case Engine::analytic: return "analytic";
        case Engine::oracle: return "oracle";
        default: return "gaussian";
    }
}

/// Normalized P_mn pattern from the brute-force Fock model.
inline PatternScan oracle_pattern(const Bundle& bundle) {
    const auto& [src, scheme, cfg] = bundle;
    if (scheme.total() % 2 != 0 && !scheme.single_photon())
        throw ValidationError({"oracle engine does not support scheme " + scheme.label()});
    PatternScan scan;
    scan.scheme = scheme;
    scan.unit = cfg.mode;
    scan.points.resize(cfg.count);
    parallel_for(cfg.count, [&](int i) {
        const double value = cfg.grid_value(i);
        const double tau = tau_of_grid(src, cfg, value);
        const double ii = indistinguishability(tau, src.delta_omega);
        const double phi = phi_of_grid(src, cfg, value);
        const double p = scheme.single_photon() ? fock::single_photon_probability(ii, phi)
                                                : fock::oracle_probability(scheme, ii, phi);
        scan.points[i] = {value, p, std::nullopt};
    });
    return scan;
}

inline PatternScan run_scan(Engine engine, const Bundle& bundle) {
    switch (engine) {
        case Engine::analytic: return analytic::pattern(bundle);
        case Engine::oracle: return oracle_pattern(bundle);
        default: return gaussian::multipair_pattern(bundle);
    }
}

namespace detail {

// splitmix64; decorrelates per-point streams from one user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Draws Poisson counts with rate = probability * rep_rate * integration
/// time into the scan, one independent stream per point.
inline void sample_counts(PatternScan& scan, const SourceSpec& src, const ScanConfig& cfg,
                          std::uint64_t seed) {
    parallel_for(static_cast<int>(scan.points.size()), [&](int i) {
        auto& p = scan.points[i];
        const double rate = p.probability * src.rep_rate * cfg.integration_time;
        std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(i)));
        std::poisson_distribution<std::uint64_t> dist(rate);
        p.counts = rate > 0.0 ? dist(rng) : 0;
    });
}

}  // namespace noonsi
