#pragma once
// Brute-force truncated-Fock simulation of the interferometer with two
// temporal Schmidt modes per polarization. Photon number is fixed by the
// post-selected pair count, so there is no truncation error; states are
// stored sparsely keyed by occupation vector.
//
// This engine is the ground truth the closed-form expressions are checked
// against, and the derivation oracle for the six-photon forms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "noonsi/circuit.hpp"
#include "noonsi/core.hpp"

namespace noonsi::fock {

// Occupation vectors are packed 4 bits per mode (up to 16 modes, up to 15
// photons per mode; the six-photon schemes need 14 modes and 6 photons).
using OccKey = std::uint64_t;

inline int occ_get(OccKey key, int mode) { return static_cast<int>((key >> (4 * mode)) & 0xF); }
inline OccKey occ_bump(OccKey key, int mode) { return key + (OccKey{1} << (4 * mode)); }

/// Sparse superposition of Fock basis states with complex amplitudes.
struct FockState {
    int modes = 0;
    std::unordered_map<OccKey, Cplx> terms;

    double norm_sq() const {
        double s = 0.0;
        for (const auto& [k, a] : terms) s += std::norm(a);
        return s;
    }

    /// Drops terms with negligible amplitude to keep the map compact.
    void prune(double eps = 1e-15) {
        for (auto it = terms.begin(); it != terms.end();)
            it = std::abs(it->second) < eps ? terms.erase(it) : std::next(it);
    }
};

/// Post-selected SPDC input: (a^dag_H a^dag_V)^pairs |vac> on the matched
/// temporal modes, normalized (the raw operator power has norm pairs!).
inline FockState build_input(int pairs, const ModeLayout& lay) {
    if (pairs < 1 || pairs > 3) throw NumericError("supported pair numbers are 1..3");
    FockState st;
    st.modes = lay.total_modes();
    OccKey key = 0;
    for (int p = 0; p < pairs; ++p) {
        key = occ_bump(key, lay.mode(0, 0, 0));
        key = occ_bump(key, lay.mode(1, 0, 0));
    }
    st.terms[key] = 1.0;
    return st;
}

/// Single signal photon in the matched mode (idler blocked); used by the
/// 1/0 detection scheme.
inline FockState build_single_photon(const ModeLayout& lay) {
    FockState st;
    st.modes = lay.total_modes();
    st.terms[occ_bump(OccKey{0}, lay.mode(0, 0, 0))] = 1.0;
    return st;
}

namespace detail {

// Factorials up to the six-photon range.
inline double factorial(int n) {
    static const double table[] = {1, 1, 2, 6, 24, 120, 720, 5040};
    return table[n];
}

}  // namespace detail

/// Applies one circuit element by substituting each touched creation
/// operator with its image column; untouched modes pass through.
inline FockState apply_element(const FockState& in, const CircuitElement& e) {
    if (e.touched.empty()) return in;
    const auto& touched = e.touched;
    const int nt = static_cast<int>(touched.size());

    // Dense submatrix restricted to the touched modes.
    std::vector<Cplx> sub(nt * nt);
    for (int r = 0; r < nt; ++r)
        for (int c = 0; c < nt; ++c) sub[r * nt + c] = e.matrix(touched[r], touched[c]);

    FockState out;
    out.modes = in.modes;
    std::unordered_map<OccKey, Cplx> cur, next;
    for (const auto& [key, amp] : in.terms) {
        // Split the occupation into the touched part and the untouched rest.
        OccKey base = key;
        std::vector<int> occ(nt);
        double fact = 1.0;
        for (int j = 0; j < nt; ++j) {
            occ[j] = occ_get(key, touched[j]);
            base -= static_cast<OccKey>(occ[j]) << (4 * touched[j]);
            fact *= detail::factorial(occ[j]);
        }

        // Expand prod_j (sum_k sub[k][j] a^dag_k)^occ[j] on the touched vacuum,
        // tracking normalized-basis amplitudes via the sqrt(n+1) ladder factors.
        cur.clear();
        cur[0] = amp / std::sqrt(fact);
        for (int j = 0; j < nt; ++j) {
            for (int rep = 0; rep < occ[j]; ++rep) {
                next.clear();
                for (const auto& [sk, sa] : cur) {
                    for (int k = 0; k < nt; ++k) {
                        const Cplx c = sub[k * nt + j];
                        if (std::abs(c) < 1e-300) continue;
                        const int nk = occ_get(sk, k);
                        next[occ_bump(sk, k)] += sa * c * std::sqrt(double(nk + 1));
                    }
                }
                cur.swap(next);
            }
        }

        for (const auto& [sk, sa] : cur) {
            OccKey full = base;
            for (int k = 0; k < nt; ++k)
                full += static_cast<OccKey>(occ_get(sk, k)) << (4 * touched[k]);
            out.terms[full] += sa;
        }
    }
    out.prune();
    return out;
}

/// Evolves a state through the circuit, enforcing norm preservation to
/// 1e-12 after every element.
inline FockState evolve(FockState state, const InterferometerCircuit& circuit) {
    if (state.modes != circuit.layout.total_modes())
        throw NumericError("state and circuit mode counts differ");
    for (const auto& e : circuit.elements) {
        state = apply_element(state, e);
        if (std::abs(state.norm_sq() - 1.0) > 1e-12)
            throw NumericError("norm not preserved by element '" + e.name + "'");
    }
    return state;
}

enum class DetectorModel {
    threshold,         ///< every detector registers >= 1 photon (SNSPD-like)
    number_resolving,  ///< every detector registers exactly 1 photon
};

/// Probability that all m detectors on channel 1 and all n on channel 2
/// fire. Detectors are temporal-mode-blind: each one sums the photons of
/// both Schmidt indices of its spatial mode.
inline double click_probability(const FockState& state, const ModeLayout& lay,
                                const DetectionScheme& scheme,
                                DetectorModel model = DetectorModel::threshold) {
    if (scheme.m > lay.width1 || scheme.n > lay.width2)
        throw NumericError("scheme exceeds the splitter-tree width");
    double prob = 0.0;
    for (const auto& [key, amp] : state.terms) {
        bool all = true;
        for (int c = 0; c < 2 && all; ++c) {
            const int dets = c == 0 ? scheme.m : scheme.n;
            for (int d = 0; d < dets && all; ++d) {
                int photons = 0;
                for (int t = 0; t < lay.temporal; ++t) photons += occ_get(key, lay.mode(c, d, t));
                if (model == DetectorModel::threshold ? photons < 1 : photons != 1) all = false;
            }
        }
        if (all) prob += std::norm(amp);
    }
    return prob;
}

/// Probability that exactly m photons exit in channel 1 (temporal-blind);
/// the remainder exits in channel 2.
inline double channel_split_probability(const FockState& state, const ModeLayout& lay, int m) {
    double prob = 0.0;
    for (const auto& [key, amp] : state.terms) {
        int photons = 0;
        for (int mode : lay.channel_modes(0)) photons += occ_get(key, mode);
        if (photons == m) prob += std::norm(amp);
    }
    return prob;
}

/// Ground-truth P_mn(I, phi): the probability that the N = m+n photons of a
/// post-selected N/2-pair event split exactly m/n across the channels.
/// Normalized within the N-photon subspace by dividing out the total
/// probability of all N-fold outcomes (unity here, since the lossless
/// fixed-photon-number evolution keeps every event in that subspace).
inline double oracle_probability(const DetectionScheme& scheme, double indistinguishability,
                                 double phi) {
    const int total = scheme.total();
    if (total != 2 && total != 4 && total != 6)
        throw NumericError("oracle supports schemes with 2, 4 or 6 photons, got " + scheme.label());
    const ModeLayout lay = split_layout(2);
    const auto circ = InterferometerCircuit::build(lay, indistinguishability, phi, false);
    const FockState out = evolve(build_input(total / 2, lay), circ);
    double subspace = 0.0;
    for (int k = 0; k <= total; ++k) subspace += channel_split_probability(out, lay, k);
    return channel_split_probability(out, lay, scheme.m) / subspace;
}

/// Through-tree threshold-click probability for a post-selected event,
/// including the constant within-tree anti-bunching factor the normalized
/// P_mn drops.
inline double oracle_click_probability(const DetectionScheme& scheme, double indistinguishability,
                                       double phi,
                                       DetectorModel model = DetectorModel::threshold) {
    const int total = scheme.total();
    const ModeLayout lay = layout_for(scheme, 2);
    const auto circ = InterferometerCircuit::build(lay, indistinguishability, phi, true);
    FockState in = total == 1 ? build_single_photon(lay) : build_input(total / 2, lay);
    return click_probability(evolve(std::move(in), circ), lay, scheme, model);
}

/// Single-photon fringe: signal photon in, probability of a click on the
/// channel-1 detector (the 1/0 scheme).
inline double single_photon_probability(double indistinguishability, double phi) {
    const ModeLayout lay = split_layout(2);
    const auto circ = InterferometerCircuit::build(lay, indistinguishability, phi, false);
    const FockState out = evolve(build_single_photon(lay), circ);
    return channel_split_probability(out, lay, 1);
}

}  // namespace noonsi::fock
