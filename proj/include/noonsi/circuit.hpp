#pragma once
// Optical mode bookkeeping and the interferometer circuit shared by the Fock
// and Gaussian engines.
//
// Mode order: channel-major, then detector, then temporal Schmidt index:
//   index = channel_offset + detector * T + temporal
// with T = 1 or 2 temporal modes. Channel 1 carries the undelayed
// polarization, channel 2 the delayed one; the polarizing splitter that
// routes polarizations onto the channels is a pure relabeling under this
// identification, so it enters the circuit as an (explicit) identity element.
//
// A delayed Gaussian wavepacket decomposes into the matched temporal mode
// plus one orthogonal remainder; the matched amplitude is sqrt(I)*e^{i phi},
// the orthogonal amplitude sqrt(1-I). The circuit realizes this as a
// temporal-mode rotation by angle acos(sqrt(I)) followed by the carrier
// phase on the delayed matched mode.

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "noonsi/core.hpp"

namespace noonsi {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

/// Labels the optical modes of a two-channel detection layout.
struct ModeLayout {
    int width1 = 1;    ///< detector modes on channel 1 (splitter-tree outputs)
    int width2 = 1;    ///< detector modes on channel 2
    int temporal = 2;  ///< temporal Schmidt modes per spatial mode (1 or 2)

    int total_modes() const { return (width1 + width2) * temporal; }

    /// Flat index of (channel c in {0,1}, detector d, temporal t).
    int mode(int c, int d, int t) const {
        const int base = c == 0 ? 0 : width1 * temporal;
        return base + d * temporal + t;
    }

    /// All mode indices of a channel (both temporal indices of every detector).
    std::vector<int> channel_modes(int c) const {
        std::vector<int> out;
        const int w = c == 0 ? width1 : width2;
        for (int d = 0; d < w; ++d)
            for (int t = 0; t < temporal; ++t) out.push_back(mode(c, d, t));
        return out;
    }

    /// Modes covered by one physical detector (temporal-mode-blind).
    std::vector<int> detector_modes(int c, int d) const {
        std::vector<int> out;
        for (int t = 0; t < temporal; ++t) out.push_back(mode(c, d, t));
        return out;
    }
};

/// Layout for a detection scheme. Channels keep one spatial mode even when
/// undetected (n = 0), since photons still exit there.
inline ModeLayout layout_for(const DetectionScheme& scheme, int temporal_modes) {
    ModeLayout lay;
    lay.width1 = scheme.m > 0 ? scheme.m : 1;
    lay.width2 = scheme.n > 0 ? scheme.n : 1;
    lay.temporal = temporal_modes;
    return lay;
}

/// Minimal layout for channel-split probabilities (no splitter trees).
inline ModeLayout split_layout(int temporal_modes) {
    return ModeLayout{1, 1, temporal_modes};
}

/// One linear-optical element: a unitary on the full mode space, kept with
/// the list of modes it actually touches so sparse state evolution can skip
/// the rest.
struct CircuitElement {
    std::string name;
    CMat matrix;               ///< column j = image of creation operator j
    std::vector<int> touched;  ///< modes with non-identity action
};

/// Numerical unitarity defect ||U^dagger U - 1||_inf.
inline double unitarity_defect(const CMat& u) {
    return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

namespace circuit {

inline CircuitElement identity_element(const ModeLayout& lay, std::string name) {
    return {std::move(name), CMat::Identity(lay.total_modes(), lay.total_modes()), {}};
}

/// 50:50 mixer between the two polarizations (half-wave plate at 22.5 deg):
/// a1 -> (a1 + a2)/sqrt2, a2 -> (a1 - a2)/sqrt2, per temporal index.
inline CircuitElement polarization_mixer(const ModeLayout& lay, const std::string& name) {
    CMat u = CMat::Identity(lay.total_modes(), lay.total_modes());
    std::vector<int> touched;
    const double s = 1.0 / std::sqrt(2.0);
    for (int t = 0; t < lay.temporal; ++t) {
        const int p = lay.mode(0, 0, t), q = lay.mode(1, 0, t);
        u(p, p) = s; u(q, p) = s;
        u(p, q) = s; u(q, q) = -s;
        touched.push_back(p);
        touched.push_back(q);
    }
    return {name, std::move(u), std::move(touched)};
}

/// Temporal-mode rotation on the delayed polarization: the matched-mode
/// amplitude becomes sqrt(I), the orthogonal remainder sqrt(1-I).
inline CircuitElement temporal_rotation(const ModeLayout& lay, double indistinguishability) {
    CMat u = CMat::Identity(lay.total_modes(), lay.total_modes());
    std::vector<int> touched;
    if (lay.temporal == 2) {
        const double c = std::sqrt(indistinguishability);
        const double s = std::sqrt(1.0 - indistinguishability);
        const int p = lay.mode(1, 0, 0), q = lay.mode(1, 0, 1);
        u(p, p) = c; u(q, p) = s;
        u(p, q) = -s; u(q, q) = c;
        touched = {p, q};
    } else if (indistinguishability != 1.0) {
        throw NumericError("single-temporal-mode layout requires I = 1");
    }
    return {"temporal-rotation", std::move(u), std::move(touched)};
}

/// Carrier phase e^{i phi} on the delayed matched mode.
inline CircuitElement delay_phase(const ModeLayout& lay, double phi) {
    CMat u = CMat::Identity(lay.total_modes(), lay.total_modes());
    const int p = lay.mode(1, 0, 0);
    u(p, p) = std::exp(Cplx(0.0, phi));
    return {"delay-phase", std::move(u), {p}};
}

/// Balanced 1 x w splitter tree on one channel: the input spatial mode
/// spreads uniformly over the w detector modes (DFT unitary, first column
/// 1/sqrt(w)), applied per temporal index.
inline CircuitElement splitter_tree(const ModeLayout& lay, int channel) {
    const int w = channel == 0 ? lay.width1 : lay.width2;
    CMat u = CMat::Identity(lay.total_modes(), lay.total_modes());
    std::vector<int> touched;
    if (w > 1) {
        const double norm = 1.0 / std::sqrt(static_cast<double>(w));
        for (int t = 0; t < lay.temporal; ++t) {
            for (int j = 0; j < w; ++j) {
                for (int k = 0; k < w; ++k) {
                    const double arg = 2.0 * M_PI * j * k / w;
                    u(lay.mode(channel, k, t), lay.mode(channel, j, t)) =
                        norm * std::exp(Cplx(0.0, arg));
                }
                touched.push_back(lay.mode(channel, j, t));
            }
        }
    }
    return {"splitter-tree-ch" + std::to_string(channel + 1), std::move(u), std::move(touched)};
}

}  // namespace circuit

/// The full interferometer for one (I, phi) working point: mixer, delay
/// (temporal rotation + carrier phase), mixer, polarizing splitter, and the
/// two splitter trees. Every element is checked unitary to 1e-12.
struct InterferometerCircuit {
    ModeLayout layout;
    std::vector<CircuitElement> elements;

    static InterferometerCircuit build(const ModeLayout& lay, double indistinguishability,
                                       double phi, bool with_trees = true) {
        if (indistinguishability < 0.0 || indistinguishability > 1.0)
            throw NumericError("indistinguishability outside [0,1]");
        InterferometerCircuit c;
        c.layout = lay;
        c.elements.push_back(circuit::polarization_mixer(lay, "input-mixer"));
        c.elements.push_back(circuit::temporal_rotation(lay, indistinguishability));
        c.elements.push_back(circuit::delay_phase(lay, phi));
        c.elements.push_back(circuit::polarization_mixer(lay, "output-mixer"));
        c.elements.push_back(circuit::identity_element(lay, "polarizing-splitter"));
        if (with_trees) {
            c.elements.push_back(circuit::splitter_tree(lay, 0));
            c.elements.push_back(circuit::splitter_tree(lay, 1));
        }
        for (const auto& e : c.elements)
            if (unitarity_defect(e.matrix) > 1e-12)
                throw NumericError("circuit element '" + e.name + "' is not unitary");
        return c;
    }

    /// Product of all element matrices (later elements leftmost).
    CMat total_matrix() const {
        CMat u = CMat::Identity(layout.total_modes(), layout.total_modes());
        for (const auto& e : elements) u = e.matrix * u;
        return u;
    }
};

}  // namespace noonsi
