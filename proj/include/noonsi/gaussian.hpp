#pragma once
// Multi-pair model of the interferometer: squeezed-vacuum source, symplectic
// image of the circuit, per-detector loss and dark counts, and threshold
// click coincidences via inclusion-exclusion over Gaussian vacuum
// projections. Covariance matrices use the vacuum = identity/2 convention
// with quadratures ordered (x1, p1, x2, p2, ...).
//
// The inclusion-exclusion sum cancels catastrophically at small mean photon
// number (coincidence probabilities reach ~1e-15 while individual terms are
// O(1)), so the whole covariance pipeline runs in extended precision and
// only the final probability is returned as double.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "noonsi/circuit.hpp"
#include "noonsi/core.hpp"
#include "noonsi/parallel.hpp"

namespace noonsi::gaussian {

using Scalar = long double;
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Zero-mean Gaussian state over the layout's modes.
struct GaussianState {
    Mat sigma;  ///< 2K x 2K covariance matrix
    int modes = 0;

    static GaussianState vacuum(int modes) {
        return {Mat::Identity(2 * modes, 2 * modes) * Scalar(0.5), modes};
    }

    double mean_photon(int mode) const {
        return static_cast<double>(
            0.5 * (sigma(2 * mode, 2 * mode) + sigma(2 * mode + 1, 2 * mode + 1) - 1.0));
    }

    double total_mean_photon() const {
        double s = 0.0;
        for (int i = 0; i < modes; ++i) s += mean_photon(i);
        return s;
    }

    /// Largest violation of the uncertainty bound sigma + i Omega / 2 >= 0.
    double uncertainty_defect() const;
};

/// The symplectic form Omega in (x,p) interleaved ordering.
inline Mat symplectic_form(int modes) {
    Mat omega = Mat::Zero(2 * modes, 2 * modes);
    for (int i = 0; i < modes; ++i) {
        omega(2 * i, 2 * i + 1) = 1.0;
        omega(2 * i + 1, 2 * i) = -1.0;
    }
    return omega;
}

inline double GaussianState::uncertainty_defect() const {
    using CxMat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
    CxMat m = sigma.cast<std::complex<Scalar>>() +
              std::complex<Scalar>(0.0, 0.5) * symplectic_form(modes).cast<std::complex<Scalar>>();
    Eigen::SelfAdjointEigenSolver<CxMat> es(m, Eigen::EigenvaluesOnly);
    const Scalar min_eig = es.eigenvalues().minCoeff();
    return min_eig < 0.0 ? static_cast<double>(-min_eig) : 0.0;
}

/// Symplectic image of a passive mode unitary U (column j = image of mode j):
/// per-block [[Re U, -Im U], [Im U, Re U]].
inline Mat to_symplectic(const CMat& u) {
    const int k = static_cast<int>(u.rows());
    Mat s = Mat::Zero(2 * k, 2 * k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
            s(2 * r, 2 * c) = u(r, c).real();
            s(2 * r, 2 * c + 1) = -u(r, c).imag();
            s(2 * r + 1, 2 * c) = u(r, c).imag();
            s(2 * r + 1, 2 * c + 1) = u(r, c).real();
        }
    return s;
}

/// Two-mode squeezed vacuum between the H and V matched temporal modes with
/// sinh^2 r = mu pairs per pulse; everything else vacuum.
inline GaussianState squeezed_source(double mu, const ModeLayout& lay) {
    if (mu < 0.0) throw NumericError("mean pair number must be >= 0");
    GaussianState st = GaussianState::vacuum(lay.total_modes());
    const int a = lay.mode(0, 0, 0), b = lay.mode(1, 0, 0);
    const Scalar m = mu;
    const Scalar c = 1.0 + 2.0 * m;                // cosh 2r
    const Scalar s = 2.0 * std::sqrt(m * (m + 1.0));  // sinh 2r
    st.sigma(2 * a, 2 * a) = st.sigma(2 * a + 1, 2 * a + 1) = 0.5 * c;
    st.sigma(2 * b, 2 * b) = st.sigma(2 * b + 1, 2 * b + 1) = 0.5 * c;
    st.sigma(2 * a, 2 * b) = st.sigma(2 * b, 2 * a) = 0.5 * s;
    st.sigma(2 * a + 1, 2 * b + 1) = st.sigma(2 * b + 1, 2 * a + 1) = -0.5 * s;
    return st;
}

/// Signal arm alone (idler blocked): a thermal state with mean photon
/// number mu in the matched mode. Used by the 1/0 scheme.
inline GaussianState thermal_signal_source(double mu, const ModeLayout& lay) {
    if (mu < 0.0) throw NumericError("mean photon number must be >= 0");
    GaussianState st = GaussianState::vacuum(lay.total_modes());
    const int a = lay.mode(0, 0, 0);
    st.sigma(2 * a, 2 * a) = st.sigma(2 * a + 1, 2 * a + 1) = Scalar(mu) + 0.5;
    return st;
}

/// sigma -> S sigma S^T for a unitary circuit element; the symplectic
/// condition S^T Omega S = Omega is enforced.
inline void apply_unitary_element(GaussianState& st, const CircuitElement& e) {
    const Mat s = to_symplectic(e.matrix);
    const Mat omega = symplectic_form(st.modes);
    if (static_cast<double>((s.transpose() * omega * s - omega).cwiseAbs().maxCoeff()) > 1e-10)
        throw NumericError("element '" + e.name + "' is not symplectic");
    st.sigma = s * st.sigma * s.transpose();
}

/// Pure-loss channel of transmission eta on the given modes:
/// sigma -> X sigma X^T + Y with X = sqrt(eta) 1 and Y = (1 - eta)/2 1.
inline void apply_loss(GaussianState& st, const std::vector<int>& modes, double eta) {
    if (eta < 0.0 || eta > 1.0) throw NumericError("loss transmission outside [0,1]");
    const Scalar root = std::sqrt(Scalar(eta));
    for (int m : modes) {
        st.sigma.row(2 * m) *= root;
        st.sigma.row(2 * m + 1) *= root;
        st.sigma.col(2 * m) *= root;
        st.sigma.col(2 * m + 1) *= root;
        st.sigma(2 * m, 2 * m) += (1.0 - Scalar(eta)) * 0.5;
        st.sigma(2 * m + 1, 2 * m + 1) += (1.0 - Scalar(eta)) * 0.5;
    }
}

/// One threshold detector: efficiency, dark-count probability and the modes
/// it covers (both temporal Schmidt indices of its spatial mode).
struct Detector {
    double eta = 1.0;
    double dc = 0.0;
    std::vector<int> modes;
};

struct DetectorBank {
    std::vector<Detector> detectors;

    static DetectorBank build(const ModeLayout& lay, const DetectionScheme& scheme,
                              double eta, double dc) {
        DetectorBank bank;
        for (int d = 0; d < scheme.m; ++d) bank.detectors.push_back({eta, dc, lay.detector_modes(0, d)});
        for (int d = 0; d < scheme.n; ++d) bank.detectors.push_back({eta, dc, lay.detector_modes(1, d)});
        return bank;
    }
};

namespace detail {

/// Vacuum projection probability of a zero-mean reduced state:
/// 1 / sqrt(det(sigma_S + 1/2)). Computed by pivoted symmetric
/// factorization; a non-positive pivot reports an invalid covariance.
inline Scalar vacuum_probability(const Mat& sigma, const std::vector<int>& modes) {
    const int k = static_cast<int>(modes.size());
    Mat red(2 * k, 2 * k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
            red.block<2, 2>(2 * r, 2 * c) = sigma.block<2, 2>(2 * modes[r], 2 * modes[c]);
    red += Scalar(0.5) * Mat::Identity(2 * k, 2 * k);

    Eigen::LDLT<Mat> ldlt(red);
    if (ldlt.info() != Eigen::Success)
        throw NumericError("covariance factorization failed");
    Scalar det = 1.0;
    for (Scalar d : ldlt.vectorD()) {
        if (d <= 0.0) throw NumericError("non-positive pivot: invalid covariance matrix");
        det *= d;
    }
    return Scalar(1.0) / std::sqrt(det);
}

}  // namespace detail

/// P(every detector clicks) by inclusion-exclusion over no-click subsets:
/// sum_T (-1)^|T| prod_{d in T} (1 - dc_d) * P_vac(modes of T). The partial
/// sums by subset size must bracket the result (Bonferroni), which is
/// verified at every evaluation.
inline double click_coincidence(const GaussianState& st, const DetectorBank& bank) {
    const int n = static_cast<int>(bank.detectors.size());
    if (n == 0) throw NumericError("empty detector bank");
    std::vector<Scalar> by_size(n + 1, 0.0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Scalar weight = 1.0;
        std::vector<int> modes;
        int size = 0;
        for (int d = 0; d < n; ++d) {
            if (!(mask >> d & 1u)) continue;
            ++size;
            weight *= Scalar(1.0) - Scalar(bank.detectors[d].dc);
            modes.insert(modes.end(), bank.detectors[d].modes.begin(),
                         bank.detectors[d].modes.end());
        }
        const Scalar pvac = size == 0 ? Scalar(1.0) : detail::vacuum_probability(st.sigma, modes);
        by_size[size] += (size % 2 == 0 ? Scalar(1.0) : Scalar(-1.0)) * weight * pvac;
    }

    Scalar total = 0.0;
    for (Scalar v : by_size) total += v;

    // Bonferroni bracketing: even-order truncations bound from above, odd
    // ones from below.
    Scalar partial = 0.0;
    for (int s = 0; s <= n; ++s) {
        partial += by_size[s];
        const bool upper = s % 2 == 0;
        if (upper ? partial < total - Scalar(1e-9) : partial > total + Scalar(1e-9))
            throw NumericError("inclusion-exclusion partial sums fail to bracket the result");
    }

    if (total < Scalar(-1e-9) || total > Scalar(1.0) + Scalar(1e-9))
        throw NumericError("click probability outside [0,1]");
    if (total < 0.0) total = 0.0;
    if (total > 1.0) total = 1.0;
    return static_cast<double>(total);
}

/// Full coincidence probability p_mn(mu, eta, dc, phi) at one working point.
/// temporal_modes = 1 is the fast path for fine scans at I = 1; coarse
/// scans need 2 temporal modes so the rotation by sqrt(I) can act.
inline double click_probability(const DetectionScheme& scheme, double mu,
                                double indistinguishability, double phi, double eta,
                                double dc, int temporal_modes = 2) {
    const ModeLayout lay = layout_for(scheme, temporal_modes);
    GaussianState st = scheme.single_photon() ? thermal_signal_source(mu, lay)
                                              : squeezed_source(mu, lay);
    const auto circ = InterferometerCircuit::build(lay, indistinguishability, phi, true);
    for (const auto& e : circ.elements) apply_unitary_element(st, e);
    const DetectorBank bank = DetectorBank::build(lay, scheme, eta, dc);
    for (const auto& det : bank.detectors) apply_loss(st, det.modes, det.eta);
    return click_coincidence(st, bank);
}

/// Multi-pair pattern over the configured grid. Fine scans sweep phi at
/// I = 1 on the single-temporal-mode path; coarse scans sweep tau with
/// I(tau) driving the temporal-mode rotation. Points evaluate in parallel.
inline PatternScan multipair_pattern(const Bundle& bundle) {
    const auto& [src, scheme, cfg] = bundle;
    const bool fine = cfg.mode == ScanMode::fine_phase;
    PatternScan scan;
    scan.scheme = scheme;
    scan.unit = cfg.mode;
    scan.points.resize(cfg.count);
    parallel_for(cfg.count, [&](int i) {
        const double value = cfg.grid_value(i);
        double ii = 1.0, phi = value;
        if (!fine) {
            const double tau = tau_from_path(cfg, value);
            ii = indistinguishability(tau, src.delta_omega);
            phi = src.omega0 * tau;
        }
        scan.points[i] = {value,
                          click_probability(scheme, src.mu, ii, phi, cfg.eta, cfg.dc,
                                            fine ? 1 : 2),
                          std::nullopt};
    });
    return scan;
}

}  // namespace noonsi::gaussian
