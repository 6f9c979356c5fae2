#pragma once
// Closed-form detection probabilities for the m+n <= 4 schemes, the
// Gaussian indistinguishability envelope, and numerically derived harmonic
// forms for the six-photon schemes (reconstructed from the Fock oracle by
// an exact linear solve over a collocation grid).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "noonsi/core.hpp"
#include "noonsi/fock.hpp"
#include "noonsi/parallel.hpp"

namespace noonsi::analytic {

/// Squared temporal overlap of the delayed wavepacket, I(0) = 1.
using noonsi::indistinguishability;

/// Exact evaluation of the closed-form P_mn for m+n <= 4. Mirrored schemes
/// (n > m) share the same form; the Fock oracle confirms the symmetry.
inline double closed_form(const DetectionScheme& scheme, double ii, double phi) {
    const double c1 = std::cos(phi);
    const double c2 = std::cos(2.0 * phi);
    const double c4 = std::cos(4.0 * phi);
    const int m = std::max(scheme.m, scheme.n), n = std::min(scheme.m, scheme.n);
    if (m == 1 && n == 0) return 0.5 * (1.0 + std::sqrt(ii) * c1);
    if (m == 1 && n == 1) return 0.5 * (1.0 + ii * c2);
    if (m == 2 && n == 0) return 0.25 * (1.0 - ii * c2);
    if (m == 2 && n == 2) return (12.0 - 4.0 * ii + 3.0 * ii * ii + 12.0 * ii * c2 + 9.0 * ii * ii * c4) / 32.0;
    if (m == 3 && n == 1) return (4.0 - ii * ii - 3.0 * ii * ii * c4) / 16.0;
    if (m == 4 && n == 0) return (4.0 + 4.0 * ii + ii * ii - 12.0 * ii * c2 + 3.0 * ii * ii * c4) / 64.0;
    throw NumericError("no closed form for scheme " + scheme.label());
}

// ---------------------------------------------------------------------------
// Harmonic forms
// ---------------------------------------------------------------------------

/// Cosine series with fixed numeric coefficients: P(phi) = sum_k c_k cos(k phi).
struct FixedHarmonics {
    std::map<int, double> c;

    double eval(double phi) const {
        double s = 0.0;
        for (const auto& [k, v] : c) s += v * std::cos(k * phi);
        return s;
    }

    /// Harmonic orders k >= 1 whose coefficient is non-negligible relative
    /// to the largest oscillating one.
    std::vector<int> present(double rel_tol = 1e-6) const {
        double scale = 0.0;
        for (const auto& [k, v] : c)
            if (k >= 1) scale = std::max(scale, std::abs(v));
        std::vector<int> out;
        for (const auto& [k, v] : c)
            if (k >= 1 && std::abs(v) > rel_tol * scale) out.push_back(k);
        return out;
    }

    /// Strongest oscillating harmonic; ties break toward the lower order.
    int dominant() const {
        int best = 0;
        double mag = -1.0;
        for (const auto& [k, v] : c)
            if (k >= 1 && std::abs(v) > mag * (1.0 + 1e-12)) { mag = std::abs(v); best = k; }
        return best;
    }

    /// Exact (min, max) over phi. All harmonics are multiples of their gcd g,
    /// so the series is a polynomial in u = cos(g phi) via Chebyshev
    /// recursion; extrema sit at u = +-1 or at roots of the derivative.
    std::pair<double, double> extrema() const;

    double visibility() const {
        const auto [lo, hi] = extrema();
        return (hi - lo) / (hi + lo);
    }
};

namespace detail {

inline int gcd_of_harmonics(const std::map<int, double>& c) {
    int g = 0;
    for (const auto& [k, v] : c)
        if (k >= 1 && std::abs(v) > 0.0) g = g == 0 ? k : std::gcd(g, k);
    return g;
}

// Coefficients of the Chebyshev polynomial T_n.
inline std::vector<double> chebyshev(int n) {
    std::vector<double> tm1{1.0}, t{0.0, 1.0};
    if (n == 0) return tm1;
    for (int i = 2; i <= n; ++i) {
        std::vector<double> next(i + 1, 0.0);
        for (size_t j = 0; j < t.size(); ++j) next[j + 1] += 2.0 * t[j];
        for (size_t j = 0; j < tm1.size(); ++j) next[j] -= tm1[j];
        tm1 = std::move(t);
        t = std::move(next);
    }
    return t;
}

inline double poly_eval(const std::vector<double>& p, double x) {
    double s = 0.0;
    for (size_t i = p.size(); i-- > 0;) s = s * x + p[i];
    return s;
}

}  // namespace detail

inline std::pair<double, double> FixedHarmonics::extrema() const {
    const int g = detail::gcd_of_harmonics(c);
    double base = 0.0;
    auto it = c.find(0);
    if (it != c.end()) base = it->second;
    if (g == 0) return {base, base};  // constant in phi

    // Polynomial in u = cos(g phi).
    std::vector<double> poly{base};
    for (const auto& [k, v] : c) {
        if (k < 1 || v == 0.0) continue;
        const auto cheb = detail::chebyshev(k / g);
        if (cheb.size() > poly.size()) poly.resize(cheb.size(), 0.0);
        for (size_t j = 0; j < cheb.size(); ++j) poly[j] += v * cheb[j];
    }

    std::vector<double> candidates{-1.0, 1.0};
    // Stationary points: roots of the derivative inside (-1, 1).
    std::vector<double> deriv;
    for (size_t j = 1; j < poly.size(); ++j) deriv.push_back(j * poly[j]);
    while (!deriv.empty() && deriv.back() == 0.0) deriv.pop_back();
    if (deriv.size() == 2) {  // linear
        candidates.push_back(-deriv[0] / deriv[1]);
    } else if (deriv.size() == 3) {  // quadratic
        const double a = deriv[2], b = deriv[1], cc = deriv[0];
        const double disc = b * b - 4.0 * a * cc;
        if (disc >= 0.0) {
            const double r = std::sqrt(disc);
            candidates.push_back((-b + r) / (2.0 * a));
            candidates.push_back((-b - r) / (2.0 * a));
        }
    } else if (deriv.size() > 3) {
        // Degrees beyond cubic do not occur for the supported schemes; fall
        // back to dense sampling with local refinement.
        for (int i = 0; i <= 4096; ++i) candidates.push_back(-1.0 + 2.0 * i / 4096.0);
    }

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double u : candidates) {
        if (u < -1.0 || u > 1.0) continue;
        const double v = detail::poly_eval(poly, u);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

/// Cosine series whose coefficients are polynomials in the
/// indistinguishability: P(I, phi) = sum_k p_k(I) cos(k phi).
struct HarmonicForm {
    /// terms[k][d] = coefficient of I^d in p_k.
    std::map<int, std::vector<double>> terms;

    double coefficient(int k, double ii) const {
        auto it = terms.find(k);
        return it == terms.end() ? 0.0 : detail::poly_eval(it->second, ii);
    }

    double eval(double ii, double phi) const {
        double s = 0.0;
        for (const auto& [k, p] : terms) s += detail::poly_eval(p, ii) * std::cos(k * phi);
        return s;
    }

    FixedHarmonics at(double ii) const {
        FixedHarmonics f;
        for (const auto& [k, p] : terms) f.c[k] = detail::poly_eval(p, ii);
        return f;
    }

    int max_harmonic() const { return terms.empty() ? 0 : terms.rbegin()->first; }

    /// Plain-text polynomial serialization, e.g.
    ///   cos(2*phi): 0.375*I - 0.1875*I^2 + 0.1171875*I^3
    std::string format(const std::string& title) const;
};

inline std::string HarmonicForm::format(const std::string& title) const {
    std::ostringstream os;
    os.precision(12);
    os << "# " << title << "\n";
    os << "# P(I, phi) = sum_k c_k(I) * cos(k*phi)\n";
    for (const auto& [k, p] : terms) {
        os << "cos(" << k << "*phi):";
        bool first = true;
        for (size_t d = 0; d < p.size(); ++d) {
            if (p[d] == 0.0) continue;
            if (first) os << (p[d] < 0 ? " -" : " ");
            else os << (p[d] < 0 ? " - " : " + ");
            os << std::abs(p[d]);
            if (d == 1) os << "*I";
            if (d > 1) os << "*I^" << d;
            first = false;
        }
        if (first) os << " 0";
        os << "\n";
    }
    return os.str();
}

/// Hand-built harmonic forms of the m+n <= 4 closed expressions (the 1/0
/// scheme carries a sqrt(I) envelope and is handled by fixed_form instead).
inline HarmonicForm closed_form_harmonics(const DetectionScheme& scheme) {
    const int m = std::max(scheme.m, scheme.n), n = std::min(scheme.m, scheme.n);
    HarmonicForm f;
    if (m == 1 && n == 1) {
        f.terms[0] = {0.5};
        f.terms[2] = {0.0, 0.5};
    } else if (m == 2 && n == 0) {
        f.terms[0] = {0.25};
        f.terms[2] = {0.0, -0.25};
    } else if (m == 2 && n == 2) {
        f.terms[0] = {12.0 / 32.0, -4.0 / 32.0, 3.0 / 32.0};
        f.terms[2] = {0.0, 12.0 / 32.0};
        f.terms[4] = {0.0, 0.0, 9.0 / 32.0};
    } else if (m == 3 && n == 1) {
        f.terms[0] = {4.0 / 16.0, 0.0, -1.0 / 16.0};
        f.terms[4] = {0.0, 0.0, -3.0 / 16.0};
    } else if (m == 4 && n == 0) {
        f.terms[0] = {4.0 / 64.0, 4.0 / 64.0, 1.0 / 64.0};
        f.terms[2] = {0.0, -12.0 / 64.0};
        f.terms[4] = {0.0, 0.0, 3.0 / 64.0};
    } else {
        throw NumericError("no closed-form harmonics for scheme " + scheme.label());
    }
    return f;
}

// ---------------------------------------------------------------------------
// Six-photon forms, reconstructed from the Fock oracle
// ---------------------------------------------------------------------------

namespace detail {

/// Exact collocation fit of an even-cosine series with polynomial-in-I
/// coefficients. Projections over a uniform phase grid separate the
/// harmonics exactly; a Vandermonde solve per harmonic recovers the I
/// polynomials. No regression is involved.
inline HarmonicForm fit_harmonic_form(const DetectionScheme& scheme,
                                      const std::vector<int>& harmonics, int degree) {
    const int n_phi = 16;  // > 2 * max harmonic index in u = 2 phi
    const int n_i = degree + 1;

    std::vector<double> ivals(n_i);
    for (int i = 0; i < n_i; ++i) ivals[i] = double(i + 1) / n_i;

    // Per-I harmonic projections.
    std::map<int, Eigen::VectorXd> proj;  // k -> value per I sample
    for (int k : harmonics) proj[k] = Eigen::VectorXd::Zero(n_i);
    for (int i = 0; i < n_i; ++i) {
        std::vector<double> samples(n_phi);
        for (int j = 0; j < n_phi; ++j)
            samples[j] = fock::oracle_probability(scheme, ivals[i], M_PI * j / n_phi);
        for (int k : harmonics) {
            double acc = 0.0;
            for (int j = 0; j < n_phi; ++j) acc += samples[j] * std::cos(k * M_PI * j / n_phi);
            proj[k](i) = acc * (k == 0 ? 1.0 : 2.0) / n_phi;
        }
    }

    // Vandermonde solve for each harmonic's I polynomial.
    Eigen::MatrixXd vand(n_i, degree + 1);
    for (int i = 0; i < n_i; ++i)
        for (int d = 0; d <= degree; ++d) vand(i, d) = std::pow(ivals[i], d);
    const auto lu = vand.fullPivLu();

    HarmonicForm form;
    for (int k : harmonics) {
        Eigen::VectorXd coef = lu.solve(proj[k]);
        std::vector<double> p(coef.data(), coef.data() + coef.size());
        for (double& v : p)
            if (std::abs(v) < 1e-10) v = 0.0;
        while (!p.empty() && p.back() == 0.0) p.pop_back();
        if (!p.empty()) form.terms[k] = std::move(p);
    }
    return form;
}

inline double verify_form(const DetectionScheme& scheme, const HarmonicForm& form) {
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double ii = i / 20.0;
        for (int j = 0; j < 48; ++j) {
            const double phi = 2.0 * M_PI * j / 48.0;
            worst = std::max(worst,
                             std::abs(form.eval(ii, phi) - fock::oracle_probability(scheme, ii, phi)));
        }
    }
    return worst;
}

}  // namespace detail

/// Harmonic form of a six-photon scheme, derived from the Fock oracle. The
/// ansatz is even cosines k in {0,2,4,6} with coefficients polynomial in I
/// of degree <= 3; the fitted form must reproduce the oracle to 1e-9 on an
/// independent dense grid, else the ansatz is widened once and re-checked.
/// Results are cached per scheme for the lifetime of the process.
inline const HarmonicForm& six_photon_form(const DetectionScheme& scheme) {
    if (scheme.total() != 6)
        throw NumericError("six-photon form requested for scheme " + scheme.label());
    const DetectionScheme canon{std::max(scheme.m, scheme.n), std::min(scheme.m, scheme.n)};

    static std::mutex mtx;
    static std::map<std::pair<int, int>, HarmonicForm> cache;
    std::lock_guard<std::mutex> lock(mtx);
    const auto key = std::make_pair(canon.m, canon.n);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    HarmonicForm form = detail::fit_harmonic_form(canon, {0, 2, 4, 6}, 3);
    double residual = detail::verify_form(canon, form);
    if (residual > 1e-9) {
        form = detail::fit_harmonic_form(canon, {0, 2, 4, 6, 8}, 4);
        residual = detail::verify_form(canon, form);
        if (residual > 1e-9)
            throw NumericError("six-photon ansatz fails for " + canon.label() +
                               ": residual " + std::to_string(residual));
    }
    return cache.emplace(key, std::move(form)).first->second;
}

/// Fixed-coefficient cosine series of any supported scheme at a given I.
inline FixedHarmonics fixed_form(const DetectionScheme& scheme, double ii) {
    const int m = std::max(scheme.m, scheme.n), n = std::min(scheme.m, scheme.n);
    if (m == 1 && n == 0) {
        FixedHarmonics f;
        f.c[0] = 0.5;
        f.c[1] = 0.5 * std::sqrt(ii);
        return f;
    }
    if (m + n <= 4) return closed_form_harmonics(scheme).at(ii);
    return six_photon_form(scheme).at(ii);
}

/// Detection probability of any supported scheme.
inline double probability(const DetectionScheme& scheme, double ii, double phi) {
    if (scheme.total() <= 4) return closed_form(scheme, ii, phi);
    return six_photon_form(scheme).eval(ii, phi);
}

/// Closed-form pattern over the configured delay grid, with I = I(tau) and
/// phi = omega0 * tau. Points are evaluated in parallel.
inline PatternScan pattern(const Bundle& bundle) {
    const auto& [src, scheme, cfg] = bundle;
    if (scheme.total() == 6) six_photon_form(scheme);  // derive once, outside the loop
    PatternScan scan;
    scan.scheme = scheme;
    scan.unit = cfg.mode;
    scan.points.resize(cfg.count);
    parallel_for(cfg.count, [&](int i) {
        const double value = cfg.grid_value(i);
        const double tau = tau_of_grid(src, cfg, value);
        const double ii = indistinguishability(tau, src.delta_omega);
        const double phi = phi_of_grid(src, cfg, value);
        scan.points[i] = {value, probability(scheme, ii, phi), std::nullopt};
    });
    return scan;
}

}  // namespace noonsi::analytic
