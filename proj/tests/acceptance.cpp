// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 8 (CLI determinism) needs the path to the noonsi
// binary as argv[1].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "noonsi/analysis.hpp"
#include "noonsi/analytic.hpp"
#include "noonsi/fock.hpp"
#include "noonsi/gaussian.hpp"
#include "noonsi/simulate.hpp"

using namespace noonsi;

namespace {

int failures = 0;

void criterion(int number, const std::string& name, const std::function<bool(std::string&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                dt, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

const std::vector<DetectionScheme> kClosedForm{{1, 1}, {2, 0}, {2, 2}, {3, 1}, {4, 0}};
const std::vector<DetectionScheme> kSixPhoton{{3, 3}, {4, 2}, {5, 1}, {6, 0}};
const std::vector<DetectionScheme> kMultipair{{1, 1}, {2, 0}, {2, 2}, {3, 1}, {4, 0},
                                              {3, 3}, {4, 2}, {5, 1}, {6, 0}};

PatternScan analytic_coarse(const DetectionScheme& s, double step, double range) {
    Bundle b{default_source(), s, default_coarse_scan()};
    b.scan.start = -range;
    b.scan.step = step;
    b.scan.count = static_cast<int>(2.0 * range / step) + 1;
    return analytic::pattern(b);
}

analysis::AnalysisOptions opts_with_carrier() {
    analysis::AnalysisOptions opts;
    opts.omega0 = default_source().omega0;
    return opts;
}

double gaussian_visibility(const DetectionScheme& s, double mu, double eta, double dc) {
    Bundle b{default_source(), s, default_fine_scan()};
    b.source.mu = mu;
    b.scan.eta = eta;
    b.scan.dc = dc;
    return analysis::visibility(gaussian::multipair_pattern(b));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";

    criterion(1, "closed-form fidelity (runtime < 1 s)", [](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        const double tol = 1e-12;
        ok &= std::abs(analytic::closed_form({2, 0}, 1, 0) - 0.0) <= tol;
        ok &= std::abs(analytic::closed_form({1, 1}, 1, 0) - 1.0) <= tol;
        ok &= std::abs(analytic::closed_form({2, 2}, 1, 0) - 1.0) <= tol;
        ok &= std::abs(analytic::closed_form({3, 1}, 1, 0) - 0.0) <= tol;
        ok &= std::abs(analytic::closed_form({4, 0}, 1, 0) - 0.0) <= tol;
        for (double phi : {0.0, 0.9, 3.7}) {
            ok &= std::abs(analytic::closed_form({1, 1}, 0, phi) - 0.5) <= tol;
            ok &= std::abs(analytic::closed_form({2, 0}, 0, phi) - 0.25) <= tol;
            ok &= std::abs(analytic::closed_form({2, 2}, 0, phi) - 0.375) <= tol;
            ok &= std::abs(analytic::closed_form({3, 1}, 0, phi) - 0.25) <= tol;
            ok &= std::abs(analytic::closed_form({4, 0}, 0, phi) - 0.0625) <= tol;
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt >= 1.0) {
            detail = "runtime " + std::to_string(dt) + " s exceeds 1 s";
            return false;
        }
        return ok;
    });

    criterion(2, "oracle equivalence at 1e-9 (runtime < 2 min)", [](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        double worst4 = 0.0;
        for (const auto& s : kClosedForm)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 17; ++j) {
                    const double ii = i / 4.0, phi = 2.0 * M_PI * j / 16.0;
                    worst4 = std::max(worst4, std::abs(fock::oracle_probability(s, ii, phi) -
                                                       analytic::closed_form(s, ii, phi)));
                }
        double worst6 = 0.0;
        for (const auto& s : kSixPhoton) {
            const auto& form = analytic::six_photon_form(s);
            for (int i = 0; i <= 10; ++i)
                for (int j = 0; j < 23; ++j) {
                    const double ii = i / 10.0;
                    const double phi = 2.0 * M_PI * (j + 0.41) / 23.0;
                    worst6 = std::max(worst6, std::abs(form.eval(ii, phi) -
                                                       fock::oracle_probability(s, ii, phi)));
                }
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[128];
        std::snprintf(buf, sizeof(buf), "closed-form dev %.2e, six-photon dev %.2e", worst4, worst6);
        detail = buf;
        return worst4 <= 1e-9 && worst6 <= 1e-9 && dt < 120.0;
    });

    criterion(3, "coherence-time ratio sqrt(2) within 1%", [](std::string& detail) {
        const auto opts = opts_with_carrier();
        const auto s11 = analytic_coarse({1, 1}, 0.08e-6, 0.9e-3);
        const auto s10 = analytic_coarse({1, 0}, 0.15e-6, 1.3e-3);
        const double ct11 = *analysis::metrics(&s11, nullptr, opts).coherence_time;
        const double ct10 = *analysis::metrics(&s10, nullptr, opts).coherence_time;
        char buf[160];
        std::snprintf(buf, sizeof(buf), "ct(1/1) = %.4g ps, ct(1/0) = %.4g ps, ratio = %.4f",
                      ct11 * 1e12, ct10 * 1e12, ct10 / ct11);
        detail = buf;
        // Delta-omega is calibrated so ct(1/1) = 1.77 ps; the one-photon
        // pattern must come out at 2.50 ps, i.e. sqrt(2) longer.
        return std::abs(ct11 / 1.77e-12 - 1.0) <= 0.01 && std::abs(ct10 / 2.50e-12 - 1.0) <= 0.01 &&
               std::abs(ct10 / ct11 / std::sqrt(2.0) - 1.0) <= 0.01;
    });

    criterion(4, "shape classification of the first six schemes", [](std::string& detail) {
        const auto opts = opts_with_carrier();
        struct Row {
            DetectionScheme s;
            ShapeClass want;
            double step;
        };
        const Row rows[] = {
            {{1, 0}, ShapeClass::symmetric, 0.15e-6}, {{1, 1}, ShapeClass::symmetric, 0.08e-6},
            {{2, 0}, ShapeClass::symmetric, 0.08e-6}, {{2, 2}, ShapeClass::bump, 0.05e-6},
            {{3, 1}, ShapeClass::dip, 0.04e-6},       {{4, 0}, ShapeClass::bump, 0.05e-6},
        };
        int bad = 0;
        std::string got;
        for (const auto& r : rows) {
            const auto cls = analysis::classify(analytic_coarse(r.s, r.step, 0.9e-3), opts);
            got += r.s.label() + "=" + to_string(cls) + " ";
            if (cls != r.want) ++bad;
        }
        detail = got + (bad ? "(" + std::to_string(bad) + " misclassified)" : "");
        return bad == 0;
    });

    criterion(5, "fine-fringe harmonics (exact detection)", [](std::string& detail) {
        const auto opts = opts_with_carrier();
        auto content = [&](const DetectionScheme& s) {
            Bundle b{default_source(), s, default_fine_scan()};
            return analysis::harmonic_content(analytic::pattern(b), opts);
        };
        using V = std::vector<int>;
        bool ok = true;
        ok &= content({1, 0}).present == V{1} && content({1, 0}).dominant == 1;
        ok &= content({1, 1}).present == V{2} && content({1, 1}).dominant == 2;
        ok &= content({2, 0}).present == V{2} && content({2, 0}).dominant == 2;
        ok &= content({2, 2}).present == V{2, 4};
        ok &= content({3, 1}).present == V{4} && content({3, 1}).dominant == 4;
        ok &= content({4, 0}).present == V{2, 4};
        const auto c33 = content({3, 3});
        ok &= std::find(c33.present.begin(), c33.present.end(), 6) != c33.present.end();
        detail = "1, 2, 2, {2,4}, 4, {2,4}, 6-present";
        return ok;
    });

    criterion(6, "multipair visibility trends (runtime < 5 min)", [](std::string& detail) {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::string notes;
        // (a) more pairs, less visibility, for every scheme
        for (const auto& s : kMultipair) {
            const double lo = gaussian_visibility(s, 0.01, 0.2, 1e-4);
            const double hi = gaussian_visibility(s, 0.6, 0.2, 1e-4);
            if (!(lo > hi)) {
                ok = false;
                notes += " 6a violated for " + s.label();
            }
        }
        // (b) bunched-detection schemes keep higher visibility at mu = 0.6
        const double v40 = gaussian_visibility({4, 0}, 0.6, 0.2, 1e-4);
        const double v31 = gaussian_visibility({3, 1}, 0.6, 0.2, 1e-4);
        const double v60 = gaussian_visibility({6, 0}, 0.6, 0.2, 1e-4);
        const double v42 = gaussian_visibility({4, 2}, 0.6, 0.2, 1e-4);
        if (!(v40 > v31 && v60 > v42)) {
            ok = false;
            notes += " 6b ordering violated";
        }
        // (c) small-mu visibilities match the closed forms within 2%
        double worst = 0.0;
        for (const auto& s : kClosedForm) {
            const double vg = gaussian_visibility(s, 1e-3, 0.2, 1e-4);
            const double va = analytic::fixed_form(s, 1.0).visibility();
            worst = std::max(worst, std::abs(vg - va));
        }
        if (worst > 0.02) {
            ok = false;
            notes += " 6c visibility gap " + std::to_string(worst);
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "vis(4/0)=%.3f > vis(3/1)=%.3f, vis(6/0)=%.3f > vis(4/2)=%.3f, 6c gap %.4f",
                      v40, v31, v60, v42, worst);
        detail = buf + notes;
        return ok && dt < 300.0;
    });

    criterion(7, "pair-number scaling slope N/2 +- 0.05", [](std::string& detail) {
        // Least-squares log-log slope over mu in [1e-3, 1e-2], dc = 0, at the
        // fringe maximum, with high efficiency so lost-photon events from
        // higher pair numbers stay negligible.
        const double eta = 0.9;
        double worst = 0.0;
        std::string worst_scheme;
        for (const auto& s : kMultipair) {
            const auto fixed = analytic::fixed_form(s, 1.0);
            double best = -1.0, phi_max = 0.0;
            for (int j = 0; j <= 2048; ++j) {
                const double phi = M_PI * j / 2048.0;
                const double v = fixed.eval(phi);
                if (v > best) {
                    best = v;
                    phi_max = phi;
                }
            }
            const int npts = 7;
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (int i = 0; i < npts; ++i) {
                const double mu = 1e-3 * std::pow(10.0, i / double(npts - 1));
                const double p = gaussian::click_probability(s, mu, 1.0, phi_max, eta, 0.0, 1);
                const double x = std::log(mu), y = std::log(p);
                sx += x; sy += y; sxx += x * x; sxy += x * y;
            }
            const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
            const double err = std::abs(slope - s.total() / 2.0);
            if (err > worst) {
                worst = err;
                worst_scheme = s.label();
            }
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "worst |slope - N/2| = %.4f (%s)", worst,
                      worst_scheme.c_str());
        detail = buf;
        return worst <= 0.05;
    });

    criterion(8, "CLI determinism: identical config + seed", [&cli](std::string& detail) {
        if (cli.empty()) {
            detail = "path to the noonsi binary required as argv[1]";
            return false;
        }
        auto scan = [&](const std::string& out, const std::string& extra) {
            const std::string cmd = cli + " scan --scheme 2/2 --mode fine --count 50 --sample "
                                          "--seed 42 " + extra + " --out " + out + " >/dev/null";
            return std::system(cmd.c_str()) == 0;
        };
        if (!scan("acc_det_a.csv", "--counts-out acc_det_a_counts.csv") ||
            !scan("acc_det_b.csv", "--counts-out acc_det_b_counts.csv")) {
            detail = "scan invocation failed";
            return false;
        }
        const bool same = slurp("acc_det_a.csv") == slurp("acc_det_b.csv") &&
                          slurp("acc_det_a_counts.csv") == slurp("acc_det_b_counts.csv");
        const std::string g = cli + " scan --engine gaussian --scheme 1/1 --mode fine --count 20 "
                                    "--mu 0.1 --sample --seed 9 --out acc_det_g";
        if (std::system((g + "1.csv >/dev/null").c_str()) != 0 ||
            std::system((g + "2.csv >/dev/null").c_str()) != 0) {
            detail = "gaussian scan invocation failed";
            return false;
        }
        const bool same_g = slurp("acc_det_g1.csv") == slurp("acc_det_g2.csv");
        detail = same && same_g ? "byte-identical outputs" : "outputs differ";
        return same && same_g;
    });

    criterion(9, "six-photon visibility ordering at mu = 0.6", [](std::string& detail) {
        // The experimental six-photon visibilities are not reproducible from
        // this model (unmodeled drift and mode mismatch); only the ordering
        // is asserted: 6/0 highest, 4/2 lowest.
        double v33 = gaussian_visibility({3, 3}, 0.6, 0.2, 1e-4);
        double v42 = gaussian_visibility({4, 2}, 0.6, 0.2, 1e-4);
        double v51 = gaussian_visibility({5, 1}, 0.6, 0.2, 1e-4);
        double v60 = gaussian_visibility({6, 0}, 0.6, 0.2, 1e-4);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "vis: 3/3=%.3f 4/2=%.3f 5/1=%.3f 6/0=%.3f", v33, v42, v51,
                      v60);
        detail = buf;
        return v60 > v33 && v60 > v42 && v60 > v51 && v42 < v33 && v42 < v51;
    });

    std::printf("%s: %d of 9 criteria failed\n", failures ? "FAIL" : "OK", failures);
    return failures ? 1 : 0;
}
