#include <catch2/catch_amalgamated.hpp>

#include "noonsi/analysis.hpp"
#include "noonsi/analytic.hpp"
#include "noonsi/gaussian.hpp"

using namespace noonsi;
using Catch::Approx;

namespace {

PatternScan analytic_coarse(const DetectionScheme& s, double step, double range) {
    Bundle b{default_source(), s, default_coarse_scan()};
    b.scan.start = -range;
    b.scan.step = step;
    b.scan.count = static_cast<int>(2.0 * range / step) + 1;
    return analytic::pattern(b);
}

analysis::AnalysisOptions default_opts() {
    analysis::AnalysisOptions opts;
    opts.omega0 = default_source().omega0;
    return opts;
}

PatternScan synthetic(double amplitude, double offset, double omega, int n, double step) {
    PatternScan scan;
    scan.unit = ScanMode::coarse_path;
    for (int i = 0; i < n; ++i) {
        const double x = (i - n / 2) * step;
        scan.points.push_back({x, offset + amplitude * std::cos(omega * x), std::nullopt});
    }
    return scan;
}

}  // namespace

TEST_CASE("constant-envelope fringe gives flat envelopes") {
    const double omega = 2.0 * M_PI / 1.6e-6;
    const auto scan = synthetic(0.4, 0.5, omega, 4000, 0.1e-6);
    analysis::AnalysisOptions opts;  // no omega0: period detected from data
    const auto env = analysis::envelopes(scan, opts);
    for (const auto& [d, v] : env.upper.knots) CHECK(v == Approx(0.9).margin(1e-3));
    for (const auto& [d, v] : env.lower.knots) CHECK(v == Approx(0.1).margin(1e-3));
    CHECK(env.baseline == Approx(0.5).margin(0.02));
    CHECK(env.fringe_period == Approx(1.6e-6).epsilon(0.01));
}

TEST_CASE("fringe frequency detection without metadata") {
    const double omega = 2.0 * M_PI / 0.8e-6;
    const auto scan = synthetic(0.3, 0.5, omega, 6000, 0.05e-6);
    CHECK(analysis::detect_fringe_frequency(scan) == Approx(omega).epsilon(1e-3));
}

TEST_CASE("degenerate flat scans are rejected") {
    PatternScan scan;
    scan.unit = ScanMode::coarse_path;
    for (int i = 0; i < 200; ++i) scan.points.push_back({i * 1e-6, 0.25, std::nullopt});
    CHECK_THROWS_AS(analysis::envelopes(scan, {}), NumericError);
}

TEST_CASE("non-monotonic delays are rejected") {
    PatternScan scan;
    scan.unit = ScanMode::coarse_path;
    for (int i = 0; i < 200; ++i) scan.points.push_back({i * 1e-6, 0.5, std::nullopt});
    scan.points[50].delay = scan.points[49].delay;
    CHECK_THROWS_AS(analysis::envelopes(scan, {}), NumericError);
}

TEST_CASE("insufficient sampling reports the required density") {
    // Default Fig.-2-style motor scan: 2 um steps undersample the fringe.
    Bundle b{default_source(), {1, 1}, default_coarse_scan()};
    const auto scan = analytic::pattern(b);
    CHECK_THROWS_WITH(analysis::envelopes(scan, default_opts()),
                      Catch::Matchers::ContainsSubstring("insufficient sampling density"));
}

TEST_CASE("1/1 upper envelope width matches the closed form") {
    const auto scan = analytic_coarse({1, 1}, 0.08e-6, 0.9e-3);
    const auto stats = analysis::metrics(&scan, nullptr, default_opts());
    const double expect_fwhm_m =
        2.0 * std::sqrt(2.0 * std::log(2.0)) / default_source().delta_omega * speed_of_light;
    REQUIRE(stats.upper_fwhm.has_value());
    CHECK(*stats.upper_fwhm == Approx(expect_fwhm_m).epsilon(0.005));
    // Symmetric shape: both envelopes share the bandwidth.
    REQUIRE(stats.lower_fwhm.has_value());
    CHECK(*stats.lower_fwhm == Approx(*stats.upper_fwhm).epsilon(0.01));
    CHECK(*stats.coherence_time == Approx(1.77e-12).epsilon(0.005));
}

TEST_CASE("3/1 lower envelope dips below the baseline at zero delay") {
    const auto scan = analytic_coarse({3, 1}, 0.04e-6, 0.9e-3);
    const auto env = analysis::envelopes(scan, default_opts());
    CHECK(env.lower.trough().second < env.baseline - 0.15);
    CHECK(std::abs(env.lower.trough().first) < 2e-6);
}

TEST_CASE("shape classification of the analytic patterns") {
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
    for (const auto& r : rows) {
        const auto scan = analytic_coarse(r.s, r.step, 0.9e-3);
        INFO("scheme " << r.s.label());
        CHECK(analysis::classify(scan, default_opts()) == r.want);
    }
}

TEST_CASE("classification is affine invariant") {
    const auto base = analytic_coarse({2, 2}, 0.05e-6, 0.9e-3);
    const auto want = analysis::classify(base, default_opts());
    for (double scale : {0.2, 40.0})
        for (double offset : {0.0, 3.5}) {
            PatternScan scaled = base;
            for (auto& p : scaled.points) p.probability = scale * p.probability + offset;
            CHECK(analysis::classify(scaled, default_opts()) == want);
        }
}

TEST_CASE("gaussian 3/3 coarse pattern at high pair rate classifies as dip") {
    Bundle b{default_source(), {3, 3}, default_coarse_scan()};
    b.source.mu = 0.6;
    b.scan.eta = 0.2;
    b.scan.dc = 1e-4;
    b.scan.start = -0.8e-3;
    b.scan.step = 0.099e-6;
    b.scan.count = static_cast<int>(1.6e-3 / b.scan.step) + 1;
    const auto scan = gaussian::multipair_pattern(b);
    CHECK(analysis::classify(scan, default_opts()) == ShapeClass::dip);
}

TEST_CASE("coherence-length ratio of the one- and two-photon patterns") {
    const auto s11 = analytic_coarse({1, 1}, 0.08e-6, 0.9e-3);
    const auto s10 = analytic_coarse({1, 0}, 0.15e-6, 1.3e-3);
    const auto m11 = analysis::metrics(&s11, nullptr, default_opts());
    const auto m10 = analysis::metrics(&s10, nullptr, default_opts());
    CHECK(*m10.coherence_length / *m11.coherence_length == Approx(std::sqrt(2.0)).epsilon(0.01));
    CHECK(*m10.coherence_time == Approx(*m10.coherence_length / speed_of_light).margin(1e-20));
}

TEST_CASE("two-photon profiles are detection independent") {
    const auto a = analytic_coarse({1, 1}, 0.08e-6, 0.9e-3);
    const auto b = analytic_coarse({2, 0}, 0.08e-6, 0.9e-3);
    const auto ma = analysis::metrics(&a, nullptr, default_opts());
    const auto mb = analysis::metrics(&b, nullptr, default_opts());
    CHECK(*ma.coherence_length == Approx(*mb.coherence_length).epsilon(0.005));
    CHECK(*ma.shape == *mb.shape);
}

TEST_CASE("visibility extraction agrees with the symbolic value") {
    for (const auto& s : std::vector<DetectionScheme>{{1, 0}, {1, 1}, {2, 0}, {2, 2}, {3, 1},
                                                      {4, 0}, {3, 3}, {4, 2}, {5, 1}, {6, 0}}) {
        const auto fixed = analytic::fixed_form(s, 1.0);
        PatternScan scan;
        scan.scheme = s;
        scan.unit = ScanMode::fine_phase;
        const int n = 4800;
        for (int i = 0; i < n; ++i) {
            const double phi = 4.0 * M_PI * i / n;
            scan.points.push_back({phi, fixed.eval(phi), std::nullopt});
        }
        INFO("scheme " << s.label());
        CHECK(analysis::visibility(scan) == Approx(fixed.visibility()).margin(1e-6));
    }
}

TEST_CASE("visibility of a partially distinguishable two-photon fringe") {
    // P11 = (1 + I cos 2phi)/2 has visibility exactly I.
    for (double ii : {0.25, 0.6, 0.9}) {
        PatternScan scan;
        scan.unit = ScanMode::fine_phase;
        for (int i = 0; i < 400; ++i) {
            const double phi = 4.0 * M_PI * i / 400;
            scan.points.push_back({phi, analytic::closed_form({1, 1}, ii, phi), std::nullopt});
        }
        CHECK(analysis::visibility(scan) == Approx(ii).margin(1e-6));
    }
}

TEST_CASE("harmonic content of the fine scans") {
    const auto src = default_source();
    auto content = [&](const DetectionScheme& s) {
        Bundle b{src, s, default_fine_scan()};
        return analysis::harmonic_content(analytic::pattern(b), default_opts());
    };
    using V = std::vector<int>;
    CHECK(content({1, 0}).present == V{1});
    CHECK(content({1, 0}).dominant == 1);
    CHECK(content({1, 1}).present == V{2});
    CHECK(content({2, 0}).present == V{2});
    CHECK(content({2, 2}).present == V{2, 4});
    CHECK(content({2, 2}).dominant == 2);
    CHECK(content({3, 1}).present == V{4});
    CHECK(content({3, 1}).dominant == 4);
    CHECK(content({4, 0}).present == V{2, 4});
    const auto c33 = content({3, 3});
    CHECK(std::find(c33.present.begin(), c33.present.end(), 6) != c33.present.end());
}

TEST_CASE("harmonic content of a coarse scan uses the carrier metadata") {
    const auto scan = analytic_coarse({1, 1}, 0.08e-6, 0.4e-3);
    const auto hc = analysis::harmonic_content(scan, default_opts());
    CHECK(hc.dominant == 2);
    PatternScan stripped = scan;
    analysis::AnalysisOptions no_meta;
    CHECK_THROWS_AS(analysis::harmonic_content(stripped, no_meta), NumericError);
}

TEST_CASE("metrics with only a fine scan leaves envelope fields empty") {
    Bundle b{default_source(), {1, 1}, default_fine_scan()};
    const auto fine = analytic::pattern(b);
    const auto stats = analysis::metrics(nullptr, &fine, default_opts());
    CHECK(stats.visibility.has_value());
    CHECK_FALSE(stats.shape.has_value());
    CHECK_FALSE(stats.coherence_length.has_value());
    CHECK_THROWS_AS(analysis::metrics(nullptr, nullptr, default_opts()), NumericError);
}

TEST_CASE("baseline comes from the outermost tenth of the scan") {
    // Envelope dead by |x| > 0.25 mm; edges sit at the baseline 0.25.
    const auto scan = analytic_coarse({2, 0}, 0.08e-6, 0.9e-3);
    const auto env = analysis::envelopes(scan, default_opts());
    CHECK(env.baseline == Approx(0.25).margin(1e-3));
}
