#include "ibmag/errors.hpp"
#include "ibmag/spring_synthesis.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace ibmag;
using namespace ibmag::test;

namespace {

ForceCurve small_curve() {
    Sample const pts[] = {{0.0, 8.4}, {7.5, 0.5}};
    return fit_power_law(pts, 2.0);
}

ForceCurve linear_curve() {
    std::vector<Sample> pts;
    for (int i = 0; i <= 10; ++i) pts.push_back({0.5 * i, 10.0 - 1.0 * i});
    return SampledCurve(pts);
}

ForceCurve quadratic_sampled(double (*f)(double), double x_end) {
    std::vector<Sample> pts;
    for (int i = 0; i <= 200; ++i) {
        double const x = x_end * i / 200.0;
        pts.push_back({x, f(x)});
    }
    return SampledCurve(pts);
}

std::vector<double> random_points(std::mt19937_64& rng, int n, double x_max) {
    std::vector<double> pts;
    while (static_cast<int>(pts.size()) < n) {
        double const x = uniform(rng, 0.0, x_max * 0.999);
        if (std::none_of(pts.begin(), pts.end(), [&](double p) { return std::abs(p - x) < 1e-3; })) {
            pts.push_back(x);
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

double oracle_delta_e(const ForceCurve& curve, const SpringDesign& d, double x_max) {
    // trapezoid of F minus the explicit tangent envelope
    std::vector<Line> lines;
    for (auto const& t : d.tangents) lines.push_back({t.point, t.force, t.stiffness});
    return trapezoid([&](double x) { return eval_force(curve, x) - envelope(lines, x); }, 0.0, x_max);
}

}  // namespace

TEST_CASE("tangent_at on the fitted small-prototype curve") {
    auto const curve = small_curve();
    auto const t1 = tangent_at(curve, 1.0);
    CHECK(t1.point == 1.0);
    CHECK(rel_err(t1.force, kForceAt1) < 1e-13);
    CHECK(rel_err(t1.stiffness, -kSlopeAt1) < 1e-6);
    double const fd = central_difference([&](double x) { return eval_force(curve, x); }, 1.0);
    CHECK(rel_err(t1.stiffness, -fd) < 1e-6);

    auto const t0 = tangent_at(curve, 0.0);
    auto const* p = curve.power_law();
    CHECK(t0.force == doctest::Approx(8.4).epsilon(1e-14));
    CHECK(rel_err(t0.stiffness, 2.0 * p->amplitude / std::pow(p->offset, 3)) < 1e-14);
    CHECK(rel_err(t0.stiffness, kStiffnessAt0) < 1e-12);
}

TEST_CASE("tangent_at on a line and on non-decreasing curves") {
    auto const lin = linear_curve();
    for (double const x : {0.0, 1.3, 4.0}) CHECK(tangent_at(lin, x).stiffness == doctest::Approx(2.0).epsilon(1e-12));
    ForceCurve const flat = SampledCurve({{0, 3}, {1, 3}, {2, 3}});
    CHECK_THROWS_AS(tangent_at(flat, 1.0), ShapeError);
    CHECK_THROWS_AS(tangent_at(lin, 6.0), DomainError);
}

TEST_CASE("break_point") {
    auto const curve = small_curve();
    auto const a = tangent_at(curve, 1.0);
    auto const b = tangent_at(curve, 4.0);
    double const x = break_point(a, b);
    CHECK(rel_err(x, kBreak14) < 1e-6);
    CHECK(x > 1.0);
    CHECK(x < 4.0);
    double const numeric = bisect([&](double t) { return a(t) - b(t); }, a.point, b.point);
    CHECK(std::abs(x - numeric) < 1e-9);

    SUBCASE("tangents to a convex parabola meet at the midpoint") {
        auto const q = quadratic_sampled([](double t) { return (t - 10.0) * (t - 10.0); }, 10.0);
        // exact tangent lines of (x - 10)^2
        TangentLine const l2{2.0, 64.0, 16.0};
        TangentLine const l6{6.0, 16.0, 8.0};
        CHECK(break_point(l2, l6) == doctest::Approx(4.0).epsilon(1e-15));
        (void)q;
    }
    SUBCASE("concave ordering and parallel tangents are rejected") {
        // 100 - x^2: stiffness grows with x, so the ordering is non-convex
        TangentLine const l2{2.0, 96.0, 4.0};
        TangentLine const l6{6.0, 64.0, 12.0};
        CHECK_THROWS_AS(break_point(l2, l6), ShapeError);
        CHECK_THROWS_AS(break_point(a, a), ShapeError);
    }
}

TEST_CASE("build_design: two springs on the fitted curve") {
    auto const curve = small_curve();
    double const pts[] = {1.0, 4.0};
    auto const d = build_design(curve, pts, 7.5);
    REQUIRE(d.springs.size() == 2);
    REQUIRE(d.break_points.size() == 1);
    CHECK(rel_err(d.springs[0].stiffness, kSpring1) < 1e-6);
    CHECK(rel_err(d.springs[1].stiffness, kSpring2) < 1e-6);
    CHECK(d.springs[0].engagement_end == d.break_points[0]);
    CHECK(d.springs[1].engagement_end < 7.5);
    CHECK_FALSE(d.springs[1].clamped);
    CHECK(rel_err(spring_force(d, 0.0), kEnvelopeAt0) < 1e-6);
    CHECK(rel_err(spring_force(d, 0.0), d.springs[0].stiffness * d.springs[0].engagement_end +
                                            d.springs[1].stiffness * d.springs[1].engagement_end) < 1e-13);
    CHECK(rel_err(d.delta_e, kDeltaE14) < 1e-6);
    CHECK(rel_err(delta_e(curve, d, 7.5), oracle_delta_e(curve, d, 7.5)) < 1e-6);

    // continuity at the break point and zero past the last engagement end
    double const b = d.break_points[0];
    CHECK(spring_force(d, b) == doctest::Approx(d.tangents[0](b)).epsilon(1e-12));
    CHECK(spring_force(d, b) == doctest::Approx(d.tangents[1](b)).epsilon(1e-12));
    CHECK(spring_force(d, d.springs[1].engagement_end) == 0.0);
    CHECK(spring_force(d, 7.4) == 0.0);
}

TEST_CASE("build_design: a line is reproduced by one spring") {
    auto const lin = linear_curve();
    double const pts[] = {2.0};
    auto const d = build_design(lin, pts, 5.0);
    REQUIRE(d.springs.size() == 1);
    CHECK(d.springs[0].stiffness == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.springs[0].engagement_end == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(std::abs(d.delta_e) < 1e-10);
    CHECK(std::abs(delta_e(lin, d, 5.0)) < 1e-10);
}

TEST_CASE("build_design: counts, clamping and errors") {
    auto const curve = small_curve();
    std::vector<double> const pts{0.0, 0.5, 1.5, 3.0, 5.0, 7.0};
    auto const d = build_design(curve, pts, 7.5);
    CHECK(d.springs.size() == pts.size());
    CHECK(d.break_points.size() == pts.size() - 1);
    // a tangent at 7 mm reaches zero far beyond the stroke
    CHECK(d.springs.back().clamped);
    CHECK(d.springs.back().cam_depth == 7.5);
    CHECK(d.residual_step == doctest::Approx(d.tangents.back()(7.5)).epsilon(1e-12));
    CHECK(spring_force(d, 7.5) == doctest::Approx(d.residual_step).epsilon(1e-12));
    CHECK(spring_force(d, 7.5 + 1e-9) == 0.0);

    double const unsorted[] = {2.0, 1.0};
    CHECK_THROWS_AS(build_design(curve, unsorted, 7.5), DomainError);
    double const outside[] = {7.5};
    CHECK_THROWS_AS(build_design(curve, outside, 7.5), DomainError);

    auto const concave = quadratic_sampled([](double t) { return 100.0 - t * t; }, 9.0);
    double const one[] = {2.0};
    CHECK_THROWS_AS(build_design(concave, one, 9.0), ShapeError);
}

TEST_CASE("empty design loses the whole attraction work") {
    auto const curve = small_curve();
    auto const d = build_design(curve, std::span<const double>{}, 7.5);
    CHECK(d.springs.empty());
    CHECK(spring_force(d, 0.0) == 0.0);
    CHECK(delta_e(curve, d, 7.5) == work_integral(curve, 0.0, 7.5));
}

TEST_CASE("delta_e rejects a design that crosses the curve") {
    auto const curve = small_curve();
    double const pts[] = {1.0, 4.0};
    auto d = build_design(curve, pts, 7.5);
    d.springs[0].stiffness *= 1.5;
    CHECK_THROWS_AS(delta_e(curve, d, 7.5), ShapeError);
}

TEST_CASE("random designs: envelope, telescoping, bracketing, closed form") {
    auto const curve = small_curve();
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        int const n = 1 + static_cast<int>(rng() % 6);
        auto const pts = random_points(rng, n, 7.5);
        auto const d = build_design(curve, pts, 7.5);

        // S stays under F on a 10^4 grid
        for (int i = 0; i <= 10000; ++i) {
            double const x = 7.5 * i / 10000.0;
            CHECK(spring_force(d, x) <= eval_force(curve, x) + 1e-9);
        }
        // sum_{j >= i} k_j == K_i
        for (std::size_t i = 0; i < d.springs.size(); ++i) {
            double sum = 0.0;
            for (std::size_t j = i; j < d.springs.size(); ++j) sum += d.springs[j].stiffness;
            CHECK(std::abs(sum - d.tangents[i].stiffness) <= 1e-12 * d.tangents[i].stiffness);
        }
        for (std::size_t i = 0; i < d.break_points.size(); ++i) {
            CHECK(d.break_points[i] > d.tangents[i].point);
            CHECK(d.break_points[i] < d.tangents[i + 1].point);
        }
        CHECK(rel_err(delta_e(curve, d, 7.5), oracle_delta_e(curve, d, 7.5)) < 1e-6);
    }
}

TEST_CASE("optimizer: single spring") {
    auto const curve = small_curve();
    OptimizeOptions opt;
    opt.exec = Exec::serial;
    auto const d = optimize_tangent_points(curve, 1, 7.5, 11, opt);
    REQUIRE(d.springs.size() == 1);
    auto const brute = grid_min(
        [&](double x) {
            double const p[] = {x};
            return build_design(curve, p, 7.5).delta_e;
        },
        0.0, 7.5 * (1.0 - 1e-9), 1000);
    CHECK(d.delta_e <= brute + 1e-6);

    auto const lin = linear_curve();
    auto const dl = optimize_tangent_points(lin, 1, 5.0, 11, opt);
    CHECK(std::abs(dl.delta_e) < 1e-10);
}

TEST_CASE("optimizer: more springs never lose more energy") {
    auto const curve = small_curve();
    double prev = work_integral(curve, 0.0, 7.5);
    for (int n = 1; n <= 6; ++n) {
        auto const d = optimize_tangent_points(curve, n, 7.5, 5);
        CHECK(d.springs.size() == static_cast<std::size_t>(n));
        CHECK(d.delta_e <= prev + 1e-9);
        prev = d.delta_e;
    }
}

TEST_CASE("optimizer: deterministic and independent of the execution path") {
    auto const curve = small_curve();
    OptimizeOptions serial;
    serial.exec = Exec::serial;
    OptimizeOptions parallel;
    parallel.exec = Exec::parallel;
    auto const a = optimize_tangent_points(curve, 3, 7.5, 99, serial);
    auto const b = optimize_tangent_points(curve, 3, 7.5, 99, parallel);
    auto const c = optimize_tangent_points(curve, 3, 7.5, 99, parallel);
    REQUIRE(a.tangents.size() == b.tangents.size());
    for (std::size_t i = 0; i < a.tangents.size(); ++i) {
        CHECK(a.tangents[i].point == b.tangents[i].point);
        CHECK(b.tangents[i].point == c.tangents[i].point);
    }
    CHECK(a.delta_e == b.delta_e);
    CHECK_THROWS_AS(optimize_tangent_points(curve, 0, 7.5, 1), DomainError);
    auto const concave = quadratic_sampled([](double t) { return 100.0 - t * t; }, 9.0);
    CHECK_THROWS_AS(optimize_tangent_points(concave, 2, 9.0, 1), ShapeError);
}

TEST_CASE("snap_to_catalog") {
    auto const curve = small_curve();
    double const pts[] = {1.0, 4.0};
    auto const d = build_design(curve, pts, 7.5);

    SUBCASE("exact stiffnesses leave the design unchanged") {
        SpringCatalog const cat{{d.springs[0].stiffness, d.springs[1].stiffness, 10.0}};
        auto const s = snap_to_catalog(d, cat, curve);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(s.springs[j].stiffness == d.springs[j].stiffness);
            CHECK(s.springs[j].engagement_end == doctest::Approx(d.springs[j].engagement_end).epsilon(1e-9));
        }
        CHECK(s.delta_e == doctest::Approx(d.delta_e).epsilon(1e-9));
    }
    SUBCASE("rounded stiffnesses") {
        SpringCatalog const cat{{0.4, 2.0, 5.0}};
        auto const s = snap_to_catalog(d, cat, curve);
        CHECK(s.springs[0].stiffness == 2.0);
        CHECK(s.springs[1].stiffness == 0.4);
        CHECK(s.delta_e >= d.delta_e);
        CHECK(s.delta_e == doctest::Approx(delta_e(curve, s, 7.5)).epsilon(1e-12));
        for (int i = 0; i <= 10000; ++i) {
            double const x = 7.5 * i / 10000.0;
            CHECK(spring_force(s, x) <= eval_force(curve, x) + 1e-9);
        }
        CHECK_FALSE(s.residual_negative);
    }
    SUBCASE("stiffer than the curve at contact: the line pivots on x = 0") {
        SpringCatalog const cat{{9.0}};
        auto const s = snap_to_catalog(d, cat, curve);
        CHECK(s.tangents[0].point == 0.0);
        CHECK(s.min_residual >= -1e-9);
    }
    SUBCASE("empty catalog") {
        CHECK_THROWS_AS(snap_to_catalog(d, SpringCatalog{}, curve), CatalogError);
        CHECK_THROWS_AS(snap_to_catalog(d, SpringCatalog{{-1.0}}, curve), CatalogError);
    }
}

TEST_CASE("design CSV and catalog parsing") {
    auto const curve = small_curve();
    double const pts[] = {1.0, 4.0};
    auto const d = build_design(curve, pts, 7.5);
    std::ostringstream os;
    write_design_csv(os, d);
    auto const text = os.str();
    CHECK(text.rfind("spring_index,k_N_per_mm,engagement_end_mm,cam_depth_mm\n1,", 0) == 0);
    CHECK(text.find("\n2,") != std::string::npos);
    CHECK(text.find("delta_e_Nmm,") != std::string::npos);

    std::istringstream cat("k_N_per_mm\n# coil springs\n2.0\n0.4  # soft\n\n");
    auto const c = read_catalog(cat);
    CHECK(c.stiffnesses == std::vector<double>{2.0, 0.4});
    std::istringstream empty("k_N_per_mm\n");
    CHECK_THROWS_AS(read_catalog(empty), CatalogError);
}

TEST_CASE("optimizer keeps every point inside the stroke across seeds") {
    auto const curve = small_curve();
    OptimizeOptions opt;
    opt.starts = 4;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        for (int const n : {5, 6, 8}) {
            auto const d = optimize_tangent_points(curve, n, 7.5, seed, opt);
            CHECK(d.tangents.front().point >= 0.0);
            CHECK(d.tangents.back().point < 7.5);
            CHECK(d.min_residual >= -1e-9);
        }
    }
}
