#include "ibmag/errors.hpp"
#include "ibmag/fixtures.hpp"
#include "ibmag/magnetic_spring.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace ibmag;
using namespace ibmag::test;

namespace {

ForceCurve small_attraction() {
    Sample const pts[] = {{0.0, 8.4}, {7.5, 0.5}};
    return fit_power_law(pts, 2.0);
}

}  // namespace

TEST_CASE("ideal pair cancels everywhere") {
    auto const pair = ideal_pair(small_attraction(), 7.5);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) CHECK(std::abs(internal_force(pair, uniform(rng, 0.0, 7.5))) <= 1e-12);
    auto const prof = deviation_profile(pair, kDefaultSweepGrid, Exec::serial);
    REQUIRE(prof.samples.size() == kDefaultSweepGrid);
    for (auto const& s : prof.samples) CHECK(s.internal_force == 0.0);
    auto const peak0 = peak_control_force(pair, 0.0);
    CHECK(peak0.total == 0.0);
    auto const peakw = peak_control_force(pair, 0.434);
    CHECK(peakw.total == 0.434);
    CHECK(peakw.net == 0.0);
}

TEST_CASE("internal force sign, scaling and swap") {
    auto const att = small_attraction();
    MagneticSpringPair const pair{att, att.scaled(1.05), 7.5};
    CHECK(internal_force(pair, 0.0) == doctest::Approx(0.42).epsilon(1e-12));
    CHECK(internal_force(pair, 3.0) > 0.0);
    MagneticSpringPair const swapped{pair.repulsion, pair.attraction, 7.5};
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        double const x = uniform(rng, 0.0, 7.5);
        CHECK(internal_force(swapped, x) == -internal_force(pair, x));
    }
    CHECK_THROWS_AS(internal_force(pair, -0.01), DomainError);
    CHECK_THROWS_AS(internal_force(pair, 7.51), DomainError);
}

TEST_CASE("deviation profile grid and peak") {
    auto const att = small_attraction();
    MagneticSpringPair const pair{att, att.scaled(1.1), 7.5};
    auto const two = deviation_profile(pair, 2);
    REQUIRE(two.samples.size() == 2);
    CHECK(two.samples[0].x == 0.0);
    CHECK(two.samples[1].x == 7.5);
    CHECK_THROWS_AS(deviation_profile(pair, 1), DomainError);

    auto const prof = deviation_profile(pair, 101);
    CHECK(prof.peak_index == 0);
    for (auto const& s : prof.samples) {
        CHECK(s.internal_force == internal_force(pair, s.x));
        CHECK(s.deviation == std::abs(s.internal_force));
    }
}

TEST_CASE("peak control force against the sweep maximum") {
    auto const att = small_attraction();
    // repulsion stronger near contact, weaker far out: the deviation changes sign
    std::vector<Sample> pts;
    for (int i = 0; i <= 30; ++i) {
        double const x = 0.25 * i;
        pts.push_back({x, eval_force(att, x) * (1.0 + 0.1 * std::cos(x))});
    }
    MagneticSpringPair const pair{att, SampledCurve(pts), 7.5};
    auto const peak = peak_control_force(pair, 0.0, 501);
    auto const prof = deviation_profile(pair, 501);
    double max_signed = -1e300;
    double max_abs = 0.0;
    for (auto const& s : prof.samples) {
        max_signed = std::max(max_signed, s.internal_force);
        max_abs = std::max(max_abs, s.deviation);
    }
    CHECK(peak.net == max_signed);
    CHECK(peak.net <= max_abs);
    CHECK(peak_control_force(pair, 2.0, 501).total == max_signed + 2.0);
    CHECK_THROWS_AS(peak_control_force(pair, -1.0), DomainError);
}

TEST_CASE("reduction ratio") {
    CHECK(reduction_ratio(1.1, 8.4) == doctest::Approx(0.130952380952381).epsilon(1e-14));
    CHECK(reduction_ratio(0.0, 3.0) == 0.0);
    CHECK_THROWS_AS(reduction_ratio(1.0, 0.0), DomainError);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        double const lambda = uniform(rng, 1e-3, 1e3);
        CHECK(std::abs(reduction_ratio(1.1 * lambda, 8.4 * lambda) - reduction_ratio(1.1, 8.4)) <= 1e-12);
    }
    CHECK(kCoilSpringReductionRatio == 0.118);
    CHECK(kNeidhartRubberReductionRatio == 0.154);
}

TEST_CASE("shipped fixtures") {
    auto const small = load_fixture("prototype_small");
    auto const large = load_fixture("prototype_large");
    CHECK(small.magnet.outer_diameter == 18.0);
    CHECK(small.magnet.inner_diameter == 12.0);
    CHECK(small.magnet.thickness == 3.0);
    CHECK(small.unit.stroke == 7.5);
    CHECK(large.magnet.outer_diameter == 54.0);
    CHECK(large.unit.stroke == 20.0);

    auto const& p = small.unit.pair;
    CHECK(eval_force(p.attraction, 0.0) == doctest::Approx(8.4).epsilon(1e-14));
    CHECK(eval_force(p.attraction, 7.5) == doctest::Approx(0.5).epsilon(1e-14));
    auto const peak = peak_control_force(p, 0.0);
    CHECK(peak.net == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(peak.position == 0.0);

    auto const dev_small = deviation_profile(p);
    auto const dev_large = deviation_profile(large.unit.pair);
    CHECK(dev_large.peak().deviation > dev_small.peak().deviation);
}

TEST_CASE("pair validation") {
    auto const att = small_attraction();
    CHECK_THROWS_AS((MagneticSpringPair{att, att, 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((MagneticSpringPair{att, att, 7.5, -1.0}.validate()), ConfigError);
    ForceCurve const short_curve = SampledCurve({{0, 8}, {2, 4}, {5, 1}});
    CHECK_THROWS_AS(ideal_pair(short_curve, 7.5), ConfigError);
    ForceCurve const late = SampledCurve({{1, 8}, {2, 4}, {9, 1}});
    CHECK_THROWS_AS(ideal_pair(late, 7.5), ConfigError);
}

TEST_CASE("balance CSV") {
    auto const pair = ideal_pair(small_attraction(), 7.5);
    std::ostringstream os;
    write_balance_csv(os, deviation_profile(pair, 3));
    CHECK(os.str() == "x_mm,internal_force_N\n0,0\n3.75,0\n7.5,0\n");
}
