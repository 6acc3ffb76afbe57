#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "resolab/log_cover.hpp"

using namespace resolab;
using Catch::Approx;

TEST_CASE("project maps cover points to the plane") {
    CHECK(project(LogPoint(1.0, 0.0)) == std::complex<double>(1.0, 0.0));

    auto z = project(LogPoint(1.0, 2.0 * M_PI));
    CHECK(z.real() == Approx(1.0).margin(1e-15));
    CHECK(z.imag() == Approx(0.0).margin(1e-15));
    // same projection, distinct cover points
    CHECK_FALSE(LogPoint(1.0, 2.0 * M_PI) == LogPoint(1.0, 0.0));

    auto w = project(LogPoint(2.0, -M_PI / 2.0));
    CHECK(w.real() == Approx(0.0).margin(1e-15));
    CHECK(w.imag() == Approx(-2.0));
}

TEST_CASE("modulus must stay positive") {
    CHECK_THROWS_AS(LogPoint(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(LogPoint(-1.0, 0.0), std::domain_error);
}

TEST_CASE("shift_sheet moves the argument by l*pi") {
    CHECK(shift_sheet(LogPoint(1, 0), 2) == LogPoint(1, 2 * M_PI));
    CHECK(shift_sheet(LogPoint(1, 0), 0) == LogPoint(1, 0));
    auto p = shift_sheet(LogPoint(3, -M_PI / 4), 1);
    CHECK(p.modulus == 3.0);
    CHECK(p.argument == Approx(3 * M_PI / 4));
}

TEST_CASE("sector containment respects the sheet") {
    SectorRegion r(-M_PI, 0.0, 0.5, 5.0);
    CHECK(contains(r, LogPoint(1.0, -M_PI / 2)));
    // same projection as (1, -pi/2) but wrong sheet
    CHECK_FALSE(contains(r, LogPoint(1.0, 3 * M_PI / 2)));
    CHECK_FALSE(contains(r, LogPoint(0.4, -M_PI / 2)));
}

TEST_CASE("cover arithmetic properties") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> mod(0.1, 20.0), arg(-10.0, 10.0);
    std::uniform_int_distribution<int> sheet(-5, 5);

    for (int i = 0; i < 200; ++i) {
        LogPoint p(mod(rng), arg(rng));
        int a = sheet(rng), b = sheet(rng);

        auto lhs = shift_sheet(shift_sheet(p, a), b);
        auto rhs = shift_sheet(p, a + b);
        CHECK(lhs.modulus == rhs.modulus);
        CHECK(lhs.argument == Approx(rhs.argument).margin(1e-12));

        auto full_turn = project(shift_sheet(p, 2));
        CHECK(std::abs(full_turn - project(p)) < 1e-12 * p.modulus);

        // containment invariant under simultaneous argument translation
        double shift = arg(rng);
        SectorRegion r0(-1.0, 2.0, 0.2, 25.0);
        SectorRegion r1(-1.0 + shift, 2.0 + shift, 0.2, 25.0);
        CHECK(contains(r0, p) == contains(r1, LogPoint(p.modulus, p.argument + shift)));
    }
}

TEST_CASE("lift_near recovers the sheet of the reference") {
    LogPoint ref(2.0, -2.0 * M_PI);
    auto lifted = lift_near(std::complex<double>(2.0, 0.1), ref);
    CHECK(std::abs(lifted.argument - ref.argument) < M_PI);
    CHECK(std::abs(project(lifted) - std::complex<double>(2.0, 0.1)) < 1e-14);
    CHECK_THROWS_AS(lift_near(std::complex<double>(0.0, 0.0), ref), std::domain_error);
}
