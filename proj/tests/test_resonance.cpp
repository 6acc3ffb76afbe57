#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "resolab/resonance.hpp"

using namespace resolab;
using cplx = std::complex<double>;
using Catch::Approx;

namespace {

/// Independent high-precision zero of H^(1)_m near a seed cover point, by
/// Newton iteration in the logarithmic chart.
LogPoint hankel_zero(int m, LogPoint seed) {
    double lm = std::log(seed.modulus), la = seed.argument;
    auto ord = BesselOrder::integer(m);
    for (int it = 0; it < 60; ++it) {
        LogPoint p(std::exp(lm), la);
        cplx H = hankel1(ord, p);
        cplx Hp = hankel1_deriv(ord, p);
        cplx dw = H / (project(p) * Hp); // d(log z) step
        if (std::abs(dw) > 0.2) dw *= 0.2 / std::abs(dw);
        lm -= dw.real();
        la -= dw.imag();
        if (std::abs(dw) < 1e-15) break;
    }
    LogPoint z(std::exp(lm), la);
    REQUIRE(std::abs(hankel1(ord, z)) < 1e-13);
    return z;
}

double plane_dist(const LogPoint& a, const LogPoint& b) {
    return std::abs(project(a) - project(b));
}

const SectorRegion principal_band{-M_PI + 0.01, -0.01, 0.5, 8.0};

} // namespace

TEST_CASE("contour spec validates its geometry") {
    LogPoint c(2.0, -0.5);
    CHECK_NOTHROW(ContourSpec(c, 0.3));
    CHECK_THROWS_AS(ContourSpec(c, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(ContourSpec(c, 0.3, 8), std::invalid_argument);   // too few nodes
    CHECK_THROWS_AS(ContourSpec(c, 0.3, 31), std::invalid_argument);  // odd nodes
    CHECK_THROWS_AS(ContourSpec(c, 0.3, 32, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ContourSpec(c, 0.3, 32, 1e-6, 0), std::invalid_argument);
    // contour must not reach the puncture of the cover
    CHECK_THROWS_AS(ContourSpec(c, 2.0), std::invalid_argument);
}

TEST_CASE("disk oracle finds the low-order cylinder zeros") {
    auto recs = disk_resonances(3, principal_band);
    REQUIRE(!recs.empty());
    for (const auto& r : recs) {
        CHECK(r.residual < 1e-10);
        CHECK(contains(principal_band, r.location));
        CHECK((r.multiplicity == 1 || r.multiplicity == 2));
        CHECK(r.source == ResonanceSource::disk_oracle);
    }
    // sorted by modulus
    for (std::size_t i = 1; i < recs.size(); ++i)
        CHECK(recs[i - 1].location.modulus <= recs[i].location.modulus);
    // the first zero in the band is the m=1 double zero; pin it against an
    // independent Newton refinement from a coarse seed
    LogPoint z1 = hankel_zero(1, LogPoint(0.7, -2.2));
    CHECK(plane_dist(recs.front().location, z1) < 1e-10);
    CHECK(recs.front().multiplicity == 2);
    // the simple (m=0) zero near modulus 2.43 is present with multiplicity 1
    LogPoint z0 = hankel_zero(0, LogPoint(2.4, -3.0));
    bool found_simple = false;
    for (const auto& r : recs)
        if (plane_dist(r.location, z0) < 1e-10) {
            found_simple = true;
            CHECK(r.multiplicity == 1);
        }
    CHECK(found_simple);
    // a band holding no zeros comes back empty
    CHECK(disk_resonances(3, {-M_PI + 0.01, -0.01, 0.01, 0.02}).empty());
    // regions touching the real axis are rejected: the zero counting is only
    // defined strictly inside the continued (non-physical) half
    CHECK_THROWS_AS(disk_resonances(1, SectorRegion{-1.0, 0.0, 0.5, 2.0}),
                    std::domain_error);
}

TEST_CASE("operator is conjugate-symmetric across the physical sheet") {
    // reflecting the spectral parameter through arg -> pi - arg conjugates
    // the single-layer matrix entrywise, so resonances pair across sheets
    auto circ = unit_circle(64);
    for (LogPoint p : {LogPoint(1.3, -2.1), LogPoint(0.8, -0.4)}) {
        auto A = assemble_single_layer(circ, p);
        auto B = assemble_single_layer(circ, LogPoint(p.modulus, M_PI - p.argument));
        CHECK((B.matrix - A.matrix.conjugate()).cwiseAbs().maxCoeff() < 1e-14);
    }
    // consequently the mirror of each zero is itself a zero (on another sheet)
    LogPoint z1 = hankel_zero(1, LogPoint(0.7, -2.2));
    LogPoint mirror(z1.modulus, M_PI - z1.argument);
    CHECK(std::abs(hankel1(BesselOrder::integer(1), mirror)) < 1e-10);
    // but the mirror is NOT in the same argument band: within arg in (-pi, 0)
    // the zero set has no left/right symmetry
    CHECK(mirror.argument > M_PI);
}

TEST_CASE("sphere oracle matches the closed-form low-order zeros") {
    SectorRegion band{-M_PI + 0.01, -0.01, 0.1, 5.0};
    CHECK(sphere_resonances(0, band).empty());
    auto recs = sphere_resonances(2, band);
    REQUIRE(recs.size() == 3);
    // l = 1: zero at -i with multiplicity 3
    CHECK(recs[0].location.modulus == Approx(1.0).margin(1e-12));
    CHECK(recs[0].location.argument == Approx(-M_PI / 2).margin(1e-12));
    CHECK(recs[0].multiplicity == 3);
    // l = 2: zeros at (+-sqrt(3) - 3i)/2, multiplicity 5
    double s3 = std::sqrt(3.0);
    CHECK(recs[1].location.modulus == Approx(s3).margin(1e-12));
    CHECK(recs[2].location.modulus == Approx(s3).margin(1e-12));
    CHECK(recs[1].location.argument == Approx(-2 * M_PI / 3).margin(1e-12));
    CHECK(recs[2].location.argument == Approx(-M_PI / 3).margin(1e-12));
    for (const auto& r : recs) {
        CHECK(r.residual < 1e-12);
        CHECK(r.source == ResonanceSource::sphere_oracle);
        if (r.location.modulus > 1.5) CHECK(r.multiplicity == 5);
    }
    CHECK_THROWS_AS(sphere_resonances(2, SectorRegion{-1.0, 4.0, 0.1, 5.0}),
                    std::domain_error);
}

TEST_CASE("contour solver reproduces oracle zeros with multiplicities") {
    auto circ = unit_circle(128);
    struct Probe { int m; LogPoint seed; double radius; int mult; };
    for (const Probe& pr : {Probe{1, {0.7, -2.2}, 0.2, 2},
                            Probe{0, {2.4, -3.0}, 0.15, 1},
                            Probe{1, {1.35, -1.25}, 0.15, 2}}) {
        LogPoint z = hankel_zero(pr.m, pr.seed);
        auto recs = beyn_solve(circ, ContourSpec(z, pr.radius, 32));
        REQUIRE(recs.size() == 1);
        CHECK(plane_dist(recs[0].location, z) < 1e-8);
        CHECK(std::abs(recs[0].location.argument - z.argument) < 1e-8);
        CHECK(recs[0].multiplicity == pr.mult);
        CHECK(recs[0].residual < 1e-10);
        CHECK(recs[0].source == ResonanceSource::bie);
    }
}

TEST_CASE("contour away from all resonances returns nothing") {
    auto circ = unit_circle(128);
    CHECK(beyn_solve(circ, ContourSpec(LogPoint(2.0, -0.3), 0.1, 16)).empty());
    CHECK(beyn_solve(circ, ContourSpec(LogPoint(2.0, -0.3), 0.3, 32)).empty());
}

TEST_CASE("located resonance does not depend on the contour") {
    auto circ = unit_circle(128);
    LogPoint z0 = hankel_zero(0, LogPoint(2.4, -3.0));
    auto a = beyn_solve(circ, ContourSpec(z0, 0.15, 32));
    auto b = beyn_solve(circ, ContourSpec(z0, 0.2, 48));
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(plane_dist(a[0].location, b[0].location) < 1e-8);
    CHECK(a[0].multiplicity == b[0].multiplicity);
}

TEST_CASE("contour solver is deterministic") {
    auto circ = unit_circle(128);
    LogPoint z0 = hankel_zero(0, LogPoint(2.4, -3.0));
    auto a = beyn_solve(circ, ContourSpec(z0, 0.15, 32));
    auto b = beyn_solve(circ, ContourSpec(z0, 0.15, 32));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].location.modulus == b[i].location.modulus);
        CHECK(a[i].location.argument == b[i].location.argument);
        CHECK(a[i].residual == b[i].residual);
    }
}

TEST_CASE("total multiplicity matches the argument principle and is additive") {
    auto circ = unit_circle(128);
    LogPoint z1 = hankel_zero(1, LogPoint(0.7, -2.2));
    LogPoint z0 = hankel_zero(0, LogPoint(2.4, -3.0));
    CHECK(multiplicity_in(circ, ContourSpec(z1, 0.2, 32)) == 2);
    CHECK(multiplicity_in(circ, ContourSpec(z0, 0.15, 32)) == 1);
    CHECK(multiplicity_in(circ, ContourSpec(LogPoint(2.0, -0.3), 0.1, 32)) == 0);
    // one contour around two neighboring zero clusters: the simple zero near
    // (2.43, -3.00) and the double zero near (2.46, -2.72); counts add up
    LogPoint mid = lift_near(cplx(-2.323, -0.674), LogPoint(2.4, -2.86));
    ContourSpec pair(mid, 0.55, 48, 1e-6, 8);
    CHECK(multiplicity_in(circ, pair) == 3);
    auto recs = beyn_solve(circ, pair);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].multiplicity == 1);
    CHECK(recs[1].multiplicity == 2);
    CHECK(plane_dist(recs[0].location, z0) < 1e-4);
}

TEST_CASE("solver rejects a contour running through a resonance") {
    auto circ = unit_circle(128);
    LogPoint z1 = hankel_zero(1, LogPoint(0.7, -2.2));
    // place a quadrature node exactly on the zero
    cplx center = project(z1) - 0.1;
    LogPoint c = lift_near(center, z1);
    CHECK_THROWS_AS(beyn_solve(circ, ContourSpec(c, 0.1, 32)),
                    std::runtime_error);
}

TEST_CASE("solver reports when the probe rank is exhausted") {
    auto circ = unit_circle(128);
    LogPoint mid = lift_near(cplx(-2.323, -0.674), LogPoint(2.4, -2.86));
    // three eigenvalues inside but only three probe columns: the rank test
    // cannot certify that no direction was missed
    CHECK_THROWS_WITH(beyn_solve(circ, ContourSpec(mid, 0.55, 48, 1e-6, 3)),
                      Catch::Matchers::ContainsSubstring("probe_dim"));
}

TEST_CASE("tracked double resonance splits into two simple ones") {
    auto circ = unit_circle(128);
    auto field = make_field(circ, 0.7, 0.5, 1, 2);
    LogPoint z1 = hankel_zero(1, LogPoint(0.7, -2.2));
    auto tr = track_resonance(circ, field, {0.0, 0.05, 0.1},
                              ContourSpec(z1, 0.2, 32));
    REQUIRE(tr.size() == 3);
    // t = 0: the undeformed disk keeps the double zero
    REQUIRE(tr[0].second.size() == 1);
    CHECK(tr[0].second[0].multiplicity == 2);
    CHECK(plane_dist(tr[0].second[0].location, z1) < 1e-8);
    // t > 0: two simple resonances, total multiplicity conserved
    double prev_sep = 0.0;
    for (std::size_t i = 1; i < tr.size(); ++i) {
        const auto& recs = tr[i].second;
        REQUIRE(recs.size() == 2);
        CHECK(recs[0].multiplicity == 1);
        CHECK(recs[1].multiplicity == 1);
        double sep = plane_dist(recs[0].location, recs[1].location);
        CHECK(sep > prev_sep);
        prev_sep = sep;
        for (const auto& r : recs) CHECK(plane_dist(r.location, z1) < 0.05);
    }
    // t grid must be sorted and anchored at the undeformed shape
    CHECK_THROWS_AS(track_resonance(circ, field, {0.1, 0.0},
                                    ContourSpec(z1, 0.2, 32)),
                    std::invalid_argument);
}
