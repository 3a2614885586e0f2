#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lemlab/region_measure.hpp"

using namespace lemlab;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

CoeffPoly monomial(int n, cplx c0 = 0.0)
{
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[0] = c0;
    c.back() = 1.0;
    return CoeffPoly(c);
}

QuadratureBudget budget(double tol)
{
    QuadratureBudget b;
    b.tol = tol;
    return b;
}

} // namespace

TEST_CASE("region membership and set operations")
{
    const Region d = Region::disk(0.0, 1.0);
    CHECK(d.contains(0.5));
    CHECK_FALSE(d.contains(1.0)); // open disk
    const Region a = Region::annulus(0.0, 0.5, 1.0);
    CHECK(a.contains(0.5));
    CHECK_FALSE(a.contains(0.25));
    CHECK_FALSE(a.contains(1.0));
    const Region u = Region::disk(-2.0, 1.0) | Region::disk(2.0, 1.0);
    CHECK(u.contains(-2.0));
    CHECK(u.contains(2.5));
    CHECK_FALSE(u.contains(0.0));
    const Region hole = d & ~Region::disk(0.0, 0.5);
    CHECK(hole.contains(0.75));
    CHECK_FALSE(hole.contains(0.1));
    CHECK_FALSE(Region::plane().bounding_box().has_value());
    CHECK_FALSE((~d).bounding_box().has_value());
    CHECK(Region::plane().contains(1e9));
    CHECK_FALSE(d.describe().empty());
}

TEST_CASE("sublevel and Riesz superlevel regions")
{
    const Region s = Region::sublevel(monomial(3, -1.0), 1.0);
    CHECK(s.contains(1.0));
    CHECK_FALSE(s.contains(0.0)); // |p(0)| = 1 is not < 1
    CHECK_FALSE(s.contains(2.0));
    const Region r = Region::riesz_superlevel({0.0}, 2.0);
    CHECK(r.contains(0.4));
    CHECK(r.contains(0.5));
    CHECK_FALSE(r.contains(0.6));
    REQUIRE(s.bounding_box().has_value());
    REQUIRE(r.bounding_box().has_value());
}

TEST_CASE("cell classification is conservative")
{
    const Region d = Region::disk(0.0, 1.0);
    CHECK(d.classify({-0.1, -0.1, 0.1, 0.1}) == CellClass::inside);
    CHECK(d.classify({2.0, 2.0, 3.0, 3.0}) == CellClass::outside);
    CHECK(d.classify({0.9, -0.1, 1.1, 0.1}) == CellClass::boundary);
    const Region s = Region::sublevel(monomial(4, -1.0), 1.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.6, 1.6);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng), y = u(rng), w = 0.05;
        const Box b{x, y, x + w, y + w};
        const CellClass c = s.classify(b);
        const bool in = s.contains(b.center());
        if (c == CellClass::inside)
            CHECK(in);
        if (c == CellClass::outside)
            CHECK_FALSE(in);
    }
}

TEST_CASE("radial range and boundary circles")
{
    const auto [lo, hi] = Region::annulus(0.0, 0.1, 0.5).radial_range();
    CHECK(lo == 0.1);
    CHECK(hi == 0.5);
    const auto [lo2, hi2] = Region::disk(1.0, 0.5).radial_range();
    CHECK_THAT(lo2, WithinAbs(0.5, 1e-15));
    CHECK_THAT(hi2, WithinAbs(1.5, 1e-15));
    CHECK(Region::annulus(0.0, 0.1, 0.5).boundary_circles().size() == 2);
    CHECK(Region::plane().boundary_circles().empty());
}

TEST_CASE("areas of elementary regions")
{
    const auto b = budget(1e-3);
    const MeasureResult d = area(Region::disk(0.3, 0.7), b);
    CHECK_THAT(d.value, WithinRel(kPi * 0.49, 1e-3));
    CHECK(d.error_bound <= 1e-3 * d.value);
    CHECK(std::abs(d.value - kPi * 0.49) <= d.error_bound);
    const MeasureResult a = area(Region::annulus(0.0, 0.5, 1.0), b);
    CHECK_THAT(a.value, WithinRel(0.75 * kPi, 1e-3));
    const MeasureResult u = area(Region::disk(-2.0, 1.0) | Region::disk(2.0, 0.5), b);
    CHECK_THAT(u.value, WithinRel(1.25 * kPi, 1e-3));
    const MeasureResult r = area(Region::riesz_superlevel({0.0}, 2.0), b);
    CHECK_THAT(r.value, WithinRel(kPi / 4.0, 1e-3));
    CHECK_THAT(equiv_radius(kPi * 4.0), WithinRel(2.0, 1e-15));
    CHECK_THROWS_AS(area(Region::plane(), b), Error);
}

TEST_CASE("area of z^n sublevel sets")
{
    const auto b = budget(1e-3);
    for (int n : {3, 9})
        for (double r : {0.5, 2.0}) {
            const MeasureResult m = area(Region::sublevel(monomial(n), r), b);
            CHECK_THAT(m.value, WithinRel(kPi * std::pow(r, 2.0 / n), 1e-3));
        }
}

TEST_CASE("Riesz potential of a disk about its centre")
{
    const MeasureResult m = riesz_potential(Region::disk(0.3, 1.0), 0.3, budget(1e-4));
    CHECK_THAT(m.value, WithinRel(2.0 * kPi, 1e-4));
    // off-centre: 2 integral_0^pi of the chord length from z0, computed by 1-D quadrature
    const double z0 = 0.5;
    const auto chord = quad::integrate(
        [&](double t) {
            const double c = std::cos(t);
            return z0 * c + std::sqrt(1.0 - z0 * z0 * (1.0 - c * c));
        },
        0.0, 2.0 * kPi, 1e-13);
    const MeasureResult off = riesz_potential(Region::disk(0.0, 1.0), z0, budget(1e-4));
    CHECK_THAT(off.value, WithinRel(chord.value, 1e-4));
    const cplx poles[] = {0.0, 0.3};
    const MeasureResult s = riesz_sum(Region::disk(0.0, 1.0), poles, budget(1e-4));
    CHECK_THAT(s.value, WithinRel(2.0 * kPi + riesz_potential(Region::disk(0.0, 1.0), 0.3, budget(1e-4)).value, 1e-4));
}

TEST_CASE("Psi of disks and annuli for z^n - 1")
{
    const CriticalSpec s = family(Family::p0, 9, 0.0);
    const auto b = budget(1e-3);
    for (double r : {0.25, 1.0}) {
        CHECK_THAT(psi_measure(s, Region::disk(0.0, r), b).value, WithinRel(2.0 * 8.0 * r, 1e-3));
        CHECK_THAT(psi_measure(s, Region::annulus(0.0, r / 2, r), b).value, WithinRel(8.0 * r, 1e-3));
    }
}

TEST_CASE("Psi raster")
{
    const CriticalSpec s = family(Family::p0, 3, 0.0);
    const PsiRaster r = psi_raster(s, {-1.0, -1.0, 1.0, 1.0}, 5, 5);
    REQUIRE(r.values.size() == 25);
    CHECK(std::isinf(r.values[12])); // centre cell sits on the double critical point
    CHECK_THAT(r.values[0], WithinRel(2.0 / (kPi * std::abs(cplx(-0.8, -0.8))), 1e-12));
    CHECK_THROWS_AS(psi_raster(s, {-1.0, -1.0, 1.0, 1.0}, 0, 5), Error);
}

TEST_CASE("budget validation")
{
    QuadratureBudget b;
    b.tol = 0.0;
    CHECK_THROWS_MATCHES(b.validate(), Error, Catch::Matchers::Predicate<const Error&>(
        [](const Error& e) { return e.code() == ErrorCode::ConfigError; }));
    b.tol = 1e-6;
    b.max_depth = 0;
    CHECK_THROWS_AS(b.validate(), Error);
    CHECK_THAT(QuadratureBudget{}.loosened(10.0).tol, WithinRel(1e-5, 1e-15));
}
