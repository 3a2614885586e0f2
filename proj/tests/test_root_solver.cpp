#include <catch_amalgamated.hpp>

#include <random>

#include "lemlab/root_solver.hpp"
#include "support.hpp"

using namespace lemlab;
using testing_support::kSeed;

namespace {

double nearest(std::span<const cplx> xs, cplx z)
{
    double d = 1e300;
    for (const cplx& x : xs)
        d = std::min(d, std::abs(x - z));
    return d;
}

} // namespace

TEST_CASE("roots of unity and Cassini roots")
{
    const RootSet a = all_roots(family(Family::p0, 3).poly());
    REQUIRE(a.converged);
    REQUIRE(a.roots.size() == 3);
    for (int k = 0; k < 3; ++k)
        CHECK(nearest(a.roots, std::polar(1.0, 2.0 * kPi * k / 3)) < 1e-14);

    const RootSet b = all_roots(family(Family::cassini, 2, 1.7).poly());
    CHECK(nearest(b.roots, 1.7) < 1e-14);
    CHECK(nearest(b.roots, -1.7) < 1e-14);
}

TEST_CASE("critical points of example 1")
{
    const RootSet rs = critical_points(family(Family::example1, 9, 0.5).poly());
    REQUIRE(rs.roots.size() == 8);
    const auto cl = rs.clusters(1e-6);
    int zeros = 0, plus = 0, minus = 0;
    for (const cplx& z : rs.roots) {
        if (std::abs(z) < 1e-2)
            ++zeros;
        else if (std::abs(z - 0.5) < 1e-10)
            ++plus;
        else if (std::abs(z + 0.5) < 1e-10)
            ++minus;
    }
    CHECK(zeros == 6);
    CHECK(plus == 1);
    CHECK(minus == 1);
    // sextuple root at 0 was split off exactly, so it clusters into one entry
    CHECK(cl.size() == 3);
}

TEST_CASE("residuals meet the relative tolerance")
{
    std::mt19937_64 rng(kSeed);
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 30;
        const CoeffPoly p(testing_support::random_monic(rng, n, 3.0));
        const RootSet rs = all_roots(p);
        REQUIRE(rs.roots.size() == static_cast<std::size_t>(n));
        CHECK(rs.converged);
        for (std::size_t k = 0; k < rs.roots.size(); ++k)
            CHECK(rs.residuals[k] <= 1e-10 * p.scale() * std::pow(std::max(1.0, std::abs(rs.roots[k])), n));
    }
}

TEST_CASE("fiber of p0")
{
    for (int n : {3, 9}) {
        const CoeffPoly p = family(Family::p0, n).poly();
        for (double alpha : {0.1, 1.3, 2.9}) {
            const cplx w = std::polar(1.0, alpha);
            const RootSet rs = fiber(p, w);
            REQUIRE(rs.converged);
            const double mod = std::pow(std::abs(1.0 + w), 1.0 / n);
            for (const cplx& z : rs.roots) {
                CHECK(std::abs(std::abs(z) - mod) < 1e-12);
                CHECK(std::abs(std::pow(z, n) - 1.0 - w) < 1e-12);
            }
        }
    }
}

TEST_CASE("constructed fibers contain their seed and factor p - w")
{
    std::mt19937_64 rng(kSeed);
    for (int t = 0; t < 30; ++t) {
        const CriticalSpec s = testing_support::random_spec(rng, 2 + t % 8, 1.0, 0.3);
        const cplx z0 = testing_support::random_in_disk(rng, 1.5);
        const cplx w = s.poly()(z0);
        const RootSet rs = fiber(s.poly(), w);
        CHECK(nearest(rs.roots, z0) < 1e-8);
        const std::vector<cplx> prod = poly_from_roots(rs.roots);
        for (int k = 0; k < 10; ++k) {
            const cplx probe = testing_support::random_in_disk(rng, 2.0);
            const cplx lhs = horner(prod, probe);
            const cplx rhs = s.poly()(probe) - w;
            CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("double root fiber clusters")
{
    const RootSet rs = fiber(CoeffPoly({-1.0, 0.0, 1.0}), -1.0);
    REQUIRE(rs.roots.size() == 2);
    CHECK(std::abs(rs.roots[0]) < 1e-12);
    CHECK(std::abs(rs.roots[1]) < 1e-12);
    const auto cl = rs.clusters(1e-6);
    REQUIRE(cl.size() == 1);
    CHECK(cl[0].multiplicity == 2);
}

TEST_CASE("warm started sweep keeps branch order")
{
    for (int n : {3, 6, 9}) {
        const CoeffPoly p = family(Family::p0, n).poly();
        RootSet prev = fiber(p, std::polar(1.0, -3.0));
        const double gap = 2.0 * std::sin(kPi / n) * std::pow(std::abs(1.0 + std::polar(1.0, 3.0)), 1.0 / n);
        for (int j = 1; j <= 120; ++j) {
            const double alpha = -3.0 + 6.0 * j / 120.0;
            const RootSet next = fiber(p, std::polar(1.0, alpha), &prev);
            REQUIRE(next.converged);
            for (std::size_t k = 0; k < next.roots.size(); ++k)
                CHECK(std::abs(next.roots[k] - prev.roots[k]) < 0.5 * gap);
            prev = next;
        }
    }
}

TEST_CASE("circle intersections")
{
    SECTION("p0 inside the unit disk meets every circle 2n times")
    {
        const CoeffPoly p = family(Family::p0, 9).poly();
        for (double r : {0.1, 0.5, 0.9, 0.99}) {
            const CircleSection cs = circle_intersections(p, r);
            CHECK_FALSE(cs.full_circle);
            CHECK(cs.points.size() == 18);
            for (const auto& pt : cs.points) {
                CHECK(std::abs(std::abs(p(pt.z)) - 1.0) < 1e-9);
                CHECK(std::abs(std::abs(pt.z) - r) < 1e-12);
            }
        }
    }
    SECTION("disjoint circles")
    {
        const CircleSection cs = circle_intersections(CoeffPoly({-100.0, 1.0}), 1.0);
        CHECK(cs.points.empty());
        CHECK_FALSE(cs.full_circle);
    }
    SECTION("identity polynomial on the unit circle")
    {
        CHECK(circle_intersections(CoeffPoly({0.0, 1.0}), 1.0).full_circle);
        CHECK_FALSE(circle_intersections(CoeffPoly({0.0, 1.0}), 0.5).full_circle);
    }
    SECTION("tangency is reported as one clustered point")
    {
        // |z - 2| = 1 touches |z| = 1 at z = 1
        const CircleSection cs = circle_intersections(CoeffPoly({-2.0, 1.0}), 1.0);
        REQUIRE(cs.points.size() == 1);
        CHECK(cs.points[0].multiplicity == 2);
        CHECK(cs.tangent());
        CHECK(std::abs(cs.points[0].z - 1.0) < 1e-6);
    }
    SECTION("Bezout bound")
    {
        std::mt19937_64 rng(kSeed);
        std::uniform_real_distribution<double> ur(0.05, 2.0);
        for (int t = 0; t < 200; ++t) {
            const int n = 1 + t % 10;
            const CoeffPoly p(testing_support::random_monic(rng, n, 1.0));
            const double r = ur(rng);
            const CircleSection cs = circle_intersections(p, r);
            CHECK((cs.full_circle || cs.points.size() <= static_cast<std::size_t>(2 * n)));
            for (const auto& pt : cs.points)
                CHECK(std::abs(std::abs(p(pt.z)) - 1.0) < 1e-6);
        }
    }
}
