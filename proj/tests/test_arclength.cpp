#include <catch_amalgamated.hpp>

#include <cmath>

#include "lemlab/arclength.hpp"
#include "support.hpp"

using namespace lemlab;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

CoeffPoly p0(int n)
{
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1, 0.0);
    c[0] = -1.0;
    c.back() = 1.0;
    return CoeffPoly(c);
}

QuadratureBudget budget(double tol)
{
    QuadratureBudget b;
    b.tol = tol;
    return b;
}

auto has_code(ErrorCode c)
{
    return Catch::Matchers::Predicate<const Error&>([c](const Error& e) { return e.code() == c; },
        std::string("error code ") + std::string(to_string(c)));
}

} // namespace

TEST_CASE("unit circle")
{
    const CoeffPoly z({0.0, 1.0});
    CHECK_THAT(length_fiber(z, Region::plane(), budget(1e-10)).length, WithinRel(2.0 * kPi, 1e-12));
    CHECK_THAT(trace_lemniscate(z, 1.0, budget(1e-6)).total_length(), WithinRel(2.0 * kPi, 1e-6));
    // the curve is a circle about the origin, so the radial formula has no transversal crossings
    CHECK_THROWS_MATCHES(length_radial(z, Region::plane(), budget(1e-8)), Error,
        has_code(ErrorCode::TransversalityFailure));
}

TEST_CASE("fiber length of z^n - 1 matches the beta function form")
{
    for (int n = 2; n <= 12; ++n) {
        const LengthResult r = length_fiber(p0(n), Region::plane(), budget(1e-9));
        CHECK_THAT(r.length, WithinRel(length_p0_closed(n), 1e-9));
        CHECK(r.method == LengthMethod::fiber);
    }
    CHECK_THAT(length_p0_closed(2), WithinRel(7.4162987092054877, 1e-14));
    CHECK_THAT(length_p0_closed(3), WithinRel(9.1797242223431572, 1e-14));
    CHECK_THAT(length_p0_closed(9), WithinRel(20.899111801667082, 1e-14));
    CHECK_THAT(length_p0_closed(12), WithinRel(26.866651413612809, 1e-14));
    CHECK_THAT(length_p0_closed(1), WithinRel(2.0 * kPi, 1e-14));
}

TEST_CASE("z^n - 1 length approaches 2n + 4 log 2")
{
    CHECK_THAT(length_p0_asymptote(3), WithinAbs(8.7725887222, 1e-9));
    CHECK_THAT(length_p0_asymptote(9), WithinAbs(20.7725887222, 1e-9));
    for (int n = 4; n <= 40; ++n)
        CHECK(std::abs(length_p0_closed(n) - length_p0_asymptote(n)) * n <= 3.0);
}

TEST_CASE("outer part of the z^n - 1 lemniscate")
{
    // inside |z| < r0 the curve is 2n nearly straight spokes
    for (int n : {3, 9})
        for (double r0 : {1e-3, 0.05}) {
            const double outer = length_p0_outer(n, r0);
            CHECK(std::abs(outer - (length_p0_closed(n) - 2.0 * n * r0)) <= 1e-5);
        }
    CHECK_THAT(length_p0_outer(9, 0.0), WithinRel(length_p0_closed(9), 1e-12));
    const double ann = length_fiber(p0(9), Region::annulus(0.0, 0.1, 0.5), budget(1e-10)).length;
    CHECK_THAT(ann, WithinRel(length_p0_outer(9, 0.1) - length_p0_outer(9, 0.5), 1e-9));
    CHECK_THAT(ann, WithinRel(7.2, 1e-6));
    CHECK_THROWS_AS(length_p0_outer(9, 1.5), Error);
}

TEST_CASE("radial formula on z^n - 1")
{
    const double full = length_radial(p0(9), Region::plane(), budget(1e-10)).length;
    CHECK_THAT(full, WithinRel(length_p0_closed(9), 1e-9));
    const double ann = length_radial(p0(9), Region::annulus(0.0, 0.1, 0.5), budget(1e-10)).length;
    CHECK_THAT(ann, WithinRel(length_p0_outer(9, 0.1) - length_p0_outer(9, 0.5), 1e-9));
}

TEST_CASE("example families shorten the lemniscate")
{
    const double l0 = length_p0_closed(9);
    const CriticalSpec e1 = family(Family::example1, 9, 0.5);
    const CriticalSpec e2 = family(Family::example2, 9, 0.5);
    const double d1 = l0 - length_fiber(e1, Region::plane(), budget(1e-10)).length;
    const double d2 = l0 - length_fiber(e2, Region::plane(), budget(1e-10)).length;
    CHECK_THAT(d1, WithinAbs(2.0534544908, 1e-8));
    CHECK_THAT(d2, WithinAbs(0.9207686215, 1e-8));
    CHECK(d1 >= 1.6);
    CHECK(d1 <= 2.4);
    CHECK(d2 > 0.5);
    CHECK(d2 < 1.0);
    // the coefficient form finds the same critical points itself
    CHECK_THAT(length_fiber(e1.poly(), Region::plane(), budget(1e-10)).length, WithinAbs(l0 - d1, 1e-7));
    CHECK_THAT(length_radial(e1, Region::plane(), budget(1e-10)).length, WithinAbs(l0 - d1, 1e-6));
    CHECK_THAT(length_radial(e2, Region::plane(), budget(1e-10)).length, WithinAbs(l0 - d2, 1e-6));
}

TEST_CASE("Cassini ovals grow towards the lemniscate of Bernoulli")
{
    double prev = 0.0;
    for (double r : {0.1, 0.5, 0.9, 0.99}) {
        const double l = length_fiber(family(Family::cassini, 2, r), Region::plane(), budget(1e-10)).length;
        CHECK(l > prev);
        CHECK(l < length_p0_closed(2));
        prev = l;
    }
    CHECK_THAT(length_fiber(family(Family::cassini, 2, 1.0), Region::plane(), budget(1e-10)).length,
        WithinRel(length_p0_closed(2), 1e-10));
}

TEST_CASE("excluding critical points on the curve")
{
    LengthOptions opt;
    opt.eps_crit = 0.05;
    const LengthResult r = length_fiber(p0(9), Region::plane(), budget(1e-10), opt);
    CHECK_THAT(r.length, WithinRel(length_p0_outer(9, 0.05), 1e-9));
    CHECK_THAT(r.excluded_measure, WithinRel(2.0 * kPi * 0.05 * 8, 1e-12));
}

TEST_CASE("other level sets")
{
    // |z^n| = R is the circle of radius R^{1/n}
    LengthOptions opt;
    opt.level = 8.0;
    const CoeffPoly z3({0.0, 0.0, 0.0, 1.0});
    CHECK_THAT(length_fiber(z3, Region::plane(), budget(1e-10), opt).length, WithinRel(4.0 * kPi, 1e-10));
    opt.level = 0.0;
    CHECK_THROWS_MATCHES(length_fiber(z3, Region::plane(), budget(1e-10), opt), Error,
        has_code(ErrorCode::BadParameter));
}

TEST_CASE("quadrature budget is enforced")
{
    QuadratureBudget b = budget(1e-14);
    b.max_panels = 3;
    CHECK_THROWS_MATCHES(length_fiber(family(Family::example1, 9, 0.5), Region::plane(), b), Error,
        has_code(ErrorCode::BudgetExceeded));
}

TEST_CASE("tracing z^n - 1")
{
    const Trace t = trace_lemniscate(p0(9), 1.0, budget(1e-6));
    REQUIRE(t.components.size() == 1);
    CHECK(t.closed_flags[0]);
    CHECK(t.critical_flags[0]);
    CHECK_THAT(t.total_length(), WithinRel(length_p0_closed(9), 1e-5));
    for (const cplx& z : t.components[0])
        CHECK(std::abs(std::abs(p0(9)(z)) - 1.0) <= 1e-10);
    const double ann = trace_length_within(t, Region::annulus(0.0, 0.1, 0.5));
    CHECK_THAT(ann, WithinRel(7.2, 1e-5));
}

TEST_CASE("lemniscate of Bernoulli is one component through the origin")
{
    const Trace t = trace_lemniscate(p0(2), 1.0, budget(1e-6));
    REQUIRE(t.components.size() == 1);
    CHECK(t.closed_flags[0]);
    CHECK(t.critical_flags[0]);
    CHECK_THAT(t.total_length(), WithinRel(length_p0_closed(2), 1e-5));
}

TEST_CASE("tracing separated components")
{
    const Trace t = trace_lemniscate(family(Family::example2, 9, 0.5).poly(), 1.0, budget(1e-6));
    CHECK(t.components.size() == 9);
    for (std::size_t i = 0; i < t.components.size(); ++i) {
        CHECK(t.closed_flags[i]);
        CHECK_FALSE(t.critical_flags[i]);
    }
    CHECK_THAT(t.total_length(), WithinRel(length_p0_closed(9) - 0.9207686215, 1e-4));
    const Trace c = trace_lemniscate(family(Family::cassini, 2, 1.2).poly(), 1.0, budget(1e-6));
    CHECK(c.components.size() == 2);
}

TEST_CASE("fiber, radial and trace agree away from critical points")
{
    std::mt19937_64 rng(testing_support::kSeed);
    const auto b = budget(1e-8);
    for (int i = 0; i < 12; ++i) {
        const int n = 3 + i % 6;
        const CriticalSpec s = testing_support::random_spec(rng, n, 0.6, 0.3);
        Region om = Region::plane();
        for (const cplx& z : s.critical_points())
            om = om & ~Region::disk(z, 0.05);
        const LengthResult f = length_fiber(s, om, b);
        const LengthResult r = length_radial(s, om, b);
        const LengthResult t = length_trace(s.poly(), om, b);
        CHECK_THAT(r.length, WithinRel(f.length, 1e-8));
        CHECK_THAT(t.length, WithinRel(f.length, 1e-5));
    }
}
