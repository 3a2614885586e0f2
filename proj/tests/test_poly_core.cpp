#include <catch_amalgamated.hpp>

#include <random>

#include "lemlab/poly_core.hpp"
#include "lemlab/root_solver.hpp"
#include "support.hpp"

using namespace lemlab;
using Catch::Approx;
using testing_support::kSeed;

namespace {

bool coeffs_close(const CoeffPoly& p, std::vector<cplx> expect, double tol = 1e-14)
{
    if (p.degree() + 1 != static_cast<int>(expect.size()))
        return false;
    for (int k = 0; k <= p.degree(); ++k)
        if (std::abs(p[k] - expect[static_cast<std::size_t>(k)]) > tol)
            return false;
    return true;
}

} // namespace

TEST_CASE("critical points expand to coefficients")
{
    CHECK(coeffs_close(from_critical_points(CriticalSpec(3, {0.0, 0.0}, -1.0)), {-1.0, 0.0, 0.0, 1.0}));

    const CriticalSpec e1 = family(Family::example1, 9, 0.5);
    std::vector<cplx> expect(10, 0.0);
    expect[0] = -1.0;
    expect[7] = -(9.0 / 7.0) * 0.25;
    expect[9] = 1.0;
    CHECK(coeffs_close(e1.poly(), expect));

    CHECK(coeffs_close(family(Family::cassini, 2, 3.0).poly(), {-9.0, 0.0, 1.0}));
}

TEST_CASE("coefficient form rejects non-monic input")
{
    CHECK_THROWS_AS(CoeffPoly({1.0, 2.0}), Error);
    CHECK_THROWS_AS(CoeffPoly({1.0}), Error);
    CHECK_THROWS_AS(CriticalSpec(3, {0.0}, -1.0), Error);
}

TEST_CASE("normalize")
{
    SECTION("already normalized")
    {
        const auto r = normalize(CoeffPoly({-1.0, 0.0, 1.0}));
        CHECK(coeffs_close(r.normalized, {-1.0, 0.0, 1.0}));
        CHECK(r.shift == cplx(0.0));
        CHECK(r.rotation == 0.0);
    }
    SECTION("translated and rotated p0")
    {
        // (z - 1)^3 - i
        const CoeffPoly p({cplx(-1.0, -1.0), 3.0, -3.0, 1.0});
        const auto r = normalize(p);
        CHECK(coeffs_close(r.normalized, {-1.0, 0.0, 0.0, 1.0}, 1e-12));
        CHECK(std::abs(r.shift - cplx(-1.0)) < 1e-15);
        // normalized(z) = e^{-3 i theta} p(e^{i theta} z - shift)
        for (cplx z : {cplx(0.3, 0.1), cplx(-1.2, 0.7)}) {
            const cplx lhs = r.normalized(z);
            const cplx rhs = std::polar(1.0, -3.0 * r.rotation) * p(std::polar(1.0, r.rotation) * z - r.shift);
            CHECK(std::abs(lhs - rhs) < 1e-12);
        }
    }
    SECTION("sign of the constant term")
    {
        for (int n : {2, 5, 9}) {
            std::vector<cplx> c(static_cast<std::size_t>(n) + 1, 0.0);
            c[0] = 1.0;
            c.back() = 1.0;
            const auto r = normalize(CoeffPoly(c));
            c[0] = -1.0;
            CHECK(coeffs_close(r.normalized, c, 1e-12));
            CHECK(r.rotation == Approx(kPi / n));
        }
    }
    SECTION("idempotent")
    {
        std::mt19937_64 rng(kSeed);
        for (int t = 0; t < 20; ++t) {
            const CoeffPoly p(testing_support::random_monic(rng, 5, 1.0));
            const auto once = normalize(p);
            const auto twice = normalize(once.normalized);
            for (int k = 0; k <= 5; ++k)
                CHECK(std::abs(once.normalized[k] - twice.normalized[k]) < 1e-12);
            CHECK(std::abs(twice.shift) < 1e-14);
        }
    }
}

TEST_CASE("eval_all")
{
    const CoeffPoly p0_3({-1.0, 0.0, 0.0, 1.0});
    const Derivs d = eval_all(p0_3, 1.0);
    CHECK(d.value == cplx(0.0));
    CHECK(d.first == cplx(3.0));
    CHECK(d.second == cplx(6.0));

    const Derivs e = eval_all(family(Family::p0, 9).poly(), 0.0);
    CHECK(e.value == cplx(-1.0));
    CHECK(e.first == cplx(0.0));
    CHECK(e.second == cplx(0.0));

    std::mt19937_64 rng(kSeed);
    for (int t = 0; t < 50; ++t) {
        const auto c = testing_support::random_monic(rng, 7, 2.0);
        const cplx z = testing_support::random_in_disk(rng, 1.5);
        cplx v = 0.0, d1 = 0.0, d2 = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double kk = static_cast<double>(k);
            v += c[k] * std::pow(z, kk);
            if (k >= 1)
                d1 += kk * c[k] * std::pow(z, kk - 1.0);
            if (k >= 2)
                d2 += kk * (kk - 1.0) * c[k] * std::pow(z, kk - 2.0);
        }
        const Derivs h = eval_all(c, z);
        CHECK(std::abs(h.value - v) <= 1e-12 * std::max(1.0, std::abs(v)));
        CHECK(std::abs(h.first - d1) <= 1e-12 * std::max(1.0, std::abs(d1)));
        CHECK(std::abs(h.second - d2) <= 1e-12 * std::max(1.0, std::abs(d2)));
    }
}

TEST_CASE("log derivatives")
{
    for (int n : {3, 6, 9}) {
        const CoeffPoly p = family(Family::p0, n).poly();
        const cplx z(0.4, 0.9);
        CHECK(std::abs(log_derivatives(p, z).psi - (n - 1.0) / z) < 1e-12);
    }
    const CriticalSpec e1 = family(Family::example1, 9, 0.5);
    const cplx expect = 1.0 / 0.5 + 1.0 / 1.5 + 6.0;
    CHECK(std::abs(log_derivatives(e1.poly(), 1.0).psi - expect) < 1e-12);
    CHECK(std::abs(psi_partial_fractions(e1.critical_points(), 1.0) - expect) < 1e-12);
    CHECK_THROWS_MATCHES(log_derivatives(e1.poly(), 0.5), Error,
        Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::PoleAtZ; }));

    // partial fractions agree with p''/p' away from the critical points
    std::mt19937_64 rng(kSeed);
    for (int t = 0; t < 10; ++t) {
        const CriticalSpec s = testing_support::random_spec(rng, 6, 1.0, 0.5);
        int checked = 0;
        while (checked < 100) {
            const cplx z = testing_support::random_in_disk(rng, 2.0);
            double gap = 1e300;
            for (const cplx& q : s.critical_points())
                gap = std::min(gap, std::abs(z - q));
            if (gap < 1e-3)
                continue;
            const Derivs d = eval_all(s.poly(), z);
            const cplx psi = psi_partial_fractions(s.critical_points(), z);
            CHECK(std::abs(d.second / d.first - psi) <= 1e-8 * std::abs(psi));
            ++checked;
        }
    }
}

TEST_CASE("norms")
{
    const NormBundle z = norms(family(Family::p0, 7));
    CHECK(z.l1_dispersion == 0.0);
    CHECK(z.origin_repulsion == 0.0);
    CHECK(z.total_size == 0.0);
    CHECK(z.l2_dispersion == 0.0);

    for (int n : {3, 9, 14}) {
        const NormBundle a = norms(family(Family::example1, n, 0.3));
        CHECK(a.l1_dispersion == Approx(0.6));
        CHECK(a.origin_repulsion == 0.0);
    }
    // p(0) = -1 - (a/n)^n only keeps (a/n)^n to an absolute 1e-16, so the
    // recoverable precision of ||p||_0 drops quickly with n
    for (auto [n, a, eps] : {std::tuple{3, 0.3, 1e-12}, std::tuple{5, 0.3, 1e-8}, std::tuple{9, 0.5, 1e-5}}) {
        const NormBundle b = norms(family(Family::example2, n, a));
        CHECK(b.l1_dispersion == 0.0);
        CHECK(b.origin_repulsion == Approx(a).epsilon(eps));
    }

    std::mt19937_64 rng(kSeed);
    for (int t = 0; t < 100; ++t) {
        const CriticalSpec s = testing_support::random_spec(rng, 2 + t % 9, 1.5, 0.5);
        const NormBundle b = norms(s);
        CHECK(b.total_size == b.l1_dispersion + b.origin_repulsion);
        CHECK(b.l2_dispersion <= b.l1_dispersion * b.l1_dispersion * (1.0 + 1e-15));
        // Markov count of critical points outside D(0, r)
        for (int i = 1; i <= 20; ++i) {
            const double r = 0.1 * i;
            int outside = 0;
            for (const cplx& q : s.critical_points())
                outside += std::abs(q) >= r;
            CHECK(outside <= b.l1_dispersion / r + 1e-12);
        }
    }
}

TEST_CASE("dispersion splitting holds with the fitted constant")
{
    // ||p||_1 <= C (sum_{|zeta| >= r} |zeta| + n Disp{zeta in D(0,r)}) for r >= 2||p||_1 / n
    std::mt19937_64 rng(kSeed);
    constexpr double C = 8.0;
    int warnings = 0;
    for (int t = 0; t < 200; ++t) {
        const int n = 3 + t % 10;
        const CriticalSpec s = testing_support::random_spec(rng, n, 1.0);
        const double l1 = norms(s).l1_dispersion;
        for (double factor : {2.0, 3.0, 5.0}) {
            const double r = factor * l1 / n;
            double far = 0.0;
            std::vector<cplx> near;
            for (const cplx& q : s.critical_points()) {
                if (std::abs(q) >= r)
                    far += std::abs(q);
                else
                    near.push_back(q);
            }
            if (l1 > C * (far + n * disp_l1(near)) + 1e-12)
                ++warnings;
        }
    }
    CHECK(warnings == 0);
}

TEST_CASE("delta")
{
    CHECK(delta(family(Family::p0, 5), cplx(0.3, -2.0)) == Approx(1.0));
    CHECK(delta(family(Family::example1, 9, 0.5), 1.0) == Approx(0.5));
    CHECK_THROWS_MATCHES(delta(family(Family::p0, 5), 0.0), Error,
        Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::OriginInput; }));
}

TEST_CASE("conjugate")
{
    CHECK(conjugate(family(Family::p0, 4).poly()) == family(Family::p0, 4).poly());
    const CoeffPoly q({3.0, cplx(0.0, -1.0), 1.0});
    CHECK(conjugate(q) == CoeffPoly({3.0, cplx(0.0, 1.0), 1.0}));
    std::mt19937_64 rng(kSeed);
    for (int t = 0; t < 50; ++t) {
        const CoeffPoly p(testing_support::random_monic(rng, 6, 1.0));
        const cplx z = testing_support::random_in_disk(rng, 1.3);
        CHECK(std::abs(conjugate(p)(std::conj(z)) - std::conj(p(z))) <= 1e-12);
    }
}

TEST_CASE("families")
{
    const CriticalSpec a = family(Family::p0, 9);
    CHECK(a.critical_points().size() == 8);
    CHECK(a.constant_term() == cplx(-1.0));
    CHECK(a.is_normalized());

    const CriticalSpec b = family(Family::example2, 9, 0.5);
    CHECK(b.constant_term().real() == Approx(-1.0 - std::pow(1.0 / 18.0, 9)).epsilon(1e-15));
    CHECK(b.is_normalized());

    CHECK_THROWS_AS(family(Family::example1, 2, 0.5), Error);
    CHECK_THROWS_AS(family(Family::example1, 9, 1.5), Error);
    CHECK_THROWS_AS(family(Family::example2, 9, 0.0), Error);
    CHECK_THROWS_AS(family(Family::cassini, 3, 1.0), Error);
    CHECK(parse_family("example2") == Family::example2);
    CHECK_THROWS_AS(parse_family("nope"), Error);
}

TEST_CASE("builder recentres small mean drift")
{
    const CriticalSpec s = CriticalSpec::normalized(3, {cplx(1.0, 0.0), cplx(-0.5, 0.0)}, -1.0);
    const cplx sum = s.critical_points()[0] + s.critical_points()[1];
    CHECK(std::abs(sum) < 1e-15);
    CHECK(s.is_normalized());
    CHECK_THROWS_AS(CriticalSpec::normalized(3, {0.0, 0.0}, 0.5), Error);
    CHECK_FALSE(CriticalSpec(3, {1.0, 0.0}, -1.0).is_normalized());
}

TEST_CASE("critical point round trip")
{
    std::mt19937_64 rng(kSeed);
    for (int t = 0; t < 40; ++t) {
        const int n = 2 + t % 15;
        const CriticalSpec s = testing_support::random_spec(rng, n, 2.0, 0.5);
        const RootSet rs = critical_points(s.poly());
        REQUIRE(rs.roots.size() == s.critical_points().size());
        std::vector<bool> used(rs.roots.size(), false);
        for (const cplx& q : s.critical_points()) {
            double best = 1e300;
            std::size_t arg = 0;
            for (std::size_t i = 0; i < rs.roots.size(); ++i)
                if (!used[i] && std::abs(rs.roots[i] - q) < best) {
                    best = std::abs(rs.roots[i] - q);
                    arg = i;
                }
            used[arg] = true;
            CHECK(best <= 1e-8);
        }
        CHECK(std::abs(s.poly()(0.0) - s.constant_term()) < 1e-15);
    }
}
