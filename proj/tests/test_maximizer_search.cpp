#include <catch_amalgamated.hpp>

#include <cmath>

#include "lemlab/maximizer_search.hpp"
#include "support.hpp"

using namespace lemlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

QuadratureBudget budget(double tol)
{
    QuadratureBudget b;
    b.tol = tol;
    return b;
}

} // namespace

TEST_CASE("parameter encoding")
{
    CHECK(search_dimension(3) == 3);
    CHECK(search_dimension(9) == 15);
    const CriticalSpec p0 = decode(4, p0_params(4));
    CHECK(p0.poly() == family(Family::p0, 4).poly());
    CHECK(p0.is_normalized());

    std::mt19937_64 rng(testing_support::kSeed);
    for (int i = 0; i < 20; ++i) {
        const CriticalSpec s = testing_support::random_spec(rng, 3 + i % 6, 0.5, 0.5);
        const CriticalSpec back = decode(s.degree(), encode(s));
        CHECK(back.is_normalized());
        for (std::size_t k = 0; k < s.critical_points().size(); ++k)
            CHECK(std::abs(back.critical_points()[k] - s.critical_points()[k]) <= 1e-12);
        CHECK(std::abs(back.constant_term() - s.constant_term()) <= 1e-12);
    }
    // |s| is the origin repulsion
    std::vector<double> x = p0_params(5);
    x.back() = 0.7;
    CHECK_THAT(norms(decode(5, x)).origin_repulsion, WithinRel(0.7, 1e-12));
    x.back() = 50.0; // clamped to p(0) = 0
    CHECK(decode(5, x).constant_term() == cplx(0.0));
    CHECK_THROWS_AS(decode(5, p0_params(4)), Error);
}

TEST_CASE("objective")
{
    const auto b = budget(1e-8);
    CHECK_THAT(objective(3, p0_params(3), b), WithinRel(length_p0_closed(3), 1e-9));
    CHECK_THAT(objective(3, p0_params(3), b), WithinAbs(9.1797, 1e-4));
    const double e1 = objective(9, encode(family(Family::example1, 9, 0.5)), b);
    CHECK(std::abs(e1 - (length_p0_closed(9) - 2.0)) <= 0.4);
    // all free critical points at 1
    const double deg = objective(5, std::vector<double>{1, 0, 1, 0, 1, 0, 0}, b);
    CHECK(std::isfinite(deg));
    CHECK(deg > 0.0);
}

TEST_CASE("Nelder-Mead minimizes a quadratic and tolerates infinities")
{
    auto f = [](const std::vector<double>& x) {
        if (x[0] > 3.0)
            return std::numeric_limits<double>::infinity();
        return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 0.5) * (x[1] + 0.5);
    };
    const auto r = detail::nelder_mead(f, {2.9, 2.0}, 0.5, 1e-9, 2000);
    CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-6));
    CHECK_THAT(r.x[1], WithinAbs(-0.5, 1e-6));
    for (std::size_t i = 1; i < r.history.size(); ++i)
        CHECK(r.history[i].second <= r.history[i - 1].second);
}

TEST_CASE("search from z^n - 1 stays there and is deterministic")
{
    SearchOptions o;
    o.restarts = 2;
    const SearchReport a = local_search(3, p0_params(3), budget(1e-8), o);
    CHECK(a.best_norm <= 0.01);
    CHECK(a.converged_to_p0);
    CHECK_THAT(a.best.objective, WithinRel(length_p0_closed(3), 1e-8));
    const SearchReport b = local_search(3, p0_params(3), budget(1e-8), o);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i)
        CHECK(std::abs(a.history[i].objective - b.history[i].objective) <= 1e-12);
}

TEST_CASE("random starts settle on z^n - 1")
{
    int hits = 0;
    const int starts = 10;
    for (int k = 0; k < starts; ++k) {
        std::mt19937_64 rng(testing_support::kSeed + static_cast<std::uint64_t>(k));
        const auto x = perturbation(3, 0.3, Direction::random, rng);
        CHECK_THAT(param_norm(3, x), WithinRel(0.3, 1e-3));
        SearchOptions o;
        o.restarts = 1;
        hits += local_search(3, x, budget(1e-6), o).best_norm <= 0.05;
    }
    CHECK(hits >= 8);
}

TEST_CASE("perturbation studies")
{
    const auto b = budget(1e-8);
    const PerturbationStudy zero = perturbation_study(4, {0.0}, 3, 1, b);
    REQUIRE(zero.samples.size() == 3);
    for (const auto& s : zero.samples)
        CHECK_THAT(s.delta, WithinAbs(0.0, 1e-9));

    // |p| = 2a along the first family, so a = 1/2 is magnitude 1
    const PerturbationStudy e1 = perturbation_study(9, {0.25, 1.0}, 1, 1, b, Direction::example1);
    CHECK(e1.c_fit >= 0.5);
    CHECK(e1.c_fit <= 2.5);
    CHECK_THAT(e1.samples.back().delta, WithinAbs(2.0534544908, 1e-8));
    const PerturbationStudy e2 = perturbation_study(9, {0.25, 0.5}, 1, 1, b, Direction::example2);
    CHECK(e2.c_fit >= 0.5);
    CHECK(e2.c_fit <= 2.5);
    CHECK(e2.samples.back().delta > 0.5);
    CHECK(e2.samples.back().delta < 1.0);

    const PerturbationStudy r = perturbation_study(4, {0.05, 0.2}, 10, testing_support::kSeed, b);
    CHECK(r.failures == 0);
    REQUIRE(r.per_magnitude.size() == 2);
    for (const auto& m : r.per_magnitude) {
        CHECK(m.count == 10);
        CHECK(m.min_delta > 0.0);
    }
    CHECK_THROWS_AS(perturbation_study(2, {0.1}, 1, 1, b), Error);
}
