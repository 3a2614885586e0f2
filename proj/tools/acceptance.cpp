// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Optional arguments select criteria by number, e.g. `lemlab_acceptance 1 5`.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "lemlab/lemlab.hpp"

using namespace lemlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

QuadratureBudget budget(double tol)
{
    QuadratureBudget b;
    b.tol = tol;
    return b;
}

CoeffPoly monomial(int n)
{
    std::vector<cplx> c(static_cast<std::size_t>(n) + 1, 0.0);
    c.back() = 1.0;
    return CoeffPoly(c);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome ac1()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int n = 2; n <= 12; ++n) {
        const double v = length_fiber(family(Family::p0, n), Region::plane(), budget(1e-8)).length;
        worst = std::max(worst, std::abs(v / length_p0_closed(n) - 1.0));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-6 && t <= 30.0, fmt("max rel err %.2e, %.1f s", worst, t)};
}

Outcome ac2()
{
    double worst = 0.0;
    for (int n = 4; n <= 40; ++n)
        worst = std::max(worst, std::abs(length_p0_closed(n) - length_p0_asymptote(n)) * n);
    const double a3 = length_p0_asymptote(3), a9 = length_p0_asymptote(9);
    const bool figs = std::abs(a3 - 8.773) < 5e-4 && std::abs(a9 - 20.773) < 5e-4;
    return {worst <= 3.0 && figs, fmt("max n|l - (2n + 4 log 2)| = %.4f; asymptote n=3 %.4f, n=9 %.4f", worst, a3, a9)};
}

Outcome ac3()
{
    const double d = length_p0_closed(9)
        - length_fiber(family(Family::example1, 9, 0.5), Region::plane(), budget(1e-8)).length;
    return {d >= 1.6 && d <= 2.4, fmt("delta %.6f", d)};
}

Outcome ac4()
{
    const double d = length_p0_closed(9)
        - length_fiber(family(Family::example2, 9, 0.5), Region::plane(), budget(1e-8)).length;
    return {d > 0.5 && d < 1.0, fmt("delta %.6f", d)};
}

Outcome ac5(const Calibration& cal)
{
    double worst = 0.0;
    for (int n : {3, 6, 9})
        for (double r : {0.5, 1.0, 2.0}) {
            const double a = area(Region::sublevel(monomial(n), r), budget(1e-4)).value;
            worst = std::max(worst, std::abs(a / (kPi * std::pow(r, 2.0 / n)) - 1.0));
        }
    BatteryOptions bo;
    bo.only = {"polya"};
    const BatteryResult br = run_battery(cal, bo);
    return {worst <= 1e-3 && br.reports.size() >= 100 && br.hard_failures() == 0,
        fmt("monomial max rel err %.2e; random monic checks %.0f, violations %.0f", worst,
            static_cast<double>(br.reports.size()), static_cast<double>(br.hard_failures()))};
}

Outcome ac6()
{
    std::mt19937_64 rng(kDefaultSeed + 6);
    int bad = 0;
    double worst_ratio = 0.0;
    for (int i = 0; i < 10; ++i) {
        const CriticalSpec s = detail::random_spec(rng, 3 + i % 7, 0.3, 0.2);
        for (double R : {2.0, 4.0}) {
            const LaurentData l = laurent_coeffs(s.poly(), R);
            const MeasureResult m = area(Region::sublevel(s.poly(), R), budget(1e-4));
            const double diff = std::abs(gronwall_area(l) - m.value);
            const double allowed = m.error_bound + gronwall_error(l);
            worst_ratio = std::max(worst_ratio, diff / allowed);
            bad += diff > allowed;
        }
    }
    return {bad == 0, fmt("20 comparisons, worst |diff| / combined bound %.3f", worst_ratio)};
}

Outcome ac7()
{
    double worst = 0.0;
    for (int n : {3, 9})
        for (double r : {0.25, 0.5, 1.0}) {
            const CriticalSpec s = family(Family::p0, n);
            const double d = psi_measure(s, Region::disk(0.0, r), budget(1e-4)).value;
            const double a = psi_measure(s, Region::annulus(0.0, 0.5 * r, r), budget(1e-4)).value;
            worst = std::max({worst, std::abs(d / (2.0 * (n - 1) * r) - 1.0), std::abs(a / ((n - 1) * r) - 1.0)});
        }
    return {worst <= 1e-3, fmt("max rel err %.2e", worst)};
}

Outcome ac8(const Calibration& cal)
{
    const auto t0 = std::chrono::steady_clock::now();
    const BatteryResult br = run_battery(cal, {});
    const double t = seconds_since(t0);
    std::size_t hard = 0;
    for (const auto& r : br.reports)
        hard += r.hard;
    return {br.hard_failures() == 0 && br.reports.size() >= 10000 && t <= 300.0,
        fmt("%.0f trials (%.0f hard), hard violations ", static_cast<double>(br.reports.size()),
            static_cast<double>(hard))
            + std::to_string(br.hard_failures()) + ", fitted regressions " + std::to_string(br.fitted_failures())
            + fmt(", %.1f s", t)};
}

Outcome ac9()
{
    int negative = 0, total = 0;
    double min_delta = INFINITY;
    for (int n = 3; n <= 6; ++n) {
        std::mt19937_64 rng(kDefaultSeed + static_cast<std::uint64_t>(n));
        std::uniform_real_distribution<double> u(0.01, 0.3);
        std::vector<double> mags;
        for (int i = 0; i < 200; ++i)
            mags.push_back(u(rng));
        const PerturbationStudy st = perturbation_study(n, mags, 1, kDefaultSeed + 100 + static_cast<std::uint64_t>(n),
            budget(1e-8));
        for (const auto& s : st.samples) {
            ++total;
            negative += !(s.delta > 0.0 && s.norm >= 0.01 - 1e-12);
            min_delta = std::min(min_delta, s.delta);
        }
        negative += st.failures;
    }
    double escape = 0.0;
    for (int n = 3; n <= 6; ++n) {
        SearchOptions so;
        so.restarts = 2;
        const SearchReport r = local_search(n, p0_params(n), budget(1e-8), so);
        escape = std::max(escape, r.best_norm);
    }
    return {negative == 0 && total == 800 && escape <= 0.01,
        fmt("%.0f perturbations, min delta %.4f, search from p0 ends at |p| = %.2e", total, min_delta, escape)
            + (negative ? ", " + std::to_string(negative) + " bad" : std::string())};
}

Outcome ac10()
{
    std::mt19937_64 rng(kDefaultSeed + 10);
    const auto b = budget(1e-8);
    int bad = 0, count = 0;
    double worst = 0.0;
    while (count < 20) {
        const int n = 2 + count % 8;
        CriticalSpec s = detail::random_spec(rng, n, 0.6, 0.3);
        const double l1 = norms(s).l1_dispersion;
        if (l1 > 1.0) {
            std::vector<cplx> z(s.critical_points().begin(), s.critical_points().end());
            for (cplx& q : z)
                q /= l1;
            s = CriticalSpec::normalized(n, std::move(z), s.constant_term().real());
        }
        bool near_curve = false;
        for (const cplx& q : s.critical_points())
            near_curve = near_curve || std::abs(std::abs(s.poly()(q)) - 1.0) < 1e-2;
        if (near_curve)
            continue;
        ++count;
        Region om = Region::plane() & ~Region::disk(0.0, 0.05);
        for (const cplx& q : s.critical_points())
            om = om & ~Region::disk(q, 0.05);
        const LengthResult f = length_fiber(s, om, b);
        const LengthResult r = length_radial(s, om, b);
        const LengthResult t = length_trace(s.poly(), om, b);
        const double errs = f.error_estimate + r.error_estimate + t.error_estimate;
        const double allowed = std::max(1e-3 * f.length, errs);
        const double d = std::max({std::abs(f.length - r.length), std::abs(f.length - t.length),
            std::abs(r.length - t.length)});
        worst = std::max(worst, d / f.length);
        bad += d > allowed;
    }
    return {bad == 0, fmt("20 polynomials, max pairwise rel diff %.2e", worst)};
}

Outcome ac11()
{
    std::mt19937_64 rng(kDefaultSeed + 11);
    double cap = 0.0, a0 = 0.0;
    for (int i = 0; i < 20; ++i) {
        const CriticalSpec s = detail::random_spec(rng, 3 + i % 7, 0.3, 0.2);
        for (double R : {2.0, 4.0}) {
            const LaurentData d = laurent_coeffs(s.poly(), R);
            cap = std::max(cap, d.capacity_check);
            a0 = std::max(a0, std::abs(d.a0));
        }
    }
    double lead = 0.0;
    for (int n : {3, 5, 9, 12}) {
        const LaurentData d = laurent_coeffs(family(Family::p0, n).poly(), 4.0);
        lead = std::max(lead, std::abs(d.coeffs[static_cast<std::size_t>(n) - 2] - 1.0 / n) * n);
    }
    return {cap <= 1e-6 && a0 <= 1e-6 && lead <= 0.02,
        fmt("max |a_-1 - 1| %.1e, max |a_0| %.1e, max n|a_(n-1) - 1/n| %.1e", cap, a0, lead)};
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::atoi(argv[i]));
    Calibration cal;
    try {
        cal = load_calibration();
    } catch (const Error& e) {
        std::printf("cannot load calibration: %s\n", e.what());
        return 1;
    }
    const std::vector<std::function<Outcome()>> acs = {ac1, ac2, ac3, ac4, [&] { return ac5(cal); }, ac6, ac7,
        [&] { return ac8(cal); }, ac9, ac10, ac11};
    int failed = 0;
    for (std::size_t i = 0; i < acs.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id))
            continue;
        Outcome o;
        try {
            o = acs[i]();
        } catch (const Error& e) {
            o = {false, std::string("error ") + std::string(to_string(e.code())) + ": " + e.what()};
        }
        std::printf("AC-%d %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
