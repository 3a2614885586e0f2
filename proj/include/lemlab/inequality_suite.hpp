#pragma once

// Executable forms of the triangle-defect lemmas, the Psi bounds, the Riesz
// potential bounds and the length vs Psi(E_2) chain. Every check returns a
// VerificationReport with both sides filled in.
//
// Constants that the mathematics leaves non-effective are fitted once by
// calibrate() on a fixed seed, with a factor 2 safety margin, and frozen in a
// configuration file; later runs check against the frozen values.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lemlab/arclength.hpp"
#include "lemlab/error.hpp"
#include "lemlab/parallel.hpp"
#include "lemlab/poly_core.hpp"
#include "lemlab/region.hpp"
#include "lemlab/region_measure.hpp"
#include "lemlab/root_solver.hpp"

namespace lemlab {

inline constexpr std::uint64_t kDefaultSeed = 0x45485031;

struct VerificationReport {
    std::string check_name;
    std::string anchor;
    bool passed = false;
    bool hard = true; // false: compared against a fitted constant
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;    // signed slack in the direction of the check
    double tolerance = 0.0; // passed iff margin >= -tolerance
    std::optional<double> fitted_constant;
    std::string notes;
};

namespace detail {

inline VerificationReport report(std::string name, std::string anchor, double lhs, double rhs, double margin,
    double tol, bool hard)
{
    VerificationReport r;
    r.check_name = std::move(name);
    r.anchor = std::move(anchor);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = margin;
    r.tolerance = tol;
    r.hard = hard;
    r.passed = std::isfinite(margin) && margin >= -tol;
    return r;
}

inline VerificationReport at_most(std::string name, std::string anchor, double lhs, double rhs, double tol, bool hard)
{
    return report(std::move(name), std::move(anchor), lhs, rhs, rhs - lhs, tol, hard);
}

inline VerificationReport at_least(std::string name, std::string anchor, double lhs, double rhs, double tol,
    bool hard)
{
    return report(std::move(name), std::move(anchor), lhs, rhs, lhs - rhs, tol, hard);
}

/// |a| + |b| - |a + b| without cancellation when a and b point the same way.
inline double pair_defect(cplx a, cplx b)
{
    const double na = std::abs(a), nb = std::abs(b);
    const double re = (a * std::conj(b)).real();
    if (re <= 0.0)
        return na + nb - std::abs(a + b);
    const double im = (a * std::conj(b)).imag();
    return 2.0 * im * im / ((na * nb + re) * (na + nb + std::abs(a + b)));
}

/// 1/|z - q1| + 1/|z - q2| - |1/(z - q1) + 1/(z - q2)|
inline double inverse_pair_defect(cplx z, cplx q1, cplx q2)
{
    const cplx u = z - q1, v = z - q2;
    // a = 1/u, b = 1/v: a conj(b) = conj(u) v / (|u|^2 |v|^2)
    const double nu = std::abs(u), nv = std::abs(v);
    const cplx w = std::conj(u) * v;
    const double re = w.real(), im = u.real() * v.imag() - u.imag() * v.real();
    if (re <= 0.0)
        return 1.0 / nu + 1.0 / nv - std::abs(1.0 / u + 1.0 / v);
    const double s = nu * nv;
    // with a b-bar scaled by s^2: |a||b| = 1/s, Re = re/s^2, Im = im/s^2
    const double sum = 1.0 / nu + 1.0 / nv;
    const double nab = std::abs(u + v) / s;
    return 2.0 * (im / (s * s)) * (im / (s * s)) / ((1.0 / s + re / (s * s)) * (sum + nab));
}

inline double sum_abs(std::span<const cplx> zs)
{
    double s = 0.0;
    for (const cplx& z : zs)
        s += std::abs(z);
    return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// effective checks

/// sum |z_i| - |sum z_i| >= floor(n/2) / (n (n-1)) sum_{i,j} (|z_i| + |z_j| - |z_i + z_j|)
inline VerificationReport triangle_defect_check(std::span<const cplx> zs)
{
    const std::size_t n = zs.size();
    if (n < 2)
        throw Error(ErrorCode::BadParameter, "need at least two numbers");
    cplx total = 0.0;
    for (const cplx& z : zs)
        total += z;
    const double s = detail::sum_abs(zs);
    const double lhs = s - std::abs(total);
    double pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                pairs += detail::pair_defect(zs[i], zs[j]);
    const double nn = static_cast<double>(n);
    const double rhs = std::floor(nn / 2.0) / (nn * (nn - 1.0)) * pairs;
    return detail::at_least("triangle_defect", "defect triangle inequality", lhs, rhs, 1e-12 * std::max(1.0, s), true);
}

/// |sum z_i| >= sin(alpha/2) sum |z_i| when all arguments lie in an arc of length pi - alpha.
inline VerificationReport sector_lower_check(std::span<const cplx> zs, double alpha)
{
    if (zs.empty())
        throw Error(ErrorCode::BadParameter, "need at least one number");
    if (!(alpha >= 0.0 && alpha <= kPi))
        throw Error(ErrorCode::BadParameter, "alpha must lie in [0, pi]");
    std::vector<double> args;
    for (const cplx& z : zs) {
        if (z == cplx(0.0))
            throw Error(ErrorCode::BadSector, "zero has no argument");
        args.push_back(std::arg(z));
    }
    std::sort(args.begin(), args.end());
    double gap = args.front() + 2.0 * kPi - args.back();
    for (std::size_t i = 1; i < args.size(); ++i)
        gap = std::max(gap, args[i] - args[i - 1]);
    const double spread = 2.0 * kPi - gap;
    if (spread > kPi - alpha + 1e-12)
        throw Error(ErrorCode::BadSector, "arguments spread over more than pi - alpha");
    cplx total = 0.0;
    for (const cplx& z : zs)
        total += z;
    const double s = detail::sum_abs(zs);
    return detail::at_least("sector_lower", "sector lower bound", std::abs(total), std::sin(0.5 * alpha) * s,
        1e-12 * s, true);
}

/// The circle |z| = r meets |p| = level in at most 2n points.
inline VerificationReport bezout_check(const CoeffPoly& p, double r, double level = 1.0)
{
    const CircleSection cs = circle_intersections(p, r, level);
    double count = 0.0;
    for (const CirclePoint& pt : cs.points)
        count += pt.multiplicity;
    auto rep = detail::at_most("bezout_circle", "conjugation circle count", count, 2.0 * p.degree(), 0.0, true);
    if (cs.full_circle)
        rep.notes = "circle lies on the curve";
    return rep;
}

/// |E_r(p)| <= pi r^{2/n}
inline VerificationReport polya_check(const CoeffPoly& p, double r, const QuadratureBudget& budget)
{
    const MeasureResult a = area(Region::sublevel(p, r), budget);
    const double bound = kPi * std::pow(r, 2.0 / p.degree());
    auto rep = detail::at_most("polya", "Polya area inequality", a.value, bound, 3.0 * budget.tol * bound, true);
    if (a.budget_exceeded)
        rep.notes = "area budget exceeded";
    return rep;
}

/// |{sum 1/|z - q_j| >= lambda}| <= 4 pi m^2 / lambda^2
inline VerificationReport distrib_check(std::span<const cplx> poles, double lambda, const QuadratureBudget& budget)
{
    const MeasureResult a = area(Region::riesz_superlevel({poles.begin(), poles.end()}, lambda), budget);
    const double m = static_cast<double>(poles.size());
    return detail::at_most("distrib", "distributional bound", a.value, 4.0 * kPi * m * m / (lambda * lambda),
        a.error_bound, true);
}

/// integral over E of 1/|z - z0| <= 2 pi r_E
inline VerificationReport riesz_bound_check(const Region& e, cplx z0, const QuadratureBudget& budget)
{
    const MeasureResult a = area(e, budget);
    const MeasureResult i = riesz_potential(e, z0, budget);
    const double re = equiv_radius(a.value);
    const double re_err = re > 0.0 ? a.error_bound / (2.0 * kPi * re) : std::sqrt(a.error_bound / kPi);
    return detail::at_most("riesz_bound", "rearrangement bound", i.value, 2.0 * kPi * re,
        i.error_bound + 2.0 * kPi * re_err, true);
}

/// integral over E of sum_j 1/|z - q_j| <= 2 pi m r_E
inline VerificationReport multip_check(const Region& e, std::span<const cplx> poles, const QuadratureBudget& budget)
{
    const MeasureResult a = area(e, budget);
    const MeasureResult i = riesz_sum(e, poles, budget);
    const double m = static_cast<double>(poles.size());
    const double re = equiv_radius(a.value);
    const double re_err = re > 0.0 ? a.error_bound / (2.0 * kPi * re) : std::sqrt(a.error_bound / kPi);
    return detail::at_most("multip", "multi-pole Riesz bound", i.value, 2.0 * kPi * m * re,
        i.error_bound + 2.0 * kPi * m * re_err, true);
}

/// Psi(E) <= (1/pi) sum_zeta integral over E of 1/|z - zeta|
inline VerificationReport psi_triangle_check(const CriticalSpec& spec, const Region& e, const QuadratureBudget& budget)
{
    const MeasureResult psi = psi_measure(spec, e, budget);
    const MeasureResult r = riesz_sum(e, spec.critical_points(), budget);
    return detail::at_most("psi_triangle", "integrated triangle inequality", psi.value, r.value / kPi,
        psi.error_bound + r.error_bound / kPi, true);
}

// ---------------------------------------------------------------------------
// the averaged defect integral, normalised to zeta = 0, zeta' = 1

inline double tridef_integrand(cplx z) { return detail::inverse_pair_defect(z, 0.0, 1.0); }

/// integral over D(0, rho) of the normalised integrand
inline MeasureResult tridef_disk_integral(double rho, const QuadratureBudget& budget)
{
    const cplx poles[] = {0.0, 1.0};
    return integrate_region(Region::disk(0.0, rho), tridef_integrand, poles, budget);
}

/// integral over the whole plane: a disk about 1/2 by the quadtree plus the
/// exterior in polar form with rho = 2/t.
inline MeasureResult tridef_plane_integral(const QuadratureBudget& budget)
{
    const cplx poles[] = {0.0, 1.0};
    const MeasureResult inner = integrate_region(Region::disk(0.5, 2.0), tridef_integrand, poles, budget);
    auto ring = [&](double t) {
        const double rho = 2.0 / t;
        const auto a = quad::integrate(
            [&](double th) { return tridef_integrand(0.5 + std::polar(rho, th)); }, 0.0, 2.0 * kPi,
            0.1 * budget.tol, 0.0, 200);
        return a.value * rho * 2.0 / (t * t);
    };
    const auto outer = quad::integrate(ring, 0.0, 1.0, 0.1 * budget.tol, 0.0, 400);
    MeasureResult m;
    m.value = inner.value + outer.value;
    m.error_bound = inner.error_bound + outer.error;
    m.budget_exceeded = inner.budget_exceeded || !outer.converged;
    m.cells = inner.cells;
    return m;
}

// ---------------------------------------------------------------------------
// calibrated checks

struct Calibration {
    std::uint64_t seed = kDefaultSeed + 1;
    double psi_defect_c = 0.0;
    double tridef_lo_c2 = 0.0;
    double tridef_lo_c5 = 0.0;
    double tridef_hi = 0.0;
    double tridef_reference = 0.0; // ratio at zeta = 0, zeta' = 1, z0 = 1/4, r = 0.6
    double psi_upper_c2 = 0.0;
    double psi_upper_c5 = 0.0;
    double psi_lower_c = 0.0;
    double stokes_kappa = 0.0;
    double p0_gap_lo = 0.0;
    double p0_gap_hi = 0.0;

    double tridef_lo(double C) const
    {
        if (C == 2.0)
            return tridef_lo_c2;
        if (C == 5.0)
            return tridef_lo_c5;
        throw Error(ErrorCode::ConfigError, "tridef window is calibrated for C = 2 and C = 5 only");
    }
    double psi_upper_c(double C) const
    {
        if (C == 2.0)
            return psi_upper_c2;
        if (C == 5.0)
            return psi_upper_c5;
        throw Error(ErrorCode::ConfigError, "psi upper constant is calibrated for C = 2 and C = 5 only");
    }
};

/// sum 1/|z - zeta| - |psi(z)| >= (c/n) sum_{zeta, zeta'} (pair defect)
inline VerificationReport psi_defect_check(const CriticalSpec& spec, cplx z, double fitted_c)
{
    const auto zs = spec.critical_points();
    for (const cplx& q : zs)
        if (z == q)
            throw Error(ErrorCode::PoleAtZ, "z is a critical point");
    double maj = 0.0;
    std::vector<cplx> terms;
    for (const cplx& q : zs) {
        terms.push_back(1.0 / (z - q));
        maj += std::abs(terms.back());
    }
    cplx psi = 0.0;
    for (const cplx& t : terms)
        psi += t;
    double pairs = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = 0; j < terms.size(); ++j)
            if (i != j)
                pairs += detail::pair_defect(terms[i], terms[j]);
    const double n = spec.degree();
    // the defect itself is computed as a sum of pair defects along a pairing
    // where possible; here the direct difference is accurate to ~eps * maj
    const double lhs = maj - std::abs(psi);
    auto rep = detail::at_least("psi_defect", "pointwise defect for psi", lhs, fitted_c / n * pairs,
        1e-12 * maj, false);
    rep.fitted_constant = fitted_c;
    return rep;
}

/// ratio I / |zeta - zeta'| of the averaged defect over D(z0, r), inside the
/// window [lo(C), hi] that brackets it for every admissible configuration.
inline VerificationReport tridef_integral_check(cplx zeta, cplx zeta2, cplx z0, double r, double C,
    const Calibration& cal, const QuadratureBudget& budget)
{
    if (!(r > 0.0) || !(C > 0.0))
        throw Error(ErrorCode::BadParameter, "r and C must be positive");
    if (!(std::abs(zeta - z0) < 0.5 * r) || !(std::abs(zeta2 - z0) < C * r))
        throw Error(ErrorCode::BadParameter, "configuration outside the admissible disks");
    const double lo = cal.tridef_lo(C), hi = cal.tridef_hi;
    const double d = std::abs(zeta - zeta2);
    if (d == 0.0) {
        auto rep = detail::report("tridef", "averaged triangle defect", 0.0, 0.0, 0.0, 0.0, false);
        rep.notes = "coincident points; the integrand vanishes";
        return rep;
    }
    const cplx poles[] = {zeta, zeta2};
    const MeasureResult I = integrate_region(Region::disk(z0, r),
        [&](cplx z) { return detail::inverse_pair_defect(z, zeta, zeta2); }, poles, budget);
    const double ratio = I.value / d;
    auto rep = detail::report("tridef", "averaged triangle defect", ratio, lo, std::min(ratio - lo, hi - ratio),
        I.error_bound / d, false);
    rep.fitted_constant = lo;
    rep.notes = "window [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    if (I.budget_exceeded)
        rep.notes += "; budget exceeded";
    return rep;
}

/// Two reports: the effective bound Psi(E) <= 2 (n-1) r_E, and the fitted
/// defect version with c_C Disp(critical points in D(z0, C r)) subtracted.
/// The fitted one is omitted when r < 10 |p|_1 / n or D(z0, r) is not in E.
inline std::vector<VerificationReport> psi_upper_check(const CriticalSpec& spec, const Region& e, cplx z0, double r,
    double C, const Calibration& cal, const QuadratureBudget& budget)
{
    const int n = spec.degree();
    const MeasureResult a = area(e, budget);
    const MeasureResult psi = psi_measure(spec, e, budget);
    const double re = equiv_radius(a.value);
    const double re_err = re > 0.0 ? a.error_bound / (2.0 * kPi * re) : 0.0;
    const double bound = 2.0 * (n - 1) * re;
    const double tol = psi.error_bound + 2.0 * (n - 1) * re_err;
    std::vector<VerificationReport> out;
    out.push_back(detail::at_most("psi_upper_2n", "Psi(E) bounded by 2(n-1) r_E", psi.value, bound, tol, true));

    const double l1 = norms(spec).l1_dispersion;
    bool admissible = r >= 10.0 * l1 / n && e.contains(z0);
    for (int k = 0; admissible && k < 64; ++k)
        admissible = e.contains(z0 + std::polar(0.999 * r, 2.0 * kPi * k / 64.0));
    if (!admissible) {
        out.back().notes = "defect form skipped: r < 10 |p|_1 / n or D(z0, r) not inside E";
        return out;
    }
    std::vector<cplx> near;
    for (const cplx& q : spec.critical_points())
        if (std::abs(q - z0) < C * r)
            near.push_back(q);
    const double c = cal.psi_upper_c(C);
    const double disp = disp_l1(near);
    auto rep = detail::at_most("psi_upper_defect", "Psi upper bound with dispersion defect", psi.value,
        bound - c * disp, tol, false);
    rep.fitted_constant = c;
    rep.notes = "C = " + std::to_string(C) + ", dispersion " + std::to_string(disp);
    out.push_back(std::move(rep));
    return out;
}

/// Psi(Ann(0, r/2, r)) >= (n-1) r - C |p|_1
inline VerificationReport psi_lower_check(const CriticalSpec& spec, double r, double C, const QuadratureBudget& budget)
{
    if (!(r > 0.0))
        throw Error(ErrorCode::BadParameter, "r must be positive");
    const MeasureResult psi = psi_measure(spec, Region::annulus(0.0, 0.5 * r, r), budget);
    const double l1 = norms(spec).l1_dispersion;
    auto rep = detail::at_least("psi_lower", "Psi lower bound on annuli", psi.value,
        (spec.degree() - 1) * r - C * l1, psi.error_bound, false);
    rep.fitted_constant = C;
    return rep;
}

/// Length of the lemniscate, fiber formula first, tracing as fallback.
inline double lemniscate_length(const CriticalSpec& spec, const QuadratureBudget& budget)
{
    try {
        return length_fiber(spec, Region::plane(), budget).length;
    } catch (const Error&) {
        return trace_lemniscate(spec.poly(), 1.0, budget).total_length();
    }
}

inline bool is_p0(const CriticalSpec& spec)
{
    for (const cplx& q : spec.critical_points())
        if (q != cplx(0.0))
            return false;
    return spec.constant_term() == cplx(-1.0);
}

/// length(|p| = 1) <= Psi(E_2) + kappa sqrt(n); for z^n - 1 also the gap
/// Psi(E_2) - length inside the window fitted at n = 9.
inline std::vector<VerificationReport> stokes_gap_report(const CriticalSpec& spec, const Calibration& cal,
    const QuadratureBudget& budget)
{
    const int n = spec.degree();
    const double len = lemniscate_length(spec, budget);
    const MeasureResult psi = psi_measure(spec, Region::sublevel(spec.poly(), 2.0), budget);
    std::vector<VerificationReport> out;
    auto rep = detail::at_most("stokes_gap", "length against Psi(E_2)", len,
        psi.value + cal.stokes_kappa * std::sqrt(static_cast<double>(n)), psi.error_bound, false);
    rep.fitted_constant = cal.stokes_kappa;
    rep.notes = "gap Psi(E_2) - length = " + std::to_string(psi.value - len);
    out.push_back(std::move(rep));
    if (is_p0(spec)) {
        const double gap = psi.value - len;
        auto w = detail::report("stokes_gap_p0", "length against Psi(E_2) for z^n - 1", gap, cal.p0_gap_lo,
            std::min(gap - cal.p0_gap_lo, cal.p0_gap_hi - gap), psi.error_bound, false);
        w.notes = "window [" + std::to_string(cal.p0_gap_lo) + ", " + std::to_string(cal.p0_gap_hi) + "]";
        out.push_back(std::move(w));
    }
    return out;
}

// ---------------------------------------------------------------------------
// random suites

namespace detail {

inline cplx random_in_disk(std::mt19937_64& rng, double radius)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    return std::polar(r, 2.0 * kPi * u(rng));
}

inline CriticalSpec random_spec(std::mt19937_64& rng, int n, double spread, double c0_jitter)
{
    std::vector<cplx> z;
    for (int k = 0; k < n - 1; ++k)
        z.push_back(random_in_disk(rng, spread));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double c0 = std::min(0.0, -1.0 + c0_jitter * u(rng));
    return CriticalSpec::normalized(n, std::move(z), c0);
}

inline CoeffPoly random_monic_roots(std::mt19937_64& rng, int n, double radius)
{
    std::vector<cplx> roots;
    for (int k = 0; k < n; ++k)
        roots.push_back(random_in_disk(rng, radius));
    return CoeffPoly(poly_from_roots(roots));
}

inline Region random_region(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    switch (kind(rng)) {
    case 0: return Region::disk(random_in_disk(rng, 1.0), u(rng)) | Region::disk(random_in_disk(rng, 1.0), u(rng));
    case 1: {
        const double r2 = u(rng);
        return Region::annulus(random_in_disk(rng, 0.5), 0.5 * r2 * u(rng), r2);
    }
    default: return Region::sublevel(random_monic_roots(rng, 2 + static_cast<int>(rng() % 4), 0.8), 0.5 + u(rng));
    }
}

} // namespace detail

/// Fit the non-effective constants on the calibration seed; each observed
/// extreme is relaxed by a factor 2.
inline Calibration calibrate(const QuadratureBudget& budget, std::uint64_t seed = kDefaultSeed + 1)
{
    Calibration cal;
    cal.seed = seed;
    std::mt19937_64 rng(seed);
    auto lower = [](double v) { return v >= 0.0 ? 0.5 * v : 2.0 * v; };
    auto upper = [](double v) { return v >= 0.0 ? 2.0 * v : 0.5 * v; };

    // pointwise psi defect: min over samples of lhs / (pairs / n)
    double c_min = INFINITY;
    for (int i = 0; i < 400; ++i) {
        const CriticalSpec s = detail::random_spec(rng, 3 + i % 8, 1.0, 0.0);
        const cplx z = detail::random_in_disk(rng, 1.5);
        const VerificationReport r = psi_defect_check(s, z, 1.0);
        if (r.rhs > 1e-9)
            c_min = std::min(c_min, r.lhs / r.rhs);
    }
    cal.psi_defect_c = lower(c_min);

    // averaged defect window: D(0, 1/(2C+1)) lies in every admissible disk
    const QuadratureBudget fine = budget.loosened(0.01);
    cal.tridef_lo_c2 = tridef_disk_integral(1.0 / 5.0, fine).value;
    cal.tridef_lo_c5 = tridef_disk_integral(1.0 / 11.0, fine).value;
    cal.tridef_hi = tridef_plane_integral(fine).value;
    {
        const cplx poles[] = {0.0, 1.0};
        cal.tridef_reference = integrate_region(Region::disk(0.25, 0.6), tridef_integrand, poles, fine).value;
    }

    // Psi upper defect constants on near-extremal polynomials
    for (double C : {2.0, 5.0}) {
        double best = INFINITY;
        std::mt19937_64 r2(seed + static_cast<std::uint64_t>(C));
        for (int i = 0; i < 6; ++i) {
            const CriticalSpec s = detail::random_spec(r2, 3 + i, 0.05, 0.0);
            const Region e = Region::sublevel(s.poly(), 2.0);
            const MeasureResult a = area(e, budget);
            const MeasureResult psi = psi_measure(s, e, budget);
            std::vector<cplx> near;
            for (const cplx& q : s.critical_points())
                if (std::abs(q) < C * 0.5)
                    near.push_back(q);
            const double disp = disp_l1(near);
            if (disp > 0.0)
                best = std::min(best, (2.0 * (s.degree() - 1) * equiv_radius(a.value) - psi.value) / disp);
        }
        (C == 2.0 ? cal.psi_upper_c2 : cal.psi_upper_c5) = lower(best);
    }

    // Psi lower constant: max over samples of ((n-1) r - Psi(Ann)) / |p|_1
    double cl = -INFINITY;
    for (int i = 0; i < 8; ++i) {
        const CriticalSpec s = detail::random_spec(rng, 3 + i, 0.5, 0.0);
        const double r = std::array<double, 3>{0.25, 0.5, 1.0}[static_cast<std::size_t>(i % 3)];
        const MeasureResult psi = psi_measure(s, Region::annulus(0.0, 0.5 * r, r), budget);
        cl = std::max(cl, ((s.degree() - 1) * r - psi.value) / norms(s).l1_dispersion);
    }
    cal.psi_lower_c = upper(cl);

    // length against Psi(E_2)
    double kappa = -INFINITY;
    for (int i = 0; i < 6; ++i) {
        const CriticalSpec s = i < 3 ? family(Family::p0, 3 + 3 * i, 0.0) : detail::random_spec(rng, 3 + i, 0.4, 0.2);
        const double len = lemniscate_length(s, budget);
        const double psi = psi_measure(s, Region::sublevel(s.poly(), 2.0), budget).value;
        kappa = std::max(kappa, (len - psi) / std::sqrt(static_cast<double>(s.degree())));
    }
    cal.stokes_kappa = upper(kappa);
    {
        const CriticalSpec s = family(Family::p0, 9, 0.0);
        const double gap = psi_measure(s, Region::sublevel(s.poly(), 2.0), budget).value - lemniscate_length(s, budget);
        // an O(1) window about zero, twice the observed gap
        cal.p0_gap_lo = -2.0 * std::abs(gap);
        cal.p0_gap_hi = 2.0 * std::abs(gap);
    }
    return cal;
}

// ---------------------------------------------------------------------------
// the battery

struct BatteryOptions {
    std::uint64_t seed = kDefaultSeed;
    QuadratureBudget budget = [] {
        QuadratureBudget b;
        b.tol = 1e-3;
        return b;
    }();
    std::set<std::string> only; // empty: every group
};

struct BatteryResult {
    std::vector<VerificationReport> reports;

    std::size_t hard_failures() const
    {
        return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(),
            [](const VerificationReport& r) { return r.hard && !r.passed; }));
    }
    std::size_t fitted_failures() const
    {
        return static_cast<std::size_t>(std::count_if(reports.begin(), reports.end(),
            [](const VerificationReport& r) { return !r.hard && !r.passed; }));
    }
    /// 0 all passed, 1 any hard failure, 2 only fitted-constant regressions
    int exit_code() const { return hard_failures() ? 1 : fitted_failures() ? 2 : 0; }
};

inline const std::vector<std::string>& battery_groups()
{
    static const std::vector<std::string> g = {"triangle_defect", "sector_lower", "bezout_circle", "polya",
        "distrib", "riesz_bound", "multip", "psi_triangle", "psi_defect", "tridef", "psi_upper", "psi_lower",
        "stokes_gap"};
    return g;
}

/// Every group draws from its own generator seeded from (seed, group index), so
/// selecting a subset reproduces the same trials.
inline BatteryResult run_battery(const Calibration& cal, const BatteryOptions& opt = {})
{
    for (const std::string& g : opt.only)
        if (std::find(battery_groups().begin(), battery_groups().end(), g) == battery_groups().end())
            throw Error(ErrorCode::ConfigError, "unknown check group: " + g);
    using Task = std::function<std::vector<VerificationReport>()>;
    std::vector<Task> tasks;
    const QuadratureBudget& b = opt.budget;
    auto wanted = [&](const std::string& g) { return opt.only.empty() || opt.only.count(g) > 0; };
    auto group_rng = [&](std::size_t gi) {
        std::seed_seq ss{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
            static_cast<std::uint32_t>(gi)};
        return std::mt19937_64(ss);
    };
    auto one = [](VerificationReport r) { return std::vector<VerificationReport>{std::move(r)}; };

    if (wanted("triangle_defect")) {
        auto rng = group_rng(0);
        for (int batch = 0; batch < 60; ++batch) {
            std::vector<std::vector<cplx>> cases;
            for (int i = 0; i < 100; ++i) {
                const int n = 2 + static_cast<int>(rng() % 9);
                std::vector<cplx> zs;
                // every third case is nearly aligned, where the defect is small
                const bool aligned = i % 3 == 0;
                const double base = 2.0 * kPi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
                for (int k = 0; k < n; ++k) {
                    const double mag = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
                    const double spread = aligned ? 1e-3 : 2.0 * kPi;
                    zs.push_back(std::polar(mag, base + spread * std::uniform_real_distribution<double>(0.0, 1.0)(rng)));
                }
                cases.push_back(std::move(zs));
            }
            tasks.push_back([cases]() {
                std::vector<VerificationReport> out;
                for (const auto& zs : cases)
                    out.push_back(triangle_defect_check(zs));
                return out;
            });
        }
    }
    if (wanted("sector_lower")) {
        auto rng = group_rng(1);
        for (int batch = 0; batch < 20; ++batch) {
            std::vector<std::pair<std::vector<cplx>, double>> cases;
            for (int i = 0; i < 100; ++i) {
                std::uniform_real_distribution<double> u(0.0, 1.0);
                const double alpha = kPi * u(rng);
                const double width = kPi - alpha;
                const double centre = 2.0 * kPi * u(rng);
                const int m = 1 + static_cast<int>(rng() % 8);
                std::vector<cplx> zs;
                for (int k = 0; k < m; ++k) {
                    // the two extreme directions are used half the time
                    double t = u(rng);
                    if (k < 2 && i % 2 == 0)
                        t = static_cast<double>(k);
                    zs.push_back(std::polar(0.1 + u(rng), centre + width * (t - 0.5) * (1.0 - 1e-12)));
                }
                cases.emplace_back(std::move(zs), alpha);
            }
            tasks.push_back([cases]() {
                std::vector<VerificationReport> out;
                for (const auto& [zs, alpha] : cases)
                    out.push_back(sector_lower_check(zs, alpha));
                return out;
            });
        }
    }
    if (wanted("bezout_circle")) {
        auto rng = group_rng(2);
        for (int batch = 0; batch < 10; ++batch) {
            std::vector<std::pair<CoeffPoly, double>> cases;
            for (int i = 0; i < 100; ++i) {
                const int n = 1 + static_cast<int>(rng() % 10);
                cases.emplace_back(detail::random_monic_roots(rng, n, 1.0),
                    std::uniform_real_distribution<double>(0.05, 2.0)(rng));
            }
            tasks.push_back([cases]() {
                std::vector<VerificationReport> out;
                for (const auto& [p, r] : cases)
                    out.push_back(bezout_check(p, r));
                return out;
            });
        }
    }
    if (wanted("polya")) {
        auto rng = group_rng(3);
        for (int i = 0; i < 100; ++i) {
            const CoeffPoly p = detail::random_monic_roots(rng, 1 + static_cast<int>(rng() % 8), 1.0);
            tasks.push_back([p, b]() {
                std::vector<VerificationReport> out;
                for (double r : {0.5, 1.0, 2.0})
                    out.push_back(polya_check(p, r, b));
                return out;
            });
        }
    }
    if (wanted("distrib")) {
        auto rng = group_rng(4);
        for (int i = 0; i < 20; ++i) {
            std::vector<cplx> poles;
            const int m = 1 + static_cast<int>(rng() % 4);
            for (int k = 0; k < m; ++k)
                poles.push_back(detail::random_in_disk(rng, 1.0));
            tasks.push_back([poles, b, m]() {
                std::vector<VerificationReport> out;
                for (double f : {0.5, 1.0, 2.0, 4.0, 8.0})
                    out.push_back(distrib_check(poles, f * m, b));
                return out;
            });
        }
    }
    if (wanted("riesz_bound")) {
        auto rng = group_rng(5);
        for (int i = 0; i < 30; ++i) {
            const Region e = detail::random_region(rng);
            const cplx z0 = detail::random_in_disk(rng, 1.5);
            tasks.push_back([e, z0, b, one]() { return one(riesz_bound_check(e, z0, b)); });
        }
    }
    if (wanted("multip")) {
        auto rng = group_rng(6);
        for (int i = 0; i < 15; ++i) {
            const Region e = detail::random_region(rng);
            std::vector<cplx> poles;
            for (int k = 0, m = 1 + static_cast<int>(rng() % 4); k < m; ++k)
                poles.push_back(detail::random_in_disk(rng, 1.2));
            tasks.push_back([e, poles, b, one]() { return one(multip_check(e, poles, b)); });
        }
    }
    if (wanted("psi_triangle")) {
        auto rng = group_rng(7);
        for (int i = 0; i < 10; ++i) {
            const CriticalSpec s = detail::random_spec(rng, 3 + i % 5, 0.6, 0.3);
            tasks.push_back([s, b, one]() { return one(psi_triangle_check(s, Region::sublevel(s.poly(), 2.0), b)); });
        }
    }
    if (wanted("psi_defect")) {
        auto rng = group_rng(8);
        for (int batch = 0; batch < 10; ++batch) {
            std::vector<std::pair<CriticalSpec, cplx>> cases;
            for (int i = 0; i < 100; ++i)
                cases.emplace_back(detail::random_spec(rng, 3 + i % 8, 1.0, 0.0), detail::random_in_disk(rng, 1.5));
            const double c = cal.psi_defect_c;
            tasks.push_back([cases, c]() {
                std::vector<VerificationReport> out;
                for (const auto& [s, z] : cases)
                    out.push_back(psi_defect_check(s, z, c));
                return out;
            });
        }
    }
    if (wanted("tridef")) {
        auto rng = group_rng(9);
        for (double C : {2.0, 5.0})
            for (int i = 0; i < 25; ++i) {
                std::uniform_real_distribution<double> u(0.0, 1.0);
                const cplx z0 = detail::random_in_disk(rng, 1.0);
                const double r = 0.1 + u(rng);
                const cplx a = z0 + detail::random_in_disk(rng, 0.499 * r);
                const cplx c = z0 + detail::random_in_disk(rng, 0.999 * C * r);
                tasks.push_back([=, &cal]() { return std::vector{tridef_integral_check(a, c, z0, r, C, cal, b)}; });
            }
    }
    if (wanted("psi_upper")) {
        auto rng = group_rng(10);
        for (int i = 0; i < 6; ++i) {
            const CriticalSpec s = i == 0 ? family(Family::p0, 9, 0.0)
                : i == 1                  ? family(Family::example1, 9, 0.5)
                                          : detail::random_spec(rng, 3 + i, 0.05, 0.0);
            const double C = i % 2 == 0 ? 2.0 : 5.0;
            tasks.push_back([s, C, b, &cal]() {
                return psi_upper_check(s, Region::sublevel(s.poly(), 2.0), 0.0, 0.5, C, cal, b);
            });
        }
    }
    if (wanted("psi_lower")) {
        auto rng = group_rng(11);
        for (int i = 0; i < 9; ++i) {
            const CriticalSpec s = i == 0 ? family(Family::example1, 9, 0.5) : detail::random_spec(rng, 3 + i % 6, 0.5, 0.0);
            const double r = std::array<double, 3>{0.25, 0.5, 1.0}[static_cast<std::size_t>(i % 3)];
            tasks.push_back([s, r, b, &cal, one]() { return one(psi_lower_check(s, r, cal.psi_lower_c, b)); });
        }
    }
    if (wanted("stokes_gap")) {
        auto rng = group_rng(12);
        std::vector<CriticalSpec> specs = {family(Family::p0, 5, 0.0), family(Family::p0, 9, 0.0),
            family(Family::p0, 12, 0.0), family(Family::example2, 9, 0.5), family(Family::cassini, 2, 1.0)};
        for (int i = 0; i < 3; ++i)
            specs.push_back(detail::random_spec(rng, 4 + i, 0.4, 0.2));
        for (const CriticalSpec& s : specs)
            tasks.push_back([s, b, &cal]() { return stokes_gap_report(s, cal, b); });
    }

    const auto results = parallel_map(tasks.size(), [&](std::size_t i) { return tasks[i](); });
    BatteryResult out;
    for (const auto& r : results)
        out.reports.insert(out.reports.end(), r.begin(), r.end());
    return out;
}

} // namespace lemlab
