#pragma once

// Lemniscate length three ways: the fiber integral over the argument of p,
// the radial integral over |z|, and predictor-corrector tracing. Plus the
// closed forms for z^n - 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "lemlab/error.hpp"
#include "lemlab/poly_core.hpp"
#include "lemlab/quadrature.hpp"
#include "lemlab/region.hpp"
#include "lemlab/root_solver.hpp"

namespace lemlab {

enum class LengthMethod { fiber, radial, trace, closed_form };

inline std::string_view to_string(LengthMethod m)
{
    switch (m) {
    case LengthMethod::fiber: return "fiber";
    case LengthMethod::radial: return "radial";
    case LengthMethod::trace: return "trace";
    case LengthMethod::closed_form: return "closed_form";
    }
    return "?";
}

struct LengthResult {
    double length = 0.0;
    double error_estimate = 0.0;
    double excluded_measure = 0.0;
    LengthMethod method = LengthMethod::fiber;
    int panels = 0;
};

struct LengthOptions {
    double level = 1.0;
    // > 0: cut disks of this radius around critical points that sit on or
    // near the curve instead of integrating through them
    double eps_crit = 0.0;
};

namespace detail {

/// p together with its critical points, so that p' can be evaluated in
/// product form: accurate near clustered critical points, where Horner on
/// the coefficients of p' loses everything.
struct CurveModel {
    CoeffPoly p;
    std::vector<cplx> zetas;

    cplx dp(cplx z) const
    {
        cplx v = static_cast<double>(p.degree());
        for (const cplx& q : zetas)
            v *= z - q;
        return v;
    }
    int degree() const { return p.degree(); }
};

inline CurveModel make_model(const CoeffPoly& p)
{
    if (p.degree() == 1)
        return {p, {}};
    RootSet rs = critical_points(p);
    if (!rs.converged)
        throw Error(ErrorCode::NoConvergence, "critical points did not converge");
    return {p, std::move(rs.roots)};
}

inline CurveModel make_model(const CriticalSpec& s)
{
    return {s.poly(), std::vector<cplx>(s.critical_points().begin(), s.critical_points().end())};
}

/// A point on the alpha circle where the fiber integrand is singular or
/// jumps. Stars of order k > 1 come from critical values; the integrand near
/// them behaves like |alpha - alpha*|^{1/k - 1}.
struct Breakpoint {
    double alpha;
    cplx w;            // level e^{i alpha}
    cplx c0_minus_w;   // computed once, accurately
    int k;
};

inline double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

inline std::vector<Breakpoint> merge_breakpoints(std::vector<Breakpoint> bp)
{
    std::sort(bp.begin(), bp.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.alpha < b.alpha; });
    std::vector<Breakpoint> out;
    for (const Breakpoint& b : bp) {
        if (!out.empty() && b.alpha - out.back().alpha < 1e-12) {
            if (b.k > out.back().k)
                out.back() = b;
            continue;
        }
        out.push_back(b);
    }
    if (out.size() > 1 && out.front().alpha + 2.0 * kPi - out.back().alpha < 1e-12) {
        if (out.back().k > out.front().k)
            out.front() = out.back();
        out.pop_back();
    }
    return out;
}

/// Points where the level curve |p| = level crosses the given circles.
inline std::vector<cplx> curve_circle_points(const CoeffPoly& p, double level, const std::vector<BoundaryCircle>& cs)
{
    std::vector<cplx> out;
    for (const BoundaryCircle& c : cs) {
        const std::vector<cplx> q = taylor_shift(p.coefficients(), c.center);
        const CircleSection sec = circle_intersections(q, c.radius, level);
        for (const CirclePoint& pt : sec.points)
            out.push_back(pt.z + c.center);
    }
    return out;
}

/// Clusters of critical points with their multiplicity.
inline std::vector<RootCluster> critical_clusters(const CurveModel& m)
{
    double scale = 1.0;
    for (const cplx& q : m.zetas)
        scale = std::max(scale, std::abs(q));
    RootSet rs;
    rs.roots = m.zetas;
    return rs.clusters(1e-6 * scale);
}

inline Region exclude_critical(const CurveModel& m, const Region& omega, double level, double eps, double& excluded)
{
    Region out = omega;
    excluded = 0.0;
    for (const RootCluster& c : critical_clusters(m)) {
        if (!omega.contains(c.center))
            continue;
        const bool on_curve = std::abs(std::abs(m.p(c.center)) - level) <= 1e-8 * level
            || !curve_circle_points(m.p, level, {{c.center, eps}}).empty();
        if (!on_curve)
            continue;
        out = out & ~Region::disk(c.center, eps);
        excluded += 2.0 * kPi * eps * c.multiplicity;
    }
    return out;
}

inline LengthResult fiber_length(const CurveModel& m, const Region& omega, const QuadratureBudget& budget,
    const LengthOptions& opt)
{
    budget.validate();
    const double level = opt.level;
    if (!(level > 0.0))
        throw Error(ErrorCode::BadParameter, "level must be positive");
    LengthResult res;
    res.method = LengthMethod::fiber;

    Region region = omega;
    if (opt.eps_crit > 0.0)
        region = exclude_critical(m, omega, level, opt.eps_crit, res.excluded_measure);

    const cplx c0 = m.p[0];
    std::vector<Breakpoint> bps;
    for (const RootCluster& c : critical_clusters(m)) {
        const cplx v = m.p(c.center);
        if (std::abs(v) == 0.0 || std::abs(std::abs(v) - level) > 0.5 * level)
            continue;
        const cplx w = level * (v / std::abs(v));
        bps.push_back({std::arg(v), w, c0 - w, c.multiplicity + 1});
    }
    for (const cplx& z : curve_circle_points(m.p, level, region.boundary_circles())) {
        const cplx v = m.p(z);
        const cplx w = level * (v / std::abs(v));
        bps.push_back({std::arg(v), w, c0 - w, 1});
    }
    bps = merge_breakpoints(std::move(bps));
    if (bps.empty())
        bps.push_back({-kPi, -level, c0 + level, 1});

    struct Half {
        const Breakpoint* at;
        double sign;
    };
    std::vector<Half> halves;
    std::vector<quad::Piece> pieces;
    const std::size_t nb = bps.size();
    for (std::size_t i = 0; i < nb; ++i) {
        const Breakpoint& a = bps[i];
        const Breakpoint& b = bps[(i + 1) % nb];
        double len = b.alpha - a.alpha;
        if (len <= 0.0)
            len += 2.0 * kPi;
        const double half = 0.5 * len;
        halves.push_back({&a, +1.0});
        pieces.push_back({0.0, std::pow(half, 1.0 / a.k), static_cast<int>(halves.size() - 1)});
        halves.push_back({&b, -1.0});
        pieces.push_back({0.0, std::pow(half, 1.0 / b.k), static_cast<int>(halves.size() - 1)});
    }

    RootSet warm;
    bool have_warm = false;
    auto integrand = [&](int tag, double u) -> double {
        const Half& h = halves[static_cast<std::size_t>(tag)];
        const int k = h.at->k;
        const double uk = k == 1 ? u : std::pow(u, k);
        const double jac = k == 1 ? 1.0 : k * std::pow(u, k - 1);
        const double theta = h.sign * uk;
        const double sh = std::sin(0.5 * theta);
        const cplx em1(-2.0 * sh * sh, std::sin(theta)); // e^{i theta} - 1
        const cplx constant = h.at->c0_minus_w - h.at->w * em1;
        RootSet rs = fiber_shifted(m.p, constant, have_warm ? &warm : nullptr);
        if (!rs.converged)
            throw Error(ErrorCode::NoConvergence, "fiber solve did not converge");
        double s = 0.0;
        for (const cplx& z : rs.roots)
            if (region.contains(z))
                s += level / std::abs(m.dp(z));
        warm = std::move(rs);
        have_warm = true;
        const double v = jac * s;
        if (!std::isfinite(v))
            return jac < 1e-300 ? 0.0 : v;
        return v;
    };
    const quad::Result r = quad::integrate(integrand, pieces, budget.tol, 1e-300, budget.max_panels);
    if (!std::isfinite(r.value))
        throw Error(ErrorCode::NoConvergence, "fiber integrand is not finite");
    if (!r.converged)
        throw Error(ErrorCode::BudgetExceeded, "fiber quadrature did not reach tolerance");
    res.length = r.value;
    res.error_estimate = r.error;
    res.panels = r.panels;
    return res;
}

/// Newton on p(z) = w from a nearby start.
inline std::optional<cplx> polish_root(const CurveModel& m, cplx w, cplx z)
{
    for (int it = 0; it < 60; ++it) {
        const cplx d = m.dp(z);
        if (d == cplx(0.0))
            return std::nullopt;
        const cplx step = (m.p(z) - w) / d;
        z -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z)))
            return z;
    }
    return std::abs(m.p(z) - w) <= 1e-12 * std::max(1.0, std::abs(w)) ? std::optional<cplx>(z) : std::nullopt;
}

/// Points of the curve where it is tangent to a circle about the origin:
/// along a branch z(alpha), d|z|^2/d alpha = -2 Im(conj(z) p / p').
inline std::vector<cplx> radial_tips(const CurveModel& m, double level)
{
    const int n = m.degree();
    const int samples = 1024 + 64 * n;
    std::vector<std::vector<cplx>> branch(static_cast<std::size_t>(samples) + 1);
    RootSet prev;
    for (int j = 0; j <= samples; ++j) {
        const double a = -kPi + 2.0 * kPi * j / samples;
        RootSet rs = fiber(m.p, std::polar(level, a), j ? &prev : nullptr);
        if (!rs.converged)
            throw Error(ErrorCode::NoConvergence, "fiber sweep did not converge");
        branch[static_cast<std::size_t>(j)] = rs.roots;
        prev = std::move(rs);
    }
    auto v_of = [&](cplx z, cplx w) {
        const cplx d = m.dp(z);
        return d == cplx(0.0) ? std::numeric_limits<double>::quiet_NaN() : (std::conj(z) * w / d).imag();
    };
    std::vector<cplx> tips;
    for (int j = 0; j < samples; ++j) {
        const double a0 = -kPi + 2.0 * kPi * j / samples;
        const double a1 = -kPi + 2.0 * kPi * (j + 1) / samples;
        for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
            cplx z0 = branch[static_cast<std::size_t>(j)][k];
            cplx z1 = branch[static_cast<std::size_t>(j) + 1][k];
            double v0 = v_of(z0, std::polar(level, a0));
            const double v1 = v_of(z1, std::polar(level, a1));
            if (!(v0 * v1 < 0.0))
                continue;
            double lo = a0, hi = a1;
            cplx zl = z0, zh = z1;
            bool ok = true;
            for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const cplx w = std::polar(level, mid);
                const auto z = polish_root(m, w, 0.5 * (zl + zh));
                if (!z) {
                    ok = false;
                    break;
                }
                const double vm = v_of(*z, w);
                if (vm * v0 > 0.0) {
                    lo = mid;
                    zl = *z;
                    v0 = vm;
                } else {
                    hi = mid;
                    zh = *z;
                }
            }
            if (!ok)
                continue;
            const cplx z = 0.5 * (zl + zh);
            const cplx w = m.p(z);
            // a genuine tip has v ~ 0 on the scale of |z| |p/p'|; a branch swap near a
            // critical point flips sign through infinity instead
            const double scale = std::abs(z) * std::abs(w / m.dp(z));
            if (!(std::abs(v_of(z, w)) <= 1e-6 * scale) || std::abs(std::abs(w) - level) > 1e-9 * level)
                continue;
            if (std::none_of(tips.begin(), tips.end(), [&](cplx t) { return std::abs(t - z) < 1e-9; }))
                tips.push_back(z);
        }
    }
    return tips;
}

inline LengthResult radial_length(const CurveModel& m, const Region& omega, const QuadratureBudget& budget,
    const LengthOptions& opt)
{
    budget.validate();
    const double level = opt.level;
    LengthResult res;
    res.method = LengthMethod::radial;
    const int n = m.degree();

    // |p| is constant on a circle about 0 only for a monomial; its level curve is
    // that circle and never crosses |z| = r transversally
    bool monomial = true;
    for (int k = 0; k < n; ++k)
        monomial = monomial && m.p[k] == cplx(0.0);
    if (monomial)
        throw Error(ErrorCode::TransversalityFailure, "level curve is a circle about the origin");

    // the whole curve lies in |z| <= rho
    double s = 0.0;
    for (int k = 0; k < n; ++k)
        s += std::abs(m.p[k]);
    const double rho = std::max(1.0, s + std::pow(level, 1.0 / n));
    auto [r_lo, r_hi] = omega.radial_range();
    r_hi = std::min(r_hi, rho);
    if (!(r_hi > r_lo))
        return res;
    if (r_lo == 0.0) {
        const double eps0 = 1e-12 * rho;
        const CircleSection cs = circle_intersections(m.p, eps0, level);
        res.excluded_measure = static_cast<double>(cs.points.size()) * eps0;
        r_lo = eps0;
    }

    struct Mark {
        double r;
        bool tip;
    };
    std::vector<Mark> marks{{r_lo, false}, {r_hi, false}};
    for (const cplx& t : radial_tips(m, level))
        if (std::abs(t) > r_lo && std::abs(t) < r_hi)
            marks.push_back({std::abs(t), true});
    for (const cplx& z : curve_circle_points(m.p, level, omega.boundary_circles()))
        if (std::abs(z) > r_lo && std::abs(z) < r_hi)
            marks.push_back({std::abs(z), false});
    std::sort(marks.begin(), marks.end(), [](const Mark& a, const Mark& b) { return a.r < b.r; });
    std::vector<Mark> uniq;
    for (const Mark& mk : marks) {
        if (!uniq.empty() && mk.r - uniq.back().r <= 1e-13 * std::max(1.0, mk.r)) {
            uniq.back().tip = uniq.back().tip || mk.tip;
            continue;
        }
        uniq.push_back(mk);
    }

    // tag layout: 2 i + side, side 0 = from the left mark, 1 = from the right
    std::vector<quad::Piece> pieces;
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
        const double half = 0.5 * (uniq[i + 1].r - uniq[i].r);
        const double left_len = uniq[i].tip ? std::sqrt(half) : half;
        const double right_len = uniq[i + 1].tip ? std::sqrt(half) : half;
        pieces.push_back({0.0, left_len, static_cast<int>(2 * i)});
        pieces.push_back({0.0, right_len, static_cast<int>(2 * i + 1)});
    }
    CircleOptions copt;
    copt.filter_tol = 1e-9;
    copt.cluster_tol = 1e-13;
    auto integrand = [&](int tag, double t) -> double {
        const std::size_t i = static_cast<std::size_t>(tag / 2);
        const bool right = tag % 2 == 1;
        const Mark& mk = right ? uniq[i + 1] : uniq[i];
        double r, jac;
        if (mk.tip) {
            r = right ? mk.r - t * t : mk.r + t * t;
            jac = 2.0 * t;
        } else {
            r = right ? mk.r - t : mk.r + t;
            jac = 1.0;
        }
        const CircleSection cs = circle_intersections(m.p, r, level, copt);
        if (cs.full_circle)
            throw Error(ErrorCode::TransversalityFailure, "a circle about the origin lies on the curve");
        double sum = 0.0;
        for (const CirclePoint& pt : cs.points) {
            if (!omega.contains(pt.z))
                continue;
            const cplx q = m.p(pt.z) / (pt.z * m.dp(pt.z));
            const double sn = std::abs(q.imag()) / std::abs(q);
            if (!(sn >= 1e-12))
                throw Error(ErrorCode::TransversalityFailure, "curve is tangent to a circle about the origin");
            sum += pt.multiplicity / sn;
        }
        return jac * sum;
    };
    const quad::Result r = quad::integrate(integrand, pieces, budget.tol, 1e-300, budget.max_panels);
    if (!r.converged)
        throw Error(ErrorCode::BudgetExceeded, "radial quadrature did not reach tolerance");
    res.length = r.value;
    res.error_estimate = r.error;
    res.panels = r.panels;
    return res;
}

} // namespace detail

/// ell(curve n omega) = integral over alpha of the sum over p(z) = e^{i alpha}, z in
/// omega, of 1/|p'(z)|.
inline LengthResult length_fiber(const CoeffPoly& p, const Region& omega, const QuadratureBudget& budget,
    const LengthOptions& opt = {})
{
    return detail::fiber_length(detail::make_model(p), omega, budget, opt);
}

inline LengthResult length_fiber(const CriticalSpec& s, const Region& omega, const QuadratureBudget& budget,
    const LengthOptions& opt = {})
{
    return detail::fiber_length(detail::make_model(s), omega, budget, opt);
}

/// ell(curve n omega) = integral over r of the sum over curve points on |z| = r of
/// 1/|sin arg(p / (z p'))|.
inline LengthResult length_radial(const CoeffPoly& p, const Region& omega, const QuadratureBudget& budget,
    const LengthOptions& opt = {})
{
    return detail::radial_length(detail::make_model(p), omega, budget, opt);
}

inline LengthResult length_radial(const CriticalSpec& s, const Region& omega, const QuadratureBudget& budget,
    const LengthOptions& opt = {})
{
    return detail::radial_length(detail::make_model(s), omega, budget, opt);
}

/// 2^{1/n} B(1/2, 1/(2n)).
inline double length_p0_closed(int n)
{
    if (n < 1)
        throw Error(ErrorCode::BadParameter, "n must be >= 1");
    const double a = 0.5, b = 0.5 / n;
    return std::exp(std::log(2.0) / n + std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

inline double length_p0_asymptote(int n) { return 2.0 * n + 4.0 * std::log(2.0); }

/// integral of |1 + e^{i alpha}|^{-(n-1)/n} over {alpha : |1 + e^{i alpha}|^{1/n} >= r0}.
inline double length_p0_outer(int n, double r0, double tol = 1e-13)
{
    if (n < 1)
        throw Error(ErrorCode::BadParameter, "n must be >= 1");
    if (!(r0 >= 0.0 && r0 <= 1.0))
        throw Error(ErrorCode::BadParameter, "need 0 <= r0 <= 1");
    // alpha = pi - 2 s: the integrand is (2 sin s)^{-(n-1)/n}, s from
    // asin(r0^n / 2) to pi/2, doubled for the two sides; s = v^n removes the
    // endpoint singularity.
    const double e = (n - 1.0) / n;
    const double s_min = std::asin(0.5 * std::pow(r0, n));
    auto f = [&](double v) {
        const double s = std::pow(v, n);
        const double jac = n * std::pow(v, n - 1);
        return jac * std::pow(2.0 * std::sin(s), -e);
    };
    const quad::Result r = quad::integrate(f, std::pow(s_min, 1.0 / n), std::pow(0.5 * kPi, 1.0 / n), tol, 0.0, 4000);
    return 4.0 * r.value;
}

// ---------------------------------------------------------------------------

struct Trace {
    double level = 1.0;
    std::vector<std::vector<cplx>> components;
    std::vector<bool> closed_flags;
    std::vector<bool> critical_flags;                // passes through a critical point on the curve
    std::vector<std::vector<double>> segment_lengths; // arc length of each vertex-to-vertex step

    double component_length(std::size_t i) const
    {
        return quad::pairwise_sum(segment_lengths[i]);
    }
    double total_length() const
    {
        std::vector<double> v;
        for (std::size_t i = 0; i < components.size(); ++i)
            v.push_back(component_length(i));
        return quad::pairwise_sum(v);
    }
};

struct TraceOptions {
    double max_step = 0.05;
    double min_step = 1e-10;
    double max_turn = 0.1;       // radians of tangent rotation per step
    double corrector_tol = 1e-13; // on ||p|^2 - R^2| / R^2
    int max_vertices = 400000;
};

namespace detail {

struct Tracer {
    const CurveModel& m;
    double R;
    TraceOptions opt;
    std::vector<cplx> on_curve_crit;

    cplx tangent(cplx z) const
    {
        const cplx v = cplx(0.0, 1.0) * m.p(z) * std::conj(m.dp(z));
        const double a = std::abs(v);
        return a > 0.0 ? v / a : cplx(0.0);
    }

    std::optional<cplx> correct(cplx z) const
    {
        const double r2 = R * R;
        for (int it = 0; it < 12; ++it) {
            const cplx pv = m.p(z), d = m.dp(z);
            const double f = std::norm(pv) - r2;
            if (std::abs(f) <= opt.corrector_tol * r2)
                return z;
            const double g2 = std::norm(pv) * std::norm(d);
            if (g2 == 0.0)
                return std::nullopt;
            z -= f / (2.0 * g2) * (pv * std::conj(d));
        }
        const double f = std::norm(m.p(z)) - r2;
        return std::abs(f) <= 100.0 * opt.corrector_tol * r2 ? std::optional<cplx>(z) : std::nullopt;
    }

    static double arc(cplx a, cplx b, cplx ta, cplx tb)
    {
        const double chord = std::abs(b - a);
        const double th = std::abs(std::arg(tb / ta));
        if (!(th > 1e-12) || !std::isfinite(th))
            return chord;
        return chord * th / (2.0 * std::sin(0.5 * th));
    }

    struct Run {
        std::vector<cplx> pts;
        std::vector<double> seg;
        bool closed = false;
        bool hit_critical = false;
    };

    /// March from the seed in direction dir (+1 along increasing arg p).
    Run march(cplx seed, double dir) const
    {
        Run run;
        run.pts.push_back(seed);
        cplx z = seed;
        cplx t = dir * tangent(z);
        const cplx t_seed = t;
        double h = opt.max_step;
        double travelled = 0.0;
        while (true) {
            if (static_cast<int>(run.pts.size()) > opt.max_vertices)
                throw Error(ErrorCode::StalledTrace, "trace exceeded its vertex budget");
            // arrive at a critical point that lies on the curve
            bool stop = false;
            for (const cplx& c : on_curve_crit) {
                const cplx d = c - z;
                const double ahead = (std::conj(t) * d).real();
                const double side = std::abs((std::conj(t) * d).imag());
                if (std::abs(d) < 1.5 * h && ahead > 0.0 && side <= 0.3 * std::abs(d)) {
                    run.seg.push_back(std::abs(d));
                    run.pts.push_back(c);
                    run.hit_critical = true;
                    stop = true;
                    break;
                }
            }
            if (stop)
                break;
            // close the loop
            if (travelled > 2.0 * opt.max_step || (travelled > 0.0 && run.pts.size() > 8)) {
                const cplx d = seed - z;
                const double ahead = (std::conj(t) * d).real();
                const double side = std::abs((std::conj(t) * d).imag());
                if (std::abs(d) <= h && ahead > 0.0 && side <= 0.05 * h + 1e-12 && travelled > 4.0 * std::abs(d)) {
                    run.seg.push_back(arc(z, seed, t, t_seed));
                    run.pts.push_back(seed);
                    run.closed = true;
                    break;
                }
            }
            const cplx pred = z + h * t;
            const auto zc = correct(pred);
            bool accept = zc.has_value();
            cplx tn;
            if (accept) {
                tn = dir * tangent(*zc);
                const double turn = std::abs(std::arg(tn / t));
                accept = tn != cplx(0.0) && turn <= opt.max_turn && std::abs(*zc - z) <= 1.5 * h;
            }
            if (!accept) {
                h *= 0.5;
                if (h < opt.min_step)
                    throw Error(ErrorCode::StalledTrace, "corrector failed repeatedly");
                continue;
            }
            const double len = arc(z, *zc, t, tn);
            run.seg.push_back(len);
            run.pts.push_back(*zc);
            travelled += len;
            const double turn = std::abs(std::arg(tn / t));
            z = *zc;
            t = tn;
            if (turn < 0.25 * opt.max_turn)
                h = std::min(opt.max_step, 1.5 * h);
        }
        return run;
    }
};

inline double point_segment_distance(cplx p, cplx a, cplx b)
{
    const cplx ab = b - a;
    const double L2 = std::norm(ab);
    if (L2 == 0.0)
        return std::abs(p - a);
    const double s = std::clamp(((p - a) * std::conj(ab)).real() / L2, 0.0, 1.0);
    return std::abs(p - (a + s * ab));
}

} // namespace detail

inline Trace trace_lemniscate(const CoeffPoly& p, double R, const QuadratureBudget& budget,
    const TraceOptions& topt = {})
{
    if (!(R > 0.0))
        throw Error(ErrorCode::BadParameter, "level must be positive");
    budget.validate();
    const detail::CurveModel m = detail::make_model(p);
    detail::Tracer tr{m, R, topt, {}};
    for (const RootCluster& c : detail::critical_clusters(m))
        if (std::abs(std::abs(p(c.center)) - R) <= 1e-13 * R)
            tr.on_curve_crit.push_back(c.center);

    // seeds: fibers at four targets, around each on-curve critical value, and on two circles
    std::vector<cplx> seeds;
    for (double a : {0.0, 0.5 * kPi, kPi, 1.5 * kPi}) {
        const RootSet rs = fiber(p, std::polar(R, a));
        seeds.insert(seeds.end(), rs.roots.begin(), rs.roots.end());
    }
    for (const cplx& c : tr.on_curve_crit) {
        const double a = std::arg(p(c));
        for (double d : {-1e-3, 1e-3}) {
            const RootSet rs = fiber(p, std::polar(R, a + d));
            seeds.insert(seeds.end(), rs.roots.begin(), rs.roots.end());
        }
    }
    const double rr = std::pow(R, 1.0 / p.degree());
    for (double f : {0.5, 1.0}) {
        const CircleSection cs = circle_intersections(p, f * rr, R);
        for (const auto& pt : cs.points)
            if (auto z = tr.correct(pt.z))
                seeds.push_back(*z);
    }

    struct Piece {
        std::vector<cplx> pts;
        std::vector<double> seg;
        bool closed;
        bool crit;
    };
    std::vector<Piece> pieces;
    auto covered = [&](cplx s) {
        for (const Piece& pc : pieces)
            for (std::size_t i = 0; i + 1 < pc.pts.size(); ++i) {
                const double L = std::abs(pc.pts[i + 1] - pc.pts[i]);
                if (detail::point_segment_distance(s, pc.pts[i], pc.pts[i + 1]) <= 0.1 * L + 1e-9)
                    return true;
            }
        return false;
    };
    for (const cplx& s : seeds) {
        if (std::abs(std::abs(p(s)) - R) > 1e-8 * R || covered(s))
            continue;
        bool near_crit = false;
        for (const cplx& c : tr.on_curve_crit)
            near_crit = near_crit || std::abs(s - c) < 1e-9;
        if (near_crit)
            continue;
        auto fwd = tr.march(s, +1.0);
        if (fwd.closed) {
            pieces.push_back({std::move(fwd.pts), std::move(fwd.seg), true, false});
            continue;
        }
        auto bwd = tr.march(s, -1.0);
        Piece pc;
        pc.pts.assign(bwd.pts.rbegin(), bwd.pts.rend());
        pc.seg.assign(bwd.seg.rbegin(), bwd.seg.rend());
        pc.pts.insert(pc.pts.end(), fwd.pts.begin() + 1, fwd.pts.end());
        pc.seg.insert(pc.seg.end(), fwd.seg.begin(), fwd.seg.end());
        pc.closed = false;
        pc.crit = true;
        pieces.push_back(std::move(pc));
    }

    // chain open pieces that meet at critical points
    std::vector<bool> used(pieces.size(), false);
    Trace out;
    out.level = R;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        Piece cur = pieces[i];
        if (!cur.closed) {
            bool grew = true;
            while (grew) {
                grew = false;
                for (std::size_t j = 0; j < pieces.size(); ++j) {
                    if (used[j] || pieces[j].closed)
                        continue;
                    Piece nx = pieces[j];
                    if (nx.pts.back() == cur.pts.back()) {
                        std::reverse(nx.pts.begin(), nx.pts.end());
                        std::reverse(nx.seg.begin(), nx.seg.end());
                    }
                    if (nx.pts.front() != cur.pts.back())
                        continue;
                    cur.pts.insert(cur.pts.end(), nx.pts.begin() + 1, nx.pts.end());
                    cur.seg.insert(cur.seg.end(), nx.seg.begin(), nx.seg.end());
                    used[j] = true;
                    grew = true;
                    break;
                }
            }
            cur.closed = cur.pts.size() > 2 && cur.pts.front() == cur.pts.back();
        }
        out.components.push_back(std::move(cur.pts));
        out.segment_lengths.push_back(std::move(cur.seg));
        out.closed_flags.push_back(cur.closed);
        out.critical_flags.push_back(cur.crit);
    }
    return out;
}

/// Length of the traced curve inside a region; a segment that crosses the
/// boundary is split at the crossing found by bisection along the chord.
inline double trace_length_within(const Trace& t, const Region& omega)
{
    std::vector<double> parts;
    for (std::size_t c = 0; c < t.components.size(); ++c) {
        const auto& pts = t.components[c];
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const cplx a = pts[i], b = pts[i + 1];
            const double L = t.segment_lengths[c][i];
            const bool ia = omega.contains(a), ib = omega.contains(b);
            if (ia && ib) {
                parts.push_back(L);
                continue;
            }
            if (!ia && !ib)
                continue;
            double lo = 0.0, hi = 1.0; // lo end has membership ia
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (omega.contains(a + mid * (b - a)) == ia ? lo : hi) = mid;
            }
            parts.push_back(L * (ia ? lo : 1.0 - lo));
        }
    }
    return quad::pairwise_sum(parts);
}

inline LengthResult length_trace(const CoeffPoly& p, const Region& omega, const QuadratureBudget& budget,
    double level = 1.0, const TraceOptions& topt = {})
{
    const Trace t = trace_lemniscate(p, level, budget, topt);
    LengthResult r;
    r.method = LengthMethod::trace;
    r.length = trace_length_within(t, omega);
    // step-halving comparison is too costly to run by default; the circular-arc
    // correction leaves O(h^2 turn^2) relative error per unit length
    r.error_estimate = r.length * topt.max_turn * topt.max_turn * topt.max_step * topt.max_step;
    return r;
}

} // namespace lemlab
