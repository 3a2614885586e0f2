#pragma once

// Aberth-Ehrlich simultaneous iteration, and the circle/lemniscate
// intersection solver built on it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lemlab/error.hpp"
#include "lemlab/poly_core.hpp"

namespace lemlab {

struct RootCluster {
    cplx center;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<cplx> roots;
    std::vector<double> residuals; // |p(root)|
    bool converged = false;
    int iterations = 0;

    /// Single-linkage clusters at distance tol; the multiset itself is untouched.
    std::vector<RootCluster> clusters(double tol) const
    {
        const std::size_t n = roots.size();
        std::vector<int> label(n, -1);
        std::vector<RootCluster> out;
        for (std::size_t i = 0; i < n; ++i) {
            if (label[i] >= 0)
                continue;
            const int id = static_cast<int>(out.size());
            std::vector<std::size_t> stack{i};
            label[i] = id;
            cplx sum = 0.0;
            int count = 0;
            while (!stack.empty()) {
                const std::size_t k = stack.back();
                stack.pop_back();
                sum += roots[k];
                ++count;
                for (std::size_t j = 0; j < n; ++j)
                    if (label[j] < 0 && std::abs(roots[j] - roots[k]) <= tol) {
                        label[j] = id;
                        stack.push_back(j);
                    }
            }
            out.push_back({sum / static_cast<double>(count), count});
        }
        return out;
    }
};

struct RootOptions {
    int max_iterations = 200;
    double residual_tol = 1e-10; // relative to max|c_k| max(1,|z|)^n
};

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Starting points from the upper convex hull of (k, log|c_k|): each hull
/// edge contributes as many points as its width, on the circle whose radius
/// is the edge slope.
inline std::vector<cplx> newton_polygon_guesses(std::span<const cplx> c)
{
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<int> idx;
    std::vector<double> lg;
    for (int k = 0; k <= n; ++k)
        if (std::abs(c[static_cast<std::size_t>(k)]) > 0.0) {
            idx.push_back(k);
            lg.push_back(std::log(std::abs(c[static_cast<std::size_t>(k)])));
        }
    std::vector<int> hull; // indices into idx
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) {
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2], b = hull.back();
            const double cross = (idx[b] - idx[a]) * (lg[i] - lg[a]) - (lg[b] - lg[a]) * (idx[i] - idx[a]);
            if (cross >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    std::vector<cplx> z;
    z.reserve(static_cast<std::size_t>(n));
    constexpr double sigma = 0.7;
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const int k0 = idx[hull[h]], k1 = idx[hull[h + 1]];
        const int m = k1 - k0;
        const double u = std::exp((lg[hull[h]] - lg[hull[h + 1]]) / m);
        for (int j = 0; j < m; ++j) {
            const double ang = 2.0 * kPi * j / m + 2.0 * kPi * k0 / n + sigma;
            z.push_back(std::polar(u, ang));
        }
    }
    return z;
}

inline double residual_scale(std::span<const cplx> c, cplx z)
{
    double m = 0.0;
    for (const cplx& v : c)
        m = std::max(m, std::abs(v));
    return m * std::pow(std::max(1.0, std::abs(z)), static_cast<double>(c.size() - 1));
}

/// Aberth-Ehrlich on a polynomial with nonzero leading and constant
/// coefficient. Gauss-Seidel sweeps; a root freezes once its correction is
/// at rounding level.
inline RootSet aberth(std::span<const cplx> c, std::vector<cplx> z, const RootOptions& opt)
{
    const std::size_t n = c.size() - 1;
    std::vector<cplx> d = derivative(c);
    std::vector<bool> frozen(n, false);
    RootSet out;
    // separate coincident warm-start values
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(z[i] - z[j]) <= 1e-14 * std::max(1.0, std::abs(z[i])))
                z[i] += std::polar(1e-7 * std::max(1.0, std::abs(z[i])), 0.3 + static_cast<double>(i));
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        bool all = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (frozen[k])
                continue;
            all = false;
            const cplx pv = horner(c, z[k]);
            if (std::abs(pv) <= 4.0 * kEps * horner_magnitude(c, z[k])) {
                frozen[k] = true; // a root to working precision
                continue;
            }
            const cplx dv = horner(d, z[k]);
            cplx s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) {
                    const cplx diff = z[k] - z[j];
                    if (diff != cplx(0.0))
                        s += 1.0 / diff;
                }
            const cplx denom = dv / pv - s;
            if (denom == cplx(0.0) || !std::isfinite(denom.real()) || !std::isfinite(denom.imag())) {
                z[k] += std::polar(1e-8 * std::max(1.0, std::abs(z[k])), 1.0 + static_cast<double>(k));
                continue;
            }
            const cplx corr = 1.0 / denom;
            z[k] -= corr;
            if (std::abs(corr) <= 4.0 * kEps * std::abs(z[k]))
                frozen[k] = true;
        }
        if (all)
            break;
    }
    // one Newton polish, kept only if it lowers the residual
    for (std::size_t k = 0; k < n; ++k) {
        const cplx pv = horner(c, z[k]);
        const cplx dv = horner(d, z[k]);
        if (dv == cplx(0.0))
            continue;
        const cplx cand = z[k] - pv / dv;
        if (std::abs(horner(c, cand)) < std::abs(pv))
            z[k] = cand;
    }
    out.iterations = it;
    out.roots = std::move(z);
    return out;
}

inline void finish(std::span<const cplx> c, RootSet& rs, const RootOptions& opt)
{
    rs.residuals.resize(rs.roots.size());
    rs.converged = true;
    for (std::size_t k = 0; k < rs.roots.size(); ++k) {
        rs.residuals[k] = std::abs(horner(c, rs.roots[k]));
        if (!std::isfinite(rs.residuals[k]) || rs.residuals[k] > opt.residual_tol * residual_scale(c, rs.roots[k]))
            rs.converged = false;
    }
}

} // namespace detail

/// Roots of a general polynomial (lowest degree first). Leading zeros are
/// trimmed; exact zero roots are split off before iterating.
inline RootSet all_roots(std::span<const cplx> coeffs, const std::vector<cplx>* warm = nullptr,
    const RootOptions& opt = {})
{
    std::size_t top = coeffs.size();
    while (top > 0 && coeffs[top - 1] == cplx(0.0))
        --top;
    if (top <= 1)
        throw Error(ErrorCode::BadParameter, "polynomial has degree < 1");
    std::size_t low = 0;
    while (coeffs[low] == cplx(0.0))
        ++low;
    std::span<const cplx> c = coeffs.subspan(low, top - low);
    const std::size_t m = c.size() - 1;

    RootSet rs;
    if (m > 0) {
        std::vector<cplx> z;
        if (warm && warm->size() == m + low) {
            z = *warm;
            if (low > 0) {
                // drop the warm values nearest zero for the deflated zero roots
                std::stable_sort(z.begin(), z.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
                z.resize(m);
            }
        } else {
            z = detail::newton_polygon_guesses(c);
        }
        rs = detail::aberth(c, std::move(z), opt);
    }
    rs.roots.insert(rs.roots.end(), low, cplx(0.0));
    detail::finish(coeffs.subspan(0, top), rs, opt);
    if (!rs.converged && warm) {
        // a bad warm start is not a reason to fail; retry cold
        RootSet cold = all_roots(coeffs, nullptr, opt);
        if (cold.converged)
            return cold;
    }
    return rs;
}

inline RootSet all_roots(const CoeffPoly& p, const RootOptions& opt = {})
{
    return all_roots(p.coefficients(), nullptr, opt);
}

/// Roots of p', i.e. the critical points.
inline RootSet critical_points(const CoeffPoly& p)
{
    std::vector<cplx> d = derivative(p.coefficients());
    return all_roots(std::span<const cplx>(d));
}

/// Roots of p(z) - w. With warm_start, Aberth starts from the previous
/// fiber, which keeps root k on a continuous branch along an alpha sweep.
inline RootSet fiber(const CoeffPoly& p, cplx w, const RootSet* warm_start = nullptr)
{
    std::vector<cplx> c(p.coefficients().begin(), p.coefficients().end());
    c[0] -= w;
    return all_roots(c, warm_start ? &warm_start->roots : nullptr);
}

/// Same as fiber, but the caller supplies c_0 - w directly. Lets callers that
/// know w as (reference value) + (small offset) avoid cancellation.
inline RootSet fiber_shifted(const CoeffPoly& p, cplx constant_minus_w, const RootSet* warm_start = nullptr)
{
    std::vector<cplx> c(p.coefficients().begin(), p.coefficients().end());
    c[0] = constant_minus_w;
    return all_roots(c, warm_start ? &warm_start->roots : nullptr);
}

// ---------------------------------------------------------------------------

struct CirclePoint {
    cplx z;
    int multiplicity = 1; // > 1 marks a tangency (clustered double root)
};

struct CircleSection {
    double radius = 0.0;
    std::vector<CirclePoint> points;
    bool full_circle = false;
    bool converged = true;

    std::vector<cplx> positions() const
    {
        std::vector<cplx> z;
        z.reserve(points.size());
        for (const auto& p : points)
            z.push_back(p.z);
        return z;
    }
    bool tangent() const
    {
        return std::any_of(points.begin(), points.end(), [](const CirclePoint& p) { return p.multiplicity > 1; });
    }
};

struct CircleOptions {
    double filter_tol = 1e-6;    // relative to r
    double cluster_tol = 1e-7;   // relative to max(1, r)
    double zero_tol = 1e-12;     // full-circle detection, relative to coefficient scale
};

/// Points of the circle |z| = r where |q(z)| = level, for a general
/// coefficient vector q. On |z| = r we have conj(z) = r^2/z, so
/// |q|^2 = level^2 becomes q(z) s(z) = level^2 z^n with
/// s(z) = sum conj(c_k) r^{2k} z^{n-k}, a polynomial equation of degree 2n.
/// The solve runs in u = z/r, where the equation has all its roots of
/// interest on the unit circle.
inline CircleSection circle_intersections(std::span<const cplx> q, double r, double level = 1.0,
    const CircleOptions& opt = {})
{
    if (!(r > 0.0))
        throw Error(ErrorCode::BadParameter, "radius must be positive");
    const std::size_t n = q.size() - 1;
    std::vector<cplx> d(n + 1), sd(n + 1);
    double rk = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
        d[k] = q[k] * rk;
        rk *= r;
    }
    for (std::size_t k = 0; k <= n; ++k)
        sd[n - k] = std::conj(d[k]);
    std::vector<cplx> t = multiply(d, sd);
    t[n] -= level * level;

    // The equation is identically zero when every coefficient cancels down to
    // rounding relative to the terms that produced it.
    std::vector<double> mag(t.size(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= n; ++j)
            mag[i + j] += std::abs(d[i]) * std::abs(sd[j]);
    mag[n] += level * level;
    bool all_cancel = true;
    double scale = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        all_cancel = all_cancel && std::abs(t[j]) <= opt.zero_tol * mag[j];
        scale = std::max(scale, std::abs(t[j]));
    }

    CircleSection out;
    out.radius = r;
    if (all_cancel) {
        out.full_circle = true;
        return out;
    }
    const double trim = 1e-14 * scale;
    std::size_t top = t.size();
    while (top > 1 && std::abs(t[top - 1]) <= trim)
        --top;
    std::size_t low = 0;
    while (low + 1 < top && std::abs(t[low]) <= trim)
        ++low;
    if (top - low <= 1)
        return out;
    std::vector<cplx> tt(t.begin() + static_cast<std::ptrdiff_t>(low), t.begin() + static_cast<std::ptrdiff_t>(top));
    RootOptions ro;
    ro.residual_tol = 1e-9;
    const RootSet rs = all_roots(tt, nullptr, ro);
    out.converged = rs.converged;

    std::vector<cplx> on;
    for (const cplx& u : rs.roots)
        if (std::abs(std::abs(u) - 1.0) <= opt.filter_tol)
            on.push_back(r * (u / std::abs(u)));
    RootSet tmp;
    tmp.roots = std::move(on);
    for (const RootCluster& c : tmp.clusters(opt.cluster_tol * std::max(1.0, r)))
        out.points.push_back({r * (c.center / std::abs(c.center)), c.multiplicity});
    std::sort(out.points.begin(), out.points.end(),
        [](const CirclePoint& a, const CirclePoint& b) { return std::arg(a.z) < std::arg(b.z); });
    return out;
}

inline CircleSection circle_intersections(const CoeffPoly& p, double r, double level = 1.0,
    const CircleOptions& opt = {})
{
    return circle_intersections(p.coefficients(), r, level, opt);
}

} // namespace lemlab
