#pragma once

// Monic complex polynomials in two coordinate systems: dense coefficients and
// (critical points, constant term). The latter is the working representation
// for everything that reasons about dispersion of critical points.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lemlab/error.hpp"

namespace lemlab {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Coefficient-vector helpers (lowest degree first, no monic requirement).

inline cplx horner(std::span<const cplx> c, cplx z)
{
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

/// Upper bound on the rounding error of horner(c, z): sum |c_k| |z|^k.
inline double horner_magnitude(std::span<const cplx> c, cplx z)
{
    const double az = std::abs(z);
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        acc = acc * az + std::abs(*it);
    return acc;
}

inline std::vector<cplx> derivative(std::span<const cplx> c)
{
    if (c.size() <= 1)
        return {cplx(0.0)};
    std::vector<cplx> d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k)
        d[k - 1] = c[k] * static_cast<double>(k);
    return d;
}

inline std::vector<cplx> multiply(std::span<const cplx> a, std::span<const cplx> b)
{
    if (a.empty() || b.empty())
        return {};
    std::vector<cplx> out(a.size() + b.size() - 1, cplx(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

/// Coefficients of z -> p(z + shift).
inline std::vector<cplx> taylor_shift(std::span<const cplx> c, cplx shift)
{
    std::vector<cplx> out(c.begin(), c.end());
    const std::size_t n = out.size();
    if (shift == cplx(0.0))
        return out;
    // Repeated synthetic division by (z - shift).
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t k = n - 1; k > i; --k)
            out[k - 1] += shift * out[k];
    return out;
}

/// Monic product prod (z - r) over the given roots.
inline std::vector<cplx> poly_from_roots(std::span<const cplx> roots)
{
    std::vector<cplx> out{cplx(1.0)};
    out.reserve(roots.size() + 1);
    for (const cplx& r : roots) {
        out.push_back(cplx(0.0));
        for (std::size_t k = out.size() - 1; k > 0; --k)
            out[k] = out[k - 1] - r * out[k];
        out[0] = -r * out[0];
    }
    return out;
}

// ---------------------------------------------------------------------------

/// Dense monic polynomial c_0 + c_1 z + ... + z^n.
class CoeffPoly {
public:
    explicit CoeffPoly(std::vector<cplx> coefficients) : c_(std::move(coefficients))
    {
        if (c_.size() < 2)
            throw Error(ErrorCode::BadParameter, "polynomial must have degree >= 1");
        if (c_.back() != cplx(1.0))
            throw Error(ErrorCode::BadParameter, "leading coefficient must be exactly 1");
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    std::span<const cplx> coefficients() const { return c_; }
    cplx operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    cplx operator()(cplx z) const { return horner(c_, z); }

    /// max_k |c_k|, the scale used by residual tolerances.
    double scale() const
    {
        double s = 0.0;
        for (const cplx& v : c_)
            s = std::max(s, std::abs(v));
        return s;
    }

    friend bool operator==(const CoeffPoly&, const CoeffPoly&) = default;

private:
    std::vector<cplx> c_;
};

struct Derivs {
    cplx value;
    cplx first;
    cplx second;
};

/// p, p', p'' by a single Horner sweep.
inline Derivs eval_all(std::span<const cplx> c, cplx z)
{
    cplx p = 0.0, d1 = 0.0, d2 = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        d2 = d2 * z + d1;
        d1 = d1 * z + p;
        p = p * z + *it;
    }
    return {p, d1, 2.0 * d2};
}

inline Derivs eval_all(const CoeffPoly& p, cplx z) { return eval_all(p.coefficients(), z); }

// ---------------------------------------------------------------------------

inline constexpr double kPoleTolerance = 1e-300;

struct LogDerivs {
    cplx phi; // p'/p
    cplx psi; // p''/p'
};

/// A value counts as zero when it is below the underflow guard or below the
/// rounding error of the Horner sum that produced it.
inline bool vanishes(cplx value, std::span<const cplx> c, cplx z)
{
    const double a = std::abs(value);
    return a < kPoleTolerance || a <= 4.0 * std::numeric_limits<double>::epsilon() * horner_magnitude(c, z);
}

inline LogDerivs log_derivatives(const CoeffPoly& p, cplx z)
{
    const Derivs d = eval_all(p, z);
    if (vanishes(d.value, p.coefficients(), z))
        throw Error(ErrorCode::PoleAtZ, "p vanishes at z; phi undefined");
    if (vanishes(d.first, derivative(p.coefficients()), z))
        throw Error(ErrorCode::PoleAtZ, "p' vanishes at z; psi undefined");
    return {d.first / d.value, d.second / d.first};
}

/// Coefficient-wise complex conjugate, so that conjugate(p)(conj z) = conj(p(z)).
inline CoeffPoly conjugate(const CoeffPoly& p)
{
    std::vector<cplx> c(p.coefficients().begin(), p.coefficients().end());
    for (cplx& v : c)
        v = std::conj(v);
    return CoeffPoly(std::move(c));
}

// ---------------------------------------------------------------------------

/// Sum of distances to the mean of a multiset.
inline double disp_l1(std::span<const cplx> zs)
{
    if (zs.empty())
        return 0.0;
    const cplx mean = std::accumulate(zs.begin(), zs.end(), cplx(0.0)) / static_cast<double>(zs.size());
    double s = 0.0;
    for (const cplx& z : zs)
        s += std::abs(z - mean);
    return s;
}

/// A monic degree-n polynomial given by its n-1 critical points (with
/// repetition) and its value at the origin. The coefficient form is expanded
/// once at construction: p'(z) = n prod (z - zeta), p(0) = constant_term.
class CriticalSpec {
public:
    CriticalSpec(int degree, std::vector<cplx> critical_points, cplx constant_term)
        : n_(degree), zetas_(std::move(critical_points)), c0_(constant_term), poly_(expand(degree, zetas_, c0_))
    {
        normalized_ = satisfies_normalization();
    }

    /// Builds a normalized spec. A mean that misses zero by more than
    /// 1e-12 max(1, max|zeta|) is subtracted out; the constant term must be a
    /// non-positive real.
    static CriticalSpec normalized(int degree, std::vector<cplx> critical_points, double constant_term)
    {
        if (constant_term > 0.0)
            throw Error(ErrorCode::BadParameter, "normalized constant term must be <= 0");
        if (!critical_points.empty()) {
            const cplx mean = std::accumulate(critical_points.begin(), critical_points.end(), cplx(0.0))
                / static_cast<double>(critical_points.size());
            if (std::abs(mean) > mean_tolerance(critical_points))
                for (cplx& z : critical_points)
                    z -= mean;
        }
        CriticalSpec s(degree, std::move(critical_points), cplx(constant_term));
        s.normalized_ = true;
        return s;
    }

    int degree() const { return n_; }
    std::span<const cplx> critical_points() const { return zetas_; }
    cplx constant_term() const { return c0_; }
    bool is_normalized() const { return normalized_; }
    const CoeffPoly& poly() const { return poly_; }

private:
    static double mean_tolerance(std::span<const cplx> zs)
    {
        double m = 1.0;
        for (const cplx& z : zs)
            m = std::max(m, std::abs(z));
        return 1e-12 * m;
    }

    bool satisfies_normalization() const
    {
        if (c0_.imag() != 0.0 || c0_.real() > 0.0)
            return false;
        if (zetas_.empty())
            return true;
        const cplx sum = std::accumulate(zetas_.begin(), zetas_.end(), cplx(0.0));
        return std::abs(sum) / static_cast<double>(zetas_.size()) <= mean_tolerance(zetas_);
    }

    static CoeffPoly expand(int n, std::span<const cplx> zetas, cplx c0)
    {
        if (n < 1)
            throw Error(ErrorCode::BadParameter, "degree must be >= 1");
        if (zetas.size() != static_cast<std::size_t>(n - 1))
            throw Error(ErrorCode::BadParameter,
                "expected " + std::to_string(n - 1) + " critical points, got " + std::to_string(zetas.size()));
        const std::vector<cplx> q = poly_from_roots(zetas); // monic, degree n-1
        std::vector<cplx> c(static_cast<std::size_t>(n) + 1);
        c[0] = c0;
        for (int k = 0; k < n; ++k)
            c[static_cast<std::size_t>(k) + 1] = q[static_cast<std::size_t>(k)] * (static_cast<double>(n) / (k + 1));
        c.back() = 1.0;
        return CoeffPoly(std::move(c));
    }

    int n_;
    std::vector<cplx> zetas_;
    cplx c0_;
    CoeffPoly poly_;
    bool normalized_ = false;
};

inline CoeffPoly from_critical_points(const CriticalSpec& spec) { return spec.poly(); }

/// psi(z) = sum 1/(z - zeta), evaluated from the critical points.
inline cplx psi_partial_fractions(std::span<const cplx> zetas, cplx z)
{
    cplx s = 0.0;
    for (const cplx& zeta : zetas) {
        const cplx d = z - zeta;
        if (std::abs(d) < kPoleTolerance)
            throw Error(ErrorCode::PoleAtZ, "z coincides with a critical point");
        s += 1.0 / d;
    }
    return s;
}

/// sum 1/|z - zeta|, the triangle-inequality majorant of |psi|.
inline double psi_majorant(std::span<const cplx> zetas, cplx z)
{
    double s = 0.0;
    for (const cplx& zeta : zetas)
        s += 1.0 / std::abs(z - zeta);
    return s;
}

// ---------------------------------------------------------------------------

struct NormalizeResult {
    CoeffPoly normalized;
    cplx shift;
    double rotation;
};

/// Removes the translation and rotation freedom: the result is
/// e^{-in theta} p(e^{i theta} z - shift), with vanishing z^{n-1} coefficient
/// and non-positive real constant term. theta is taken in [0, 2 pi / n).
inline NormalizeResult normalize(const CoeffPoly& p)
{
    const int n = p.degree();
    const cplx shift = p[n - 1] / static_cast<double>(n);
    std::vector<cplx> q = taylor_shift(p.coefficients(), -shift);
    q[static_cast<std::size_t>(n) - 1] = 0.0;

    double theta = 0.0;
    const double period = 2.0 * kPi / n;
    if (std::abs(q[0]) > 0.0) {
        theta = std::fmod((std::arg(q[0]) - kPi) / n, period);
        if (theta < 0.0)
            theta += period;
        if (theta >= period)
            theta -= period;
    }
    for (int k = 0; k <= n; ++k)
        q[static_cast<std::size_t>(k)] *= std::polar(1.0, (k - n) * theta);
    q[0] = cplx(-std::abs(q[0]), 0.0);
    q.back() = 1.0;
    return {CoeffPoly(std::move(q)), shift, theta};
}

// ---------------------------------------------------------------------------

struct NormBundle {
    double l1_dispersion = 0.0;    // sum |zeta|
    double origin_repulsion = 0.0; // n |1 + p(0)|^{1/n}
    double total_size = 0.0;
    double l2_dispersion = 0.0;    // sum |zeta|^2
};

inline NormBundle norms(const CriticalSpec& spec)
{
    NormBundle b;
    for (const cplx& z : spec.critical_points()) {
        b.l1_dispersion += std::abs(z);
        b.l2_dispersion += std::norm(z);
    }
    const int n = spec.degree();
    b.origin_repulsion = n * std::pow(std::abs(1.0 + spec.constant_term()), 1.0 / n);
    b.total_size = b.l1_dispersion + b.origin_repulsion;
    return b;
}

/// min_zeta |z - zeta| / |z|.
inline double delta(const CriticalSpec& spec, cplx z)
{
    if (z == cplx(0.0))
        throw Error(ErrorCode::OriginInput, "delta is undefined at the origin");
    double m = std::numeric_limits<double>::infinity();
    for (const cplx& zeta : spec.critical_points())
        m = std::min(m, std::abs(z - zeta));
    return m / std::abs(z);
}

// ---------------------------------------------------------------------------

enum class Family { p0, example1, example2, cassini };

inline std::string_view to_string(Family f)
{
    switch (f) {
    case Family::p0: return "p0";
    case Family::example1: return "example1";
    case Family::example2: return "example2";
    case Family::cassini: return "cassini";
    }
    return "?";
}

inline Family parse_family(std::string_view name)
{
    if (name == "p0") return Family::p0;
    if (name == "example1") return Family::example1;
    if (name == "example2") return Family::example2;
    if (name == "cassini") return Family::cassini;
    throw Error(ErrorCode::BadParameter, "unknown family '" + std::string(name) + "'");
}

/// Built-in families:
///   p0        z^n - 1
///   example1  z^n - n/(n-2) a^2 z^{n-2} - 1   (critical points +-a, 0^{n-3})
///   example2  z^n - 1 - (a/n)^n               (all critical points at 0)
///   cassini   z^2 - r^2
inline CriticalSpec family(Family name, int n, double a_or_r = 0.0)
{
    if (n < 1)
        throw Error(ErrorCode::BadParameter, "degree must be >= 1");
    switch (name) {
    case Family::p0:
        return CriticalSpec::normalized(n, std::vector<cplx>(static_cast<std::size_t>(n - 1), 0.0), -1.0);
    case Family::example1: {
        if (n <= 2)
            throw Error(ErrorCode::BadParameter, "example1 needs n > 2");
        if (!(a_or_r > 0.0 && a_or_r < 1.0))
            throw Error(ErrorCode::BadParameter, "example1 needs 0 < a < 1");
        std::vector<cplx> z(static_cast<std::size_t>(n - 1), 0.0);
        z[0] = a_or_r;
        z[1] = -a_or_r;
        return CriticalSpec::normalized(n, std::move(z), -1.0);
    }
    case Family::example2: {
        if (!(a_or_r > 0.0 && a_or_r <= 1.0))
            throw Error(ErrorCode::BadParameter, "example2 needs 0 < a <= 1");
        return CriticalSpec::normalized(
            n, std::vector<cplx>(static_cast<std::size_t>(n - 1), 0.0), -1.0 - std::pow(a_or_r / n, n));
    }
    case Family::cassini:
        if (n != 2)
            throw Error(ErrorCode::BadParameter, "cassini is degree 2");
        if (!(a_or_r > 0.0))
            throw Error(ErrorCode::BadParameter, "cassini needs r > 0");
        return CriticalSpec::normalized(2, {cplx(0.0)}, -a_or_r * a_or_r);
    }
    throw Error(ErrorCode::BadParameter, "unknown family");
}

} // namespace lemlab
