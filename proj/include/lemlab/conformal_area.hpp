#pragma once

// Exterior conformal data of E_R(p) for R > 1. The boundary is sampled as
// z(theta) with p(z(theta)) = R e^{i n theta}; its Fourier coefficients are
// the Laurent coefficients of the exterior map w -> z with w = R^{1/n} e^{i theta}:
//   z = a_{-1} w + a_0 + sum_k a_k w^{-k}.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "lemlab/error.hpp"
#include "lemlab/poly_core.hpp"

namespace lemlab {

struct LaurentData {
    double level = 0.0;
    int degree = 0;
    cplx a_minus1 = 0.0;
    cplx a0 = 0.0;
    std::vector<cplx> coeffs; // a_1 .. a_K
    std::vector<cplx> samples;
    double capacity_check = 0.0; // |a_{-1} - 1|
    double tail = 0.0;           // max |a_k| R^{-k/n} over the last n terms

    double radius() const { return std::pow(level, 1.0 / degree); }
    /// a_k R^{-k/n}, the size of the k-th term on the boundary
    double scaled(std::size_t k) const { return std::abs(coeffs[k - 1]) * std::pow(level, -static_cast<double>(k) / degree); }
};

struct ConformalOptions {
    int samples = 0;       // M; 0 picks max(8n, 512) rounded up to a power of two
    int terms = 0;         // K; 0 picks M/4
    double step_ratio = 0.7;
    double residual_tol = 1e-10;
};

inline int default_samples(int n)
{
    return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::max(8 * n, 512))));
}

/// M points z(theta_j), theta_j = 2 pi j / M, by continuation in the level from
/// a large R where z ~ R^{1/n} e^{i theta}.
inline std::vector<cplx> boundary_param(const CoeffPoly& p, double R, int M, double step_ratio = 0.7,
    double residual_tol = 1e-10)
{
    const int n = p.degree();
    if (!(R > 1.0))
        throw Error(ErrorCode::BadParameter, "boundary parameterization needs R > 1");
    if (n < 1)
        throw Error(ErrorCode::BadParameter, "degree must be >= 1");
    if (M < 8 * n || !std::has_single_bit(static_cast<unsigned>(M)))
        throw Error(ErrorCode::BadParameter, "M must be a power of two >= 8n");
    if (!(step_ratio > 0.0 && step_ratio < 1.0))
        throw Error(ErrorCode::BadParameter, "step ratio must lie in (0, 1)");

    const std::span<const cplx> c = p.coefficients();
    const std::vector<cplx> dc = derivative(c);
    double cmax = 0.0;
    for (int k = 0; k < n; ++k)
        cmax = std::max(cmax, std::abs(c[static_cast<std::size_t>(k)]));
    double level = std::max(R, std::pow(2.0 * (1.0 + cmax), n));

    std::vector<cplx> rot(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j)
        rot[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * kPi * j / M);

    auto solve = [&](std::vector<cplx>& z, double lvl, bool track) {
        std::vector<cplx> out(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) {
            const cplx target = lvl * std::pow(rot[j], n);
            cplx x = z[j];
            bool ok = false;
            for (int it = 0; it < 40; ++it) {
                const cplx f = horner(c, x) - target;
                if (std::abs(f) <= 1e-13 * lvl) {
                    ok = true;
                    break;
                }
                const cplx d = horner(dc, x);
                if (d == cplx(0.0))
                    break;
                x -= f / d;
            }
            if (!ok || !std::isfinite(x.real()) || !std::isfinite(x.imag()))
                return false;
            out[j] = x;
        }
        // each point must stay on its own branch: the move is small next to the sample spacing
        const std::size_t m = z.size();
        for (std::size_t j = 0; track && j < m; ++j) {
            const double gap = std::min(std::abs(z[j] - z[(j + 1) % m]), std::abs(z[j] - z[(j + m - 1) % m]));
            if (std::abs(out[j] - z[j]) > 0.5 * gap)
                return false;
        }
        z = std::move(out);
        return true;
    };

    std::vector<cplx> z(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j)
        z[static_cast<std::size_t>(j)] = std::pow(level, 1.0 / n) * rot[static_cast<std::size_t>(j)];
    if (!solve(z, level, false))
        throw Error(ErrorCode::HomotopyStall, "initial Newton solve failed");

    double ratio = step_ratio;
    while (level > R) {
        const double next = std::max(R, level * ratio);
        std::vector<cplx> trial = z;
        const double s = std::pow(next / level, 1.0 / n);
        for (cplx& x : trial)
            x *= s;
        if (solve(trial, next, true)) {
            z = std::move(trial);
            level = next;
            ratio = std::max(step_ratio, ratio * ratio);
        } else {
            ratio = std::sqrt(ratio);
            if (1.0 - ratio < 1e-9)
                throw Error(ErrorCode::HomotopyStall, "level continuation stalled; R is too close to a critical value");
        }
    }
    for (int j = 0; j < M; ++j) {
        const std::size_t i = static_cast<std::size_t>(j);
        if (std::abs(horner(c, z[i]) - R * std::pow(rot[i], n)) > residual_tol * R)
            throw Error(ErrorCode::HomotopyStall, "boundary residual above tolerance");
    }
    return z;
}

inline LaurentData laurent_coeffs(const CoeffPoly& p, double R, int K = 0, const ConformalOptions& opt = {})
{
    const int n = p.degree();
    const int M = opt.samples > 0 ? opt.samples : default_samples(n);
    if (K <= 0)
        K = opt.terms > 0 ? opt.terms : M / 4;
    if (K > M / 2)
        throw Error(ErrorCode::BadParameter, "K must be at most M/2");
    LaurentData d;
    d.level = R;
    d.degree = n;
    d.samples = boundary_param(p, R, M, opt.step_ratio, opt.residual_tol);
    const double rn = std::pow(R, 1.0 / n);
    auto fourier = [&](int m) {
        // (1/M) sum_j z_j e^{-i m theta_j}
        cplx s = 0.0;
        for (int j = 0; j < M; ++j) {
            const long long e = (static_cast<long long>(m) * j) % M;
            s += d.samples[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * kPi * static_cast<double>(e) / M);
        }
        return s / static_cast<double>(M);
    };
    d.a_minus1 = fourier(1) / rn;
    d.a0 = fourier(0);
    d.coeffs.resize(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k)
        d.coeffs[static_cast<std::size_t>(k) - 1] = fourier(-k) * std::pow(rn, k);
    d.capacity_check = std::abs(d.a_minus1 - 1.0);
    for (int k = std::max(1, K - n + 1); k <= K; ++k)
        d.tail = std::max(d.tail, d.scaled(static_cast<std::size_t>(k)));
    return d;
}

/// pi R^{2/n} - pi sum k |a_k|^2 R^{-2k/n}
inline double gronwall_area(const LaurentData& d)
{
    double s = 0.0;
    for (std::size_t k = d.coeffs.size(); k >= 1; --k) {
        const double t = d.scaled(k);
        s += static_cast<double>(k) * t * t;
    }
    const double r = d.radius();
    return kPi * (r * r - s);
}

/// Truncation and rounding error of gronwall_area: the next n terms are taken
/// no larger than the last n, and beyond that the series is assumed to halve.
inline double gronwall_error(const LaurentData& d)
{
    const double K = static_cast<double>(d.coeffs.size());
    const double r = d.radius();
    return kPi * (2.0 * d.degree * (K + 2.0 * d.degree) * d.tail * d.tail + 1e-12 * r * r);
}

/// 2 pi (R^{2/n} + sum k^2 |a_k|^2 R^{-2k/n})^{1/2}, an upper bound for the boundary length
inline double perimeter_bound(const LaurentData& d)
{
    double s = 0.0;
    for (std::size_t k = d.coeffs.size(); k >= 1; --k) {
        const double t = static_cast<double>(k) * d.scaled(k);
        s += t * t;
    }
    const double r = d.radius();
    return 2.0 * kPi * std::sqrt(r * r + s);
}

/// Length of the boundary from the truncated series, trapezoidal in theta.
inline double param_length(const LaurentData& d)
{
    const std::size_t M = d.samples.size();
    const double r = d.radius();
    std::vector<double> v(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double th = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(M);
        cplx dz = cplx(0.0, 1.0) * r * std::polar(1.0, th);
        for (std::size_t k = 1; k <= d.coeffs.size(); ++k)
            dz -= cplx(0.0, static_cast<double>(k)) * d.coeffs[k - 1] * std::pow(r, -static_cast<double>(k))
                * std::polar(1.0, -static_cast<double>(k) * th);
        v[j] = std::abs(dz);
    }
    double s = 0.0;
    for (double x : v)
        s += x;
    return 2.0 * kPi * s / static_cast<double>(M);
}

struct InclusionRadii {
    double inner = 0.0;
    double outer = 0.0;
};

/// D(0, inner) is inside E_R and E_R is inside the closed disk of radius outer.
inline InclusionRadii inclusion_radii(const LaurentData& d)
{
    double s = 0.0;
    for (std::size_t k = d.coeffs.size(); k >= 1; --k)
        s += d.scaled(k);
    const double r = d.radius();
    return {std::max(0.0, r - s), r + s};
}

/// Winding number of a closed sampled curve about a point.
inline int winding_number(std::span<const cplx> pts, cplx about)
{
    double total = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j)
        total += std::arg((pts[(j + 1) % pts.size()] - about) / (pts[j] - about));
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

} // namespace lemlab
