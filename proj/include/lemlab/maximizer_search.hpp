#pragma once

// Derivative-free maximization of the length of |p| = 1 over normalized
// polynomials, and perturbation studies around z^n - 1.
//
// Parameters: critical points zeta_1 .. zeta_{n-2} as (re, im) pairs, the last
// one fixed by the zero mean, then one real s with
//   p(0) = -1 + sgn(s) (|s|/n)^n,
// so that |s| is the origin repulsion. s is clamped to s <= n, i.e. p(0) <= 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "lemlab/arclength.hpp"
#include "lemlab/error.hpp"
#include "lemlab/parallel.hpp"
#include "lemlab/poly_core.hpp"

namespace lemlab {

struct SearchPoint {
    std::vector<double> params;
    double objective = -std::numeric_limits<double>::infinity();
    bool feasible = false;
};

inline int search_dimension(int n) { return 2 * n - 3; }

inline CriticalSpec decode(int n, std::span<const double> x)
{
    if (n < 2)
        throw Error(ErrorCode::BadParameter, "search needs n >= 2");
    if (static_cast<int>(x.size()) != search_dimension(n))
        throw Error(ErrorCode::BadParameter, "parameter vector has the wrong length");
    std::vector<cplx> z;
    cplx sum = 0.0;
    for (int k = 0; k < n - 2; ++k) {
        z.emplace_back(x[static_cast<std::size_t>(2 * k)], x[static_cast<std::size_t>(2 * k + 1)]);
        sum += z.back();
    }
    if (n >= 2)
        z.push_back(-sum);
    const double s = std::min(x.back(), static_cast<double>(n));
    const double c0 = -1.0 + std::copysign(std::pow(std::abs(s) / n, n), s);
    return CriticalSpec(n, std::move(z), cplx(std::min(c0, 0.0)));
}

inline std::vector<double> encode(const CriticalSpec& spec)
{
    const int n = spec.degree();
    std::vector<double> x;
    const auto zs = spec.critical_points();
    for (int k = 0; k < n - 2; ++k) {
        x.push_back(zs[static_cast<std::size_t>(k)].real());
        x.push_back(zs[static_cast<std::size_t>(k)].imag());
    }
    const double t = 1.0 + spec.constant_term().real();
    x.push_back(std::copysign(n * std::pow(std::abs(t), 1.0 / n), t));
    return x;
}

inline std::vector<double> p0_params(int n) { return std::vector<double>(static_cast<std::size_t>(search_dimension(n)), 0.0); }

/// Total size |p| of the decoded polynomial.
inline double param_norm(int n, std::span<const double> x) { return norms(decode(n, x)).total_size; }

/// Length of |p| = 1; fiber formula, tracing on failure, -inf if both fail.
inline double objective(int n, std::span<const double> x, const QuadratureBudget& budget)
{
    try {
        const CriticalSpec s = decode(n, x);
        try {
            const double v = length_fiber(s, Region::plane(), budget).length;
            if (std::isfinite(v))
                return v;
        } catch (const Error&) {
        }
        const double v = trace_lemniscate(s.poly(), 1.0, budget).total_length();
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const Error&) {
        return -std::numeric_limits<double>::infinity();
    }
}

struct HistoryEntry {
    int restart = 0;
    int iteration = 0;
    double objective = 0.0;
};

struct SearchReport {
    int n = 0;
    SearchPoint best;
    int restarts = 0;
    bool converged_to_p0 = false;
    double best_norm = 0.0;
    std::vector<HistoryEntry> history;
};

struct SearchOptions {
    int restarts = 4;
    int max_iterations = 300;
    int max_cycles = 8;
    double initial_step = 0.05;
    double diameter_tol = 1e-5;
    double p0_threshold = 0.05;
    std::uint64_t seed = 0x45485031;
    double restart_spread = 0.05; // restart k > 0 starts from a random offset of this size
};

namespace detail {

struct NelderMeadResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> history; // (iteration, best f)
};

/// Minimizes f. Infinite values are accepted and push the simplex to shrink.
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, double step, double diameter_tol, int max_iter)
{
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> v(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i)
        v[i + 1][i] += step;
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i)
        fv[i] = f(v[i]);
    NelderMeadResult out;
    std::vector<std::size_t> idx(d + 1);
    auto order = [&] {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    };
    auto combine = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> r(d);
        for (std::size_t i = 0; i < d; ++i)
            r[i] = c[i] + t * (w[i] - c[i]);
        return r;
    };
    for (int it = 0; it < max_iter; ++it) {
        order();
        out.history.emplace_back(it, fv[idx[0]]);
        double diam = 0.0;
        for (std::size_t k = 1; k <= d; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                s = std::max(s, std::abs(v[idx[k]][i] - v[idx[0]][i]));
            diam = std::max(diam, s);
        }
        if (diam < diameter_tol)
            break;
        std::vector<double> c(d, 0.0);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t i = 0; i < d; ++i)
                c[i] += v[idx[k]][i] / static_cast<double>(d);
        const std::size_t w = idx[d];
        const std::vector<double> xr = combine(c, v[w], -1.0);
        const double fr = f(xr);
        if (fr < fv[idx[0]]) {
            const std::vector<double> xe = combine(c, v[w], -2.0);
            const double fe = f(xe);
            if (fe < fr) {
                v[w] = xe;
                fv[w] = fe;
            } else {
                v[w] = xr;
                fv[w] = fr;
            }
            continue;
        }
        if (fr < fv[idx[d - 1]]) {
            v[w] = xr;
            fv[w] = fr;
            continue;
        }
        const bool outside = fr < fv[w];
        const std::vector<double> xc = combine(c, outside ? xr : v[w], 0.5);
        const double fc = f(xc);
        if (fc < (outside ? fr : fv[w])) {
            v[w] = xc;
            fv[w] = fc;
            continue;
        }
        for (std::size_t k = 1; k <= d; ++k) {
            v[idx[k]] = combine(v[idx[0]], v[idx[k]], 0.5);
            fv[idx[k]] = f(v[idx[k]]);
        }
    }
    order();
    out.x = v[idx[0]];
    out.f = fv[idx[0]];
    return out;
}

} // namespace detail

/// Restarts run in parallel; restart 0 starts at `start`, restart k > 0 at a
/// seeded random offset from it. The best point is re-evaluated at `budget`;
/// the search itself runs at a 10x looser tolerance.
inline SearchReport local_search(int n, const std::vector<double>& start, const QuadratureBudget& budget,
    const SearchOptions& opt = {})
{
    if (static_cast<int>(start.size()) != search_dimension(n))
        throw Error(ErrorCode::BadParameter, "start has the wrong length");
    if (opt.restarts < 1)
        throw Error(ErrorCode::ConfigError, "need at least one restart");
    const QuadratureBudget loose = budget.loosened(10.0);
    auto f = [&](const std::vector<double>& x) {
        const double v = objective(n, x, loose);
        return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    };
    const auto runs = parallel_map(static_cast<std::size_t>(opt.restarts), [&](std::size_t k) {
        std::vector<double> x = start;
        if (k > 0) {
            std::seed_seq ss{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                static_cast<std::uint32_t>(k)};
            std::mt19937_64 rng(ss);
            std::normal_distribution<double> g(0.0, opt.restart_spread);
            for (double& xi : x)
                xi += g(rng);
        }
        // a collapsed simplex on a kinked objective is rebuilt at full size
        // until a cycle no longer improves
        auto r = detail::nelder_mead(f, std::move(x), opt.initial_step, opt.diameter_tol, opt.max_iterations);
        for (int cycle = 1; cycle < opt.max_cycles; ++cycle) {
            auto next = detail::nelder_mead(f, r.x, opt.initial_step, opt.diameter_tol, opt.max_iterations);
            const int offset = r.history.empty() ? 0 : r.history.back().first + 1;
            for (auto& h : next.history)
                r.history.emplace_back(h.first + offset, h.second);
            const bool improved = next.f < r.f - 1e-12 * std::abs(r.f);
            if (next.f < r.f) {
                r.x = next.x;
                r.f = next.f;
            }
            if (!improved)
                break;
        }
        return r;
    });
    SearchReport rep;
    rep.n = n;
    rep.restarts = opt.restarts;
    std::size_t best = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        for (const auto& [it, fv] : runs[k].history)
            rep.history.push_back({static_cast<int>(k), it, -fv});
        if (runs[k].f < runs[best].f)
            best = k;
    }
    rep.best.params = runs[best].x;
    rep.best.objective = objective(n, rep.best.params, budget);
    rep.best.feasible = std::isfinite(rep.best.objective);
    rep.best_norm = param_norm(n, rep.best.params);
    rep.converged_to_p0 = rep.best_norm <= opt.p0_threshold;
    return rep;
}

// ---------------------------------------------------------------------------
// perturbations of z^n - 1

enum class Direction { random, example1, example2 };

struct PerturbationSample {
    double magnitude = 0.0; // requested
    double norm = 0.0;      // realized |p|
    double delta = 0.0;     // length(p0) - length(p)
};

struct PerturbationSummary {
    double magnitude = 0.0;
    double min_delta = 0.0;
    double mean_delta = 0.0;
    int count = 0;
};

struct PerturbationStudy {
    int n = 0;
    std::vector<PerturbationSample> samples;
    std::vector<PerturbationSummary> per_magnitude;
    double c_fit = 0.0; // mean(delta / |p|)
    int failures = 0;
};

/// A normalized polynomial at total size m in the given direction. For random
/// directions |p| is homogeneous of degree 1 in the parameters, so the scale
/// is exact.
inline std::vector<double> perturbation(int n, double m, Direction dir, std::mt19937_64& rng)
{
    std::vector<double> x = p0_params(n);
    if (m == 0.0)
        return x;
    switch (dir) {
    case Direction::example1: return encode(family(Family::example1, n, 0.5 * m));
    case Direction::example2: return encode(family(Family::example2, n, m));
    case Direction::random: break;
    }
    // p(0) = -1 + (s/n)^n loses s to rounding once (s/n)^n is below ~1e-13;
    // such draws realize a smaller |p| and are redrawn
    std::normal_distribution<double> g(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        for (double& xi : x)
            xi = g(rng);
        const double size = param_norm(n, x);
        for (double& xi : x)
            xi *= m / size;
        if (std::abs(param_norm(n, x) - m) <= 1e-3 * m)
            return x;
    }
    throw Error(ErrorCode::NoConvergence, "no perturbation realizes the requested size");
}

inline PerturbationStudy perturbation_study(int n, const std::vector<double>& magnitudes, int directions,
    std::uint64_t seed, const QuadratureBudget& budget, Direction dir = Direction::random)
{
    if (n < 3)
        throw Error(ErrorCode::BadParameter, "perturbation study needs n >= 3");
    if (directions < 1)
        throw Error(ErrorCode::BadParameter, "need at least one direction");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> points;
    std::vector<double> mags;
    for (double m : magnitudes)
        for (int k = 0; k < (dir == Direction::random ? directions : 1); ++k) {
            points.push_back(perturbation(n, m, dir, rng));
            mags.push_back(m);
        }
    const double l0 = length_p0_closed(n);
    const auto lengths = parallel_map(points.size(), [&](std::size_t i) { return objective(n, points[i], budget); });

    PerturbationStudy st;
    st.n = n;
    double ratio_sum = 0.0;
    int ratio_count = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(lengths[i])) {
            ++st.failures;
            continue;
        }
        PerturbationSample s{mags[i], param_norm(n, points[i]), l0 - lengths[i]};
        if (s.norm > 0.0) {
            ratio_sum += s.delta / s.norm;
            ++ratio_count;
        }
        st.samples.push_back(s);
    }
    for (double m : magnitudes) {
        PerturbationSummary sum{m, std::numeric_limits<double>::infinity(), 0.0, 0};
        for (const auto& s : st.samples)
            if (s.magnitude == m) {
                sum.min_delta = std::min(sum.min_delta, s.delta);
                sum.mean_delta += s.delta;
                ++sum.count;
            }
        if (sum.count > 0)
            sum.mean_delta /= sum.count;
        st.per_magnitude.push_back(sum);
    }
    st.c_fit = ratio_count > 0 ? ratio_sum / ratio_count : 0.0;
    return st;
}

} // namespace lemlab
