#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace lemlab::quad {

// Gauss-Kronrod 7/15 on [-1, 1]; abscissae descending, centre last.
inline constexpr std::array<double, 8> kGkNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for kGkNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Rule {
    std::span<const double> nodes;   // on [-1, 1]
    std::span<const double> weights;
};

inline constexpr std::array<double, 3> kGl3Nodes = {-0.774596669241483377035853079956, 0.0, 0.774596669241483377035853079956};
inline constexpr std::array<double, 3> kGl3Weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
inline constexpr std::array<double, 5> kGl5Nodes = {
    -0.906179845938663992797626878299, -0.538469310105683091036314420700, 0.0,
    0.538469310105683091036314420700, 0.906179845938663992797626878299};
inline constexpr std::array<double, 5> kGl5Weights = {
    0.236926885056189087514264040720, 0.478628670499366468041291514836, 0.568888888888888888888888888889,
    0.478628670499366468041291514836, 0.236926885056189087514264040720};

inline constexpr Rule gauss3() { return {kGl3Nodes, kGl3Weights}; }
inline constexpr Rule gauss5() { return {kGl5Nodes, kGl5Weights}; }

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// One Gauss-Kronrod panel; error is |K15 - G7|.
template <class F>
Estimate gk15(F&& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = kKronrodWeights[7] * fc;
    double g = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGkNodes[static_cast<std::size_t>(i)];
        const double s = f(c - dx) + f(c + dx);
        k += kKronrodWeights[static_cast<std::size_t>(i)] * s;
        if (i % 2 == 1)
            g += kGaussWeights[static_cast<std::size_t>(i / 2)] * s;
    }
    return {k * h, std::abs((k - g) * h)};
}

struct Piece {
    double a;
    double b;
    int tag; // forwarded to the integrand; lets one call integrate several transformed maps
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
    bool converged = false;
};

/// Globally adaptive Gauss-Kronrod over a set of pieces. The panel with the
/// largest error estimate is bisected until the summed error drops below
/// max(abs_tol, rel_tol |value|) or max_panels is reached. Nodes never touch
/// panel endpoints, so integrable endpoint singularities are allowed.
/// f(tag, x) is called in panel order, left to right within a panel.
template <class F>
Result integrate(F&& f, std::span<const Piece> pieces, double rel_tol, double abs_tol, int max_panels)
{
    struct Panel {
        double a, b;
        int tag;
        Estimate est;
        bool operator<(const Panel& o) const { return est.error < o.est.error; }
    };
    std::priority_queue<Panel> heap;
    Result r;
    auto eval = [&](double a, double b, int tag) {
        return gk15([&](double x) { return f(tag, x); }, a, b);
    };
    for (const Piece& p : pieces) {
        if (!(p.b > p.a))
            continue;
        const Estimate e = eval(p.a, p.b, p.tag);
        heap.push({p.a, p.b, p.tag, e});
        ++r.panels;
    }
    auto totals = [&]() {
        // priority_queue has no iteration; rebuild sums from a copy
        double v = 0.0, err = 0.0;
        auto copy = heap;
        while (!copy.empty()) {
            v += copy.top().est.value;
            err += copy.top().est.error;
            copy.pop();
        }
        return Estimate{v, err};
    };
    Estimate tot = totals();
    while (!heap.empty()) {
        if (tot.error <= std::max(abs_tol, rel_tol * std::abs(tot.value))) {
            r.converged = true;
            break;
        }
        if (r.panels >= max_panels)
            break;
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // cannot split further in double precision
            r.converged = tot.error <= 10.0 * std::max(abs_tol, rel_tol * std::abs(tot.value));
            break;
        }
        heap.pop();
        const Estimate left = eval(worst.a, mid, worst.tag);
        const Estimate right = eval(mid, worst.b, worst.tag);
        heap.push({worst.a, mid, worst.tag, left});
        heap.push({mid, worst.b, worst.tag, right});
        r.panels += 1;
        tot.value += left.value + right.value - worst.est.value;
        tot.error += left.error + right.error - worst.est.error;
        if (r.panels % 64 == 0)
            tot = totals(); // resynchronise the running sums
    }
    tot = totals();
    r.value = tot.value;
    r.error = tot.error;
    if (heap.empty())
        r.converged = true;
    return r;
}

template <class F>
Result integrate(F&& f, double a, double b, double rel_tol, double abs_tol = 0.0, int max_panels = 2000)
{
    const Piece p{a, b, 0};
    return integrate([&](int, double x) { return f(x); }, std::span<const Piece>(&p, 1), rel_tol, abs_tol,
        max_panels);
}

/// Pairwise (cascade) summation; results do not depend on the order in which
/// equal-sized work items finish.
inline double pairwise_sum(std::span<const double> xs)
{
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs)
            s += x;
        return s;
    }
    const std::size_t h = xs.size() / 2;
    return pairwise_sum(xs.first(h)) + pairwise_sum(xs.subspan(h));
}

} // namespace lemlab::quad
