#pragma once

// Areas and weighted area integrals over Regions by adaptive quadtree.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "lemlab/error.hpp"
#include "lemlab/poly_core.hpp"
#include "lemlab/quadrature.hpp"
#include "lemlab/region.hpp"

namespace lemlab {

struct MeasureResult {
    double value = 0.0;
    double error_bound = 0.0;
    bool budget_exceeded = false;
    long cells = 0;
};

inline double equiv_radius(double area)
{
    if (!(area >= 0.0))
        throw Error(ErrorCode::BadParameter, "area must be >= 0");
    return std::sqrt(area / kPi);
}

namespace detail {

/// A point singularity of the integrand (behaves like 1/|z - at|).
struct Pole {
    cplx at;
};

inline std::vector<Pole> distinct_poles(std::span<const cplx> zs)
{
    std::vector<Pole> out;
    for (const cplx& z : zs)
        if (std::none_of(out.begin(), out.end(), [&](const Pole& p) { return p.at == z; }))
            out.push_back({z});
    return out;
}

/// Tensor Gauss rule on a box, optionally masked by region membership.
template <class F>
double gauss_box(F& f, const Box& b, quad::Rule rule)
{
    const double hx = 0.5 * b.width(), hy = 0.5 * b.height();
    const cplx c = b.center();
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j)
            row += rule.weights[j] * f(c + cplx(hx * rule.nodes[i], hy * rule.nodes[j]));
        s += rule.weights[i] * row;
    }
    return s * hx * hy;
}

/// Duffy rule: the box is cut into four triangles with apex at the pole and
/// each is collapsed onto the unit square, which cancels a 1/r singularity.
template <class F>
double gauss_duffy(F& f, const Box& b, cplx apex, quad::Rule rule)
{
    const std::array<cplx, 4> corner = {cplx(b.x0, b.y0), cplx(b.x1, b.y0), cplx(b.x1, b.y1), cplx(b.x0, b.y1)};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        const cplx a = corner[static_cast<std::size_t>(k)];
        const cplx e = corner[static_cast<std::size_t>((k + 1) % 4)] - a;
        const cplx u = a - apex;
        const double jac = std::abs(u.real() * e.imag() - u.imag() * e.real());
        if (jac == 0.0)
            continue;
        double s_sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = 0.5 * (1.0 + rule.nodes[i]);
            double t_sum = 0.0;
            for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                const double t = 0.5 * (1.0 + rule.nodes[j]);
                t_sum += rule.weights[j] * f(apex + s * (u + t * e));
            }
            s_sum += rule.weights[i] * s * t_sum;
        }
        total += 0.25 * s_sum * jac;
    }
    return total;
}

} // namespace detail

/// Integrates f over the region. f must be nonnegative wherever it is used
/// with region boundaries, because the boundary-cell error is bounded by the
/// unmasked cell integral. poles lists points where f ~ 1/|z - pole|.
template <class F>
MeasureResult integrate_region(const Region& region, F&& f, std::span<const cplx> poles,
    const QuadratureBudget& budget)
{
    budget.validate();
    const auto bb = region.bounding_box();
    if (!bb)
        throw Error(ErrorCode::BadParameter, "region is unbounded");
    const std::vector<detail::Pole> pl = detail::distinct_poles(poles);

    struct Cell {
        Box box;
        int depth;
        double value;
        double error;
        bool operator<(const Cell& o) const { return error < o.error; }
    };

    auto masked = [&](cplx z) { return region.contains(z) ? f(z) : 0.0; };
    auto plain = [&](cplx z) { return f(z); };

    auto evaluate = [&](const Box& b, int depth) -> Cell {
        const CellClass cls = region.classify(b);
        if (cls == CellClass::outside)
            return {b, depth, 0.0, 0.0};
        const detail::Pole* first = nullptr;
        int inside_poles = 0;
        for (const auto& p : pl)
            if (b.contains(p.at)) {
                if (!first)
                    first = &p;
                ++inside_poles;
            }
        auto rules = [&](auto& g) {
            if (first)
                return std::pair{detail::gauss_duffy(g, b, first->at, quad::gauss5()),
                    detail::gauss_duffy(g, b, first->at, quad::gauss3())};
            return std::pair{detail::gauss_box(g, b, quad::gauss5()), detail::gauss_box(g, b, quad::gauss3())};
        };
        if (cls == CellClass::inside) {
            const auto [g5, g3] = rules(plain);
            double err = std::abs(g5 - g3);
            if (inside_poles > 1)
                err = std::max(err, std::abs(g5));
            return {b, depth, g5, err};
        }
        const auto [m5, m3] = rules(masked);
        const auto [g5, g3] = rules(plain);
        return {b, depth, m5, std::max(std::abs(m5 - m3), std::abs(g5) + std::abs(g5 - g3))};
    };

    const Box root = bb->squared();
    std::priority_queue<Cell> heap;
    std::vector<Cell> done;
    MeasureResult res;
    const int seed_depth = std::min(3, budget.max_depth);
    const int seed_n = 1 << seed_depth;
    const double w = root.width() / seed_n;
    if (!(w > 0.0))
        return res;
    for (int i = 0; i < seed_n; ++i)
        for (int j = 0; j < seed_n; ++j) {
            const Box b{root.x0 + i * w, root.y0 + j * w, root.x0 + (i + 1) * w, root.y0 + (j + 1) * w};
            heap.push(evaluate(b, seed_depth));
            ++res.cells;
        }

    double total = 0.0, err = 0.0;
    auto resum = [&]() {
        total = 0.0;
        err = 0.0;
        auto copy = heap;
        while (!copy.empty()) {
            total += copy.top().value;
            err += copy.top().error;
            copy.pop();
        }
        for (const Cell& c : done) {
            total += c.value;
            err += c.error;
        }
    };
    resum();
    const long max_cells = 64L * budget.max_panels;
    long splits = 0;
    while (!heap.empty()) {
        if (err <= budget.tol * std::abs(total))
            break;
        if (res.cells >= max_cells)
            break;
        Cell c = heap.top();
        heap.pop();
        if (c.error == 0.0) {
            done.push_back(c);
            break;
        }
        if (c.depth >= budget.max_depth || c.box.width() < budget.min_cell) {
            done.push_back(c);
            continue;
        }
        const cplx m = c.box.center();
        const std::array<Box, 4> kids = {Box{c.box.x0, c.box.y0, m.real(), m.imag()},
            Box{m.real(), c.box.y0, c.box.x1, m.imag()}, Box{c.box.x0, m.imag(), m.real(), c.box.y1},
            Box{m.real(), m.imag(), c.box.x1, c.box.y1}};
        total -= c.value;
        err -= c.error;
        for (const Box& k : kids) {
            Cell e = evaluate(k, c.depth + 1);
            total += e.value;
            err += e.error;
            heap.push(e);
        }
        res.cells += 4;
        if (++splits % 4096 == 0)
            resum();
    }

    std::vector<double> values, errors;
    while (!heap.empty()) {
        values.push_back(heap.top().value);
        errors.push_back(heap.top().error);
        heap.pop();
    }
    for (const Cell& c : done) {
        values.push_back(c.value);
        errors.push_back(c.error);
    }
    res.value = quad::pairwise_sum(values);
    res.error_bound = quad::pairwise_sum(errors);
    res.budget_exceeded = res.error_bound > budget.tol * std::abs(res.value);
    return res;
}

/// Area by quadtree: interior cells count fully, boundary cells at the
/// finest level contribute half their area and their full area to the error.
inline MeasureResult area(const Region& region, const QuadratureBudget& budget)
{
    budget.validate();
    const auto bb = region.bounding_box();
    if (!bb)
        throw Error(ErrorCode::BadParameter, "region is unbounded");
    const Box root = bb->squared();
    MeasureResult res;
    if (!(root.width() > 0.0))
        return res;
    std::vector<Box> active{root};
    std::vector<double> inside_parts;
    int depth = 0;
    double boundary_area = 0.0, inside_area = 0.0;
    const long max_cells = 64L * budget.max_panels;
    while (true) {
        std::vector<Box> boundary;
        double level_inside = 0.0;
        for (const Box& b : active) {
            ++res.cells;
            switch (region.classify(b)) {
            case CellClass::inside: level_inside += b.width() * b.height(); break;
            case CellClass::outside: break;
            case CellClass::boundary: boundary.push_back(b); break;
            }
        }
        inside_parts.push_back(level_inside);
        inside_area += level_inside;
        boundary_area = 0.0;
        for (const Box& b : boundary)
            boundary_area += b.width() * b.height();
        const double estimate = inside_area + 0.5 * boundary_area;
        const bool small = !boundary.empty() && boundary.front().width() < budget.min_cell;
        if (boundary.empty() || boundary_area <= budget.tol * estimate || depth >= budget.max_depth || small
            || res.cells + 4L * static_cast<long>(boundary.size()) > max_cells)
            break;
        active.clear();
        active.reserve(4 * boundary.size());
        for (const Box& b : boundary) {
            const cplx m = b.center();
            active.push_back({b.x0, b.y0, m.real(), m.imag()});
            active.push_back({m.real(), b.y0, b.x1, m.imag()});
            active.push_back({b.x0, m.imag(), m.real(), b.y1});
            active.push_back({m.real(), m.imag(), b.x1, b.y1});
        }
        ++depth;
    }
    res.value = quad::pairwise_sum(inside_parts) + 0.5 * boundary_area;
    res.error_bound = boundary_area;
    res.budget_exceeded = res.error_bound > budget.tol * res.value;
    return res;
}

/// Psi(region) = (1/pi) integral of |psi| over the region.
inline MeasureResult psi_measure(const CriticalSpec& spec, const Region& region, const QuadratureBudget& budget)
{
    const auto zs = spec.critical_points();
    if (zs.empty())
        return {};
    // collapse repeated critical points into weighted poles
    std::vector<std::pair<cplx, double>> w;
    for (const cplx& z : zs) {
        auto it = std::find_if(w.begin(), w.end(), [&](const auto& e) { return e.first == z; });
        if (it == w.end())
            w.push_back({z, 1.0});
        else
            it->second += 1.0;
    }
    auto f = [&](cplx z) {
        cplx s = 0.0;
        for (const auto& [q, m] : w)
            s += m / (z - q);
        return std::abs(s) / kPi;
    };
    return integrate_region(region, f, zs, budget);
}

/// integral over the region of 1/|z - z0|.
inline MeasureResult riesz_potential(const Region& region, cplx z0, const QuadratureBudget& budget)
{
    auto f = [&](cplx z) { return 1.0 / std::abs(z - z0); };
    const cplx poles[] = {z0};
    return integrate_region(region, f, poles, budget);
}

/// integral over the region of sum_j 1/|z - pole_j|.
inline MeasureResult riesz_sum(const Region& region, std::span<const cplx> poles, const QuadratureBudget& budget)
{
    auto f = [&](cplx z) {
        double s = 0.0;
        for (const cplx& q : poles)
            s += 1.0 / std::abs(z - q);
        return s;
    };
    return integrate_region(region, f, poles, budget);
}

// ---------------------------------------------------------------------------

struct PsiRaster {
    Box box;
    int nx = 0, ny = 0;
    std::vector<double> values; // row-major, |psi|/pi at cell centres; y rows bottom to top
};

inline PsiRaster psi_raster(const CriticalSpec& spec, const Box& box, int nx, int ny)
{
    if (nx < 1 || ny < 1)
        throw Error(ErrorCode::BadParameter, "raster needs positive dimensions");
    PsiRaster r{box, nx, ny, {}};
    r.values.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    const double dx = box.width() / nx, dy = box.height() / ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const cplx z(box.x0 + (i + 0.5) * dx, box.y0 + (j + 0.5) * dy);
            double v;
            try {
                v = std::abs(psi_partial_fractions(spec.critical_points(), z)) / kPi;
            } catch (const Error&) {
                v = std::numeric_limits<double>::infinity();
            }
            r.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)] = v;
        }
    return r;
}

} // namespace lemlab
