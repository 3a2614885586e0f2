#pragma once

// Semi-algebraic regions of the plane: disks, annuli, sublevel sets of
// polynomials, superlevel sets of Riesz sums, and boolean combinations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "lemlab/error.hpp"
#include "lemlab/poly_core.hpp"

namespace lemlab {

struct QuadratureBudget {
    double tol = 1e-6;     // relative
    int max_depth = 16;    // quadtree subdivision levels
    double min_cell = 1e-7;
    int samples_1d = 16;   // starting sample density for 1-D sweeps
    int max_panels = 20000; // cap on 1-D adaptive panels / 2-D cells (x 64)

    void validate() const
    {
        if (!(tol > 0.0))
            throw Error(ErrorCode::ConfigError, "budget tol must be > 0");
        if (max_depth < 1 || max_depth > 40)
            throw Error(ErrorCode::ConfigError, "budget max_depth must be in [1, 40]");
        if (!(min_cell > 0.0) || samples_1d < 1 || max_panels < 1)
            throw Error(ErrorCode::ConfigError, "budget sizes must be positive");
    }

    QuadratureBudget loosened(double factor) const
    {
        QuadratureBudget b = *this;
        b.tol *= factor;
        return b;
    }
};

struct Box {
    double x0, y0, x1, y1;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
    double half_diagonal() const { return 0.5 * std::hypot(width(), height()); }
    bool contains(cplx z) const { return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1; }

    /// Nearest and farthest distance from c to the box.
    std::pair<double, double> distance_range(cplx c) const
    {
        const double dx = std::max({x0 - c.real(), 0.0, c.real() - x1});
        const double dy = std::max({y0 - c.imag(), 0.0, c.imag() - y1});
        const double fx = std::max(std::abs(c.real() - x0), std::abs(c.real() - x1));
        const double fy = std::max(std::abs(c.imag() - y0), std::abs(c.imag() - y1));
        return {std::hypot(dx, dy), std::hypot(fx, fy)};
    }

    /// Smallest enclosing square with the same centre.
    Box squared() const
    {
        const double h = 0.5 * std::max(width(), height());
        const cplx c = center();
        return {c.real() - h, c.imag() - h, c.real() + h, c.imag() + h};
    }
};

enum class CellClass { inside, outside, boundary };

/// A circle that forms part of a region's boundary.
struct BoundaryCircle {
    cplx center;
    double radius;
};

class Region {
public:
    struct Disk { cplx c; double r; };                 // |z - c| < r
    struct Annulus { cplx c; double r1, r2; };         // r1 <= |z - c| < r2
    struct Sublevel { std::vector<cplx> coeffs; double level; }; // |p(z)| < level
    struct RieszSuperlevel { std::vector<cplx> poles; double lambda; }; // sum 1/|z - pole| >= lambda
    struct Plane {};
    enum class Op { leaf, unite, intersect, complement };

    static Region disk(cplx c, double r)
    {
        if (!(r > 0.0))
            throw Error(ErrorCode::BadParameter, "disk radius must be positive");
        return Region(Leaf{Disk{c, r}});
    }
    static Region annulus(cplx c, double r1, double r2)
    {
        if (!(r1 >= 0.0 && r2 > r1))
            throw Error(ErrorCode::BadParameter, "annulus needs 0 <= r1 < r2");
        return Region(Leaf{Annulus{c, r1, r2}});
    }
    static Region sublevel(const CoeffPoly& p, double level)
    {
        if (!(level > 0.0))
            throw Error(ErrorCode::BadParameter, "sublevel needs level > 0");
        const auto c = p.coefficients();
        return Region(Leaf{Sublevel{std::vector<cplx>(c.begin(), c.end()), level}});
    }
    static Region riesz_superlevel(std::vector<cplx> poles, double lambda)
    {
        if (poles.empty() || !(lambda > 0.0))
            throw Error(ErrorCode::BadParameter, "riesz superlevel needs poles and lambda > 0");
        return Region(Leaf{RieszSuperlevel{std::move(poles), lambda}});
    }
    static Region plane() { return Region(Leaf{Plane{}}); }

    friend Region operator|(const Region& a, const Region& b) { return Region(Op::unite, a, b); }
    friend Region operator&(const Region& a, const Region& b) { return Region(Op::intersect, a, b); }
    Region operator~() const { return Region(Op::complement, *this, *this); }

    bool contains(cplx z) const
    {
        const Node& n = *node_;
        switch (n.op) {
        case Op::leaf: return leaf_contains(n.leaf, z);
        case Op::unite: return n.a->contains(z) || n.b->contains(z);
        case Op::intersect: return n.a->contains(z) && n.b->contains(z);
        case Op::complement: return !n.a->contains(z);
        }
        return false;
    }

    CellClass classify(const Box& box) const
    {
        const Node& n = *node_;
        switch (n.op) {
        case Op::leaf: return leaf_classify(n.leaf, box);
        case Op::complement: {
            const CellClass c = n.a->classify(box);
            return c == CellClass::inside ? CellClass::outside
                : c == CellClass::outside ? CellClass::inside
                                          : CellClass::boundary;
        }
        case Op::unite: {
            const CellClass a = n.a->classify(box);
            if (a == CellClass::inside)
                return a;
            const CellClass b = n.b->classify(box);
            if (b == CellClass::inside)
                return b;
            return (a == CellClass::outside && b == CellClass::outside) ? CellClass::outside : CellClass::boundary;
        }
        case Op::intersect: {
            const CellClass a = n.a->classify(box);
            if (a == CellClass::outside)
                return a;
            const CellClass b = n.b->classify(box);
            if (b == CellClass::outside)
                return b;
            return (a == CellClass::inside && b == CellClass::inside) ? CellClass::inside : CellClass::boundary;
        }
        }
        return CellClass::boundary;
    }

    /// Enclosing box, or nullopt when the region is unbounded.
    std::optional<Box> bounding_box() const
    {
        const Node& n = *node_;
        switch (n.op) {
        case Op::leaf: return leaf_box(n.leaf);
        case Op::complement: return std::nullopt;
        case Op::unite: {
            auto a = n.a->bounding_box(), b = n.b->bounding_box();
            if (!a || !b)
                return std::nullopt;
            return Box{std::min(a->x0, b->x0), std::min(a->y0, b->y0), std::max(a->x1, b->x1), std::max(a->y1, b->y1)};
        }
        case Op::intersect: {
            auto a = n.a->bounding_box(), b = n.b->bounding_box();
            if (!a)
                return b;
            if (!b)
                return a;
            Box r{std::max(a->x0, b->x0), std::max(a->y0, b->y0), std::min(a->x1, b->x1), std::min(a->y1, b->y1)};
            if (r.x1 < r.x0 || r.y1 < r.y0)
                r = {0.0, 0.0, 0.0, 0.0};
            return r;
        }
        }
        return std::nullopt;
    }

    /// [lo, hi] such that every point of the region has lo <= |z| <= hi.
    std::pair<double, double> radial_range() const
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
        const Node& n = *node_;
        switch (n.op) {
        case Op::leaf:
            return std::visit(
                [&](const auto& l) -> std::pair<double, double> {
                    using T = std::decay_t<decltype(l)>;
                    if constexpr (std::is_same_v<T, Disk>)
                        return {std::max(0.0, std::abs(l.c) - l.r), std::abs(l.c) + l.r};
                    else if constexpr (std::is_same_v<T, Annulus>) {
                        const double d = std::abs(l.c);
                        return {std::max({0.0, d - l.r2, l.r1 - d}), d + l.r2};
                    } else if constexpr (std::is_same_v<T, Plane>)
                        return {0.0, inf};
                    else {
                        const auto b = leaf_box(n.leaf);
                        return {0.0, std::max({std::hypot(b->x0, b->y0), std::hypot(b->x1, b->y1),
                                         std::hypot(b->x0, b->y1), std::hypot(b->x1, b->y0)})};
                    }
                },
                n.leaf);
        case Op::unite: {
            auto a = n.a->radial_range(), b = n.b->radial_range();
            return {std::min(a.first, b.first), std::max(a.second, b.second)};
        }
        case Op::intersect: {
            auto a = n.a->radial_range(), b = n.b->radial_range();
            return {std::max(a.first, b.first), std::min(a.second, b.second)};
        }
        case Op::complement: {
            // only the complement of an origin-centred disk is tracked exactly
            const Node& m = *n.a->node_;
            if (m.op == Op::leaf)
                if (const auto* d = std::get_if<Disk>(&m.leaf); d && d->c == cplx(0.0))
                    return {d->r, inf};
            return {0.0, inf};
        }
        }
        return {0.0, inf};
    }

    /// Circles contributing to the boundary (disks and annuli).
    std::vector<BoundaryCircle> boundary_circles() const
    {
        std::vector<BoundaryCircle> out;
        collect_circles(out);
        return out;
    }

    /// Human-readable description, used in reports.
    std::string describe() const
    {
        const Node& n = *node_;
        auto num = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", v);
            return std::string(buf);
        };
        auto pt = [&](cplx c) { return "(" + num(c.real()) + "," + num(c.imag()) + ")"; };
        switch (n.op) {
        case Op::leaf:
            return std::visit(
                [&](const auto& l) -> std::string {
                    using T = std::decay_t<decltype(l)>;
                    if constexpr (std::is_same_v<T, Disk>)
                        return "D(" + pt(l.c) + "," + num(l.r) + ")";
                    else if constexpr (std::is_same_v<T, Annulus>)
                        return "Ann(" + pt(l.c) + "," + num(l.r1) + "," + num(l.r2) + ")";
                    else if constexpr (std::is_same_v<T, Sublevel>)
                        return "E_" + num(l.level);
                    else if constexpr (std::is_same_v<T, RieszSuperlevel>)
                        return "{riesz>=" + num(l.lambda) + "}";
                    else
                        return "C";
                },
                n.leaf);
        case Op::unite: return "(" + n.a->describe() + " u " + n.b->describe() + ")";
        case Op::intersect: return "(" + n.a->describe() + " n " + n.b->describe() + ")";
        case Op::complement: return "~" + n.a->describe();
        }
        return "?";
    }

private:
    using Leaf = std::variant<Disk, Annulus, Sublevel, RieszSuperlevel, Plane>;

    struct Node {
        Op op = Op::leaf;
        Leaf leaf;
        std::shared_ptr<const Region> a, b;
    };

    explicit Region(Leaf l)
    {
        auto n = std::make_shared<Node>();
        n->leaf = std::move(l);
        node_ = std::move(n);
    }
    Region(Op op, const Region& a, const Region& b)
    {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->a = std::make_shared<const Region>(a);
        n->b = std::make_shared<const Region>(b);
        node_ = std::move(n);
    }

    static bool leaf_contains(const Leaf& leaf, cplx z)
    {
        return std::visit(
            [&](const auto& l) -> bool {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Disk>)
                    return std::abs(z - l.c) < l.r;
                else if constexpr (std::is_same_v<T, Annulus>) {
                    const double d = std::abs(z - l.c);
                    return d >= l.r1 && d < l.r2;
                } else if constexpr (std::is_same_v<T, Sublevel>)
                    return std::abs(horner(l.coeffs, z)) < l.level;
                else if constexpr (std::is_same_v<T, RieszSuperlevel>) {
                    double s = 0.0;
                    for (const cplx& q : l.poles) {
                        const double d = std::abs(z - q);
                        if (d == 0.0)
                            return true;
                        s += 1.0 / d;
                    }
                    return s >= l.lambda;
                } else
                    return true;
            },
            leaf);
    }

    static CellClass leaf_classify(const Leaf& leaf, const Box& box)
    {
        return std::visit(
            [&](const auto& l) -> CellClass {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Disk>) {
                    const auto [lo, hi] = box.distance_range(l.c);
                    if (hi < l.r)
                        return CellClass::inside;
                    if (lo >= l.r)
                        return CellClass::outside;
                    return CellClass::boundary;
                } else if constexpr (std::is_same_v<T, Annulus>) {
                    const auto [lo, hi] = box.distance_range(l.c);
                    if (lo >= l.r1 && hi < l.r2)
                        return CellClass::inside;
                    if (hi < l.r1 || lo >= l.r2)
                        return CellClass::outside;
                    return CellClass::boundary;
                } else if constexpr (std::is_same_v<T, Sublevel>) {
                    // |p(z) - p(c)| <= sum_{k>=1} |p^(k)(c)/k!| h^k on the cell
                    const cplx c = box.center();
                    const double h = box.half_diagonal();
                    const std::vector<cplx> t = taylor_shift(l.coeffs, c);
                    double bound = 0.0;
                    for (std::size_t k = t.size() - 1; k >= 1; --k)
                        bound = (bound + std::abs(t[k])) * h;
                    const double v = std::abs(t[0]);
                    if (v + bound < l.level)
                        return CellClass::inside;
                    if (v - bound >= l.level)
                        return CellClass::outside;
                    return CellClass::boundary;
                } else if constexpr (std::is_same_v<T, RieszSuperlevel>) {
                    double fmin = 0.0, fmax = 0.0;
                    for (const cplx& q : l.poles) {
                        const auto [lo, hi] = box.distance_range(q);
                        fmin += 1.0 / hi;
                        fmax += lo > 0.0 ? 1.0 / lo : std::numeric_limits<double>::infinity();
                    }
                    if (fmin >= l.lambda)
                        return CellClass::inside;
                    if (fmax < l.lambda)
                        return CellClass::outside;
                    return CellClass::boundary;
                } else
                    return CellClass::inside;
            },
            leaf);
    }

    static std::optional<Box> leaf_box(const Leaf& leaf)
    {
        return std::visit(
            [&](const auto& l) -> std::optional<Box> {
                using T = std::decay_t<decltype(l)>;
                if constexpr (std::is_same_v<T, Disk>)
                    return Box{l.c.real() - l.r, l.c.imag() - l.r, l.c.real() + l.r, l.c.imag() + l.r};
                else if constexpr (std::is_same_v<T, Annulus>)
                    return Box{l.c.real() - l.r2, l.c.imag() - l.r2, l.c.real() + l.r2, l.c.imag() + l.r2};
                else if constexpr (std::is_same_v<T, Sublevel>) {
                    // |z| >= max(1, S + level^{1/n}) with S = sum_{k<n} |c_k| forces |p(z)| >= level
                    const std::size_t n = l.coeffs.size() - 1;
                    double s = 0.0;
                    for (std::size_t k = 0; k < n; ++k)
                        s += std::abs(l.coeffs[k]);
                    const double rho = std::max(1.0, s + std::pow(l.level, 1.0 / static_cast<double>(n)));
                    return Box{-rho, -rho, rho, rho};
                } else if constexpr (std::is_same_v<T, RieszSuperlevel>) {
                    // some pole must lie within m / lambda
                    const double rad = static_cast<double>(l.poles.size()) / l.lambda;
                    Box b{l.poles[0].real() - rad, l.poles[0].imag() - rad, l.poles[0].real() + rad,
                        l.poles[0].imag() + rad};
                    for (const cplx& q : l.poles) {
                        b.x0 = std::min(b.x0, q.real() - rad);
                        b.y0 = std::min(b.y0, q.imag() - rad);
                        b.x1 = std::max(b.x1, q.real() + rad);
                        b.y1 = std::max(b.y1, q.imag() + rad);
                    }
                    return b;
                } else
                    return std::nullopt;
            },
            leaf);
    }

    void collect_circles(std::vector<BoundaryCircle>& out) const
    {
        const Node& n = *node_;
        if (n.op == Op::leaf) {
            if (const auto* d = std::get_if<Disk>(&n.leaf))
                out.push_back({d->c, d->r});
            else if (const auto* a = std::get_if<Annulus>(&n.leaf)) {
                if (a->r1 > 0.0)
                    out.push_back({a->c, a->r1});
                out.push_back({a->c, a->r2});
            }
            return;
        }
        n.a->collect_circles(out);
        if (n.op != Op::complement)
            n.b->collect_circles(out);
    }

    std::shared_ptr<const Node> node_;
};

} // namespace lemlab
