#pragma once

// CSV and self-contained SVG writers. Output depends only on the data, so
// identical inputs give identical bytes.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "lemlab/arclength.hpp"
#include "lemlab/maximizer_search.hpp"
#include "lemlab/region_measure.hpp"

namespace lemlab {

/// %.17g: lossless for doubles.
inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trace_csv(const Trace& t)
{
    std::ostringstream out;
    out << "component,closed,index,x,y\n";
    for (std::size_t c = 0; c < t.components.size(); ++c)
        for (std::size_t i = 0; i < t.components[c].size(); ++i)
            out << c << ',' << (t.closed_flags[c] ? 1 : 0) << ',' << i << ',' << fmt17(t.components[c][i].real())
                << ',' << fmt17(t.components[c][i].imag()) << '\n';
    return out.str();
}

inline std::string raster_csv(const PsiRaster& r)
{
    std::ostringstream out;
    out << "x,y,value\n";
    const double dx = r.box.width() / r.nx, dy = r.box.height() / r.ny;
    for (int j = 0; j < r.ny; ++j)
        for (int i = 0; i < r.nx; ++i)
            out << fmt17(r.box.x0 + (i + 0.5) * dx) << ',' << fmt17(r.box.y0 + (j + 0.5) * dy) << ','
                << fmt17(r.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(r.nx) + static_cast<std::size_t>(i)])
                << '\n';
    return out.str();
}

inline std::string history_csv(const SearchReport& r)
{
    std::ostringstream out;
    out << "restart,iteration,objective\n";
    for (const HistoryEntry& h : r.history)
        out << h.restart << ',' << h.iteration << ',' << fmt17(h.objective) << '\n';
    return out.str();
}

struct SvgView {
    double x = -1.6, y = -1.6, w = 3.2, h = 3.2;
    int pixels = 640;
};

/// Curves as polylines with the critical points marked. The y axis is flipped
/// so the picture has the usual orientation.
inline std::string trace_svg(const Trace& t, std::span<const cplx> marks, const SvgView& v = {})
{
    std::ostringstream out;
    const double stroke = v.w / 400.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << v.pixels << "\" height=\"" << v.pixels
        << "\" viewBox=\"" << v.x << ' ' << v.y << ' ' << v.w << ' ' << v.h << "\">\n";
    out << "<rect x=\"" << v.x << "\" y=\"" << v.y << "\" width=\"" << v.w << "\" height=\"" << v.h
        << "\" style=\"fill:#ffffff\"/>\n";
    out << "<g transform=\"scale(1,-1)\">\n";
    out << "<line x1=\"" << v.x << "\" y1=\"0\" x2=\"" << v.x + v.w << "\" y2=\"0\" style=\"stroke:#cccccc;stroke-width:"
        << stroke << "\"/>\n";
    out << "<line x1=\"0\" y1=\"" << -(v.y + v.h) << "\" x2=\"0\" y2=\"" << -v.y
        << "\" style=\"stroke:#cccccc;stroke-width:" << stroke << "\"/>\n";
    char buf[64];
    for (std::size_t c = 0; c < t.components.size(); ++c) {
        out << (t.closed_flags[c] ? "<polygon" : "<polyline") << " style=\"fill:none;stroke:#1f4e9c;stroke-width:"
            << 2.0 * stroke << "\" points=\"";
        for (std::size_t i = 0; i < t.components[c].size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%.6f,%.6f", i ? " " : "", t.components[c][i].real(),
                t.components[c][i].imag());
            out << buf;
        }
        out << "\"/>\n";
    }
    for (const cplx& z : marks) {
        std::snprintf(buf, sizeof buf, "%.6f\" cy=\"%.6f", z.real(), z.imag());
        out << "<circle cx=\"" << buf << "\" r=\"" << 3.0 * stroke << "\" style=\"fill:#c0392b\"/>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

} // namespace lemlab
