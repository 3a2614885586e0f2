#pragma once

// JSON forms of polynomials, reports and the calibration file.
//
// Polynomial schema:
//   {"degree": n, "critical_points": [[re, im], ...], "constant_term": [re, im], "normalized": bool}
// or {"coefficients": [[re, im], ...]}, lowest degree first, ending in [1, 0].
// Doubles are written in shortest round-trip form.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lemlab/conformal_area.hpp"
#include "lemlab/error.hpp"
#include "lemlab/inequality_suite.hpp"
#include "lemlab/maximizer_search.hpp"
#include "lemlab/poly_core.hpp"
#include "lemlab/root_solver.hpp"

namespace lemlab {

using json = nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorCode::ConfigError, "complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(std::span<const cplx> zs)
{
    json a = json::array();
    for (const cplx& z : zs)
        a.push_back(to_json(z));
    return a;
}

inline std::vector<cplx> complex_list_from_json(const json& j)
{
    if (!j.is_array())
        throw Error(ErrorCode::ConfigError, "expected an array of [re, im] pairs");
    std::vector<cplx> out;
    for (const json& e : j)
        out.push_back(complex_from_json(e));
    return out;
}

/// A parsed polynomial. Coefficient input keeps its exact coefficients; the
/// critical points are then computed from p'.
struct PolyInput {
    CoeffPoly poly;
    CriticalSpec spec;
    bool coefficient_form = false;
};

inline CriticalSpec spec_from_coefficients(const CoeffPoly& p)
{
    const int n = p.degree();
    std::vector<cplx> zetas;
    if (n > 1) {
        std::vector<cplx> d = derivative(p.coefficients());
        for (cplx& c : d)
            c /= static_cast<double>(n);
        zetas = all_roots(std::span<const cplx>(d)).roots;
    }
    return CriticalSpec(n, std::move(zetas), p[0]);
}

inline PolyInput poly_from_json(const json& j)
{
    try {
        if (!j.is_object())
            throw Error(ErrorCode::ConfigError, "polynomial must be a JSON object");
        if (j.contains("coefficients")) {
            if (j.contains("critical_points"))
                throw Error(ErrorCode::ConfigError, "give either coefficients or critical points, not both");
            const std::vector<cplx> c = complex_list_from_json(j.at("coefficients"));
            if (c.size() < 2 || c.back() != cplx(1.0))
                throw Error(ErrorCode::ConfigError, "coefficients must end with [1, 0]");
            CoeffPoly p(c);
            return {p, spec_from_coefficients(p), true};
        }
        const int n = j.at("degree").get<int>();
        std::vector<cplx> z = complex_list_from_json(j.at("critical_points"));
        const cplx c0 = complex_from_json(j.at("constant_term"));
        const bool norm = j.value("normalized", false);
        if (norm && (c0.imag() != 0.0 || c0.real() > 0.0))
            throw Error(ErrorCode::ConfigError, "a normalized constant term must be a non-positive real");
        CriticalSpec s = norm ? CriticalSpec::normalized(n, std::move(z), c0.real()) : CriticalSpec(n, std::move(z), c0);
        return {s.poly(), s, false};
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("polynomial JSON: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadParameter)
            throw Error(ErrorCode::ConfigError, e.what());
        throw;
    }
}

inline json to_json(const CriticalSpec& s)
{
    return {{"degree", s.degree()}, {"critical_points", to_json(s.critical_points())},
        {"constant_term", to_json(s.constant_term())}, {"normalized", s.is_normalized()}};
}

inline json to_json(const PolyInput& p)
{
    if (p.coefficient_form)
        return {{"coefficients", to_json(p.poly.coefficients())}};
    return to_json(p.spec);
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, what + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

inline json to_json(const LengthResult& r)
{
    return {{"length", r.length}, {"error_estimate", r.error_estimate}, {"excluded_measure", r.excluded_measure},
        {"method", std::string(to_string(r.method))}, {"panels", r.panels}};
}

inline json to_json(const MeasureResult& r)
{
    return {{"value", r.value}, {"error_bound", r.error_bound}, {"budget_exceeded", r.budget_exceeded},
        {"cells", r.cells}};
}

inline json to_json(const LaurentData& d)
{
    const InclusionRadii inc = inclusion_radii(d);
    json c = json::array();
    c.push_back(to_json(d.a_minus1));
    c.push_back(to_json(d.a0));
    for (const cplx& a : d.coeffs)
        c.push_back(to_json(a));
    return {{"level", d.level}, {"coeffs", c}, {"gronwall_area", gronwall_area(d)},
        {"gronwall_error", gronwall_error(d)}, {"perimeter_bound", perimeter_bound(d)}, {"inner", inc.inner},
        {"outer", inc.outer}, {"capacity_check", d.capacity_check}, {"tail", d.tail}};
}

inline json to_json(const VerificationReport& r)
{
    json j = {{"check_name", r.check_name}, {"anchor", r.anchor}, {"passed", r.passed}, {"hard", r.hard},
        {"lhs", r.lhs}, {"rhs", r.rhs}, {"margin", r.margin}, {"tolerance", r.tolerance}, {"notes", r.notes}};
    j["fitted_constant"] = r.fitted_constant ? json(*r.fitted_constant) : json(nullptr);
    return j;
}

inline json to_json(const SearchReport& r)
{
    json h = json::array();
    for (const HistoryEntry& e : r.history)
        h.push_back({e.restart, e.iteration, e.objective});
    return {{"n", r.n}, {"best", {{"params", r.best.params}, {"objective", r.best.objective},
                                     {"feasible", r.best.feasible}, {"spec", to_json(decode(r.n, r.best.params))}}},
        {"restarts", r.restarts}, {"converged_to_p0", r.converged_to_p0}, {"best_norm", r.best_norm},
        {"history", h}};
}

// ---------------------------------------------------------------------------
// calibration file

inline json to_json(const Calibration& c)
{
    return {{"seed", c.seed}, {"psi_defect_c", c.psi_defect_c},
        {"tridef", {{"lo_c2", c.tridef_lo_c2}, {"lo_c5", c.tridef_lo_c5}, {"hi", c.tridef_hi},
                       {"reference", c.tridef_reference}}},
        {"psi_upper", {{"c2", c.psi_upper_c2}, {"c5", c.psi_upper_c5}}}, {"psi_lower_c", c.psi_lower_c},
        {"stokes", {{"kappa", c.stokes_kappa}, {"p0_gap_lo", c.p0_gap_lo}, {"p0_gap_hi", c.p0_gap_hi}}}};
}

inline Calibration calibration_from_json(const json& j)
{
    try {
        Calibration c;
        c.seed = j.at("seed").get<std::uint64_t>();
        c.psi_defect_c = j.at("psi_defect_c").get<double>();
        const json& t = j.at("tridef");
        c.tridef_lo_c2 = t.at("lo_c2").get<double>();
        c.tridef_lo_c5 = t.at("lo_c5").get<double>();
        c.tridef_hi = t.at("hi").get<double>();
        c.tridef_reference = t.at("reference").get<double>();
        c.psi_upper_c2 = j.at("psi_upper").at("c2").get<double>();
        c.psi_upper_c5 = j.at("psi_upper").at("c5").get<double>();
        c.psi_lower_c = j.at("psi_lower_c").get<double>();
        const json& s = j.at("stokes");
        c.stokes_kappa = s.at("kappa").get<double>();
        c.p0_gap_lo = s.at("p0_gap_lo").get<double>();
        c.p0_gap_hi = s.at("p0_gap_hi").get<double>();
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("calibration file: ") + e.what());
    }
}

inline std::filesystem::path default_calibration_path()
{
#ifdef LEMLAB_SOURCE_DIR
    return std::filesystem::path(LEMLAB_SOURCE_DIR) / "config" / "calibration.json";
#else
    return "config/calibration.json";
#endif
}

inline Calibration load_calibration(const std::filesystem::path& path = default_calibration_path())
{
    return calibration_from_json(parse_json(read_file(path), path.string()));
}

} // namespace lemlab
