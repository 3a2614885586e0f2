// lemlab command-line tool. Every subcommand writes its files under --out
// together with manifest.json (SHA-256 of each file plus the resolved config).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "lemlab/lemlab.hpp"

namespace fs = std::filesystem;
using namespace lemlab;

namespace {

constexpr int kExitConfig = 64;
constexpr int kExitRuntime = 70;

struct Options {
    std::string family;
    std::string input;
    int n = 9;
    double a = 0.5;
    double r = 1.0;
    double level = 1.0;
    std::string seed = "0x45485031";
    double budget_tol = 1e-6;
    std::string out = "lemlab-out";
    // subcommand specific
    int grid = 256;
    double psi_level = 2.0;
    std::string battery;
    std::vector<std::string> checks;
    std::string calibration;
    int restarts = 4;
    double start_norm = 0.3;
    int terms = 0;
};

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

/// Collects output files and writes them, then the manifest, from one thread.
class Outputs {
public:
    void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
    void add(const std::string& name, const json& j) { files_[name] = j.dump(2) + "\n"; }

    void write(const fs::path& dir, const json& config) const
    {
        fs::create_directories(dir);
        json list = json::array();
        for (const auto& [name, content] : files_) {
            std::ofstream f(dir / name, std::ios::binary);
            f << content;
            if (!f)
                throw Error(ErrorCode::ConfigError, "cannot write " + (dir / name).string());
            list.push_back({{"path", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
        }
        json manifest = {{"artifact", "lemlab"}, {"version", LEMLAB_VERSION}, {"config", config}, {"files", list}};
        std::ofstream m(dir / "manifest.json", std::ios::binary);
        m << manifest.dump(2) << "\n";
    }

private:
    std::map<std::string, std::string> files_;
};

std::uint64_t parse_seed(const std::string& s)
{
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(s, &used, 0);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "seed must be an integer (hex with 0x): " + s);
    }
}

QuadratureBudget budget_of(const Options& o)
{
    QuadratureBudget b;
    b.tol = o.budget_tol;
    b.validate();
    return b;
}

PolyInput resolve_input(const Options& o)
{
    if (o.family.empty() == o.input.empty())
        throw Error(ErrorCode::ConfigError, "give exactly one of --family or --input");
    if (!o.input.empty())
        return poly_from_json(parse_json(read_file(o.input), o.input));
    try {
        const Family f = parse_family(o.family);
        const double param = f == Family::cassini ? o.r : f == Family::p0 ? 0.0 : o.a;
        const CriticalSpec s = family(f, f == Family::cassini ? 2 : o.n, param);
        return {s.poly(), s, false};
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

json config_json(const std::string& command, const Options& o)
{
    return {{"command", command}, {"family", o.family}, {"input", o.input}, {"n", o.n}, {"a", o.a}, {"r", o.r},
        {"level", o.level}, {"seed", o.seed}, {"budget_tol", o.budget_tol}, {"grid", o.grid},
        {"psi_level", o.psi_level}, {"battery", o.battery}, {"checks", o.checks}, {"calibration", o.calibration},
        {"restarts", o.restarts}, {"start_norm", o.start_norm}, {"terms", o.terms}};
}

bool all_at_origin(const CriticalSpec& s)
{
    for (const cplx& z : s.critical_points())
        if (z != cplx(0.0))
            return false;
    return true;
}

int cmd_length(const Options& o, Outputs& out)
{
    const PolyInput in = resolve_input(o);
    const QuadratureBudget b = budget_of(o);
    json j = {{"polynomial", to_json(in)}, {"level", o.level}};
    LengthOptions lo;
    lo.level = o.level;
    j["fiber"] = to_json(length_fiber(in.poly, Region::plane(), b, lo));
    try {
        j["radial"] = to_json(length_radial(in.poly, Region::plane(), b, lo));
    } catch (const Error& e) {
        j["radial"] = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
    j["trace"] = to_json(length_trace(in.poly, Region::plane(), b, o.level));
    if (!in.coefficient_form && all_at_origin(in.spec) && in.spec.constant_term() == cplx(-1.0) && o.level == 1.0) {
        j["closed_form"] = length_p0_closed(in.spec.degree());
        j["asymptote"] = length_p0_asymptote(in.spec.degree());
        j["closed_form_minus_fiber"] = length_p0_closed(in.spec.degree()) - j["fiber"]["length"].get<double>();
    }
    out.add("length.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_trace(const Options& o, Outputs& out)
{
    const PolyInput in = resolve_input(o);
    const Trace t = trace_lemniscate(in.poly, o.level, budget_of(o));
    out.add("trace.csv", trace_csv(t));
    out.add("trace.svg", trace_svg(t, in.spec.critical_points()));
    json comps = json::array();
    for (std::size_t i = 0; i < t.components.size(); ++i)
        comps.push_back({{"vertices", t.components[i].size()}, {"closed", static_cast<bool>(t.closed_flags[i])},
            {"through_critical_point", static_cast<bool>(t.critical_flags[i])}, {"length", t.component_length(i)}});
    const json j = {{"level", o.level}, {"total_length", t.total_length()}, {"components", comps}};
    out.add("trace.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_psi_map(const Options& o, Outputs& out)
{
    const PolyInput in = resolve_input(o);
    if (o.grid < 1)
        throw Error(ErrorCode::ConfigError, "--grid must be positive");
    const PsiRaster r = psi_raster(in.spec, Box{-1.6, -1.6, 1.6, 1.6}, o.grid, o.grid);
    out.add("psi_map.csv", raster_csv(r));
    const MeasureResult m = psi_measure(in.spec, Region::sublevel(in.poly, o.psi_level), budget_of(o));
    const json j = {{"region", "sublevel"}, {"level", o.psi_level}, {"psi", to_json(m)}};
    out.add("psi.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_area(const Options& o, Outputs& out)
{
    const PolyInput in = resolve_input(o);
    const MeasureResult m = area(Region::sublevel(in.poly, o.level), budget_of(o));
    const json j = {{"level", o.level}, {"area", to_json(m)}, {"equiv_radius", equiv_radius(m.value)},
        {"polya_bound", kPi * std::pow(o.level, 2.0 / in.poly.degree())}};
    out.add("area.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_laurent(const Options& o, Outputs& out)
{
    const PolyInput in = resolve_input(o);
    const LaurentData d = laurent_coeffs(in.poly, o.level, o.terms);
    json j = to_json(d);
    out.add("laurent.json", j);
    j.erase("coeffs");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify(const Options& o, Outputs& out)
{
    const Calibration cal = load_calibration(o.calibration.empty() ? default_calibration_path() : fs::path(o.calibration));
    BatteryOptions bo;
    bo.seed = parse_seed(o.seed);
    bo.budget.tol = o.budget_tol;
    bo.budget.validate();
    if (o.battery.empty() && o.checks.empty())
        throw Error(ErrorCode::ConfigError, "give --battery full or at least one --check");
    if (!o.battery.empty() && o.battery != "full")
        throw Error(ErrorCode::ConfigError, "the only battery is 'full'");
    if (o.battery.empty())
        bo.only = {o.checks.begin(), o.checks.end()};
    const BatteryResult r = run_battery(cal, bo);
    std::string lines;
    for (const VerificationReport& rep : r.reports)
        lines += to_json(rep).dump() + "\n";
    out.add("reports.jsonl", lines);
    std::map<std::string, std::pair<int, int>> groups;
    for (const VerificationReport& rep : r.reports) {
        auto& g = groups[rep.check_name];
        ++g.first;
        g.second += rep.passed ? 0 : 1;
    }
    json summary = {{"trials", r.reports.size()}, {"hard_failures", r.hard_failures()},
        {"fitted_failures", r.fitted_failures()}, {"exit_code", r.exit_code()}, {"groups", json::object()}};
    for (const auto& [name, g] : groups)
        summary["groups"][name] = {{"trials", g.first}, {"failures", g.second}};
    out.add("summary.json", summary);
    std::cout << summary.dump(2) << "\n";
    return r.exit_code();
}

int cmd_search(const Options& o, Outputs& out)
{
    if (o.n < 3)
        throw Error(ErrorCode::ConfigError, "search needs --n >= 3");
    SearchOptions so;
    so.restarts = o.restarts;
    so.seed = parse_seed(o.seed);
    std::mt19937_64 rng(so.seed);
    const std::vector<double> start = perturbation(o.n, o.start_norm, Direction::random, rng);
    const SearchReport r = local_search(o.n, start, budget_of(o), so);
    json j = to_json(r);
    j["start_norm"] = o.start_norm;
    j["p0_length"] = length_p0_closed(o.n);
    out.add("search.json", j);
    out.add("search_history.csv", history_csv(r));
    std::cout << json{{"best_objective", r.best.objective}, {"best_norm", r.best_norm},
                     {"converged_to_p0", r.converged_to_p0}, {"p0_length", length_p0_closed(o.n)}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_families(const Options& o, Outputs& out)
{
    json list = json::array();
    for (Family f : {Family::p0, Family::example1, Family::example2, Family::cassini}) {
        const int n = f == Family::cassini ? 2 : o.n;
        const double param = f == Family::cassini ? o.r : f == Family::p0 ? 0.0 : o.a;
        const CriticalSpec s = family(f, n, param);
        const NormBundle nb = norms(s);
        list.push_back({{"name", std::string(to_string(f))}, {"n", n}, {"param", param}, {"polynomial", to_json(s)},
            {"coefficients", to_json(s.poly().coefficients())},
            {"norms", {{"l1_dispersion", nb.l1_dispersion}, {"origin_repulsion", nb.origin_repulsion},
                          {"total_size", nb.total_size}, {"l2_dispersion", nb.l2_dispersion}}}});
    }
    out.add("families.json", list);
    std::cout << list.dump(2) << "\n";
    return 0;
}

int cmd_calibrate(const Options& o, Outputs& out)
{
    QuadratureBudget b;
    b.tol = o.budget_tol;
    b.validate();
    const json j = to_json(calibrate(b, parse_seed(o.seed)));
    out.add("calibration.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lemniscate length, area and inequality laboratory"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c, bool poly) {
        if (poly) {
            auto* fam = c->add_option("--family", o.family, "p0, example1, example2 or cassini");
            c->add_option("--input", o.input, "polynomial JSON file")->excludes(fam);
        }
        c->add_option("--n", o.n, "degree");
        c->add_option("--a", o.a, "family parameter a");
        c->add_option("--r", o.r, "Cassini radius");
        c->add_option("--seed", o.seed, "64-bit seed, hex allowed");
        c->add_option("--budget-tol", o.budget_tol, "relative quadrature tolerance");
        c->add_option("--out", o.out, "output directory");
    };
    auto* length = app.add_subcommand("length", "lemniscate length by every method");
    common(length, true);
    length->add_option("--level", o.level, "curve |p| = level");
    auto* trace = app.add_subcommand("trace", "trace the curve, write SVG and CSV");
    common(trace, true);
    trace->add_option("--level", o.level, "curve |p| = level");
    auto* psi = app.add_subcommand("psi-map", "raster of |psi|/pi and Psi of a sublevel set");
    common(psi, true);
    psi->add_option("--grid", o.grid, "raster cells per side");
    psi->add_option("--level", o.psi_level, "sublevel set for Psi");
    auto* ar = app.add_subcommand("area", "area of the sublevel set");
    common(ar, true);
    ar->add_option("--level", o.level, "sublevel");
    auto* lau = app.add_subcommand("laurent", "exterior map coefficients of E_R");
    common(lau, true);
    lau->add_option("--level", o.level, "R > 1")->required();
    lau->add_option("--terms", o.terms, "number of coefficients (0: automatic)");
    auto* ver = app.add_subcommand("verify", "inequality battery");
    common(ver, false);
    ver->add_option("--battery", o.battery, "'full'");
    ver->add_option("--check", o.checks, "check group name (repeatable)");
    ver->add_option("--calibration", o.calibration, "calibration JSON");
    auto* sea = app.add_subcommand("search", "local maximization of the length");
    common(sea, false);
    sea->add_option("--restarts", o.restarts, "parallel restarts");
    sea->add_option("--start-norm", o.start_norm, "size of the random starting polynomial");
    auto* fams = app.add_subcommand("families", "list the built-in families");
    common(fams, false);
    auto* cal = app.add_subcommand("calibrate", "refit the calibrated constants");
    common(cal, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    CLI::App* sub = app.get_subcommands().front();
    // 2-D quadrature commands default to looser tolerances than the 1-D ones
    if (sub->count("--budget-tol") == 0) {
        if (sub == ver || sub == cal || sub == psi)
            o.budget_tol = 1e-3;
        else if (sub == ar)
            o.budget_tol = 1e-4;
    }
    // calibration draws from its own seed so fitting and checking never share samples
    if (sub == cal && sub->count("--seed") == 0)
        o.seed = "0x45485032";
    const std::string name = sub->get_name();
    Outputs out;
    int rc = 0;
    try {
        if (name == "length") rc = cmd_length(o, out);
        else if (name == "trace") rc = cmd_trace(o, out);
        else if (name == "psi-map") rc = cmd_psi_map(o, out);
        else if (name == "area") rc = cmd_area(o, out);
        else if (name == "laurent") rc = cmd_laurent(o, out);
        else if (name == "verify") rc = cmd_verify(o, out);
        else if (name == "search") rc = cmd_search(o, out);
        else if (name == "families") rc = cmd_families(o, out);
        else rc = cmd_calibrate(o, out);
        out.write(o.out, config_json(name, o));
    } catch (const Error& e) {
        const json diag = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}, {"command", name}};
        std::cerr << diag.dump() << "\n";
        return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}, {"command", name}}.dump() << "\n";
        return kExitRuntime;
    }
    return rc;
}
