#include "fracmove/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace fracmove {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || p != end || !std::isfinite(x)) throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v)
{
    long long x = 0;
    const char* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || p != end) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return x;
}

std::vector<int> to_list(const std::string& key, const std::string& v)
{
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(int(to_int(key, item)));
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.alpha = to_double(k, v); }},
        {"T", [](RunConfig& c, const std::string& k, const std::string& v) { c.T = to_double(k, v); }},
        {"m", [](RunConfig& c, const std::string& k, const std::string& v) { c.m = int(to_int(k, v)); }},
        {"N", [](RunConfig& c, const std::string& k, const std::string& v) { c.N = int(to_int(k, v)); }},
        {"grading", [](RunConfig& c, const std::string& k, const std::string& v) { c.grading = to_double(k, v); }},
        {"boundary", [](RunConfig& c, const std::string&, const std::string& v) { c.boundary = v; }},
        {"b", [](RunConfig& c, const std::string& k, const std::string& v) { c.b = to_double(k, v); }},
        {"speed", [](RunConfig& c, const std::string& k, const std::string& v) { c.speed = to_double(k, v); }},
        {"power_c", [](RunConfig& c, const std::string& k, const std::string& v) { c.power_c = to_double(k, v); }},
        {"power_beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.power_beta = to_double(k, v); }},
        {"boundary_csv", [](RunConfig& c, const std::string&, const std::string& v) { c.boundary_csv = v; }},
        {"f", [](RunConfig& c, const std::string&, const std::string& v) { c.f = v; }},
        {"h", [](RunConfig& c, const std::string&, const std::string& v) { c.h = v; }},
        {"u0", [](RunConfig& c, const std::string&, const std::string& v) { c.u0 = v; }},
        {"eps", [](RunConfig& c, const std::string& k, const std::string& v) { c.eps = to_double(k, v); }},
        {"solver", [](RunConfig& c, const std::string&, const std::string& v) { c.solver = v; }},
        {"suite", [](RunConfig& c, const std::string&, const std::string& v) { c.suite = v; }},
        {"ladder_N", [](RunConfig& c, const std::string& k, const std::string& v) { c.ladder_N = to_list(k, v); }},
        {"ladder_m", [](RunConfig& c, const std::string& k, const std::string& v) { c.ladder_m = to_list(k, v); }},
        {"export_nx", [](RunConfig& c, const std::string& k, const std::string& v) { c.export_nx = int(to_int(k, v)); }},
        {"export_nt", [](RunConfig& c, const std::string& k, const std::string& v) { c.export_nt = int(to_int(k, v)); }},
        {"tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.tol = to_double(k, v); }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) {
             const long long s = to_int(k, v);
             if (s < 0) throw ConfigError("seed: must be nonnegative");
             c.seed = std::uint64_t(s);
         }},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
    };
    return table;
}

bool is_named(const std::string& v, std::initializer_list<const char*> names)
{
    return std::any_of(names.begin(), names.end(), [&](const char* n) { return v == n; });
}

// Rows of numbers from a CSV file; a non-numeric first row is taken as the header.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path, size_t cols, const std::string& field)
{
    std::ifstream in(path);
    if (!in) throw ConfigError(field + ": cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            double x = 0.0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
            if (ec != std::errc() || p != cell.data() + cell.size()) {
                numeric = false;
                break;
            }
            row.push_back(x);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;
            }
            throw ConfigError(field + ": non-numeric row in '" + path + "'");
        }
        first = false;
        if (row.size() < cols) throw ConfigError(field + ": expected " + std::to_string(cols) + " columns in '" + path + "'");
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw ConfigError(field + ": '" + path + "' needs at least two rows");
    return rows;
}

// Piecewise-linear interpolation, clamped at the ends.
std::function<double(double)> table_1d(const std::string& path, const std::string& field)
{
    auto rows = read_numeric_csv(path, 2, field);
    std::sort(rows.begin(), rows.end());
    std::vector<double> x, y;
    for (const auto& r : rows) {
        x.push_back(r[0]);
        y.push_back(r[1]);
    }
    return [x, y](double q) {
        if (q <= x.front()) return y.front();
        if (q >= x.back()) return y.back();
        const size_t i = size_t(std::upper_bound(x.begin(), x.end(), q) - x.begin()) - 1;
        const double w = (q - x[i]) / (x[i + 1] - x[i]);
        return (1.0 - w) * y[i] + w * y[i + 1];
    };
}

// Bilinear interpolation on the tensor grid spanned by the (x, t) columns.
SpaceTimeField table_2d(const std::string& path, const std::string& field)
{
    const auto rows = read_numeric_csv(path, 3, field);
    std::vector<double> xs, ts;
    for (const auto& r : rows) {
        xs.push_back(r[0]);
        ts.push_back(r[1]);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (xs.size() < 2 || ts.size() < 2 || xs.size() * ts.size() != rows.size())
        throw ConfigError(field + ": '" + path + "' must hold a full x-by-t grid");
    std::vector<double> v(rows.size(), 0.0);
    for (const auto& r : rows) {
        const size_t i = size_t(std::lower_bound(xs.begin(), xs.end(), r[0]) - xs.begin());
        const size_t j = size_t(std::lower_bound(ts.begin(), ts.end(), r[1]) - ts.begin());
        v[i * ts.size() + j] = r[2];
    }
    return [xs, ts, v](double x, double t) {
        auto locate = [](const std::vector<double>& g, double q, size_t& i, double& w) {
            q = std::clamp(q, g.front(), g.back());
            i = std::min(size_t(std::upper_bound(g.begin(), g.end(), q) - g.begin()), g.size() - 1) - 1;
            w = (q - g[i]) / (g[i + 1] - g[i]);
        };
        size_t i = 0, j = 0;
        double wx = 0, wt = 0;
        locate(xs, x, i, wx);
        locate(ts, t, j, wt);
        const size_t n = ts.size();
        return (1 - wx) * ((1 - wt) * v[i * n + j] + wt * v[i * n + j + 1]) +
               wx * ((1 - wt) * v[(i + 1) * n + j] + wt * v[(i + 1) * n + j + 1]);
    };
}

std::string fmt(double x)
{
    std::ostringstream o;
    o << std::setprecision(17) << x;
    return o.str();
}

} // namespace

void apply_setting(RunConfig& cfg, const std::string& kv)
{
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + kv + "'");
    const std::string key = trim(kv.substr(0, eq)), value = trim(kv.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
    it->second(cfg, key, value);
}

RunConfig parse_config(const std::string& text, const std::string& origin)
{
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            apply_setting(cfg, line);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig cfg = parse_config(buf.str(), path);
    // Relative data paths resolve against the config file's directory.
    const auto dir = std::filesystem::path(path).parent_path();
    auto resolve = [&](std::string& p, std::initializer_list<const char*> named) {
        if (p.empty() || is_named(p, named)) return;
        std::filesystem::path q(p);
        if (q.is_relative() && !std::filesystem::exists(q) && std::filesystem::exists(dir / q)) p = (dir / q).string();
    };
    resolve(cfg.f, {"zero", "one", "sinxcost"});
    resolve(cfg.h, {"zero", "one", "linear"});
    resolve(cfg.u0, {"zero", "one", "modes"});
    resolve(cfg.boundary_csv, {});
    return cfg;
}

void validate_config(const RunConfig& c)
{
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha: must lie in (0, 1)");
    if (!(c.T > 0.0)) throw ConfigError("T: must be positive");
    if (c.m < 0) throw ConfigError("m: must be nonnegative");
    if (c.N < 8) throw ConfigError("N: must be at least 8");
    if (c.grading != 0.0 && c.grading < 1.0) throw ConfigError("grading: must be 0 (default) or >= 1");
    if (!(c.b > 0.0)) throw ConfigError("b: must be positive");
    if (c.eps < 0.0) throw ConfigError("eps: must be nonnegative");
    if (!(c.tol > 0.0)) throw ConfigError("tol: must be positive");
    if (c.export_nx < 2 || c.export_nt < 2) throw ConfigError("export_nx/export_nt: need at least 2 points");
    if (!is_named(c.boundary, {"constant", "affine", "power", "table"}))
        throw ConfigError("boundary: unknown family '" + c.boundary + "'");
    if (c.boundary == "affine" && c.speed < 0.0) throw ConfigError("speed: must be nonnegative");
    if (c.boundary == "power") {
        if (c.power_c < 0.0) throw ConfigError("power_c: must be nonnegative");
        if (c.power_beta < c.alpha) throw ConfigError("power_beta: must be at least alpha");
    }
    if (c.boundary == "table") {
        if (c.boundary_csv.empty()) throw ConfigError("boundary_csv: required for boundary=table");
        if (!std::filesystem::exists(c.boundary_csv))
            throw ConfigError("boundary_csv: file not found '" + c.boundary_csv + "'");
    }
    auto data = [](const std::string& field, const std::string& v, std::initializer_list<const char*> named) {
        if (v.empty()) throw ConfigError(field + ": empty value");
        if (!is_named(v, named) && !std::filesystem::exists(v))
            throw ConfigError(field + ": not a named probe and file not found '" + v + "'");
    };
    data("f", c.f, {"zero", "one", "sinxcost"});
    data("h", c.h, {"zero", "one", "linear"});
    data("u0", c.u0, {"zero", "one", "modes"});
    if (!is_named(c.solver, {"picard", "l1", "both"})) throw ConfigError("solver: expected picard, l1 or both");
    if (!is_named(c.suite, {"appendix", "q", "energy", "weak", "all"}))
        throw ConfigError("suite: expected appendix, q, energy, weak or all");
    for (int n : c.ladder_N)
        if (n < 8) throw ConfigError("ladder_N: entries must be at least 8");
    for (int m : c.ladder_m)
        if (m < 0) throw ConfigError("ladder_m: entries must be nonnegative");
}

std::string canonical_config(const RunConfig& c)
{
    std::ostringstream o;
    auto list = [](const std::vector<int>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    o << "alpha=" << fmt(c.alpha) << "\nT=" << fmt(c.T) << "\nm=" << c.m << "\nN=" << c.N << "\ngrading=" << fmt(c.grading)
      << "\nboundary=" << c.boundary << "\nb=" << fmt(c.b) << "\nspeed=" << fmt(c.speed) << "\npower_c=" << fmt(c.power_c)
      << "\npower_beta=" << fmt(c.power_beta) << "\nboundary_csv=" << c.boundary_csv << "\nf=" << c.f << "\nh=" << c.h
      << "\nu0=" << c.u0 << "\neps=" << fmt(c.eps) << "\nsolver=" << c.solver << "\nsuite=" << c.suite
      << "\nladder_N=" << list(c.ladder_N) << "\nladder_m=" << list(c.ladder_m) << "\nexport_nx=" << c.export_nx
      << "\nexport_nt=" << c.export_nt << "\ntol=" << fmt(c.tol) << "\nseed=" << c.seed << "\n";
    return o.str();
}

std::uint64_t config_hash(const RunConfig& cfg)
{
    // FNV-1a
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical_config(cfg)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

double effective_grading(const RunConfig& cfg) { return cfg.grading > 0.0 ? cfg.grading : 3.0 / cfg.alpha; }

double effective_eps(const RunConfig& cfg, int m) { return cfg.eps > 0.0 ? cfg.eps : 1.0 / std::max(m, 1); }

Boundary make_boundary(const RunConfig& c)
{
    if (c.boundary == "constant") return Boundary::constant(c.b, c.T);
    if (c.boundary == "affine") return Boundary::affine(c.b, c.speed, c.T);
    if (c.boundary == "power") return Boundary::power(c.b, c.power_c, c.power_beta, c.T);
    if (c.boundary == "table") {
        Boundary s = Boundary::from_csv(c.boundary_csv);
        if (s.horizon() < c.T * (1.0 - 1e-12)) throw ConfigError("boundary_csv: table ends before T");
        return s;
    }
    throw ConfigError("boundary: unknown family '" + c.boundary + "'");
}

LiftedProblem make_problem(const RunConfig& c, const FractionalOrder& order, const Boundary& s)
{
    SpaceTimeField f;
    if (c.f == "zero") f = [](double, double) { return 0.0; };
    else if (c.f == "one") f = [](double, double) { return 1.0; };
    else if (c.f == "sinxcost") f = [](double x, double t) { return std::sin(x) * std::cos(t); };
    else f = table_2d(c.f, "f");

    std::function<double(double)> h;
    if (c.h == "zero") h = [](double) { return 0.0; };
    else if (c.h == "one") h = [](double) { return 1.0; };
    else if (c.h == "linear") h = [](double t) { return t; };
    else h = table_1d(c.h, "h");

    std::function<double(double)> u0;
    const double b = s.b();
    if (c.u0 == "zero") u0 = [](double) { return 0.0; };
    else if (c.u0 == "one") u0 = [](double) { return 1.0; };
    else if (c.u0 == "modes") {
        u0 = [b](double x) {
            const double k = std::sqrt(2.0 / b), pi = std::acos(-1.0);
            auto phi = [&](int n) { return k * std::cos(pi * (n + 0.5) * x / b); };
            return phi(0) + 0.5 * phi(3) + 0.25 * phi(7);
        };
    } else u0 = table_1d(c.u0, "u0");
    return lift_boundary(order, s, f, h, u0);
}

GalerkinOperators make_run_operators(const RunConfig& c, int N, int m)
{
    const FractionalOrder order(c.alpha);
    const Boundary s = make_boundary(c);
    const BoundaryReport rep = validate(s, order);
    if (!rep.ok) {
        std::string msg = "boundary: ";
        for (const auto& i : rep.issues) msg += i + "; ";
        throw ConfigError(msg);
    }
    const GalerkinBasis basis(m, s);
    const TimeGrid grid(c.T, N, effective_grading(c));
    return make_operators(order, basis, grid, make_problem(c, order, s), effective_eps(c, m));
}

SolverOptions make_solver_options(const RunConfig& c)
{
    SolverOptions o;
    o.tol = c.tol;
    return o;
}

bool has_decay_oracle(const RunConfig& c) { return c.boundary == "constant" && c.f == "zero" && c.h == "zero"; }

Eigen::VectorXd decay_oracle(const GalerkinOperators& ops, double t)
{
    Eigen::VectorXd out(ops.basis.size());
    const double ta = std::pow(t, ops.order.alpha());
    for (int k = 0; k < out.size(); ++k) {
        const double l = ops.basis.lambda(k, 0.0);
        out[k] = ops.c0[k] * mittag_leffler(ops.order, -l * l * ta);
    }
    return out;
}

} // namespace fracmove
