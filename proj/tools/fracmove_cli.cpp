#include "fracmove/config.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

using namespace fracmove;

namespace {

constexpr const char* kVersion = "fracmove 1.0.0";

enum Exit { Ok = 0, ConfigFail = 1, SolverFail = 2, VerifyFail = 3 };

struct CommonArgs {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& a)
{
    cmd->add_option("--config", a.config, "key=value config file");
    cmd->add_option("--set", a.sets, "override key=value (repeatable)")->take_all();
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--seed", a.seed, "seed for sampled checks");
}

RunConfig resolve(const CommonArgs& a)
{
    RunConfig cfg = a.config.empty() ? RunConfig{} : load_config(a.config);
    for (const auto& s : a.sets) apply_setting(cfg, s);
    if (!a.out.empty()) cfg.out = a.out;
    if (const char* env = std::getenv("FRACMOVE_OUT"); env && *env) cfg.out = env;
    if (a.seed) cfg.seed = *a.seed;
    validate_config(cfg);
    return cfg;
}

std::string num(double x)
{
    if (std::isnan(x)) return "nan";
    std::ostringstream o;
    o << std::setprecision(17) << x;
    return o.str();
}

std::string hex(std::uint64_t h)
{
    std::ostringstream o;
    o << "0x" << std::hex << std::setw(16) << std::setfill('0') << h;
    return o.str();
}

class Csv {
public:
    explicit Csv(const std::filesystem::path& p) : os_(p, std::ios::binary)
    {
        if (!os_) throw std::runtime_error("cannot write " + p.string());
    }
    void header(const std::vector<std::string>& cols) { line(cols); }
    void row(const std::vector<double>& v)
    {
        std::vector<std::string> s;
        for (double x : v) s.push_back(num(x));
        line(s);
    }
    void line(const std::vector<std::string>& cells)
    {
        for (size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
        os_ << '\n';
    }
    void meta(const std::string& key, const std::string& value) { os_ << "# " << key << '=' << value << '\n'; }
    void footer(const RunConfig& cfg)
    {
        meta("config_hash", hex(config_hash(cfg)));
        meta("version", kVersion);
    }
    std::ostream& stream() { return os_; }

private:
    std::ofstream os_;
};

std::filesystem::path prepare_out(const RunConfig& cfg)
{
    std::filesystem::path p(cfg.out);
    std::filesystem::create_directories(p);
    return p;
}

void write_coefficients(const std::filesystem::path& file, const GalerkinOperators& ops, const CoefficientPath& path,
                        const RunConfig& cfg, bool oracle)
{
    Csv csv(file);
    const int M = path.modes();
    std::vector<std::string> cols{"t"};
    for (int k = 0; k < M; ++k) cols.push_back("c_" + std::to_string(k));
    for (int k = 0; k < M; ++k) cols.push_back("w_" + std::to_string(k));
    if (oracle)
        for (int k = 0; k < M; ++k) cols.push_back("ml_" + std::to_string(k));
    csv.header(cols);
    double err = 0.0;
    const double scale = std::max(ops.c0.cwiseAbs().maxCoeff(), 1e-300);
    for (int j = 0; j < path.grid.size(); ++j) {
        std::vector<double> r{path.grid[j]};
        for (int k = 0; k < M; ++k) r.push_back(path.c(k, j));
        for (int k = 0; k < M; ++k) r.push_back(path.w(k, j));
        if (oracle) {
            const Eigen::VectorXd ml = decay_oracle(ops, path.grid[j]);
            for (int k = 0; k < M; ++k) {
                r.push_back(ml[k]);
                err = std::max(err, std::abs(path.c(k, j) - ml[k]));
            }
        }
        csv.row(r);
    }
    if (oracle) csv.meta("oracle_max_rel_error", num(ops.c0.isZero() ? err : err / scale));
    csv.footer(cfg);
}

void write_field(const std::filesystem::path& file, const GalerkinOperators& ops, const CoefficientPath& path,
                 const RunConfig& cfg)
{
    const double T = ops.grid.T(), sT = ops.boundary()(T);
    std::vector<double> xs, ts;
    for (int i = 0; i < cfg.export_nx; ++i) xs.push_back(sT * i / (cfg.export_nx - 1));
    for (int j = 0; j < cfg.export_nt; ++j) ts.push_back(T * j / (cfg.export_nt - 1));
    Csv csv(file);
    csv.header({"x", "t", "u", "inside"});
    for (const FieldSample& f : reconstruct_field(ops, path, xs, ts))
        csv.line({num(f.x), num(f.t), f.inside ? num(f.u) : "nan", f.inside ? "1" : "0"});
    csv.footer(cfg);
}

void write_report(const std::filesystem::path& file, const std::vector<std::pair<std::string, std::string>>& rows,
                  const RunConfig& cfg)
{
    Csv csv(file);
    csv.header({"key", "value"});
    for (const auto& [k, v] : rows) csv.line({k, v});
    csv.footer(cfg);
}

void report_rows(std::vector<std::pair<std::string, std::string>>& rows, const std::string& prefix,
                 const SolveReport& r)
{
    rows.push_back({prefix + "method", r.method});
    rows.push_back({prefix + "converged", r.converged ? "1" : "0"});
    rows.push_back({prefix + "message", "\"" + r.message + "\""});
    rows.push_back({prefix + "windows", std::to_string(r.windows)});
    rows.push_back({prefix + "halvings", std::to_string(r.halvings)});
    rows.push_back({prefix + "total_iterations", std::to_string(r.total_iterations)});
    rows.push_back({prefix + "max_rho", num(r.max_rho)});
    rows.push_back({prefix + "residual_values", num(r.residual_values)});
    rows.push_back({prefix + "residual_derivative", num(r.residual_derivative)});
}

double relative_sup_difference(const CoefficientPath& a, const CoefficientPath& b)
{
    const double scale = std::max(a.c.cwiseAbs().maxCoeff(), 1e-300);
    return (a.c - b.c).cwiseAbs().maxCoeff() / scale;
}

int cmd_solve(const RunConfig& cfg)
{
    const GalerkinOperators ops = make_run_operators(cfg, cfg.N, cfg.m);
    const auto dir = prepare_out(cfg);
    const bool oracle = has_decay_oracle(cfg);
    std::vector<std::pair<std::string, std::string>> rows;
    std::optional<SolveResult> pic, l1;
    const auto start = std::chrono::steady_clock::now();
    if (cfg.solver != "l1") {
        pic = solve(ops, make_solver_options(cfg));
        report_rows(rows, "picard_", pic->report);
    }
    if (cfg.solver != "picard") {
        l1 = l1_direct_solve(ops);
        auto [rv, rw] = fixed_point_residual(ops, l1->path);
        l1->report.residual_values = rv;
        l1->report.residual_derivative = rw;
        report_rows(rows, "l1_", l1->report);
    }
    if (pic && l1) rows.push_back({"cross_relative_difference", num(relative_sup_difference(pic->path, l1->path))});
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const SolveResult& primary = pic ? *pic : *l1;
    write_report(dir / "report.csv", rows, cfg);
    if (!primary.report.converged || (l1 && !l1->report.converged)) {
        std::cerr << "solve: " << primary.report.message << '\n';
        return SolverFail;
    }
    write_coefficients(dir / "coefficients.csv", ops, primary.path, cfg, oracle);
    if (pic && l1) write_coefficients(dir / "coefficients_l1.csv", ops, l1->path, cfg, oracle);
    write_field(dir / "field.csv", ops, primary.path, cfg);
    std::cout << "solve: " << primary.report.method << " converged, N=" << cfg.N << " m=" << cfg.m
              << " residual=" << primary.report.residual_values << " (" << std::fixed << std::setprecision(2) << wall
              << " s), wrote " << dir.string() << '\n';
    return Ok;
}

// Asserted residuals use the data the Galerkin system sees. Residuals against the
// exact data also carry the projection error of v0 and the mollification error,
// which do not shrink with N, so they are recorded only.
VerificationReport weak_suite(const RunConfig& cfg, const GalerkinOperators& ops, const CoefficientPath& path)
{
    VerificationReport rep;
    const TestTime psi = default_test_time(cfg.T);
    std::ostringstream params;
    params << "N=" << cfg.N << " m=" << cfg.m << " tol=1e-2";
    double worst = 0.0;
    for (int k = 0; k <= cfg.m; ++k) {
        const double r = weak_residual(ops, path, k, psi, WeakData::Galerkin);
        worst = std::isnan(r) ? r : std::max(worst, r);
        rep.add({"weak_residual_k" + std::to_string(k), r, 1e-2, r < 1e-2, true, "", params.str()});
    }
    for (int k = 0; k <= cfg.m; ++k) {
        const double r = weak_residual(ops, path, k, psi, WeakData::Exact);
        rep.add({"weak_residual_exact_data_k" + std::to_string(k), r, 1e-2, true, false, "exact v0 and g",
                 params.str()});
    }
    const double outside = weak_residual(ops, path, cfg.m + 1, psi, WeakData::Galerkin);
    rep.add({"weak_residual_k" + std::to_string(cfg.m + 1), outside, 0.0, true, false, "mode outside the ansatz",
             params.str()});
    if (cfg.N / 2 >= 8) {
        const GalerkinOperators coarse = make_run_operators(cfg, cfg.N / 2, cfg.m);
        const SolveResult rc = solve(coarse, make_solver_options(cfg));
        double cw = 0.0;
        for (int k = 0; k <= cfg.m; ++k) cw = std::max(cw, weak_residual(coarse, rc.path, k, psi, WeakData::Galerkin));
        const double ratio = cw / std::max(worst, 1e-300);
        std::ostringstream tr;
        tr << "N/2: " << cw << " -> N: " << worst;
        rep.add({"weak_refinement", ratio, 1.5, ratio >= 1.5 || worst < 1e-12, true, tr.str(), params.str()});
    }
    return rep;
}

int cmd_verify(const RunConfig& cfg)
{
    const auto dir = prepare_out(cfg);
    const FractionalOrder order(cfg.alpha);
    VerificationReport rep;
    const bool all = cfg.suite == "all";
    if (all || cfg.suite == "appendix") {
        rep.merge(appendix_suite_all(cfg.seed));
        if (cfg.alpha != 0.3 && cfg.alpha != 0.5 && cfg.alpha != 0.7) rep.merge(appendix_suite(order, cfg.seed));
    }
    if (all || cfg.suite == "q") rep.merge(q_function_suite(order, make_boundary(cfg), cfg.seed));
    if (all || cfg.suite == "energy" || cfg.suite == "weak") {
        const GalerkinOperators ops = make_run_operators(cfg, cfg.N, cfg.m);
        const SolveResult r = solve(ops, make_solver_options(cfg));
        if (!r.report.converged) {
            std::cerr << "verify: solve failed: " << r.report.message << '\n';
            return SolverFail;
        }
        if (all || cfg.suite == "energy") {
            rep.merge(energy_inequality_check(ops, r.path));
            rep.merge(duality_bound_check(ops, r.path));
        }
        if (all || cfg.suite == "weak") rep.merge(weak_suite(cfg, ops, r.path));
    }
    {
        std::ofstream os(dir / "verify.csv", std::ios::binary);
        rep.write_csv(os);
        os << "# config_hash=" << hex(config_hash(cfg)) << "\n# version=" << kVersion << '\n';
    }
    rep.print(std::cout);
    std::cout << (rep.passed() ? "verify: all asserted checks passed\n" : "verify: FAILED\n");
    return rep.passed() ? Ok : VerifyFail;
}

// Coefficients padded with zeros to `modes` entries at time t.
Eigen::VectorXd padded(const CoefficientPath& p, double t, int modes)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(modes);
    const Eigen::VectorXd c = p.value_at(t);
    const int n = std::min<int>(modes, int(c.size()));
    v.head(n) = c.head(n);
    return v;
}

int cmd_convergence(const RunConfig& cfg)
{
    std::vector<std::pair<int, int>> ladder;
    if (!cfg.ladder_m.empty())
        for (int m : cfg.ladder_m) ladder.push_back({cfg.N, m});
    else
        for (int n : cfg.ladder_N) ladder.push_back({n, cfg.m});
    if (ladder.size() < 2) throw ConfigError("ladder: need at least two entries (ladder_N or ladder_m)");
    const auto dir = prepare_out(cfg);
    int mmax = 0;
    for (auto [n, m] : ladder) mmax = std::max(mmax, m);
    const int modes = mmax + 1;

    std::vector<SolveResult> runs;
    for (auto [n, m] : ladder) {
        const GalerkinOperators ops = make_run_operators(cfg, n, m);
        SolveResult r = cfg.solver == "l1" ? l1_direct_solve(ops) : solve(ops, make_solver_options(cfg));
        if (!r.report.converged) {
            std::cerr << "convergence: N=" << n << " m=" << m << ": " << r.report.message << '\n';
            return SolverFail;
        }
        runs.push_back(std::move(r));
    }

    const bool oracle = has_decay_oracle(cfg);
    std::optional<GalerkinOperators> ref_ops;
    size_t ref = 0;
    if (oracle) ref_ops.emplace(make_run_operators(cfg, 8, mmax));
    else
        for (size_t i = 1; i < ladder.size(); ++i)
            if (ladder[i].first * (ladder[i].second + 1) > ladder[ref].first * (ladder[ref].second + 1)) ref = i;

    std::vector<double> errs;
    for (size_t i = 0; i < runs.size(); ++i) {
        const CoefficientPath& p = runs[i].path;
        double err = 0.0, scale = 0.0;
        for (int j = 0; j < p.grid.size(); ++j) {
            const double t = p.grid[j];
            Eigen::VectorXd target = oracle ? decay_oracle(*ref_ops, t) : padded(runs[ref].path, t, modes);
            err = std::max(err, (padded(p, t, modes) - target).norm());
            scale = std::max(scale, target.norm());
        }
        errs.push_back(!oracle && i == ref ? std::nan("") : err / std::max(scale, 1e-300));
    }

    Csv csv(dir / "convergence.csv");
    csv.header({"N", "m", "error", "order"});
    csv.meta("reference", oracle ? "mittag_leffler" : "finest N=" + std::to_string(ladder[ref].first) +
                                                          " m=" + std::to_string(ladder[ref].second));
    std::cout << std::setw(6) << "N" << std::setw(6) << "m" << std::setw(16) << "error" << std::setw(10) << "order\n";
    for (size_t i = 0; i < ladder.size(); ++i) {
        double order = std::nan("");
        if (i > 0 && std::isfinite(errs[i]) && std::isfinite(errs[i - 1]) && errs[i] > 0 && errs[i - 1] > 0) {
            const double num_ratio = cfg.ladder_m.empty() ? double(ladder[i].first) / ladder[i - 1].first
                                                          : double(ladder[i].second + 1) / (ladder[i - 1].second + 1);
            order = std::log(errs[i - 1] / errs[i]) / std::log(num_ratio);
        }
        csv.line({std::to_string(ladder[i].first), std::to_string(ladder[i].second), num(errs[i]), num(order)});
        std::cout << std::setw(6) << ladder[i].first << std::setw(6) << ladder[i].second << std::setw(16)
                  << std::setprecision(6) << errs[i] << std::setw(10) << std::setprecision(3) << order << '\n';
    }
    csv.footer(cfg);
    return Ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Time-fractional heat equation on a growing interval: Galerkin solver and checks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    CommonArgs solve_args, verify_args, conv_args;
    std::string suite, ladder, ladder_m;
    auto* s = app.add_subcommand("solve", "solve and write coefficients.csv, field.csv, report.csv");
    add_common(s, solve_args);
    auto* v = app.add_subcommand("verify", "run verification suites and write verify.csv");
    add_common(v, verify_args);
    v->add_option("--suite", suite, "appendix | q | energy | weak | all");
    auto* c = app.add_subcommand("convergence", "refinement ladder against an oracle or the finest run");
    add_common(c, conv_args);
    c->add_option("--ladder", ladder, "comma-separated N values");
    c->add_option("--ladder-m", ladder_m, "comma-separated m values (N fixed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : ConfigFail;
    }

    RunConfig cfg;
    try {
        if (*s) cfg = resolve(solve_args);
        if (*v) {
            cfg = resolve(verify_args);
            if (!suite.empty()) apply_setting(cfg, "suite=" + suite);
        }
        if (*c) {
            cfg = resolve(conv_args);
            if (!ladder.empty()) apply_setting(cfg, "ladder_N=" + ladder);
            if (!ladder_m.empty()) apply_setting(cfg, "ladder_m=" + ladder_m);
        }
        validate_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigFail;
    }

    try {
        if (*s) return cmd_solve(cfg);
        if (*v) return cmd_verify(cfg);
        return cmd_convergence(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigFail;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return SolverFail;
    }
}
