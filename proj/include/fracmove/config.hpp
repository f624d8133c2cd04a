#pragma once

#include "fracmove/verify.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracmove {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value run description shared by the CLI commands.
struct RunConfig {
    double alpha = 0.5;
    double T = 1.0;
    int m = 8;
    int N = 256;
    double grading = 0.0;          ///< 0 selects 3/alpha
    std::string boundary = "constant";  ///< constant | affine | power | table
    double b = 1.0;
    double speed = 1.0;            ///< affine slope
    double power_c = 0.5;
    double power_beta = 1.0;
    std::string boundary_csv;
    std::string f = "zero";        ///< zero | one | sinxcost | CSV path (x,t,value)
    std::string h = "zero";        ///< zero | one | linear | CSV path (t,value)
    std::string u0 = "one";        ///< zero | one | modes | CSV path (x,value)
    double eps = 0.0;              ///< 0 selects 1/max(m,1)
    std::string solver = "picard"; ///< picard | l1 | both
    std::string suite = "all";     ///< appendix | q | energy | weak | all
    std::vector<int> ladder_N;
    std::vector<int> ladder_m;
    int export_nx = 33;
    int export_nt = 33;
    double tol = 1e-10;
    std::uint64_t seed = 7;
    std::string out = "out";
};

/// Parse key=value lines; '#' starts a comment. `origin` names the source in errors.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::string& path);
/// Apply one key=value override.
void apply_setting(RunConfig& cfg, const std::string& kv);
/// Throws ConfigError naming the offending field.
void validate_config(const RunConfig& cfg);

/// Canonical text of every field that affects results (the output directory is excluded).
std::string canonical_config(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

double effective_grading(const RunConfig& cfg);
double effective_eps(const RunConfig& cfg, int m);

Boundary make_boundary(const RunConfig& cfg);
LiftedProblem make_problem(const RunConfig& cfg, const FractionalOrder& order, const Boundary& s);
GalerkinOperators make_run_operators(const RunConfig& cfg, int N, int m);
SolverOptions make_solver_options(const RunConfig& cfg);

/// True when the Mittag-Leffler oracle applies: constant boundary, f = 0, h = 0.
bool has_decay_oracle(const RunConfig& cfg);
/// c_k(0) E_alpha(-lambda_k^2 t^alpha) for k = 0..m.
Eigen::VectorXd decay_oracle(const GalerkinOperators& ops, double t);

} // namespace fracmove
