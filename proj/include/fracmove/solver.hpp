#pragma once

#include "fracmove/assembly.hpp"

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

namespace fracmove {

/// Galerkin coefficients on a grid: column j of c holds c(t_j), column j of w
/// holds the regularized derivative t_j^(1-alpha) c'(t_j).
struct CoefficientPath {
    TimeGrid grid;
    Eigen::MatrixXd c;
    Eigen::MatrixXd w;

    int modes() const { return int(c.rows()); }
    Eigen::VectorXd c0() const { return c.col(0); }
    /// Linear interpolation of the node values.
    Eigen::VectorXd value_at(double t) const;
};

/// sup_j |c(t_j)| + sup_j |w(t_j)|, Euclidean norm per node.
double xt_norm(const CoefficientPath& p);

/// c0 + int_0^{t_j} p^(alpha-1) w(p) dp with w interpolated linearly.
Eigen::MatrixXd integrate_regularized(const TimeGrid& grid, const Eigen::MatrixXd& w,
                                      const Eigen::VectorXd& c0, double alpha);

struct SolverOptions {
    double tol = 1e-10;
    int max_iterations = 50;
    double rho_limit = 0.5;
    double initial_window = 0.125;  ///< fraction of T
    int min_window_cells = 4;
    int max_window_cells = 256;
    int successes_to_grow = 2;
};

struct WindowRecord {
    double t_start = 0, t_end = 0;
    int cells = 0;
    int iterations = 0;
    double rho = 0;
    bool accepted = false;
};

struct SolveReport {
    bool converged = false;
    std::string method;
    std::string message;
    int windows = 0;
    int halvings = 0;
    int total_iterations = 0;
    double max_rho = 0;
    double residual_values = std::numeric_limits<double>::quiet_NaN();
    double residual_derivative = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0;
    std::vector<WindowRecord> history;
};

struct SolveResult {
    CoefficientPath path;
    SolveReport report;
};

/// The discrete fixed-point map: values (Pc)(t_j) and regularized derivatives
/// t_j^(1-alpha) (Pc)'(t_j).
CoefficientPath apply_P(const GalerkinOperators& ops, const CoefficientPath& c);

struct WindowOutcome {
    int iterations = 0;
    double rho = 0;             ///< largest observed ratio of successive X-norm differences
    double final_difference = 0;
    double residual = 0;        ///< sup |c - Pc| over the window
    bool converged = false;
    bool contractive = true;
};

/// Iterate on nodes (start, end] with nodes 0..start of `path` fixed.
/// On return the window columns of `path` hold the last iterate.
WindowOutcome picard_window(const GalerkinOperators& ops, CoefficientPath& path, int start, int end,
                            const SolverOptions& opt = {});

/// Windowed Picard solve over the whole grid.
SolveResult solve(const GalerkinOperators& ops, const SolverOptions& opt = {});

/// Direct L1 discretization of the differential form, implicit at each node.
SolveResult l1_direct_solve(const GalerkinOperators& ops);

/// Sup over nodes of |c - Pc| and |w - t^(1-alpha)(Pc)'|.
std::pair<double, double> fixed_point_residual(const GalerkinOperators& ops, const CoefficientPath& c);

struct FieldSample {
    double x = 0, t = 0, u = 0;
    bool inside = false;
};

/// u on the tensor grid xs x ts; points outside Q_{s,T} are flagged and carry NaN.
std::vector<FieldSample> reconstruct_field(const GalerkinOperators& ops, const CoefficientPath& path,
                                           const std::vector<double>& xs, const std::vector<double>& ts);

} // namespace fracmove
