#pragma once

#include "fracmove/basis.hpp"

#include <Eigen/Dense>
#include <functional>
#include <vector>
#include <optional>

namespace fracmove {

// Galerkin matrices are indexed (n, k): n is the expanded mode, k the test mode.
// Their action on a coefficient vector c is M^T c.

/// C(tau,t)_{nk} = int_0^{s(tau)} phi_n(x,tau) phi_k(x,t) dx, tau <= t.
Eigen::MatrixXd cross_gram(const GalerkinBasis& basis, double tau, double t);
/// B(tau,t) = C(tau,t) - I
Eigen::MatrixXd b_matrix(const GalerkinBasis& basis, double tau, double t);
/// Psi(tau,t)_{nk} = int_0^{s(tau)} psi_n(x,tau) phi_k(x,t) dx, where phi_t = (s'/s) psi.
Eigen::MatrixXd psi_matrix(const GalerkinBasis& basis, double tau, double t);
/// Time-independent part of D: Psi(t,t). Antisymmetric with zero diagonal.
Eigen::MatrixXd dhat_matrix(int m);
Eigen::MatrixXd dhat_matrix(const GalerkinBasis& basis, double tau);
/// D~(tau,t) = (s'(tau)/s(tau)) (Psi(tau,t) - Dhat)
Eigen::MatrixXd dtilde_matrix(const GalerkinBasis& basis, double tau, double t);
/// Full D(tau,t) = int phi_t(x,tau) phi_k(x,t) dx = (s'/s)(tau) Psi(tau,t)
Eigen::MatrixXd d_matrix(const GalerkinBasis& basis, double tau, double t);
/// Same three matrices with s'(tau)/s(tau) replaced by `rate`; used where s' is singular.
Eigen::MatrixXd dtilde_matrix_rate(const GalerkinBasis& basis, double tau, double t, double rate);

/// E(t) = Gamma(1-alpha) diag(lambda_k(t)^2)
Eigen::MatrixXd e_matrix(const GalerkinBasis& basis, const FractionalOrder& order, double t);
Eigen::MatrixXd e_matrix_derivative(const GalerkinBasis& basis, const FractionalOrder& order, double t);

/// Time mollification of the zero extension of g outside Q_{s,T}, bump of half-width eps.
SpaceTimeField mollify_forcing(const SpaceTimeField& g, const Boundary& s, double eps);

/// Points in (0, s(t)) where the mollified field loses smoothness in x: b and s(t - eps).
std::vector<double> mollifier_breaks(const Boundary& s, double eps, double t);

/// Gamma(1-alpha) int_0^{s(t)} g(x,t) phi_k(x,t) dx, k = 0..m; the rule restarts at each break.
Eigen::VectorXd forcing_projection(const GalerkinBasis& basis, const FractionalOrder& order,
                                   const SpaceTimeField& g, double t, const std::vector<double>& breaks = {});

/// int_0^b v0(x) phi_k(x,0) dx
Eigen::VectorXd project_initial(const GalerkinBasis& basis, const std::function<double(double)>& v0);

/// Cutoff with eta'(0) = 1 and eta = 0 for x >= b.
struct Cutoff {
    std::function<double(double)> eta, eta_x, eta_xx;
};
Cutoff default_cutoff(double b);

/// Problem with homogeneous Neumann data: v = u + h eta,
/// g = f - h eta_xx + eta D^alpha h, v0 = u0 + h(0) eta.
struct LiftedProblem {
    SpaceTimeField g;
    std::function<double(double)> v0;
    std::function<double(double)> h;
    Cutoff cutoff;
    bool lifted = false;
};

LiftedProblem lift_boundary(const FractionalOrder& order, const Boundary& s, const SpaceTimeField& f,
                            const std::function<double(double)>& h, const std::function<double(double)>& u0,
                            std::optional<Cutoff> cutoff = std::nullopt);

/// Everything the solver and verifiers need about one discretized problem.
struct GalerkinOperators {
    FractionalOrder order;
    GalerkinBasis basis;
    TimeGrid grid;
    double eps;
    LiftedProblem problem;
    SpaceTimeField mollified;   ///< g^eps
    Eigen::VectorXd c0;         ///< projection of v0

    const Boundary& boundary() const { return basis.boundary(); }
};

/// eps <= 0 selects the default 2 t_1.
GalerkinOperators make_operators(const FractionalOrder& order, const GalerkinBasis& basis, const TimeGrid& grid,
                                 LiftedProblem problem, double eps = 0.0);

} // namespace fracmove
