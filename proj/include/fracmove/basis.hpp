#pragma once

#include "fracmove/boundary.hpp"

#include <Eigen/Dense>
#include <utility>

namespace fracmove {

/// Cosine modes phi_n(x,t) = sqrt(2/s) cos(lambda_n x), lambda_n = pi(n+1/2)/s(t),
/// n = 0..m. They satisfy phi_x(0) = 0 and phi(s(t), t) = 0.
class GalerkinBasis {
public:
    GalerkinBasis(int m, Boundary s);

    int m() const { return m_; }
    int size() const { return m_ + 1; }
    int quadrature_nodes() const { return q_; }
    const Boundary& boundary() const { return s_; }

    double mu(int n) const;                 ///< pi (n + 1/2)
    double lambda(int n, double t) const;
    double phi(int n, double x, double t) const;
    double phi_x(int n, double x, double t) const;
    double phi_xx(int n, double x, double t) const;
    double phi_t(int n, double x, double t) const;
    /// phi_t = (s'/s) psi_n
    double psi(int n, double x, double t) const;

    /// Gram matrix and stiffness matrix at time t by q-point quadrature.
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gram_and_stiffness(double t) const;

    /// v(x,t) = sum_n c_n phi_n(x,t)
    double expand(const Eigen::VectorXd& c, double x, double t) const;
    double expand_x(const Eigen::VectorXd& c, double x, double t) const;

private:
    void check(int n, double x, double t) const;

    int m_;
    int q_;
    Boundary s_;
};

} // namespace fracmove
