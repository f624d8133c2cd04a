#include "fracmove/basis.hpp"

#include "fracmove/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracmove {

GalerkinBasis::GalerkinBasis(int m, Boundary s) : m_(m), q_(std::max(64, 4 * (m + 1))), s_(std::move(s))
{
    if (m < 0) throw std::invalid_argument("basis: m must be nonnegative");
}

void GalerkinBasis::check(int n, double x, double t) const
{
    if (n < 0 || n > m_) throw std::out_of_range("basis: mode index " + std::to_string(n) + " out of range");
    const double st = s_(t);
    if (!(x >= -1e-14 * st) || x > st * (1.0 + 1e-14))
        throw std::domain_error("basis: x outside [0, s(t)]");
}

double GalerkinBasis::mu(int n) const
{
    if (n < 0 || n > m_) throw std::out_of_range("basis: mode index " + std::to_string(n) + " out of range");
    return std::numbers::pi * (n + 0.5);
}

double GalerkinBasis::lambda(int n, double t) const { return mu(n) / s_(t); }

double GalerkinBasis::phi(int n, double x, double t) const
{
    check(n, x, t);
    const double st = s_(t);
    return std::sqrt(2.0 / st) * std::cos(mu(n) * x / st);
}

double GalerkinBasis::phi_x(int n, double x, double t) const
{
    check(n, x, t);
    const double st = s_(t);
    const double l = mu(n) / st;
    return -std::sqrt(2.0 / st) * l * std::sin(l * x);
}

double GalerkinBasis::phi_xx(int n, double x, double t) const
{
    check(n, x, t);
    const double st = s_(t);
    const double l = mu(n) / st;
    return -std::sqrt(2.0 / st) * l * l * std::cos(l * x);
}

double GalerkinBasis::psi(int n, double x, double t) const
{
    check(n, x, t);
    const double st = s_(t);
    const double y = x / st, mn = mu(n);
    return std::sqrt(2.0 / st) * (-0.5 * std::cos(mn * y) + mn * y * std::sin(mn * y));
}

double GalerkinBasis::phi_t(int n, double x, double t) const
{
    const double sd = s_.derivative(t);
    if (sd == 0.0) {
        check(n, x, t);
        return 0.0;
    }
    return sd / s_(t) * psi(n, x, t);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> GalerkinBasis::gram_and_stiffness(double t) const
{
    using ld = long double;
    const int M = size();
    const ld st = s_(t);
    const auto& g = gauss_legendre<ld>(q_);
    // Work in y = x/s; phi_n phi_k dx = 2 cos cos dy, phi_x phi_x dx = 2 lam_n lam_k sin sin dy.
    // Extended precision keeps the stiffness off-diagonals at rounding level for large lambda.
    Eigen::Matrix<ld, Eigen::Dynamic, Eigen::Dynamic> cc(q_, M), ss(q_, M);
    const ld pi = std::numbers::pi_v<ld>;
    for (int i = 0; i < q_; ++i) {
        const ld y = 0.5L * (g.nodes[i] + 1.0L);
        const ld w = std::sqrt(g.weights[i]);  // split weight, both factors carry sqrt(w/2)*sqrt(2)
        for (int n = 0; n < M; ++n) {
            const ld a = pi * (n + 0.5L) * y;
            cc(i, n) = w * std::cos(a);
            ss(i, n) = w * std::sin(a);
        }
    }
    const Eigen::Matrix<ld, Eigen::Dynamic, Eigen::Dynamic> G = cc.transpose() * cc;
    Eigen::Matrix<ld, Eigen::Dynamic, Eigen::Dynamic> K = ss.transpose() * ss;
    for (int n = 0; n < M; ++n)
        for (int k = 0; k < M; ++k) K(n, k) *= (pi * (n + 0.5L) / st) * (pi * (k + 0.5L) / st);
    return {G.cast<double>(), K.cast<double>()};
}

double GalerkinBasis::expand(const Eigen::VectorXd& c, double x, double t) const
{
    check(0, x, t);
    const double st = s_(t);
    double v = 0.0;
    for (int n = 0; n < size(); ++n) v += c[n] * std::cos(mu(n) * x / st);
    return std::sqrt(2.0 / st) * v;
}

double GalerkinBasis::expand_x(const Eigen::VectorXd& c, double x, double t) const
{
    check(0, x, t);
    const double st = s_(t);
    double v = 0.0;
    for (int n = 0; n < size(); ++n) {
        const double l = mu(n) / st;
        v -= c[n] * l * std::sin(l * x);
    }
    return std::sqrt(2.0 / st) * v;
}

} // namespace fracmove
