#include "fracmove/assembly.hpp"

#include "fracmove/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracmove {

namespace {

double sinc(double x)
{
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// int_0^1 y sin(theta y) dy
double jfun(double x)
{
    if (std::abs(x) < 0.05) {
        const double x2 = x * x;
        return x * (1.0 / 3.0 - x2 * (1.0 / 30.0 - x2 * (1.0 / 840.0 - x2 / 45360.0)));
    }
    return (std::sin(x) - x * std::cos(x)) / (x * x);
}

void check_pair(const GalerkinBasis& basis, double tau, double t)
{
    if (!(tau >= 0.0)) throw std::domain_error("assembly: tau must be nonnegative");
    if (tau > t) throw std::domain_error("assembly: need tau <= t");
    (void)basis.boundary()(t);
}

} // namespace

Eigen::MatrixXd cross_gram(const GalerkinBasis& basis, double tau, double t)
{
    check_pair(basis, tau, t);
    const Boundary& s = basis.boundary();
    const double r = s(tau) / s(t), sr = std::sqrt(r);
    const int M = basis.size();
    Eigen::MatrixXd C(M, M);
    for (int n = 0; n < M; ++n)
        for (int k = 0; k < M; ++k) {
            const double mn = basis.mu(n), mk = basis.mu(k) * r;
            C(n, k) = sr * (sinc(mn - mk) + sinc(mn + mk));
        }
    return C;
}

Eigen::MatrixXd b_matrix(const GalerkinBasis& basis, double tau, double t)
{
    Eigen::MatrixXd B = cross_gram(basis, tau, t);
    B.diagonal().array() -= 1.0;
    return B;
}

Eigen::MatrixXd psi_matrix(const GalerkinBasis& basis, double tau, double t)
{
    check_pair(basis, tau, t);
    const Boundary& s = basis.boundary();
    const double r = s(tau) / s(t), sr = std::sqrt(r);
    const int M = basis.size();
    Eigen::MatrixXd P(M, M);
    for (int n = 0; n < M; ++n)
        for (int k = 0; k < M; ++k) {
            const double mn = basis.mu(n), nu = basis.mu(k) * r;
            const double tp = mn + nu, tm = mn - nu;
            P(n, k) = sr * (-0.5 * (sinc(tm) + sinc(tp)) + mn * (jfun(tp) + jfun(tm)));
        }
    return P;
}

Eigen::MatrixXd dhat_matrix(int m)
{
    if (m < 0) throw std::invalid_argument("dhat_matrix: m must be nonnegative");
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (int n = 0; n <= m; ++n)
        for (int k = 0; k <= m; ++k) {
            if (n == k) continue;
            const double sign = ((n + k) % 2 == 0) ? 1.0 : -1.0;
            D(n, k) = -sign * (2.0 * n + 1.0) * (2.0 * k + 1.0) / (2.0 * (n + k + 1.0) * (n - k));
        }
    return D;
}

Eigen::MatrixXd dhat_matrix(const GalerkinBasis& basis, double tau)
{
    (void)basis.boundary()(tau);
    return dhat_matrix(basis.m());
}

Eigen::MatrixXd dtilde_matrix_rate(const GalerkinBasis& basis, double tau, double t, double rate)
{
    if (rate == 0.0) {
        check_pair(basis, tau, t);
        return Eigen::MatrixXd::Zero(basis.size(), basis.size());
    }
    return rate * (psi_matrix(basis, tau, t) - dhat_matrix(basis.m()));
}

Eigen::MatrixXd dtilde_matrix(const GalerkinBasis& basis, double tau, double t)
{
    const Boundary& s = basis.boundary();
    return dtilde_matrix_rate(basis, tau, t, s.derivative(tau) / s(tau));
}

Eigen::MatrixXd d_matrix(const GalerkinBasis& basis, double tau, double t)
{
    const Boundary& s = basis.boundary();
    const double rate = s.derivative(tau) / s(tau);
    if (rate == 0.0) {
        check_pair(basis, tau, t);
        return Eigen::MatrixXd::Zero(basis.size(), basis.size());
    }
    return rate * psi_matrix(basis, tau, t);
}

Eigen::MatrixXd e_matrix(const GalerkinBasis& basis, const FractionalOrder& order, double t)
{
    const int M = basis.size();
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(M, M);
    for (int k = 0; k < M; ++k) {
        const double l = basis.lambda(k, t);
        E(k, k) = order.gamma_one_minus() * l * l;
    }
    return E;
}

Eigen::MatrixXd e_matrix_derivative(const GalerkinBasis& basis, const FractionalOrder& order, double t)
{
    const Boundary& s = basis.boundary();
    const double st = s(t), sd = s.derivative(t);
    const int M = basis.size();
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(M, M);
    for (int k = 0; k < M; ++k) {
        const double mk = basis.mu(k);
        E(k, k) = -2.0 * order.gamma_one_minus() * mk * mk * sd / (st * st * st);
    }
    return E;
}

namespace {

constexpr int kMollPanels = 8;
constexpr int kMollNodes = 16;

double bump(double u)
{
    if (!(std::abs(u) < 1.0)) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

double bump_mass()
{
    static const double z = gauss_composite(bump, -1.0, 1.0, kMollPanels, kMollNodes);
    return z;
}

} // namespace

SpaceTimeField mollify_forcing(const SpaceTimeField& g, const Boundary& s, double eps)
{
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("mollify_forcing: eps must be positive");
    const double T = s.horizon();
    const double z = bump_mass();
    return [g, s, eps, T, z](double x, double t) {
        // Near t = 0 and t = T the bump is renormalized over [0, T]; outside the
        // lateral boundary g is extended by zero.
        const double lo0 = std::max(t - eps, 0.0), hi0 = std::min(t + eps, T);
        if (x > s(T) || !(hi0 > lo0)) return 0.0;
        auto kernel = [&](double tau) { return bump((t - tau) / eps); };
        const double mass = (lo0 > t - eps || hi0 < t + eps) ? gauss_composite(kernel, lo0, hi0, kMollPanels, kMollNodes)
                                                            : eps * z;
        const double lo = (x > s.b()) ? std::max(lo0, s.inverse(x)) : lo0;
        if (!(hi0 > lo)) return 0.0;
        auto integrand = [&](double tau) { return kernel(tau) * g(x, tau); };
        return gauss_composite(integrand, lo, hi0, kMollPanels, kMollNodes) / mass;
    };
}

std::vector<double> mollifier_breaks(const Boundary& s, double eps, double t)
{
    return {s.b(), s(std::max(t - eps, 0.0))};
}

Eigen::VectorXd forcing_projection(const GalerkinBasis& basis, const FractionalOrder& order,
                                   const SpaceTimeField& g, double t, const std::vector<double>& breaks)
{
    const Boundary& s = basis.boundary();
    const double st = s(t);
    std::vector<double> pts{0.0};
    for (double x : breaks)
        if (x > 0.0 && x < st) pts.push_back(x);
    pts.push_back(st);
    std::sort(pts.begin(), pts.end());
    const auto& rule = gauss_legendre(basis.quadrature_nodes());
    const int M = basis.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(M);
    for (size_t p = 0; p + 1 < pts.size(); ++p) {
        const double a = pts[p], h = pts[p + 1] - a;
        if (!(h > 1e-14 * st)) continue;
        for (int i = 0; i < rule.size(); ++i) {
            const double x = a + 0.5 * h * (rule.nodes[i] + 1.0);
            const double w = 0.5 * h * rule.weights[i] * g(x, t);
            if (w == 0.0) continue;
            for (int k = 0; k < M; ++k) out[k] += w * std::sqrt(2.0 / st) * std::cos(basis.mu(k) * x / st);
        }
    }
    return order.gamma_one_minus() * out;
}

Eigen::VectorXd project_initial(const GalerkinBasis& basis, const std::function<double(double)>& v0)
{
    const double b = basis.boundary().b();
    const auto& rule = gauss_legendre(basis.quadrature_nodes());
    const int M = basis.size();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(M);
    for (int i = 0; i < rule.size(); ++i) {
        const double x = 0.5 * b * (rule.nodes[i] + 1.0);
        const double w = 0.5 * b * rule.weights[i] * v0(x);
        for (int k = 0; k < M; ++k) out[k] += w * std::sqrt(2.0 / b) * std::cos(basis.mu(k) * x / b);
    }
    return out;
}

Cutoff default_cutoff(double b)
{
    if (!(b > 0.0)) throw std::invalid_argument("cutoff: b must be positive");
    // eta(x) = x exp(1 - 1/(1 - y^2)), y = x/b
    auto e = [b](double x) {
        const double y = x / b;
        if (!(y < 1.0)) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - y * y));
    };
    auto q1 = [b](double x) {  // d/dx of the exponent
        const double y = x / b, d = 1.0 - y * y;
        return -2.0 * y / (d * d) / b;
    };
    auto q2 = [b](double x) {
        const double y = x / b, d = 1.0 - y * y;
        return (-2.0 / (d * d) - 8.0 * y * y / (d * d * d)) / (b * b);
    };
    Cutoff c;
    c.eta = [e](double x) { return x * e(x); };
    c.eta_x = [e, q1](double x) {
        const double v = e(x);
        return v == 0.0 ? 0.0 : v * (1.0 + x * q1(x));
    };
    c.eta_xx = [e, q1, q2](double x) {
        const double v = e(x);
        if (v == 0.0) return 0.0;
        const double a = q1(x);
        return v * (2.0 * a + x * (a * a + q2(x)));
    };
    return c;
}

LiftedProblem lift_boundary(const FractionalOrder& order, const Boundary& s, const SpaceTimeField& f,
                            const std::function<double(double)>& h, const std::function<double(double)>& u0,
                            std::optional<Cutoff> cutoff)
{
    const double b = s.b(), T = s.horizon();
    LiftedProblem p;
    p.cutoff = cutoff ? *cutoff : default_cutoff(b);
    if (cutoff) {
        const double dx = 1e-6 * b;
        const double d0 = (p.cutoff.eta(dx) - p.cutoff.eta(0.0)) / dx;
        if (std::abs(d0 - 1.0) > 1e-4) throw std::invalid_argument("lift_boundary: cutoff must have eta'(0) = 1");
        for (int i = 0; i <= 16; ++i) {
            const double x = b + i * (s(T) - b) / 16.0;
            if (p.cutoff.eta(x) != 0.0) throw std::invalid_argument("lift_boundary: cutoff must vanish for x >= b");
        }
    }
    p.h = h ? h : std::function<double(double)>([](double) { return 0.0; });

    // Caputo derivative of h on a fine graded grid.
    const TimeGrid fine = TimeGrid::graded(T, 2048, order);
    SampledPath hp = SampledPath::sample(fine, p.h);
    bool zero = true;
    for (int j = 0; j < fine.size(); ++j) {
        if (!std::isfinite(hp.values[j])) throw std::invalid_argument("lift_boundary: h is not finite");
        if (hp.values[j] != 0.0) zero = false;
        if (j > 0) {
            const double sl = (hp.values[j] - hp.values[j - 1]) / (fine[j] - fine[j - 1]);
            if (!(std::abs(sl) < 1e8)) throw std::invalid_argument("lift_boundary: h is not differentiable");
        }
    }
    if (zero) {
        p.g = f;
        p.v0 = u0;
        p.lifted = false;
        return p;
    }
    Eigen::VectorXd dh = caputo_derivative(order, hp);
    std::vector<double> tn = fine.nodes();
    std::vector<double> dv(dh.data(), dh.data() + dh.size());
    auto dah = [tn, dv](double t) {
        auto it = std::upper_bound(tn.begin(), tn.end(), t);
        size_t i = std::clamp<size_t>(it - tn.begin(), 1, tn.size() - 1) - 1;
        const double w = (t - tn[i]) / (tn[i + 1] - tn[i]);
        return (1.0 - w) * dv[i] + w * dv[i + 1];
    };
    const Cutoff c = p.cutoff;
    const auto hh = p.h;
    p.g = [f, c, hh, dah](double x, double t) { return f(x, t) - hh(t) * c.eta_xx(x) + c.eta(x) * dah(t); };
    const double h0 = hh(0.0);
    p.v0 = [u0, c, h0](double x) { return u0(x) + h0 * c.eta(x); };
    p.lifted = true;
    return p;
}

GalerkinOperators make_operators(const FractionalOrder& order, const GalerkinBasis& basis, const TimeGrid& grid,
                                 LiftedProblem problem, double eps)
{
    if (grid.T() > basis.boundary().horizon() * (1.0 + 1e-12))
        throw std::invalid_argument("make_operators: grid extends past the boundary horizon");
    if (!(eps > 0.0)) eps = 2.0 * grid[1];
    SpaceTimeField moll = mollify_forcing(problem.g, basis.boundary(), eps);
    Eigen::VectorXd c0 = project_initial(basis, problem.v0);
    return GalerkinOperators{order, basis, grid, eps, std::move(problem), std::move(moll), std::move(c0)};
}

} // namespace fracmove
