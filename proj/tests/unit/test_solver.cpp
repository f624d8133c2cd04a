#include "fracmove/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fracmove;

namespace {

constexpr double pi = std::numbers::pi;

GalerkinOperators make(double alpha, const Boundary& s, int m, int N, const SpaceTimeField& f,
                       const std::function<double(double)>& u0, const std::function<double(double)>& h = nullptr,
                       double eps = 0.0)
{
    const FractionalOrder o(alpha);
    LiftedProblem p = lift_boundary(o, s, f, h, u0);
    return make_operators(o, GalerkinBasis(m, s), TimeGrid(s.horizon(), N, 3.0 / alpha), std::move(p), eps);
}

const SpaceTimeField zero_f = [](double, double) { return 0.0; };

double oracle_error(const GalerkinOperators& ops, const CoefficientPath& p)
{
    const double a = ops.order.alpha();
    double err = 0.0;
    for (int j = 0; j < ops.grid.size(); ++j)
        for (int k = 0; k < ops.basis.size(); ++k) {
            const double l = ops.basis.lambda(k, 0.0);
            const double ref = ops.c0[k] * mittag_leffler(a, -l * l * std::pow(ops.grid[j], a));
            err = std::max(err, std::abs(p.c(k, j) - ref));
        }
    return err / ops.c0.cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("X norm and regularized integration")
{
    const double a = 0.4, T = 2.0;
    const TimeGrid g(T, 64, 2.0);
    CoefficientPath p{g, Eigen::MatrixXd(1, 65), Eigen::MatrixXd::Constant(1, 65, a)};
    for (int j = 0; j <= 64; ++j) p.c(0, j) = std::pow(g[j], a);
    CHECK(xt_norm(p) == doctest::Approx(std::pow(T, a) + a).epsilon(1e-14));

    const Eigen::MatrixXd c = integrate_regularized(g, p.w, Eigen::VectorXd::Zero(1), a);
    CHECK((c - p.c).cwiseAbs().maxCoeff() < 1e-13);

    CoefficientPath q = p;
    q.c *= -2.0;
    q.w *= 3.0;
    CoefficientPath sum{g, p.c + q.c, p.w + q.w};
    CHECK(xt_norm(sum) <= xt_norm(p) + xt_norm(q) + 1e-14);
    CHECK(p.value_at(0.5 * (g[10] + g[11]))[0] == doctest::Approx(0.5 * (p.c(0, 10) + p.c(0, 11))));
}

TEST_CASE("P on a constant path with a fixed interval")
{
    const double a = 0.5;
    const GalerkinOperators ops = make(a, Boundary::constant(1.0), 3, 64, zero_f, [](double x) { return std::cos(pi * x / 2); });
    const int n = ops.grid.size();
    CoefficientPath c{ops.grid, ops.c0.replicate(1, n), Eigen::MatrixXd::Zero(4, n)};
    const CoefficientPath P = apply_P(ops, c);
    const Eigen::MatrixXd E = e_matrix(ops.basis, ops.order, 0.0);
    const double ca = ops.order.c_alpha();
    double err = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = ops.grid[j];
        const Eigen::VectorXd ref = ops.c0 - ca * std::pow(t, a) / a * E * ops.c0;
        err = std::max(err, (P.c.col(j) - ref).cwiseAbs().maxCoeff());
    }
    CHECK(err < 1e-6);

    CoefficientPath z{ops.grid, Eigen::MatrixXd::Zero(4, n), Eigen::MatrixXd::Zero(4, n)};
    const GalerkinOperators zops = make(a, Boundary::constant(1.0), 3, 64, zero_f, [](double) { return 0.0; });
    CHECK(apply_P(zops, z).c.cwiseAbs().maxCoeff() == 0.0);
    CHECK(apply_P(zops, z).w.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS(apply_P(ops, CoefficientPath{ops.grid, Eigen::MatrixXd::Zero(2, n), Eigen::MatrixXd::Zero(2, n)}));
}

TEST_CASE("P preserves the initial value on a moving boundary")
{
    const double a = 0.5;
    const GalerkinOperators ops = make(a, Boundary::affine(1.0, 1.0), 4, 64, [](double x, double t) { return x * t; },
                                       [](double) { return 1.0; });
    const int n = ops.grid.size();
    CoefficientPath c{ops.grid, Eigen::MatrixXd(5, n), Eigen::MatrixXd(5, n)};
    for (int j = 0; j < n; ++j) {
        const double t = ops.grid[j];
        for (int k = 0; k < 5; ++k) {
            c.c(k, j) = ops.c0[k] + (k + 1) * std::pow(t, a);
            c.w(k, j) = (k + 1) * a;
        }
    }
    const CoefficientPath P = apply_P(ops, c);
    CHECK((P.c.col(0) - ops.c0).cwiseAbs().maxCoeff() == 0.0);
    // The leading term near 0 is c_alpha t^alpha/alpha E c0; the others vanish faster.
    const Eigen::MatrixXd E = e_matrix(ops.basis, ops.order, 0.0);
    for (int j = 1; j <= 3; ++j) {
        const double t = ops.grid[j];
        const Eigen::VectorXd lead = ops.order.c_alpha() * std::pow(t, a) / a * E * ops.c0;
        CHECK((ops.c0 - P.c.col(j) - lead).cwiseAbs().maxCoeff() < 1e-2 * lead.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("single mode relaxes like the Mittag-Leffler function")
{
    for (double a : {0.3, 0.7}) {
        const GalerkinOperators ops = make(a, Boundary::constant(1.0), 0, 512, zero_f, [](double) { return 1.0; });
        const SolveResult r = solve(ops);
        CHECK(r.report.converged);
        CHECK(oracle_error(ops, r.path) < 1e-3);
    }
}

TEST_CASE("mixture of three modes on a fixed interval")
{
    const GalerkinOperators ops = make(0.5, Boundary::constant(1.0), 8, 256, zero_f, [](double x) {
        return std::sqrt(2.0) * (std::cos(pi * x / 2) - 0.5 * std::cos(5 * pi * x / 2) + 0.25 * std::cos(13 * pi * x / 2));
    });
    const SolveResult r = solve(ops);
    CHECK(r.report.converged);
    CHECK(oracle_error(ops, r.path) < 1e-3);
    CHECK(r.report.residual_values < 1e-8);
    CHECK(r.report.residual_derivative < 1e-6);

    const SolveResult l1 = l1_direct_solve(ops);
    CHECK(oracle_error(ops, l1.path) < 1e-2);
}

TEST_CASE("zero data gives the zero path in one iteration per window")
{
    const GalerkinOperators ops = make(0.5, Boundary::affine(1.0, 1.0), 4, 64, zero_f, [](double) { return 0.0; });
    const SolveResult r = solve(ops);
    CHECK(r.report.converged);
    CHECK(r.path.c.cwiseAbs().maxCoeff() == 0.0);
    for (const WindowRecord& w : r.report.history) CHECK(w.iterations == 1);
    CHECK(l1_direct_solve(ops).path.c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("steady state stays at its projection")
{
    // u = phi_0 on [0, 1] with f = lambda_0^2 phi_0 is time independent.
    const double l0 = pi / 2;
    const GalerkinOperators ops = make(0.5, Boundary::constant(1.0), 4, 128,
                                       [l0](double x, double) { return l0 * l0 * std::sqrt(2.0) * std::cos(l0 * x); },
                                       [l0](double x) { return std::sqrt(2.0) * std::cos(l0 * x); });
    const SolveResult r = solve(ops);
    CHECK(r.report.converged);
    double dev = 0.0;
    for (int j = 0; j < ops.grid.size(); ++j) dev = std::max(dev, (r.path.c.col(j) - ops.c0).cwiseAbs().maxCoeff());
    CHECK(dev < 1e-3);
}

TEST_CASE("moving boundary smoke test")
{
    const GalerkinOperators ops = make(0.5, Boundary::affine(1.0, 1.0), 4, 128,
                                       [](double x, double t) { return std::sin(x) * std::cos(t); },
                                       [](double) { return 1.0; }, nullptr, 0.25);
    const SolveResult r = solve(ops);
    CHECK(r.report.converged);
    CHECK(r.report.residual_values < 1e-8);
    const auto [rv, rw] = fixed_point_residual(ops, r.path);
    CHECK(rv == doctest::Approx(r.report.residual_values));
    CHECK(rw < 1e-6);
    CHECK(r.report.windows >= 1);
    double covered = 0.0;
    for (const WindowRecord& w : r.report.history)
        if (w.accepted) covered += w.t_end - w.t_start;
    CHECK(covered == doctest::Approx(1.0));

    const SolveResult l1 = l1_direct_solve(ops);
    const double rel = (l1.path.c - r.path.c).cwiseAbs().maxCoeff() / r.path.c.cwiseAbs().maxCoeff();
    CHECK(rel < 1e-2);
}

TEST_CASE("regularized derivative is continuous at the origin")
{
    double prev = INFINITY;
    for (int N : {64, 128, 256}) {
        const GalerkinOperators ops = make(0.5, Boundary::affine(1.0, 1.0), 2, N, zero_f, [](double) { return 1.0; });
        const SolveResult r = solve(ops);
        double jump = 0.0;
        for (int j = 0; j < 10; ++j) jump = std::max(jump, (r.path.w.col(j + 1) - r.path.w.col(j)).cwiseAbs().maxCoeff());
        CHECK(jump < prev);
        prev = jump;
    }
}

TEST_CASE("window contraction ratio shrinks with the window")
{
    const GalerkinOperators ops = make(0.5, Boundary::affine(1.0, 1.0), 8, 256,
                                       [](double x, double t) { return std::sin(x) * std::cos(t); },
                                       [](double) { return 1.0; });
    double prev = INFINITY;
    for (double L : {0.125, 0.0625, 0.03125, 0.015625}) {
        int e = 1;
        while (ops.grid[e] < L) ++e;
        CoefficientPath path{ops.grid, {}, {}};
        const WindowOutcome w = picard_window(ops, path, 0, e);
        CHECK(w.converged);
        CHECK(w.rho < prev);
        prev = w.rho;
    }
    CoefficientPath path{ops.grid, {}, {}};
    CHECK_THROWS(picard_window(ops, path, 3, 2));
}

TEST_CASE("field reconstruction")
{
    const Boundary s = Boundary::constant(1.0);
    const GalerkinOperators ops = make(0.5, s, 3, 16, zero_f, [](double) { return 0.0; });
    const int n = ops.grid.size();
    CoefficientPath e2{ops.grid, Eigen::MatrixXd::Zero(4, n), Eigen::MatrixXd::Zero(4, n)};
    e2.c.row(2).setOnes();
    const auto F = reconstruct_field(ops, e2, {0.0, 0.3, 1.0, 1.5}, {0.0, 0.5, 1.0});
    CHECK(F.size() == 12);
    for (const FieldSample& q : F) {
        if (q.x > 1.0) {
            CHECK_FALSE(q.inside);
            CHECK(std::isnan(q.u));
        } else {
            CHECK(q.inside);
            CHECK(q.u == doctest::Approx(ops.basis.phi(2, q.x, q.t)).epsilon(1e-14));
        }
    }

    const Boundary m = Boundary::affine(1.0, 1.0);
    const GalerkinOperators lop = make(0.5, m, 4, 64, zero_f, [](double) { return 1.0; }, [](double t) { return 1.0 + t; });
    const SolveResult r = solve(lop);
    for (double t : {0.0, 0.5, 1.0}) {
        const double dx = 1e-6;
        const auto pts = reconstruct_field(lop, r.path, {0.0, dx, m(t)}, {t});
        CHECK(-(pts[1].u - pts[0].u) / dx == doctest::Approx(1.0 + t).epsilon(1e-4));
        CHECK(std::abs(pts[2].u) < 1e-12);
    }
}
