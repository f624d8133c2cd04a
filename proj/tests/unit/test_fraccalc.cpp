#include "fracmove/boundary.hpp"
#include "fracmove/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fracmove;

namespace {

// int_0^1 (1-u)^(a-1) u^(-a) du with both endpoint factors removed by substitution.
double beta_oracle(double a)
{
    const auto& g = gauss_legendre(64);
    double s = 0.0;
    const double vmax = std::pow(0.5, 1.0 - a), wmax = std::pow(0.5, a);
    for (int i = 0; i < g.size(); ++i) {
        const double v = 0.5 * vmax * (g.nodes[i] + 1.0);
        const double u = std::pow(v, 1.0 / (1.0 - a));
        s += 0.5 * vmax * g.weights[i] * std::pow(1.0 - u, a - 1.0) / (1.0 - a);
        const double w = 0.5 * wmax * (g.nodes[i] + 1.0);
        const double u2 = 1.0 - std::pow(w, 1.0 / a);
        s += 0.5 * wmax * g.weights[i] * std::pow(u2, -a) / a;
    }
    return s;
}

} // namespace

TEST_CASE("fractional order rejects values outside (0,1)")
{
    CHECK_THROWS_AS(FractionalOrder(0.0), std::domain_error);
    CHECK_THROWS_AS(FractionalOrder(1.0), std::domain_error);
    CHECK_THROWS_AS(FractionalOrder(-0.2), std::domain_error);
    const FractionalOrder o(0.5);
    CHECK(o.gamma_one_minus() == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
    CHECK(o.c_alpha() == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    CHECK(o.gamma_two_minus() == doctest::Approx(0.5 * std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("time grid grading and validation")
{
    const TimeGrid g(2.0, 4, 2.0);
    CHECK(g[0] == 0.0);
    CHECK(g[2] == doctest::Approx(0.5));
    CHECK(g[4] == doctest::Approx(2.0));
    CHECK_THROWS(TimeGrid(0.0, 4));
    CHECK_THROWS(TimeGrid(1.0, 0));
    CHECK_THROWS(TimeGrid(1.0, 4, 0.5));
    CHECK(TimeGrid::graded(1.0, 8, FractionalOrder(0.5)).grading() == doctest::Approx(3.0));
    CHECK(TimeGrid::graded(1.0, 8, FractionalOrder(0.9)).grading() == doctest::Approx(1.1 / 0.9));
}

TEST_CASE("power moments: closed form and short-interval branch agree")
{
    for (double e : {-0.7, -0.3, 0.4}) {
        const PowerMoments a = power_moments(0.2, 0.25, e);   // Gauss branch
        const double j0 = (std::pow(0.25, e + 1) - std::pow(0.2, e + 1)) / (e + 1);
        CHECK(a.j0 == doctest::Approx(j0).epsilon(1e-13));
        CHECK(a.ja + a.jb == doctest::Approx(0.05 * j0).epsilon(1e-12));
    }
    CHECK_THROWS(power_moments(0.3, 0.2, 0.0));
}

TEST_CASE("beta kernel integral")
{
    const double pi = std::numbers::pi;
    CHECK(beta_kernel_integral(FractionalOrder(0.5), 0.0, 1.0) == doctest::Approx(pi).epsilon(1e-12));
    CHECK(beta_kernel_integral(FractionalOrder(0.5), 0.3, 0.9) == doctest::Approx(pi).epsilon(1e-12));
    const double v = beta_kernel_integral(FractionalOrder(0.3), 0.0, 2.0);
    CHECK(v == doctest::Approx(beta_oracle(0.3)).epsilon(1e-10));
    CHECK(v == doctest::Approx(3.8832220).epsilon(1e-7));
    CHECK_THROWS(beta_kernel_integral(FractionalOrder(0.3), 1.0, 1.0));
}

TEST_CASE("Riemann-Liouville integral")
{
    const FractionalOrder o(0.5);
    const TimeGrid g(1.0, 256, 2.0);
    const auto one = rl_integral(o, SampledPath::sample(g, [](double) { return 1.0; }), 0.5);
    CHECK(one[g.N()] == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK(one[g.N()] == doctest::Approx(1.1283792).epsilon(1e-7));
    const auto lin = rl_integral(o, SampledPath::sample(g, [](double t) { return t; }), 0.5);
    CHECK(lin[g.N()] == doctest::Approx(1.0 / std::tgamma(2.5)).epsilon(1e-12));
    CHECK(lin[g.N()] == doctest::Approx(0.7522528).epsilon(1e-7));

    // Semigroup: I^1/2 I^1/2 1 = t.
    const auto twice = rl_integral(o, SampledPath{g, one, false}, 0.5);
    CHECK(twice[g.N()] == doctest::Approx(1.0).epsilon(1e-4));

    // Lower limit: nodes at or before t0 are zero.
    const auto from = rl_integral(o, SampledPath::sample(g, [](double) { return 1.0; }), 0.5, 0.25);
    CHECK(from[0] == 0.0);
    CHECK(from[g.N()] == doctest::Approx(std::sqrt(0.75) / std::tgamma(1.5)).epsilon(1e-10));
    CHECK_THROWS(rl_integral(o, SampledPath::sample(g, [](double) { return 1.0; }), 0.5, 1.0));
}

TEST_CASE("Riemann-Liouville integral is linear")
{
    const FractionalOrder o(0.3);
    const TimeGrid g(1.0, 64, 2.0);
    const auto f = SampledPath::sample(g, [](double t) { return std::sin(3 * t); });
    const auto h = SampledPath::sample(g, [](double t) { return t * t - 1; });
    SampledPath sum{g, 2.0 * f.values - 3.0 * h.values, false};
    const Eigen::VectorXd lhs = rl_integral(o, sum, 0.7);
    const Eigen::VectorXd rhs = 2.0 * rl_integral(o, f, 0.7) - 3.0 * rl_integral(o, h, 0.7);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Caputo derivative")
{
    const FractionalOrder o(0.5);
    const TimeGrid g(1.0, 512, 2.0);
    const auto d = caputo_derivative(o, SampledPath::sample(g, [](double t) { return t; }));
    CHECK(d[g.N()] == doctest::Approx(1.1283792).epsilon(1e-7));
    const auto c = caputo_derivative(o, SampledPath::sample(g, [](double) { return 4.2; }));
    CHECK(c.cwiseAbs().maxCoeff() == 0.0);

    const auto sq = SampledPath::sample(g, [](double t) { return t * t; });
    const auto back = rl_integral(o, SampledPath{g, caputo_derivative(o, sq), false}, 0.5);
    CHECK((back - sq.values).cwiseAbs().maxCoeff() < 1e-3);
    CHECK_THROWS(caputo_derivative(o, SampledPath{TimeGrid(1.0, 1), Eigen::VectorXd::Zero(1), false}));
}

TEST_CASE("moving-domain integral and derivative")
{
    const FractionalOrder o(0.5);
    const Boundary s = Boundary::affine(1.0, 1.0, 1.0);
    auto one = [](double, double) { return 1.0; };
    const double oracle = std::sqrt(0.5) / std::tgamma(1.5);
    CHECK(moving_integral(o, s, one, 0.5, 1.5, 1.0) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(moving_integral(o, s, one, 0.5, 1.5, 1.0) == doctest::Approx(0.7978846).epsilon(1e-7));
    CHECK(moving_integral(o, s, [](double, double) { return 0.0; }, 0.5, 1.5, 1.0) == 0.0);
    // x <= b: plain integral from 0.
    CHECK(moving_integral(o, s, one, 0.5, 0.5, 1.0) == doctest::Approx(1.1283792).epsilon(1e-7));

    CHECK(std::abs(moving_caputo(o, s, [](double x, double) { return x * x; }, 0.5, 0.7)) < 1e-12);
    CHECK(moving_caputo(o, s, [](double, double t) { return t; }, 0.5, 1.0) == doctest::Approx(1.1283792).epsilon(1e-6));
}

TEST_CASE("moving derivative equals time derivative of the moving integral")
{
    const FractionalOrder o(0.5);
    const Boundary s = Boundary::affine(1.0, 1.0, 1.0);
    auto u = [&s](double x, double t) { return (s(t) - x) * t * t; };
    double worst = 0.0;
    for (int i = 0; i < 32; ++i) {
        const double x = 1.95 * (i + 0.5) / 32;
        const double t0 = x <= 1.0 ? 0.0 : s.inverse(x);
        // u - u0~ where u0~ is u(x, 0) for x <= b and 0 beyond.
        auto w = [&](double y, double t) { return u(y, t) - (y <= 1.0 ? u(y, 0.0) : 0.0); };
        for (int j = 0; j < 512; ++j) {
            const double t = t0 + (1.0 - t0) * (j + 0.5) / 512;
            const double h = 1e-4 * std::min(t - t0, 1.0 - t);
            if (h < 1e-7) continue;
            const double dI = (moving_integral(o, s, w, 0.5, x, t + h) - moving_integral(o, s, w, 0.5, x, t - h)) / (2 * h);
            worst = std::max(worst, std::abs(moving_caputo(o, s, u, x, t) - dI));
        }
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("Mittag-Leffler function")
{
    for (double a : {0.2, 0.5, 0.9}) CHECK(mittag_leffler(a, 0.0) == 1.0);
    CHECK(mittag_leffler(1.0, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
    CHECK(mittag_leffler(1.0, -3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
    const double e1 = std::exp(1.0) * std::erfc(1.0);
    CHECK(mittag_leffler(0.5, -1.0) == doctest::Approx(e1).epsilon(1e-10));
    CHECK(mittag_leffler(0.5, -1.0) == doctest::Approx(0.4275836).epsilon(1e-7));
    CHECK(mittag_leffler(0.5, -5.0) == doctest::Approx(std::exp(25.0) * std::erfc(5.0)).epsilon(1e-9));
    CHECK(mittag_leffler(0.5, 0.5) == doctest::Approx(std::exp(0.25) * std::erfc(-0.5)).epsilon(1e-12));
    // Completely monotone on the negative axis.
    double prev = 1.0;
    for (double z = -0.5; z > -200; z *= 1.7) {
        const double v = mittag_leffler(0.7, z);
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
}
