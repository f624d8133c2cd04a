#include "fracmove/basis.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fracmove;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("eigenvalues")
{
    CHECK(GalerkinBasis(2, Boundary::constant(2.0)).lambda(0, 0.3) == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK(GalerkinBasis(2, Boundary::constant(1.0)).lambda(1, 0.3) == doctest::Approx(4.7123890).epsilon(1e-8));
    CHECK(GalerkinBasis(2, Boundary::affine(1.0, 1.0)).lambda(0, 1.0) == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK_THROWS_AS(GalerkinBasis(2, Boundary::constant(1.0)).lambda(3, 0.0), std::out_of_range);
}

TEST_CASE("boundary values of the modes")
{
    const GalerkinBasis b(8, Boundary::affine(1.0, 1.0));
    for (int n = 0; n <= 8; ++n)
        for (double t : {0.0, 0.4, 1.0}) {
            CHECK(std::abs(b.phi(n, b.boundary()(t), t)) < 1e-14);
            CHECK(b.phi_x(n, 0.0, t) == 0.0);
        }
    CHECK(GalerkinBasis(0, Boundary::constant(2.0)).phi(0, 0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(b.phi(0, 2.5, 0.2), std::domain_error);
    CHECK_THROWS_AS(b.phi(0, -0.1, 0.2), std::domain_error);
}

TEST_CASE("Gram and stiffness matrices")
{
    for (int m : {0, 4, 8, 16})
        for (const Boundary& s : {Boundary::constant(1.0), Boundary::affine(1.0, 1.0), Boundary::power(1.0, 1.0, 0.5)})
            for (double t : {0.0, 0.37, 1.0}) {
                const GalerkinBasis b(m, s);
                const auto [G, K] = b.gram_and_stiffness(t);
                CHECK((G - Eigen::MatrixXd::Identity(m + 1, m + 1)).cwiseAbs().maxCoeff() < 1e-12);
                Eigen::MatrixXd off = K;
                for (int n = 0; n <= m; ++n) {
                    CHECK(K(n, n) == doctest::Approx(std::pow(b.lambda(n, t), 2)).epsilon(1e-12));
                    off(n, n) = 0.0;
                }
                CHECK(off.cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, K.maxCoeff()));
            }
    const auto [G2, K2] = GalerkinBasis(3, Boundary::constant(2.0)).gram_and_stiffness(0.0);
    CHECK(K2(0, 0) == doctest::Approx(0.6168503).epsilon(1e-7));
}

TEST_CASE("eigen-relation and time derivative")
{
    const GalerkinBasis b(8, Boundary::affine(1.0, 1.0));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double t = U(rng), x = U(rng) * b.boundary()(t);
        const int n = int(U(rng) * 9) % 9;
        const double l = b.lambda(n, t);
        CHECK(std::abs(b.phi_xx(n, x, t) + l * l * b.phi(n, x, t)) < 1e-10 * std::max(1.0, l * l));
        // phi_t by central differences at fixed x.
        const double h = 1e-6;
        if (t > h && t < 1 - h && x < b.boundary()(t - h)) {
            const double fd = (b.phi(n, x, t + h) - b.phi(n, x, t - h)) / (2 * h);
            CHECK(b.phi_t(n, x, t) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("rescaling covariance")
{
    const GalerkinBasis b1(5, Boundary::constant(1.0)), b3(5, Boundary::constant(3.0));
    for (int n = 0; n <= 5; ++n)
        for (double y : {0.0, 0.2, 0.75})
            CHECK(b1.phi(n, y, 0.1) == doctest::Approx(b3.phi(n, 3 * y, 0.1) * std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("expansion")
{
    const GalerkinBasis b(3, Boundary::constant(1.0));
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c[2] = 2.0;
    CHECK(b.expand(c, 0.3, 0.0) == doctest::Approx(2.0 * b.phi(2, 0.3, 0.0)));
    CHECK(b.expand_x(c, 0.3, 0.0) == doctest::Approx(2.0 * b.phi_x(2, 0.3, 0.0)));
}
