#include "fracmove/boundary.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace fracmove;

TEST_CASE("boundary families evaluate and differentiate")
{
    const Boundary c = Boundary::constant(2.0, 1.0);
    CHECK(c(0.7) == 2.0);
    CHECK(c.derivative(0.7) == 0.0);
    CHECK(c.is_constant());

    const Boundary a = Boundary::affine(1.0, 0.5, 2.0);
    CHECK(a(2.0) == doctest::Approx(2.0));
    CHECK(a.derivative(1.3) == 0.5);
    CHECK_THROWS_AS(a(2.5), std::domain_error);

    const Boundary p = Boundary::power(1.0, 1.0, 0.5, 1.0);
    CHECK(p(0.25) == doctest::Approx(1.5));
    CHECK(p.derivative(0.25) == doctest::Approx(1.0));
    CHECK(std::isinf(p.derivative(0.0)));
}

TEST_CASE("inverse uses the rightmost preimage")
{
    const Boundary a = Boundary::affine(1.0, 1.0, 1.0);
    CHECK(a.inverse(1.5) == doctest::Approx(0.5));
    CHECK(a.inverse(0.7) == 0.0);
    CHECK_THROWS(a.inverse(2.5));

    const Boundary p = Boundary::power(1.0, 2.0, 0.5, 1.0);
    CHECK(p(p.inverse(2.2)) == doctest::Approx(2.2).epsilon(1e-12));

    // Plateau at s = 2 on [0.4, 0.6].
    const Boundary t = Boundary::table({0.0, 0.2, 0.4, 0.6, 0.8, 1.0}, {1.0, 1.5, 2.0, 2.0, 2.5, 3.0});
    CHECK(t.inverse(2.0) == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(t(0.5) == doctest::Approx(2.0));
    for (double x : {1.1, 1.7, 2.3, 2.9}) CHECK(t(t.inverse(x)) == doctest::Approx(x).epsilon(1e-9));
}

TEST_CASE("table interpolation stays monotone")
{
    const Boundary t = Boundary::table({0.0, 0.1, 0.5, 1.0}, {1.0, 1.0, 1.8, 1.9});
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = t(i / 1000.0);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
    CHECK_THROWS(Boundary::table({0.0, 1.0}, {1.0, 0.5}));
    CHECK_THROWS(Boundary::table({0.0}, {1.0}));
}

TEST_CASE("boundary from CSV")
{
    const char* path = "boundary_test_table.csv";
    {
        std::ofstream os(path);
        os << "t,s\n0,1\n0.5,1.25\n1,2\n";
    }
    const Boundary t = Boundary::from_csv(path);
    CHECK(t(0.5) == doctest::Approx(1.25));
    CHECK(t.horizon() == 1.0);
    std::remove(path);
    CHECK_THROWS(Boundary::from_csv("no_such_boundary.csv"));
}

TEST_CASE("speed condition validation")
{
    const FractionalOrder o(0.5);
    CHECK(validate(Boundary::constant(1.0), o).ok);
    const BoundaryReport r = validate(Boundary::power(1.0, 1.0, 0.5), o);
    CHECK(r.ok);
    CHECK(r.speed_at_zero == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(Boundary::power(1.0, 1.0, 0.5).regularized_speed(0.0, 0.5) == doctest::Approx(0.5));
    CHECK_FALSE(validate(Boundary::power(1.0, 1.0, 0.3), o).ok);
    CHECK(validate(Boundary::affine(1.0, 2.0), o).ok);
}
