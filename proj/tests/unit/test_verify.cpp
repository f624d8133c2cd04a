#include "fracmove/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace fracmove;

namespace {

GalerkinOperators make(double alpha, const Boundary& s, int m, int N, const SpaceTimeField& f,
                       const std::function<double(double)>& u0)
{
    const FractionalOrder o(alpha);
    return make_operators(o, GalerkinBasis(m, s), TimeGrid(s.horizon(), N, 3.0 / alpha), lift_boundary(o, s, f, nullptr, u0));
}

const SpaceTimeField zero_f = [](double, double) { return 0.0; };

} // namespace

TEST_CASE("report plumbing")
{
    VerificationReport r;
    r.add({"a", 1.0, 2.0, true, true, "", "tol=2"});
    r.add({"b", 5.0, 0.0, false, false, "info", ""});
    CHECK(r.passed());
    VerificationReport q;
    q.add({"c", 3.0, 1.0, false, true, "", ""});
    r.merge(q);
    CHECK_FALSE(r.passed());
    REQUIRE(r.find("c") != nullptr);
    CHECK(r.find("c")->measured == 3.0);
    CHECK(r.find("zz") == nullptr);
    std::ostringstream os;
    r.write_csv(os);
    CHECK(os.str().find("check,measured,bound") == 0);
    CHECK(os.str().find("tol=2") != std::string::npos);
}

TEST_CASE("weak residual")
{
    const GalerkinOperators z = make(0.5, Boundary::affine(1.0, 1.0), 3, 32, zero_f, [](double) { return 0.0; });
    const SolveResult rz = solve(z);
    const TestTime psi = default_test_time(1.0);
    CHECK(weak_residual(z, rz.path, 0, psi) == 0.0);
    CHECK(psi.psi(1.0) == 0.0);
    CHECK(psi.dpsi(0.0) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(weak_residual(z, rz.path, 0, TestTime{[](double) { return 1.0; }, [](double) { return 0.0; }}),
                    std::invalid_argument);

    // Decreases under refinement on a fixed interval.
    double coarse = 0.0, fine = 0.0;
    for (int N : {128, 256}) {
        const GalerkinOperators ops = make(0.5, Boundary::constant(1.0), 8, N, zero_f, [](double) { return 1.0; });
        const SolveResult r = solve(ops);
        double worst = 0.0;
        for (int k = 0; k <= 8; ++k) worst = std::max(worst, weak_residual(ops, r.path, k, psi));
        (N == 128 ? coarse : fine) = worst;
    }
    CHECK(fine < 1e-2);
    CHECK(coarse / fine >= 1.5);
}

TEST_CASE("weak residual with the Galerkin data on a moving boundary")
{
    const TestTime psi = default_test_time(1.0);
    const GalerkinOperators ops = make(0.5, Boundary::affine(1.0, 1.0), 6, 128, zero_f, [](double) { return 1.0; });
    const SolveResult r = solve(ops);
    double exact = 0.0, galerkin = 0.0;
    for (int k = 0; k <= 6; ++k) {
        exact = std::max(exact, weak_residual(ops, r.path, k, psi, WeakData::Exact));
        galerkin = std::max(galerkin, weak_residual(ops, r.path, k, psi, WeakData::Galerkin));
    }
    // The exact-data residual also carries the projection error of u0 = 1.
    CHECK(galerkin < 1e-3);
    CHECK(galerkin < exact);
}

TEST_CASE("energy inequality")
{
    const GalerkinOperators z = make(0.5, Boundary::affine(1.0, 1.0), 3, 32, zero_f, [](double) { return 0.0; });
    const EnergyProfile ez = energy_profile(z, solve(z).path);
    for (size_t j = 0; j < ez.t.size(); ++j) {
        CHECK(ez.lhs[j] == 0.0);
        CHECK(ez.rhs[j] == 0.0);
    }

    const GalerkinOperators ops = make(0.5, Boundary::constant(1.0), 8, 128, zero_f, [](double) { return 1.0; });
    const VerificationReport r = energy_inequality_check(ops, solve(ops).path, 5e-2, false);
    CHECK(r.passed());
    const EnergyProfile e = energy_profile(ops, solve(ops).path);
    CHECK(e.lhs.front() == 0.0);
    for (size_t j = 0; j < e.t.size(); ++j) CHECK(e.lhs[j] <= e.rhs[j] * 1.05);
}

TEST_CASE("pointwise estimate on the analytic probe")
{
    const VerificationReport r = pointwise_probe_check(FractionalOrder(0.5));
    CHECK(r.passed());
    CHECK(r.checks.size() == 3);
    for (const CheckResult& c : r.checks) CHECK(c.measured <= c.bound);
}

TEST_CASE("duality bound")
{
    const GalerkinOperators ops = make(0.5, Boundary::affine(1.0, 1.0), 4, 64, zero_f, [](double) { return 1.0; });
    const SolveResult s = solve(ops);
    const DualityProfile d = duality_profile(ops, s.path);
    CHECK(d.t.size() == d.lhs.size());
    CHECK(duality_bound_check(ops, s.path).passed());
}

TEST_CASE("identity suite for one order")
{
    const VerificationReport r = appendix_suite(FractionalOrder(0.5));
    CHECK(r.passed());
    REQUIRE(r.find("beta_kernel_a0.5") != nullptr);
    CHECK(r.find("beta_kernel_a0.5")->measured < 1e-8);
    const double a = 0.4;
    CHECK(g1_integral(FractionalOrder(a)) == doctest::Approx(std::numbers::pi / std::sin(std::numbers::pi * a)).epsilon(1e-10));
}

TEST_CASE("Q functions")
{
    const FractionalOrder o(0.5);
    const Boundary s = Boundary::affine(1.0, 1.0);
    // Q12 and Q22 do not depend on the boundary; the others vanish for a fixed one.
    CHECK(q11(o, Boundary::constant(1.0), 0.3, 0.6) == 0.0);
    CHECK(q21(o, Boundary::constant(1.0), 0.3, 0.6) == 0.0);
    double prev = INFINITY;
    for (double d : {1e-1, 1e-2, 1e-3}) {
        const double v = std::abs(q22(o, 0.5, 0.5 + d));
        CHECK(v < prev);
        prev = v;
    }
    CHECK(std::isfinite(q11(o, s, 0.0, 0.5)));
    CHECK(std::isfinite(q12(o, 0.2, 0.4)));
    CHECK(q_function_suite(o, s).passed());
}
