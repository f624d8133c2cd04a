#pragma once

#include "fracmove/solver.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracmove {

struct CheckResult {
    std::string name;
    double measured = 0;
    double bound = 0;
    bool pass = false;
    bool asserted = true;   ///< recorded-only checks never fail a report
    std::string trend;      ///< refinement or ladder behaviour, free text
    std::string params;     ///< tolerance / grid parameters used
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    CheckResult& add(CheckResult c);
    void merge(const VerificationReport& other);
    bool passed() const;
    const CheckResult* find(const std::string& name) const;
    void write_csv(std::ostream& os) const;
    void print(std::ostream& os) const;
};

/// Time factor of a test function; must vanish at T.
struct TestTime {
    std::function<double(double)> psi, dpsi;
};
/// (1 - t/T)^2
TestTime default_test_time(double T);

/// Data entering the weak form: the problem's own v0 and g, or the data the
/// Galerkin system actually sees (projected v0 and mollified g).
enum class WeakData { Exact, Galerkin };

/// |-int int I_s^{1-alpha}[v - v0~] (phi_k psi)_t + int int v_x (phi_k psi)_x - int int g phi_k psi|
/// over Q_{s,T}, with v the Galerkin field of `path`.
double weak_residual(const GalerkinOperators& ops, const CoefficientPath& path, int k, const TestTime& test,
                     WeakData data = WeakData::Exact);

/// Per-node left and right sides of the integrated energy estimate.
struct EnergyProfile {
    std::vector<double> t, lhs, rhs;
    double delta = 0;   ///< delta(eps) tail term
};
EnergyProfile energy_profile(const GalerkinOperators& ops, const CoefficientPath& path);

/// Energy estimate at every node with relative slack, plus the pointwise probe.
VerificationReport energy_inequality_check(const GalerkinOperators& ops, const CoefficientPath& path,
                                           double slack = 5e-2, bool with_probe = true);

/// Pointwise estimate for u = (s - x)(1 + t^2), s = 1 + t, at the given times.
VerificationReport pointwise_probe_check(const FractionalOrder& order, const std::vector<double>& times = {0.25, 0.5, 1.0});

/// Both sides of the pointwise estimate for a field u on the curve s at time t.
std::pair<double, double> pointwise_sides(const FractionalOrder& order, const Boundary& s, const SpaceTimeField& u,
                                          double t);

struct DualityProfile {
    std::vector<double> t, lhs, rhs;
};
DualityProfile duality_profile(const GalerkinOperators& ops, const CoefficientPath& path);
VerificationReport duality_bound_check(const GalerkinOperators& ops, const CoefficientPath& path);

/// Identity checks for one order.
VerificationReport appendix_suite(const FractionalOrder& order, std::uint64_t seed = 7);
/// The suite over alpha in {0.3, 0.5, 0.7}.
VerificationReport appendix_suite_all(std::uint64_t seed = 7);

/// int_0^inf a^(alpha-1)/(1+a) da, split at 1.
double g1_integral(const FractionalOrder& order);

/// Q-functions evaluated by nested weakly singular quadrature.
double q11(const FractionalOrder& order, const Boundary& s, double t1, double t2);
double q12(const FractionalOrder& order, double t1, double t2);
double q21(const FractionalOrder& order, const Boundary& s, double t1, double t2);
double q22(const FractionalOrder& order, double t1, double t2);

VerificationReport q_function_suite(const FractionalOrder& order, const Boundary& s, std::uint64_t seed = 7);

} // namespace fracmove
