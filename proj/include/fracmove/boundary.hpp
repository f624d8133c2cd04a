#pragma once

#include "fracmove/fraccalc.hpp"

#include <string>
#include <vector>

namespace fracmove {

enum class BoundaryFamily { Constant, Affine, Power, Table };

/// Given interface position s(t) on [0, T], nondecreasing, s(0) = b > 0.
class Boundary final : public DomainCurve {
public:
    static Boundary constant(double b, double T = 1.0);
    static Boundary affine(double b, double v, double T = 1.0);
    /// s(t) = b + c t^beta
    static Boundary power(double b, double c, double beta, double T = 1.0);
    /// Monotone cubic through (t_i, s_i); t_0 = 0 and the horizon is t_last.
    static Boundary table(std::vector<double> t, std::vector<double> s);
    /// CSV with header and columns t,s.
    static Boundary from_csv(const std::string& path);

    double operator()(double t) const override;
    double derivative(double t) const;
    /// Rightmost preimage on [0, T]; 0 for x <= b.
    double inverse(double x) const override;
    /// t^(1-alpha) s'(t), with its limit at t = 0.
    double regularized_speed(double t, double alpha) const;

    double b() const { return b_; }
    double horizon() const { return T_; }
    BoundaryFamily family() const { return family_; }
    bool is_constant() const;
    Boundary with_horizon(double T) const;
    std::string describe() const;

    double speed_param() const { return v_; }
    double power_coeff() const { return c_; }
    double power_exponent() const { return beta_; }

private:
    Boundary() = default;
    void check_time(double t) const;

    BoundaryFamily family_ = BoundaryFamily::Constant;
    double b_ = 1.0, T_ = 1.0, v_ = 0.0, c_ = 0.0, beta_ = 1.0;
    std::vector<double> tt_, ss_, dd_;
};

struct BoundaryReport {
    bool ok = true;
    std::vector<std::string> issues;
    double speed_at_zero = 0.0;  ///< estimate of lim t^(1-alpha) s'(t) at 0+
    double speed_sup = 0.0;      ///< sup of t^(1-alpha) s'(t) on a probe grid
};

BoundaryReport validate(const Boundary& s, const FractionalOrder& order);

} // namespace fracmove
