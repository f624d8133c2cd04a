#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace fracmove {

/// Order alpha in (0,1) with the Gamma values used throughout.
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha);

    double alpha() const { return alpha_; }
    double gamma_alpha() const { return g_a_; }          ///< Gamma(alpha)
    double gamma_one_minus() const { return g_1ma_; }    ///< Gamma(1-alpha)
    double gamma_two_minus() const { return g_2ma_; }    ///< Gamma(2-alpha)
    /// 1/(Gamma(alpha) Gamma(1-alpha)) = sin(pi alpha)/pi
    double c_alpha() const { return 1.0 / (g_a_ * g_1ma_); }

private:
    double alpha_, g_a_, g_1ma_, g_2ma_;
};

/// Graded nodes t_j = T (j/N)^r, j = 0..N.
class TimeGrid {
public:
    TimeGrid(double T, int N, double r = 1.0);
    /// Grading max(1, (2-alpha)/alpha), matched to t^alpha behaviour at 0.
    static TimeGrid graded(double T, int N, const FractionalOrder& order);

    double T() const { return T_; }
    int N() const { return N_; }
    double grading() const { return r_; }
    int size() const { return N_ + 1; }
    double operator[](int j) const { return t_[j]; }
    const std::vector<double>& nodes() const { return t_; }

private:
    double T_;
    int N_;
    double r_;
    std::vector<double> t_;
};

/// Samples of a scalar function on a grid. With singular_weight set the
/// represented function is t^(alpha-1) * values(t).
struct SampledPath {
    TimeGrid grid;
    Eigen::VectorXd values;
    bool singular_weight = false;

    static SampledPath sample(const TimeGrid& g, const std::function<double(double)>& f);
};

/// Moments of sigma^e on [a, b], 0 <= a < b, e > -1:
/// j0 = int sigma^e, ja = int sigma^e (sigma - a), jb = int sigma^e (b - sigma).
struct PowerMoments {
    double j0, ja, jb;
};
PowerMoments power_moments(double a, double b, double e);

/// Linear-interpolation weights of int_lo^hi (t - tau)^(mu-1) f(tau) dtau,
/// for f linear on [lo, hi] and lo < hi <= t: returns the weights of f(lo), f(hi).
std::pair<double, double> kernel_weights(double t, double lo, double hi, double mu);

/// int_p^t (t - tau)^(alpha-1) (tau - p)^(-alpha) dtau; equals pi/sin(pi alpha).
double beta_kernel_integral(const FractionalOrder& order, double p, double t);

/// I^mu f at every node t_j of the path grid, integrating from t0.
/// Nodes with t_j <= t0 get 0. The sampled data is interpolated linearly.
Eigen::VectorXd rl_integral(const FractionalOrder& order, const SampledPath& f, double mu,
                            double t0 = 0.0);

/// L1 Caputo derivative at every node; node 0 gets 0.
Eigen::VectorXd caputo_derivative(const FractionalOrder& order, const SampledPath& f);

/// A nondecreasing curve x = s(t) with the max-convention inverse.
class DomainCurve {
public:
    virtual ~DomainCurve() = default;
    virtual double operator()(double t) const = 0;
    virtual double inverse(double x) const = 0;
};

using SpaceTimeField = std::function<double(double x, double t)>;

/// I_s^mu w(x, t): Riemann-Liouville integral in t from s^{-1}(x).
double moving_integral(const FractionalOrder& order, const DomainCurve& s, const SpaceTimeField& w,
                       double mu, double x, double t);

/// D_s^alpha u(x, t) in Marchaud form, so only values of u are needed.
double moving_caputo(const FractionalOrder& order, const DomainCurve& s, const SpaceTimeField& u,
                     double x, double t);

/// E_alpha(z) for alpha in (0, 1] and real z.
double mittag_leffler(double alpha, double z);
double mittag_leffler(const FractionalOrder& order, double z);

} // namespace fracmove
