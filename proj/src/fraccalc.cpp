#include "fracmove/fraccalc.hpp"

#include "fracmove/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fracmove {

namespace {
constexpr double pi = std::numbers::pi;
}

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("FractionalOrder: alpha must lie in (0,1), got " + std::to_string(alpha));
    g_a_ = std::tgamma(alpha);
    g_1ma_ = std::tgamma(1.0 - alpha);
    g_2ma_ = std::tgamma(2.0 - alpha);
    const double refl = pi / std::sin(pi * alpha);
    if (std::abs(g_a_ * g_1ma_ - refl) > 1e-12 * refl)
        throw std::runtime_error("FractionalOrder: reflection identity violated");
}

TimeGrid::TimeGrid(double T, int N, double r) : T_(T), N_(N), r_(r)
{
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("TimeGrid: T must be positive");
    if (N < 1) throw std::invalid_argument("TimeGrid: N must be at least 1");
    if (!(r >= 1.0) || !std::isfinite(r)) throw std::invalid_argument("TimeGrid: grading must be >= 1");
    t_.resize(N + 1);
    for (int j = 0; j <= N; ++j)
        t_[j] = T * std::pow(double(j) / N, r);
    t_[N] = T;
}

TimeGrid TimeGrid::graded(double T, int N, const FractionalOrder& order)
{
    const double a = order.alpha();
    return TimeGrid(T, N, std::max(1.0, (2.0 - a) / a));
}

SampledPath SampledPath::sample(const TimeGrid& g, const std::function<double(double)>& f)
{
    SampledPath p{g, Eigen::VectorXd(g.size()), false};
    for (int j = 0; j < g.size(); ++j) p.values[j] = f(g[j]);
    return p;
}

namespace {

// Moments on [a, a + h]; h is passed separately so that tiny intervals far
// from 0 keep their width exactly.
PowerMoments moments_from(double a, double h, double e)
{
    PowerMoments m{};
    if (a > 0.0 && h < 0.5 * a) {
        // Far from the singularity: the integrand is analytic on [a, a + h].
        const auto& g = gauss_legendre(8);
        const double hh = 0.5 * h;
        for (int i = 0; i < g.size(); ++i) {
            const double u = hh * (1.0 + g.nodes[i]);
            const double w = g.weights[i] * hh * std::pow(a + u, e);
            m.j0 += w;
            m.ja += w * u;
            m.jb += w * (h - u);
        }
        return m;
    }
    const double b = a + h;
    const double b1 = std::pow(b, e + 1.0), a1 = (a > 0.0) ? std::pow(a, e + 1.0) : 0.0;
    m.j0 = (b1 - a1) / (e + 1.0);
    const double k2 = (b1 * b - a1 * a) / (e + 2.0);
    m.ja = k2 - a * m.j0;
    m.jb = b * m.j0 - k2;
    return m;
}

} // namespace

PowerMoments power_moments(double a, double b, double e)
{
    if (!(b > a) || a < 0.0) throw std::domain_error("power_moments: need 0 <= a < b");
    return moments_from(a, b - a, e);
}

std::pair<double, double> kernel_weights(double t, double lo, double hi, double mu)
{
    if (!(hi > lo) || hi > t) throw std::domain_error("kernel_weights: need lo < hi <= t");
    const double h = hi - lo;
    const PowerMoments m = moments_from(std::max(0.0, t - hi), h, mu - 1.0);
    // tau = t - sigma; hi - tau = sigma - a and tau - lo = b - sigma.
    return {m.ja / h, m.jb / h};
}

double beta_kernel_integral(const FractionalOrder& order, double p, double t)
{
    if (!(p < t)) throw std::domain_error("beta_kernel_integral: need p < t");
    const double a = order.alpha();
    SingularQuadOptions opt;
    opt.nodes = 24;
    opt.levels = 16;
    return weakly_singular_integral([](double) { return 1.0; }, p, t, -a, a - 1.0, opt);
}

namespace {

double interp(const std::vector<double>& t, const Eigen::VectorXd& v, int i, double x)
{
    const double h = t[i + 1] - t[i];
    return v[i] + (v[i + 1] - v[i]) * (x - t[i]) / h;
}

int interval_of(const std::vector<double>& t, double x)
{
    auto it = std::upper_bound(t.begin(), t.end(), x);
    int i = int(it - t.begin()) - 1;
    return std::clamp(i, 0, int(t.size()) - 2);
}

} // namespace

Eigen::VectorXd rl_integral(const FractionalOrder& order, const SampledPath& f, double mu, double t0)
{
    const auto& t = f.grid.nodes();
    const int n = f.grid.size();
    if (f.values.size() != n) throw std::invalid_argument("rl_integral: path size mismatch");
    if (!(mu > 0.0)) throw std::domain_error("rl_integral: mu must be positive");
    if (!(t0 >= 0.0) || t0 >= t.back()) throw std::domain_error("rl_integral: empty integration segment");
    const double gmu = std::tgamma(mu);
    const double a = order.alpha();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    const int i0 = interval_of(t, t0);
    const double f0 = interp(t, f.values, i0, t0);
    for (int j = 1; j < n; ++j) {
        const double tj = t[j];
        if (tj <= t0) continue;
        double acc = 0.0;
        for (int i = i0; i < j; ++i) {
            const double lo = (i == i0) ? t0 : t[i];
            const double hi = t[i + 1];
            if (!(hi > lo)) continue;
            const double flo = (i == i0) ? f0 : f.values[i];
            const double fhi = f.values[i + 1];
            if (!f.singular_weight) {
                auto [wl, wh] = kernel_weights(tj, lo, hi, mu);
                acc += wl * flo + wh * fhi;
            } else {
                // Extra factor tau^(alpha-1): integrate the interval numerically.
                auto lin = [&](double x) {
                    return (flo * (hi - x) + fhi * (x - lo)) / (hi - lo);
                };
                const double le = (lo == 0.0) ? a - 1.0 : 0.0;
                const double re = (hi == tj) ? mu - 1.0 : 0.0;
                auto g = [&](double x) {
                    double v = lin(x);
                    if (le == 0.0) v *= std::pow(x, a - 1.0);
                    if (re == 0.0) v *= std::pow(tj - x, mu - 1.0);
                    return v;
                };
                acc += weakly_singular_integral(g, lo, hi, le, re);
            }
        }
        out[j] = acc / gmu;
    }
    return out;
}

Eigen::VectorXd caputo_derivative(const FractionalOrder& order, const SampledPath& f)
{
    const auto& t = f.grid.nodes();
    const int n = f.grid.size();
    if (n < 2) throw std::invalid_argument("caputo_derivative: need at least 2 nodes");
    if (f.values.size() != n) throw std::invalid_argument("caputo_derivative: path size mismatch");
    if (f.singular_weight) throw std::invalid_argument("caputo_derivative: singular-weight path not supported");
    const double mu = 1.0 - order.alpha();
    Eigen::VectorXd slope(n - 1);
    for (int i = 0; i + 1 < n; ++i) slope[i] = (f.values[i + 1] - f.values[i]) / (t[i + 1] - t[i]);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int j = 1; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < j; ++i) {
            const PowerMoments m = moments_from(t[j] - t[i + 1], t[i + 1] - t[i], mu - 1.0);
            acc += slope[i] * m.j0;
        }
        out[j] = acc / order.gamma_one_minus();
    }
    return out;
}

double moving_integral(const FractionalOrder& order, const DomainCurve& s, const SpaceTimeField& w,
                       double mu, double x, double t)
{
    (void)order;
    if (!(mu > 0.0)) throw std::domain_error("moving_integral: mu must be positive");
    if (!(x >= 0.0) || !(x < s(t))) throw std::domain_error("moving_integral: x outside (0, s(t))");
    const double t0 = s.inverse(x);
    if (!(t0 < t)) return 0.0;
    const double v = weakly_singular_integral([&](double tau) { return w(x, tau); }, t0, t, 0.0, mu - 1.0);
    return v / std::tgamma(mu);
}

double moving_caputo(const FractionalOrder& order, const DomainCurve& s, const SpaceTimeField& u,
                     double x, double t)
{
    if (!(x >= 0.0) || !(x < s(t))) throw std::domain_error("moving_caputo: x outside (0, s(t))");
    const double a = order.alpha();
    const double t0 = s.inverse(x);
    if (!(t0 < t)) return 0.0;
    const double ut = u(x, t);
    const double jump = (ut - u(x, t0)) * std::pow(t - t0, -a);
    auto q = [&](double tau) { return (ut - u(x, tau)) / (t - tau); };
    const double tail = weakly_singular_integral(q, t0, t, 0.0, -a);
    return (jump + a * tail) / order.gamma_one_minus();
}

namespace {

double ml_series(double a, double z)
{
    double sum = 0.0;
    const double lz = std::log(std::abs(z));
    for (int k = 0; k < 2000; ++k) {
        double term;
        if (k == 0) term = 1.0;
        else {
            term = std::exp(k * lz - std::lgamma(a * k + 1.0));
            if (z < 0 && (k % 2)) term = -term;
        }
        sum += term;
        if (k > 2 && std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// E_a(-x) for x >= 1 from its Laplace-type integral representation.
double ml_negative(double a, double x)
{
    const double ca = std::cos(a * pi);
    auto f = [&](double y) {
        const double r = y / x;
        return std::exp(-std::pow(y, 1.0 / a)) / (r * r + 2.0 * r * ca + 1.0);
    };
    const double Y = std::pow(42.0, a);
    double s = 0.0;
    double hi = Y;
    for (int l = 0; l < 48; ++l) {
        const double lo = 0.5 * hi;
        s += gauss_integrate(f, lo, hi, 16);
        hi = lo;
    }
    s += gauss_integrate(f, 0.0, hi, 16);
    return std::sin(a * pi) / (a * pi * x) * s;
}

} // namespace

double mittag_leffler(double alpha, double z)
{
    if (!std::isfinite(z)) throw std::domain_error("mittag_leffler: non-finite argument");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("mittag_leffler: alpha must lie in (0,1]");
    if (z == 0.0) return 1.0;
    if (alpha == 1.0) return std::exp(z);
    if (z >= -1.0) return ml_series(alpha, z);
    return ml_negative(alpha, -z);
}

double mittag_leffler(const FractionalOrder& order, double z)
{
    return mittag_leffler(order.alpha(), z);
}

} // namespace fracmove
