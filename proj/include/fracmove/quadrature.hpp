#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fracmove {

/// Gauss-Legendre rule on [-1, 1].
template <typename Scalar>
struct GaussRule {
    std::vector<Scalar> nodes;
    std::vector<Scalar> weights;
    int size() const { return static_cast<int>(nodes.size()); }
};

/// Nodes by Newton iteration on P_n, started from the Tricomi approximation.
template <typename Scalar>
GaussRule<Scalar> make_gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussRule<Scalar> rule;
    rule.nodes.assign(n, Scalar(0));
    rule.weights.assign(n, Scalar(0));
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
        Scalar dp = 0;
        for (int it = 0; it < 100; ++it) {
            Scalar p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Scalar(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1;
            dp = Scalar(n) * (x * p1 - p0) / (x * x - 1);
            Scalar dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 4 * std::numeric_limits<Scalar>::epsilon()) break;
        }
        {
            Scalar p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / Scalar(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1;
            dp = Scalar(n) * (x * p1 - p0) / (x * x - 1);
        }
        Scalar w = 2 / ((1 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0;
    return rule;
}

/// Cached rule; Scalar = long double serves the matrices that must be exact to rounding.
template <typename Scalar = double>
const GaussRule<Scalar>& gauss_legendre(int n)
{
    static std::mutex mtx;
    static std::map<int, GaussRule<Scalar>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, make_gauss_legendre<Scalar>(n)).first;
    return it->second;
}

/// Integral of f over [a, b] with an n-point rule.
template <typename F>
double gauss_integrate(F&& f, double a, double b, int n = 32)
{
    const auto& g = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < g.size(); ++i)
        s += g.weights[i] * f(c + h * g.nodes[i]);
    return s * h;
}

/// Composite rule with `panels` equal panels.
template <typename F>
double gauss_composite(F&& f, double a, double b, int panels, int n = 16)
{
    double s = 0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        s += gauss_integrate(f, a + p * h, (p + 1 == panels) ? b : a + (p + 1) * h, n);
    return s;
}

struct SingularQuadOptions {
    int nodes = 16;       ///< per panel
    int levels = 10;      ///< geometric panels toward the singular end
};

namespace detail {

/// int_0^1 q(u) du for q carrying a weak algebraic singularity at u = 0.
template <typename F>
double graded_unit(F&& q, const SingularQuadOptions& opt)
{
    double s = 0;
    double hi = 1.0;
    for (int l = 0; l < opt.levels; ++l) {
        double lo = 0.5 * hi;
        s += gauss_integrate(q, lo, hi, opt.nodes);
        hi = lo;
    }
    return s + gauss_integrate(q, 0.0, hi, opt.nodes);
}

/// int_0^L x^e F(x) dx with x = L u^{1/(1+e)}.
template <typename F>
double endpoint_power(F&& f, double L, double e, const SingularQuadOptions& opt)
{
    if (L <= 0) return 0.0;
    if (e == 0.0) return gauss_composite(f, 0.0, L, 2, opt.nodes);
    const double q = 1.0 / (1.0 + e);
    auto g = [&](double u) { return f(L * std::pow(u, q)); };
    return q * std::pow(L, 1.0 + e) * graded_unit(g, opt);
}

} // namespace detail

/// int_a^b (x-a)^le (b-x)^re f(x) dx for le, re > -1 and f smooth.
/// Split at the midpoint; each half is mapped so the endpoint factor disappears.
template <typename F>
double weakly_singular_integral(F&& f, double a, double b, double le, double re,
                                const SingularQuadOptions& opt = {})
{
    if (!(le > -1.0) || !(re > -1.0))
        throw std::domain_error("weakly_singular_integral: exponents must exceed -1");
    if (!(b > a)) {
        if (b == a) return 0.0;
        throw std::domain_error("weakly_singular_integral: empty interval");
    }
    const double m = 0.5 * (a + b);
    const double L = m - a;
    auto left = [&](double d) {
        const double x = a + d;
        return (re == 0.0 ? 1.0 : std::pow(b - x, re)) * f(x);
    };
    auto right = [&](double d) {
        const double x = b - d;
        return (le == 0.0 ? 1.0 : std::pow(x - a, le)) * f(x);
    };
    return detail::endpoint_power(left, L, le, opt) + detail::endpoint_power(right, b - m, re, opt);
}

} // namespace fracmove
