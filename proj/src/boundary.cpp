#include "fracmove/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracmove {

namespace {

// Fritsch-Carlson slopes for a monotone piecewise cubic.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y)
{
    const size_t n = x.size();
    std::vector<double> d(n, 0.0), del(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) del[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    if (n == 2) {
        d[0] = d[1] = del[0];
        return d;
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0.0) continue;
        const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
        const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
        d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3 * d0)) return 3 * d0;
        return s;
    };
    d[0] = end_slope(x[1] - x[0], x[2] - x[1], del[0], del[1]);
    d[n - 1] = end_slope(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], del[n - 2], del[n - 3]);
    return d;
}

} // namespace

Boundary Boundary::constant(double b, double T)
{
    if (!(b > 0.0)) throw std::invalid_argument("boundary: b must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("boundary: horizon must be positive");
    Boundary s;
    s.family_ = BoundaryFamily::Constant;
    s.b_ = b;
    s.T_ = T;
    return s;
}

Boundary Boundary::affine(double b, double v, double T)
{
    if (!(v >= 0.0)) throw std::invalid_argument("boundary: affine speed must be nonnegative");
    Boundary s = constant(b, T);
    s.family_ = BoundaryFamily::Affine;
    s.v_ = v;
    return s;
}

Boundary Boundary::power(double b, double c, double beta, double T)
{
    if (!(c >= 0.0)) throw std::invalid_argument("boundary: power coefficient must be nonnegative");
    if (!(beta > 0.0)) throw std::invalid_argument("boundary: power exponent must be positive");
    Boundary s = constant(b, T);
    s.family_ = BoundaryFamily::Power;
    s.c_ = c;
    s.beta_ = beta;
    return s;
}

Boundary Boundary::table(std::vector<double> t, std::vector<double> v)
{
    if (t.size() != v.size() || t.size() < 2)
        throw std::invalid_argument("boundary table: need at least two (t, s) rows");
    if (t.front() != 0.0) throw std::invalid_argument("boundary table: first t must be 0");
    for (size_t i = 0; i + 1 < t.size(); ++i) {
        if (!(t[i + 1] > t[i])) throw std::invalid_argument("boundary table: t must increase strictly");
        if (!(v[i + 1] >= v[i])) throw std::invalid_argument("boundary table: s must be nondecreasing");
    }
    Boundary s = constant(v.front(), t.back());
    s.family_ = BoundaryFamily::Table;
    s.dd_ = pchip_slopes(t, v);
    s.tt_ = std::move(t);
    s.ss_ = std::move(v);
    return s;
}

Boundary Boundary::from_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("boundary table: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("boundary table: empty file " + path);
    std::vector<double> t, v;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b))
            throw std::invalid_argument("boundary table: malformed row " + std::to_string(lineno) + " in " + path);
        t.push_back(a);
        v.push_back(b);
    }
    return table(std::move(t), std::move(v));
}

void Boundary::check_time(double t) const
{
    if (!(t >= 0.0) || t > T_ * (1.0 + 1e-12))
        throw std::domain_error("boundary: time " + std::to_string(t) + " outside [0, T]");
}

double Boundary::operator()(double t) const
{
    check_time(t);
    switch (family_) {
    case BoundaryFamily::Constant: return b_;
    case BoundaryFamily::Affine: return b_ + v_ * t;
    case BoundaryFamily::Power: return b_ + c_ * std::pow(t, beta_);
    case BoundaryFamily::Table: {
        t = std::min(t, tt_.back());
        size_t i = std::upper_bound(tt_.begin(), tt_.end(), t) - tt_.begin();
        i = std::clamp<size_t>(i, 1, tt_.size() - 1) - 1;
        const double h = tt_[i + 1] - tt_[i], u = (t - tt_[i]) / h;
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        return h00 * ss_[i] + h10 * h * dd_[i] + h01 * ss_[i + 1] + h11 * h * dd_[i + 1];
    }
    }
    return b_;
}

double Boundary::derivative(double t) const
{
    check_time(t);
    switch (family_) {
    case BoundaryFamily::Constant: return 0.0;
    case BoundaryFamily::Affine: return v_;
    case BoundaryFamily::Power:
        if (t == 0.0) return beta_ < 1.0 ? HUGE_VAL : (beta_ == 1.0 ? c_ : 0.0);
        return c_ * beta_ * std::pow(t, beta_ - 1.0);
    case BoundaryFamily::Table: {
        t = std::min(t, tt_.back());
        size_t i = std::upper_bound(tt_.begin(), tt_.end(), t) - tt_.begin();
        i = std::clamp<size_t>(i, 1, tt_.size() - 1) - 1;
        const double h = tt_[i + 1] - tt_[i], u = (t - tt_[i]) / h;
        const double d00 = 6 * u * (u - 1) / h, d10 = (1 - u) * (1 - 3 * u);
        const double d01 = -d00, d11 = u * (3 * u - 2);
        return std::max(0.0, d00 * ss_[i] + d10 * dd_[i] + d01 * ss_[i + 1] + d11 * dd_[i + 1]);
    }
    }
    return 0.0;
}

double Boundary::regularized_speed(double t, double alpha) const
{
    check_time(t);
    if (family_ == BoundaryFamily::Power) {
        const double e = beta_ - alpha;
        if (t == 0.0) return e > 0 ? 0.0 : (e == 0 ? c_ * beta_ : HUGE_VAL);
        return c_ * beta_ * std::pow(t, e);
    }
    if (t == 0.0) return 0.0;
    return std::pow(t, 1.0 - alpha) * derivative(t);
}

double Boundary::inverse(double x) const
{
    if (!std::isfinite(x)) throw std::domain_error("boundary inverse: non-finite x");
    if (x <= b_) return 0.0;
    const double sT = (*this)(T_);
    if (x > sT) throw std::domain_error("boundary inverse: x = " + std::to_string(x) + " exceeds s(T)");
    switch (family_) {
    case BoundaryFamily::Constant: return 0.0;
    case BoundaryFamily::Affine: return std::min(T_, (x - b_) / v_);
    case BoundaryFamily::Power: return std::min(T_, std::pow((x - b_) / c_, 1.0 / beta_));
    case BoundaryFamily::Table: break;
    }
    // Largest t with s(t) <= x; plateaus resolve to their right end.
    double lo = 0.0, hi = T_;
    if ((*this)(hi) <= x) return hi;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if ((*this)(mid) <= x) lo = mid;
        else hi = mid;
    }
    return lo;
}

bool Boundary::is_constant() const
{
    switch (family_) {
    case BoundaryFamily::Constant: return true;
    case BoundaryFamily::Affine: return v_ == 0.0;
    case BoundaryFamily::Power: return c_ == 0.0;
    case BoundaryFamily::Table: return ss_.front() == ss_.back();
    }
    return false;
}

Boundary Boundary::with_horizon(double T) const
{
    if (!(T > 0.0)) throw std::invalid_argument("boundary: horizon must be positive");
    if (family_ == BoundaryFamily::Table && T > tt_.back() * (1.0 + 1e-12))
        throw std::invalid_argument("boundary table does not cover the requested horizon");
    Boundary s = *this;
    s.T_ = T;
    return s;
}

std::string Boundary::describe() const
{
    std::ostringstream o;
    o.precision(17);
    switch (family_) {
    case BoundaryFamily::Constant: o << "constant(b=" << b_ << ")"; break;
    case BoundaryFamily::Affine: o << "affine(b=" << b_ << ",v=" << v_ << ")"; break;
    case BoundaryFamily::Power: o << "power(b=" << b_ << ",c=" << c_ << ",beta=" << beta_ << ")"; break;
    case BoundaryFamily::Table: o << "table(rows=" << tt_.size() << ")"; break;
    }
    return o.str();
}

BoundaryReport validate(const Boundary& s, const FractionalOrder& order)
{
    BoundaryReport r;
    const double a = order.alpha();
    const double T = s.horizon();
    auto fail = [&](const std::string& m) {
        r.ok = false;
        r.issues.push_back(m);
    };
    if (!(s.b() > 0.0)) fail("initial position must be positive");
    if (s.family() == BoundaryFamily::Power && s.power_exponent() < a)
        fail("power exponent below alpha: t^(1-alpha) s' is unbounded at 0");

    const int probes = 1000;
    double prev = s(0.0);
    for (int i = 1; i <= probes; ++i) {
        const double t = T * double(i) / probes;
        const double v = s(t);
        if (v < prev - 1e-14 * std::abs(prev)) {
            fail("s decreases near t = " + std::to_string(t));
            break;
        }
        if (s.derivative(t) < 0.0) {
            fail("negative speed near t = " + std::to_string(t));
            break;
        }
        prev = v;
        r.speed_sup = std::max(r.speed_sup, s.regularized_speed(t, a));
    }

    // Cauchy check of t^(1-alpha) s'(t) along t = T 2^-k.
    double last = s.regularized_speed(T, a), diff = 0.0, maxw = std::abs(last);
    bool finite = std::isfinite(last);
    for (int k = 1; k <= 200 && finite; ++k) {
        const double w = s.regularized_speed(std::ldexp(T, -k), a);
        if (!std::isfinite(w)) {
            finite = false;
            break;
        }
        diff = std::abs(w - last);
        last = w;
        maxw = std::max(maxw, std::abs(w));
    }
    r.speed_sup = std::max(r.speed_sup, maxw);
    r.speed_at_zero = last;
    if (!finite || maxw > 1e12 || diff > 1e-3 * (1.0 + maxw))
        fail("t^(1-alpha) s'(t) has no finite limit at t = 0");
    return r;
}

} // namespace fracmove
