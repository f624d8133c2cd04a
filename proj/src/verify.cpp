#include "fracmove/verify.hpp"

#include "fracmove/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fracmove {

CheckResult& VerificationReport::add(CheckResult c)
{
    if (!c.asserted) c.pass = true;
    checks.push_back(std::move(c));
    return checks.back();
}

void VerificationReport::merge(const VerificationReport& other)
{
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

bool VerificationReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass || !c.asserted; });
}

const CheckResult* VerificationReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

} // namespace

void VerificationReport::write_csv(std::ostream& os) const
{
    os << "check,measured,bound,pass,asserted,trend,params\n";
    std::ostringstream num;
    num << std::setprecision(17);
    for (const auto& c : checks) {
        num.str("");
        num << c.measured << ',' << c.bound;
        os << csv_field(c.name) << ',' << num.str() << ',' << (c.pass ? 1 : 0) << ',' << (c.asserted ? 1 : 0) << ','
           << csv_field(c.trend) << ',' << csv_field(c.params) << '\n';
    }
}

void VerificationReport::print(std::ostream& os) const
{
    size_t w = 5;
    for (const auto& c : checks) w = std::max(w, c.name.size());
    os << std::left << std::setw(int(w)) << "check" << "  " << std::setw(14) << "measured" << std::setw(14) << "bound"
       << "status\n";
    for (const auto& c : checks) {
        os << std::left << std::setw(int(w)) << c.name << "  " << std::setw(14) << std::setprecision(6) << c.measured
           << std::setw(14) << c.bound << (c.asserted ? (c.pass ? "PASS" : "FAIL") : "info");
        if (!c.trend.empty()) os << "  " << c.trend;
        os << '\n';
    }
}

TestTime default_test_time(double T)
{
    return {[T](double t) { return (1.0 - t / T) * (1.0 - t / T); }, [T](double t) { return -2.0 / T * (1.0 - t / T); }};
}

namespace {

struct Node {
    double x, w;
};

std::vector<Node> gauss_nodes(double a, double b, int n)
{
    std::vector<Node> out;
    if (!(b > a)) return out;
    const auto& g = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < g.size(); ++i) out.push_back({c + h * g.nodes[i], h * g.weights[i]});
    return out;
}

// x nodes over [0, s(T)], split at b where the memory start changes.
std::vector<Node> domain_nodes(const Boundary& s, double T, int n)
{
    auto out = gauss_nodes(0.0, s.b(), n);
    auto up = gauss_nodes(s.b(), s(T), n);
    out.insert(out.end(), up.begin(), up.end());
    return out;
}

// I^mu weights from 0: row n gives I^mu f(t_n) = sum_j W(n, j) f(t_j).
Eigen::MatrixXd rl_matrix(const std::vector<double>& t, double mu)
{
    const int n = int(t.size());
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    const double g = std::tgamma(mu);
    for (int r = 1; r < n; ++r)
        for (int i = 0; i < r; ++i) {
            auto [a, b] = kernel_weights(t[r], t[i], t[i + 1], mu);
            W(r, i) += a / g;
            W(r, i + 1) += b / g;
        }
    return W;
}

// int over [t0, t_last] of node data that vanishes at t0, trapezoid.
double clipped_trapezoid(const std::vector<double>& t, const std::vector<double>& f, const std::vector<char>& in,
                         double t0)
{
    double acc = 0.0;
    int first = -1;
    for (int j = 0; j < int(t.size()); ++j) {
        if (!in[j]) continue;
        if (first < 0) {
            first = j;
            acc += 0.5 * (t[j] - t0) * f[j];
            continue;
        }
        acc += 0.5 * (t[j] - t[j - 1]) * (f[j] + f[j - 1]);
    }
    return acc;
}

double field_value(const GalerkinBasis& basis, const Eigen::VectorXd& c, double x, double t)
{
    return basis.expand(c, x, t);
}

std::string grid_params(const GalerkinOperators& ops)
{
    std::ostringstream o;
    o << "N=" << ops.grid.N() << " r=" << ops.grid.grading() << " m=" << ops.basis.m() << " T=" << ops.grid.T()
      << " alpha=" << ops.order.alpha();
    return o.str();
}

} // namespace

double weak_residual(const GalerkinOperators& ops, const CoefficientPath& path, int k, const TestTime& test,
                     WeakData data)
{
    const double T = ops.grid.T();
    if (std::abs(test.psi(T)) > 1e-12) throw std::invalid_argument("weak_residual: test function must vanish at T");
    if (k < 0) throw std::out_of_range("weak_residual: negative mode");
    const Boundary& s = ops.boundary();
    const auto& t = ops.grid.nodes();
    const int n = int(t.size());
    const double mu = 1.0 - ops.order.alpha();
    // Test modes beyond the ansatz use a wider basis with the same curve.
    const GalerkinBasis wide(std::max(k, ops.basis.m()), s);
    const GalerkinBasis& B = ops.basis;
    const bool galerkin = data == WeakData::Galerkin;
    const SpaceTimeField& gdata = galerkin ? ops.mollified : ops.problem.g;
    const Eigen::VectorXd c0 = ops.c0;

    Eigen::MatrixXd W = rl_matrix(t, mu);
    std::vector<double> psi(n), dpsi(n);
    for (int j = 0; j < n; ++j) {
        psi[j] = test.psi(t[j]);
        dpsi[j] = test.dpsi(t[j]);
    }

    double term1 = 0.0;
    for (const Node& q : domain_nodes(s, T, 48)) {
        const bool base = q.x <= s.b();
        const double t0 = base ? 0.0 : s.inverse(q.x);
        const double v0 = !base ? 0.0 : galerkin ? B.expand(c0, q.x, 0.0) : ops.problem.v0(q.x);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        std::vector<char> in(n, 0);
        for (int j = 0; j < n; ++j)
            if (t[j] >= t0 && q.x <= s(t[j])) {
                in[j] = 1;
                f[j] = field_value(B, path.c.col(j), q.x, t[j]) - v0;
            }
        Eigen::VectorXd I = (t0 == 0.0) ? Eigen::VectorXd(W * f)
                                        : rl_integral(ops.order, SampledPath{ops.grid, f, false}, mu, t0);
        std::vector<double> g(n, 0.0);
        for (int j = 0; j < n; ++j)
            // I vanishes at t0, where phi_t may be singular.
            if (in[j] && I[j] != 0.0) g[j] = I[j] * (wide.phi_t(k, q.x, t[j]) * psi[j] + wide.phi(k, q.x, t[j]) * dpsi[j]);
        term1 += q.w * clipped_trapezoid(t, g, in, t0);
    }

    std::vector<double> f2(n), f3(n);
    for (int j = 0; j < n; ++j) {
        double a2 = 0.0, a3 = 0.0;
        for (const Node& q : gauss_nodes(0.0, s(t[j]), 64)) {
            a2 += q.w * B.expand_x(path.c.col(j), q.x, t[j]) * wide.phi_x(k, q.x, t[j]);
            a3 += q.w * gdata(q.x, t[j]) * wide.phi(k, q.x, t[j]);
        }
        f2[j] = a2 * psi[j];
        f3[j] = a3 * psi[j];
    }
    const std::vector<char> all(n, 1);
    const double term2 = clipped_trapezoid(t, f2, all, 0.0);
    const double term3 = clipped_trapezoid(t, f3, all, 0.0);
    return std::abs(-term1 + term2 - term3);
}

namespace {

// int_0^t int_0^{s(tau)} g^2, cumulative over the grid, Gauss per interval.
std::vector<double> forcing_energy(const SpaceTimeField& g, const Boundary& s, const std::vector<double>& t)
{
    std::vector<double> out(t.size(), 0.0);
    for (size_t j = 0; j + 1 < t.size(); ++j) {
        double acc = 0.0;
        for (const Node& p : gauss_nodes(t[j], t[j + 1], 4))
            for (const Node& q : gauss_nodes(0.0, s(p.x), 32)) {
                const double v = g(q.x, p.x);
                acc += p.w * q.w * v * v;
            }
        out[j + 1] = out[j] + acc;
    }
    return out;
}

double window_energy(const SpaceTimeField& g, const Boundary& s, double a, double b)
{
    double acc = 0.0;
    const double w = (b - a) / 4.0;
    for (int k = 0; k < 4; ++k)
        for (const Node& p : gauss_nodes(a + k * w, a + (k + 1) * w, 8))
            for (const Node& q : gauss_nodes(0.0, s(p.x), 32)) {
                const double v = g(q.x, p.x);
                acc += p.w * q.w * v * v;
            }
    return acc;
}

} // namespace

EnergyProfile energy_profile(const GalerkinOperators& ops, const CoefficientPath& path)
{
    const Boundary& s = ops.boundary();
    const auto& t = ops.grid.nodes();
    const int n = int(t.size());
    const double alpha = ops.order.alpha(), T = ops.grid.T(), b = s.b();
    const double g1 = ops.order.gamma_one_minus(), g2 = ops.order.gamma_two_minus();
    const GalerkinBasis& B = ops.basis;

    Eigen::VectorXd norm2(n);
    std::vector<double> q(n), r(n), d(n);
    const auto base = gauss_nodes(0.0, b, 64);
    std::vector<double> v_init(base.size());
    for (size_t i = 0; i < base.size(); ++i) v_init[i] = field_value(B, path.c.col(0), base[i].x, 0.0);
    for (int j = 0; j < n; ++j) {
        double a = 0.0, dq = 0.0, dx = 0.0;
        for (size_t i = 0; i < base.size(); ++i) {
            const double v = field_value(B, path.c.col(j), base[i].x, t[j]);
            a += base[i].w * v * v;
            dq += base[i].w * (v - v_init[i]) * (v - v_init[i]);
            const double vx = B.expand_x(path.c.col(j), base[i].x, t[j]);
            dx += base[i].w * vx * vx;
        }
        double rr = 0.0;
        for (const Node& p : gauss_nodes(b, s(t[j]), 32)) {
            const double v = field_value(B, path.c.col(j), p.x, t[j]);
            const double vx = B.expand_x(path.c.col(j), p.x, t[j]);
            a += p.w * v * v;
            dx += p.w * vx * vx;
            const double lag = t[j] - s.inverse(p.x);
            if (lag > 0.0) rr += p.w * std::pow(lag, -alpha) * v * v;
        }
        norm2[j] = a;
        q[j] = dq;
        r[j] = rr;
        d[j] = dx;
    }

    EnergyProfile out;
    out.t = t;
    Eigen::VectorXd A = rl_matrix(t, 1.0 - alpha) * norm2;
    const std::vector<double> ge = forcing_energy(ops.problem.g, s, t);
    double v0n = 0.0;
    for (int k = 0; k < 4; ++k)
        for (const Node& p : gauss_nodes(k * b / 4, (k + 1) * b / 4, 16)) {
            const double v = ops.problem.v0(p.x);
            v0n += p.w * v * v;
        }
    const double sT = s(T);
    double delta = 0.0;
    const int stride = std::max(1, (n - 1) / 256);
    for (int j = 0; j < n - 1; j += stride) {
        const double hi = std::min(T, t[j] + ops.eps);
        if (hi > t[j]) delta = std::max(delta, window_energy(ops.problem.g, s, t[j], hi));
    }
    out.delta = 0.25 * sT * sT * delta;

    double cb = 0.0, cc = 0.0, cd = 0.0;
    for (int j = 0; j < n; ++j) {
        if (j > 0) {
            const double h = t[j] - t[j - 1];
            const PowerMoments m = power_moments(t[j - 1], t[j], -alpha);
            cb += (m.jb * q[j - 1] + m.ja * q[j]) / h;
            cc += 0.5 * h * (r[j - 1] + r[j]);
            cd += 0.5 * h * (d[j - 1] + d[j]);
        }
        out.lhs.push_back(A[j] + (cb + cc) / g1 + cd);
        out.rhs.push_back(0.5 * sT * sT * ge[j] + std::pow(t[j], 1.0 - alpha) * v0n / g2 + out.delta);
    }
    return out;
}

VerificationReport energy_inequality_check(const GalerkinOperators& ops, const CoefficientPath& path, double slack,
                                           bool with_probe)
{
    VerificationReport rep;
    const EnergyProfile e = energy_profile(ops, path);
    double worst = 0.0, excess = -HUGE_VAL;
    bool ok = true;
    for (size_t j = 1; j < e.t.size(); ++j) {
        const double lim = e.rhs[j] * (1.0 + slack) + 1e-14;
        if (e.lhs[j] > lim) ok = false;
        excess = std::max(excess, e.lhs[j] - lim);
        if (e.rhs[j] > 0.0) worst = std::max(worst, e.lhs[j] / e.rhs[j]);
    }
    std::ostringstream tr;
    tr << "max lhs/rhs over nodes; delta=" << e.delta;
    rep.add({"energy_estimate", worst, 1.0 + slack, ok, true, tr.str(), grid_params(ops) + " slack=" + std::to_string(slack)});
    if (with_probe) rep.merge(pointwise_probe_check(ops.order));
    return rep;
}

std::pair<double, double> pointwise_sides(const FractionalOrder& order, const Boundary& s, const SpaceTimeField& u,
                                          double t)
{
    const double alpha = order.alpha(), g1 = order.gamma_one_minus(), b = s.b();
    auto xi = [&](double tau) {
        double a = 0.0;
        for (const Node& q : gauss_nodes(0.0, b, 48)) a += q.w * u(q.x, tau) * u(q.x, tau);
        for (const Node& q : gauss_nodes(b, s(tau), 48)) a += q.w * u(q.x, tau) * u(q.x, tau);
        return a;
    };
    const Boundary flat = Boundary::constant(1.0, s.horizon());
    const double dxi = moving_caputo(order, flat, [&](double, double tau) { return xi(tau); }, 0.0, t);
    double l2 = 0.0, l3 = 0.0;
    for (const Node& q : gauss_nodes(0.0, b, 48)) {
        const double d = u(q.x, t) - u(q.x, 0.0);
        l2 += q.w * d * d;
    }
    for (const Node& q : gauss_nodes(b, s(t), 48)) {
        const double t0 = s.inverse(q.x);
        const double d = u(q.x, t) - u(q.x, t0);
        if (t > t0) l3 += q.w * std::pow(t - t0, -alpha) * d * d;
    }
    const double lhs = dxi + std::pow(t, -alpha) / g1 * l2 + l3 / g1;

    double r1 = 0.0;
    for (const Node& q : gauss_nodes(0.0, b, 32)) r1 += q.w * moving_caputo(order, s, u, q.x, t) * u(q.x, t);
    for (const Node& q : gauss_nodes(b, s(t), 32)) r1 += q.w * moving_caputo(order, s, u, q.x, t) * u(q.x, t);
    const double r2 = weakly_singular_integral(
        [&](double tau) {
            const double w = u(s(tau), tau);
            return w * w * s.derivative(tau);
        },
        0.0, t, 0.0, -alpha);
    return {lhs, 2.0 * r1 + r2 / g1};
}

VerificationReport pointwise_probe_check(const FractionalOrder& order, const std::vector<double>& times)
{
    VerificationReport rep;
    const Boundary s = Boundary::affine(1.0, 1.0, 1.0);
    auto u = [&s](double x, double t) { return (s(t) - x) * (1.0 + t * t); };
    for (double t : times) {
        auto [l, r] = pointwise_sides(order, s, u, t);
        std::ostringstream name, tr;
        name << "pointwise_probe_t" << t;
        tr << "lhs=" << std::setprecision(10) << l << " rhs=" << r << " margin=" << (r - l);
        rep.add({name.str(), l, r, l <= r, true, tr.str(), "u=(s-x)(1+t^2) s=1+t alpha=" + std::to_string(order.alpha())});
    }
    return rep;
}

DualityProfile duality_profile(const GalerkinOperators& ops, const CoefficientPath& path)
{
    const Boundary& s = ops.boundary();
    const auto& t = ops.grid.nodes();
    const int n = int(t.size());
    const double alpha = ops.order.alpha(), mu = 1.0 - alpha, T = ops.grid.T();
    const GalerkinBasis& B = ops.basis;
    Eigen::MatrixXd W = rl_matrix(t, mu);

    Eigen::VectorXd lhs2 = Eigen::VectorXd::Zero(n);
    for (const Node& q : domain_nodes(s, T, 48)) {
        const double t0 = q.x <= s.b() ? 0.0 : s.inverse(q.x);
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < n; ++j)
            if (t[j] >= t0 && q.x <= s(t[j])) f[j] = field_value(B, path.c.col(j), q.x, t[j]);
        Eigen::VectorXd I = (t0 == 0.0) ? Eigen::VectorXd(W * f)
                                        : rl_integral(ops.order, SampledPath{ops.grid, f, false}, mu, t0);
        lhs2 += q.w * I.cwiseProduct(I);
    }
    Eigen::VectorXd norm2(n);
    for (int j = 0; j < n; ++j) {
        double a = 0.0;
        for (const Node& q : gauss_nodes(0.0, s(t[j]), 64)) {
            const double v = field_value(B, path.c.col(j), q.x, t[j]);
            a += q.w * v * v;
        }
        norm2[j] = a;
    }
    Eigen::VectorXd In = W * norm2;
    DualityProfile out;
    out.t = t;
    for (int j = 0; j < n; ++j) {
        out.lhs.push_back(std::sqrt(std::max(0.0, lhs2[j])));
        out.rhs.push_back(In[j] + std::pow(t[j], mu) / ops.order.gamma_two_minus());
    }
    return out;
}

VerificationReport duality_bound_check(const GalerkinOperators& ops, const CoefficientPath& path)
{
    VerificationReport rep;
    const DualityProfile d = duality_profile(ops, path);
    bool ok = true;
    double worst = 0.0;
    for (size_t j = 0; j < d.t.size(); ++j) {
        if (d.lhs[j] > d.rhs[j] + 1e-14) ok = false;
        if (d.rhs[j] > 0.0) worst = std::max(worst, d.lhs[j] / d.rhs[j]);
    }
    std::ostringstream tr;
    tr << "lhs(T)=" << std::setprecision(10) << d.lhs.back() << " rhs(T)=" << d.rhs.back();
    rep.add({"duality_bound", worst, 1.0, ok, true, tr.str(), grid_params(ops)});
    return rep;
}

double g1_integral(const FractionalOrder& order)
{
    const double a = order.alpha();
    SingularQuadOptions opt;
    opt.nodes = 24;
    opt.levels = 16;
    // a in (0,1] directly; a in (1, inf) through a = 1/u.
    const double lo = weakly_singular_integral([](double x) { return 1.0 / (1.0 + x); }, 0.0, 1.0, a - 1.0, 0.0, opt);
    const double hi = weakly_singular_integral([](double u) { return 1.0 / (1.0 + u); }, 0.0, 1.0, -a, 0.0, opt);
    return lo + hi;
}

namespace {

std::string alpha_tag(const FractionalOrder& o)
{
    std::ostringstream s;
    s << "_a" << o.alpha();
    return s.str();
}

} // namespace

VerificationReport appendix_suite(const FractionalOrder& order, std::uint64_t seed)
{
    VerificationReport rep;
    const double a = order.alpha();
    const double exact = std::numbers::pi / std::sin(std::numbers::pi * a);
    const std::string tag = alpha_tag(order);

    // Beta kernel over several (p, t).
    double e1 = 0.0;
    for (auto [p, t] : {std::pair{0.0, 1.0}, {0.3, 0.9}, {1e-3, 2e-3}, {2.0, 7.5}})
        e1 = std::max(e1, std::abs(beta_kernel_integral(order, p, t) - exact));
    rep.add({"beta_kernel" + tag, e1, 1e-8, e1 < 1e-8, true, "", "4 (p,t) pairs"});

    // I^alpha D^alpha f = f - f(0).
    const TimeGrid grid = TimeGrid::graded(1.0, 512, order);
    const std::vector<std::pair<std::string, std::function<double(double)>>> probes = {
        {"t", [](double t) { return t; }},
        {"t2", [](double t) { return t * t; }},
        {"sin", [](double t) { return std::sin(t); }}};
    for (const auto& [name, f] : probes) {
        const SampledPath fs = SampledPath::sample(grid, f);
        const Eigen::VectorXd d = caputo_derivative(order, fs);
        const Eigen::VectorXd back = rl_integral(order, SampledPath{grid, d, false}, a);
        double err = 0.0;
        for (int j = 0; j < grid.size(); ++j) err = std::max(err, std::abs(back[j] - (fs.values[j] - fs.values[0])));
        rep.add({"left_inverse_" + name + tag, err, 1e-3, err < 1e-3, true, "", "N=512 graded"});
    }

    // Derivative of I^alpha f for f with f(0) != 0.
    {
        const TimeGrid u(1.0, 2048);
        auto f = [](double t) { return 1.0 + t + std::sin(2.0 * t); };
        auto df = [](double t) { return 1.0 + 2.0 * std::cos(2.0 * t); };
        const Eigen::VectorXd If = rl_integral(order, SampledPath::sample(u, f), a);
        const Eigen::VectorXd Idf = rl_integral(order, SampledPath::sample(u, df), a);
        double err = 0.0, scale = 0.0;
        for (int j = 1; j < u.N(); ++j) {
            if (u[j] < 0.05) continue;
            const double lhs = (If[j + 1] - If[j - 1]) / (u[j + 1] - u[j - 1]);
            const double rhs = Idf[j] + std::pow(u[j], a - 1.0) * f(0.0) / order.gamma_alpha();
            err = std::max(err, std::abs(lhs - rhs));
            scale = std::max(scale, std::abs(rhs));
        }
        const double rel = err / scale;
        rep.add({"derivative_of_integral" + tag, rel, 1e-3, rel < 1e-3, true, "", "uniform N=2048, t>=0.05"});
    }

    const double g = std::abs(g1_integral(order) - exact);
    rep.add({"g1_identity" + tag, g, 1e-8, g < 1e-8, true, "", "split at 1"});

    // Holder modulus of t^(1-alpha) I^alpha f' for f = t^alpha.
    {
        const TimeGrid hg = TimeGrid::graded(1.0, 512, order);
        SampledPath w{hg, Eigen::VectorXd::Constant(hg.size(), a), true};
        const Eigen::VectorXd I = rl_integral(order, w, a);
        std::vector<double> h(hg.size());
        for (int j = 0; j < hg.size(); ++j) h[j] = std::pow(hg[j], 1.0 - a) * I[j];
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(1, hg.N());
        double sup = 0.0, sup_small = 0.0;
        for (int k = 0; k < 1000; ++k) {
            int i = pick(rng), j = pick(rng);
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            const double ratio = std::abs(h[j] - h[i]) / std::pow(hg[j] - hg[i], a);
            sup = std::max(sup, ratio);
            if (hg[i] < 1e-2) sup_small = std::max(sup_small, ratio);
        }
        const double bound = 1.05 * std::tgamma(1.0 + a) / std::tgamma(2.0 * a);
        std::ostringstream tr;
        tr << "sup over t1<0.01: " << sup_small;
        rep.add({"holder_modulus" + tag, sup, bound, std::isfinite(sup) && sup <= bound, true, tr.str(),
                 "1000 pairs seed=" + std::to_string(seed)});
    }
    return rep;
}

VerificationReport appendix_suite_all(std::uint64_t seed)
{
    VerificationReport rep;
    for (double a : {0.3, 0.5, 0.7}) rep.merge(appendix_suite(FractionalOrder(a), seed));
    return rep;
}

namespace {

// int_0^tau (tau - p)^(-alpha-1) [s(tau) - s(p)] p^(alpha-1) dp
double slope_kernel(const FractionalOrder& order, const Boundary& s, double tau)
{
    if (tau <= 0.0 || s.is_constant()) return 0.0;
    const double a = order.alpha(), st = s(tau);
    const double sd = s.derivative(tau);
    return weakly_singular_integral(
        [&](double p) {
            const double d = tau - p;
            // Nodes that round onto tau: the difference quotient is s'(tau).
            return d > 1e-13 * tau ? (st - s(p)) / d : sd;
        },
        0.0, tau, a - 1.0, -a);
}

// int_0^t1 [(t1 - tau)^(alpha-1) - (t2 - tau)^(alpha-1)] tau^fe f(tau) dtau
template <class F>
double difference_kernel_integral(F&& f, double fe, double alpha, double t1, double t2)
{
    const double h = t2 - t1;
    auto K = [&](double sigma) { return -std::pow(sigma, alpha - 1.0) * std::expm1((alpha - 1.0) * std::log1p(h / sigma)); };
    auto full = [&](double tau) { return (fe == 0.0 ? 1.0 : std::pow(tau, fe)) * f(tau); };
    const double half = 0.5 * t1;
    double acc = weakly_singular_integral([&](double tau) { return K(t1 - tau) * f(tau); }, 0.0, half, fe, 0.0);
    // sigma = t1 - tau in (0, half]: geometric panels down to a scale below h.
    const double floor = 1e-2 * std::min(h, half);
    double hi = half;
    while (hi > floor) {
        const double lo = 0.5 * hi;
        acc += gauss_integrate([&](double sg) { return K(sg) * full(t1 - sg); }, lo, hi, 16);
        hi = lo;
    }
    // Last panel: K(sigma) sigma^(1-alpha) is smooth for sigma << h.
    acc += weakly_singular_integral([&](double sg) { return K(sg) * std::pow(sg, 1.0 - alpha) * full(t1 - sg); }, 0.0,
                                    hi, alpha - 1.0, 0.0);
    return acc;
}

double beta_constant(const FractionalOrder& o) { return o.gamma_alpha() * o.gamma_one_minus(); }

} // namespace

double q11(const FractionalOrder& order, const Boundary& s, double t1, double t2)
{
    if (!(t2 > t1) || t1 < 0.0) throw std::domain_error("q11: need 0 <= t1 < t2");
    if (s.is_constant()) return 0.0;
    const double a = order.alpha();
    // At t1 = 0 the left factor tau^(alpha-1) is only used to grade the nodes.
    const double le = t1 == 0.0 ? a - 1.0 : 0.0;
    const double in = weakly_singular_integral(
        [&](double tau) { return slope_kernel(order, s, tau) * (le == 0.0 ? 1.0 : std::pow(tau, -le)); }, t1, t2, le,
        a - 1.0);
    return std::pow(t2, 1.0 - a) * in;
}

double q12(const FractionalOrder& order, double t1, double t2)
{
    if (!(t2 > t1) || t1 < 0.0) throw std::domain_error("q12: need 0 <= t1 < t2");
    const double a = order.alpha();
    const double in = weakly_singular_integral([&](double tau) { return t1 == 0.0 ? 1.0 : std::pow(tau, a - 1.0); }, t1,
                                               t2, t1 == 0.0 ? a - 1.0 : 0.0, a - 1.0);
    return std::pow(t2, 1.0 - a) * beta_constant(order) * in;
}

double q21(const FractionalOrder& order, const Boundary& s, double t1, double t2)
{
    if (!(t2 > t1) || t1 <= 0.0) throw std::domain_error("q21: need 0 < t1 < t2");
    if (s.is_constant()) return 0.0;
    const double a = order.alpha();
    const double in = difference_kernel_integral([&](double tau) { return slope_kernel(order, s, tau); }, 0.0, a, t1, t2);
    return std::pow(t2, 1.0 - a) * in;
}

double q22(const FractionalOrder& order, double t1, double t2)
{
    if (!(t2 > t1) || t1 <= 0.0) throw std::domain_error("q22: need 0 < t1 < t2");
    const double a = order.alpha();
    const double in = difference_kernel_integral([](double) { return 1.0; }, a - 1.0, a, t1, t2);
    return std::pow(t2, 1.0 - a) * beta_constant(order) * in;
}

VerificationReport q_function_suite(const FractionalOrder& order, const Boundary& s, std::uint64_t seed)
{
    VerificationReport rep;
    const double T = s.horizon(), t1 = 0.5 * T;
    const std::vector<double> gaps = {1e-1 * T, 1e-2 * T, 1e-3 * T};
    const std::string tag = alpha_tag(order);
    auto ladder = [&](const std::string& name, const std::function<double(double, double)>& q) {
        std::vector<double> v;
        for (double h : gaps) v.push_back(std::abs(q(t1, t1 + h)));
        const bool mono = v[0] >= v[1] && v[1] >= v[2] && (v[0] == 0.0 || v[2] < v[0]);
        std::ostringstream tr;
        tr << std::setprecision(6) << v[0] << " > " << v[1] << " > " << v[2];
        rep.add({name + tag, v[2], v[0], mono, true, tr.str(), "t1=" + std::to_string(t1) + " gaps 1e-1..1e-3"});
    };
    ladder("q11_decay", [&](double x, double y) { return q11(order, s, x, y); });
    ladder("q21_decay", [&](double x, double y) { return q21(order, s, x, y); });
    ladder("q22_decay", [&](double x, double y) { return q22(order, x, y); });

    // Q11(0, t) against s(t) - s(0).
    double c11 = 0.0;
    for (int k = 0; k < 6; ++k) {
        const double t = T * std::pow(0.5, k);
        const double ds = s(t) - s(0.0);
        const double q = std::abs(q11(order, s, 0.0, t));
        if (!std::isfinite(q)) c11 = HUGE_VAL;
        else if (ds > 0.0) c11 = std::max(c11, q / ds);
        else if (q != 0.0) c11 = HUGE_VAL;
    }
    rep.add({"q11_origin_bound" + tag, c11, 0.0, std::isfinite(c11), true, "sup |Q11(0,t)|/(s(t)-s(0))", "t=T 2^-k, k<6"});

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, T);
    double c12 = 0.0;
    for (int k = 0; k < 100; ++k) {
        double x = U(rng), y = U(rng);
        if (x == y) continue;
        if (x > y) std::swap(x, y);
        const double r = std::abs(q12(order, x, y)) / std::pow(y - x, order.alpha());
        c12 = std::isfinite(r) ? std::max(c12, r) : HUGE_VAL;
    }
    rep.add({"q12_holder" + tag, c12, 0.0, std::isfinite(c12), true, "sup |Q12|/|t2-t1|^alpha",
             "100 pairs seed=" + std::to_string(seed)});
    return rep;
}

} // namespace fracmove
