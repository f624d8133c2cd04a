#include "fracmove/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fracmove {

Eigen::VectorXd CoefficientPath::value_at(double t) const
{
    const auto& tn = grid.nodes();
    if (!(t >= 0.0) || t > tn.back() * (1.0 + 1e-12)) throw std::domain_error("path: time outside grid");
    auto it = std::upper_bound(tn.begin(), tn.end(), t);
    const int i = std::clamp(int(it - tn.begin()) - 1, 0, int(tn.size()) - 2);
    const double u = std::clamp((t - tn[i]) / (tn[i + 1] - tn[i]), 0.0, 1.0);
    return (1.0 - u) * c.col(i) + u * c.col(i + 1);
}

double xt_norm(const CoefficientPath& p)
{
    double a = 0.0, b = 0.0;
    for (int j = 0; j < p.c.cols(); ++j) a = std::max(a, p.c.col(j).norm());
    for (int j = 0; j < p.w.cols(); ++j) b = std::max(b, p.w.col(j).norm());
    return a + b;
}

Eigen::MatrixXd integrate_regularized(const TimeGrid& grid, const Eigen::MatrixXd& w, const Eigen::VectorXd& c0,
                                      double alpha)
{
    const int n = grid.size();
    if (w.cols() != n || w.rows() != c0.size()) throw std::invalid_argument("integrate_regularized: shape mismatch");
    Eigen::MatrixXd c(w.rows(), n);
    c.col(0) = c0;
    for (int i = 0; i + 1 < n; ++i) {
        const double h = grid[i + 1] - grid[i];
        const PowerMoments m = power_moments(grid[i], grid[i + 1], alpha - 1.0);
        c.col(i + 1) = c.col(i) + (m.jb / h) * w.col(i) + (m.ja / h) * w.col(i + 1);
    }
    return c;
}

namespace {

// Product-integration weights on a fixed grid. Row n holds, for each interval
// i < n, the weights of the left and right node of int_{t_i}^{t_{i+1}} (t_n - tau)^(mu-1) f.
struct TriWeights {
    std::vector<size_t> off;
    std::vector<double> lo, hi;

    void build(const std::vector<double>& t, double mu)
    {
        const int N = int(t.size()) - 1;
        off.assign(N + 2, 0);
        for (int n = 0; n <= N; ++n) off[n + 1] = off[n] + n;
        lo.assign(off[N + 1], 0.0);
        hi.assign(off[N + 1], 0.0);
        for (int n = 1; n <= N; ++n)
            for (int i = 0; i < n; ++i) {
                auto [a, b] = kernel_weights(t[n], t[i], t[i + 1], mu);
                lo[off[n] + i] = a;
                hi[off[n] + i] = b;
            }
    }
    double L(int n, int i) const { return lo[off[n] + i]; }
    double H(int n, int i) const { return hi[off[n] + i]; }
    /// weight of node j in row n
    double node(int n, int j) const { return (j < n ? L(n, j) : 0.0) + (j >= 1 ? H(n, j - 1) : 0.0); }
    double mass(int n, int i) const { return L(n, i) + H(n, i); }
};

class Discretization {
public:
    explicit Discretization(const GalerkinOperators& o) : ops(o), basis(o.basis), t(o.grid.nodes())
    {
        N = o.grid.N();
        M = basis.size();
        alpha = o.order.alpha();
        calpha = o.order.c_alpha();
        const Boundary& s = o.boundary();
        moving = !s.is_constant();
        outer.build(t, alpha);
        inner.build(t, 1.0 - alpha);
        pl.resize(N);
        ph.resize(N);
        for (int i = 0; i < N; ++i) {
            const double h = t[i + 1] - t[i];
            const PowerMoments m = power_moments(t[i], t[i + 1], alpha - 1.0);
            pl[i] = m.jb / h;
            ph[i] = m.ja / h;
        }
        rate.resize(N + 1);
        wrate.resize(N + 1);
        for (int j = 0; j <= N; ++j) {
            const double sj = s(t[j]);
            double sd = s.derivative(t[j]);
            if (!std::isfinite(sd)) sd = (s(t[1]) - s(t[0])) / (t[1] - t[0]);
            rate[j] = sd / sj;
            wrate[j] = s.regularized_speed(t[j], alpha) / sj;
            if (!std::isfinite(wrate[j])) throw std::domain_error("solver: t^(1-alpha) s' unbounded at 0");
        }
        DhatT = dhat_matrix(basis.m()).transpose();
        G.resize(M, N + 1);
        Ediag.resize(M, N + 1);
        for (int j = 0; j <= N; ++j) {
            G.col(j) = forcing_projection(basis, o.order, o.mollified, t[j], mollifier_breaks(s, o.eps, t[j]));
            Ediag.col(j) = e_matrix(basis, o.order, t[j]).diagonal();
        }
    }

    Eigen::MatrixXd BT(int i, int j) const { return b_matrix(basis, t[i], t[j]).transpose(); }
    Eigen::MatrixXd DtT(int i, int j) const { return dtilde_matrix_rate(basis, t[i], t[j], rate[i]).transpose(); }
    Eigen::MatrixXd DT(int i, int j) const
    {
        if (rate[i] == 0.0) return Eigen::MatrixXd::Zero(M, M);
        return rate[i] * psi_matrix(basis, t[i], t[j]).transpose();
    }
    Eigen::VectorXd f2(const Eigen::VectorXd& c, int j) const
    {
        if (wrate[j] == 0.0) return Eigen::VectorXd::Zero(M);
        return wrate[j] * (DhatT * c);
    }
    double h(int i) const { return t[i + 1] - t[i]; }

    const GalerkinOperators& ops;
    const GalerkinBasis& basis;
    const std::vector<double>& t;
    int N = 0, M = 0;
    double alpha = 0, calpha = 0;
    bool moving = false;
    TriWeights outer, inner;
    std::vector<double> pl, ph, rate, wrate;
    Eigen::MatrixXd DhatT, G, Ediag;
};

// Inner sums H1_j (B against c') and H3_j (D~ against c) over intervals i < j.
void inner_sums(const Discretization& D, const Eigen::MatrixXd& c, int j, int ifrom, int ito, Eigen::VectorXd& h1,
                Eigen::VectorXd& h3, bool include_left_tail)
{
    // Covers matrices i in [ifrom, ito). When include_left_tail is false the
    // slope s_{ifrom-1} term of matrix ifrom is left to the caller.
    for (int i = ifrom; i < ito; ++i) {
        if (i >= j) break;
        Eigen::VectorXd v = D.inner.L(j, i) * (c.col(i + 1) - c.col(i)) / D.h(i);
        if (i >= 1 && (i > ifrom || include_left_tail)) v += D.inner.H(j, i - 1) * (c.col(i) - c.col(i - 1)) / D.h(i - 1);
        h1.noalias() += D.BT(i, j) * v;
        const double g = D.inner.node(j, i);
        h3.noalias() += D.DtT(i, j) * (g * c.col(i));
    }
}

struct Evaluation {
    Eigen::MatrixXd P, W, R, F2;
};

// Full evaluation of P and its regularized derivative for a complete path.
Evaluation evaluate(const Discretization& D, const Eigen::MatrixXd& c)
{
    const int N = D.N, M = D.M;
    Evaluation ev;
    ev.R.resize(M, N + 1);
    ev.F2.resize(M, N + 1);
    for (int j = 0; j <= N; ++j) {
        Eigen::VectorXd h1 = Eigen::VectorXd::Zero(M), h3 = Eigen::VectorXd::Zero(M);
        if (D.moving) inner_sums(D, c, j, 0, j, h1, h3, true);
        ev.R.col(j) = D.G.col(j) - h1 - h3 - D.Ediag.col(j).cwiseProduct(c.col(j));
        ev.F2.col(j) = D.f2(c.col(j), j);
    }
    ev.P.resize(M, N + 1);
    ev.W.resize(M, N + 1);
    Eigen::VectorXd p2 = Eigen::VectorXd::Zero(M);
    ev.P.col(0) = c.col(0);
    ev.W.col(0) = D.calpha * ev.R.col(0) - ev.F2.col(0);
    for (int n = 1; n <= N; ++n) {
        p2 += D.pl[n - 1] * ev.F2.col(n - 1) + D.ph[n - 1] * ev.F2.col(n);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(M), der = Eigen::VectorXd::Zero(M);
        for (int j = 0; j <= n; ++j) acc += D.outer.node(n, j) * ev.R.col(j);
        for (int i = 0; i < n; ++i) der += (D.outer.mass(n, i) / D.h(i)) * (ev.R.col(i + 1) - ev.R.col(i));
        ev.P.col(n) = c.col(0) + D.calpha * acc - p2;
        ev.W.col(n) = D.calpha * (ev.R.col(0) + std::pow(D.t[n], 1.0 - D.alpha) * der) - ev.F2.col(n);
    }
    return ev;
}

// Regularized derivative of a node-value path from a local t^alpha fit.
Eigen::MatrixXd alpha_differences(const std::vector<double>& t, const Eigen::MatrixXd& c, double alpha)
{
    const int n = int(c.cols());
    Eigen::MatrixXd w(c.rows(), n);
    if (n < 2) return Eigen::MatrixXd::Zero(c.rows(), n);
    for (int j = 1; j < n; ++j)
        w.col(j) = alpha * (c.col(j) - c.col(j - 1)) / (std::pow(t[j], alpha) - std::pow(t[j - 1], alpha));
    w.col(0) = w.col(1);
    return w;
}

class WindowIterator {
public:
    WindowIterator(const Discretization& d, Eigen::MatrixXd& c) : D(d), C(c) {}

    /// Rebuild R, F2 and the P2 prefix for nodes 0..a from the stored values.
    void finalize_history(int a)
    {
        const int M = D.M;
        if (R.cols() != D.N + 1) {
            R = Eigen::MatrixXd::Zero(M, D.N + 1);
            F2 = Eigen::MatrixXd::Zero(M, D.N + 1);
            p2cum = Eigen::MatrixXd::Zero(M, D.N + 1);
            done = -1;
        }
        for (int j = done + 1; j <= a; ++j) finalize_node(j);
        done = std::max(done, a);
    }

    WindowOutcome run(int a, int e, const SolverOptions& opt, bool allow_abort)
    {
        const int M = D.M;
        finalize_history(a);
        prepare(a, e);
        for (int n = a + 1; n <= e; ++n) C.col(n) = C.col(a);

        WindowOutcome out;
        double prev = -1.0;
        Eigen::MatrixXd y(M, e - a), kc(M, e - a), cn(M, e - a);
        for (int it = 1; it <= opt.max_iterations; ++it) {
            Eigen::MatrixXd P = apply_window(a, e);
            double res = 0.0;
            for (int n = a + 1; n <= e; ++n) {
                Eigen::VectorXd k = kterm(a, n, C);
                kc.col(n - a - 1) = k;
                y.col(n - a - 1) = P.col(n - a - 1) + k;
                res = std::max(res, (C.col(n) - P.col(n - a - 1)).norm());
            }
            // Forward substitution for (I + K) x = y, diagonal per mode.
            for (int n = a + 1; n <= e; ++n) {
                Eigen::VectorXd acc = y.col(n - a - 1);
                for (int j = a + 1; j < n; ++j)
                    acc -= D.calpha * D.outer.node(n, j) * Estar.cwiseProduct(cn.col(j - a - 1));
                const double wd = D.calpha * D.outer.node(n, n);
                cn.col(n - a - 1) = acc.cwiseQuotient((Eigen::VectorXd::Ones(M) + wd * Estar));
            }
            // X-norm of the update.
            double dc = 0.0, dw = 0.0;
            Eigen::VectorXd dprev = Eigen::VectorXd::Zero(M);
            for (int n = a + 1; n <= e; ++n) {
                Eigen::VectorXd d = cn.col(n - a - 1) - C.col(n);
                dc = std::max(dc, d.norm());
                const double den = std::pow(D.t[n], D.alpha) - std::pow(D.t[n - 1], D.alpha);
                dw = std::max(dw, (D.alpha * (d - dprev) / den).norm());
                dprev = d;
            }
            const double diff = dc + dw;
            for (int n = a + 1; n <= e; ++n) C.col(n) = cn.col(n - a - 1);
            out.iterations = it;
            out.final_difference = diff;
            out.residual = res;
            if (prev > 0.0 && prev > 1e-13) {
                const double rho = diff / prev;
                out.rho = std::max(out.rho, rho);
                if (rho >= opt.rho_limit) {
                    out.contractive = false;
                    if (allow_abort) return out;
                }
            }
            prev = diff;
            if (diff <= opt.tol && res <= opt.tol) {
                out.converged = true;
                break;
            }
            if (diff <= opt.tol * 1e-3) {
                // Update below round-off: the residual is as small as it gets.
                out.converged = res <= 1e3 * opt.tol;
                break;
            }
        }
        if (out.converged) {
            // Residual of the accepted iterate.
            Eigen::MatrixXd P = apply_window(a, e);
            double res = 0.0;
            for (int n = a + 1; n <= e; ++n) res = std::max(res, (C.col(n) - P.col(n - a - 1)).norm());
            out.residual = res;
        }
        return out;
    }

    Eigen::MatrixXd R, F2, p2cum;
    int done = -1;

private:
    void finalize_node(int j)
    {
        const int M = D.M;
        Eigen::VectorXd h1 = Eigen::VectorXd::Zero(M), h3 = Eigen::VectorXd::Zero(M);
        if (D.moving) inner_sums(D, C, j, 0, j, h1, h3, true);
        R.col(j) = D.G.col(j) - h1 - h3 - D.Ediag.col(j).cwiseProduct(C.col(j));
        F2.col(j) = D.f2(C.col(j), j);
        if (j == 0) p2cum.col(0).setZero();
        else p2cum.col(j) = p2cum.col(j - 1) + D.pl[j - 1] * F2.col(j - 1) + D.ph[j - 1] * F2.col(j);
    }

    void prepare(int a, int e)
    {
        const int M = D.M;
        Estar = D.Ediag.col(a);
        if (a == 0) Estar = D.Ediag.col(std::min(1, D.N));
        base = a;
        end = e;
        hist1.assign(e - a, Eigen::VectorXd::Zero(M));
        hist3.assign(e - a, Eigen::VectorXd::Zero(M));
        outerHist.assign(e - a, Eigen::VectorXd::Zero(M));
        cacheB.clear();
        cacheD.clear();
        for (int n = a + 1; n <= e; ++n) {
            const int k = n - a - 1;
            if (D.moving) {
                inner_sums(D, C, n, 0, a, hist1[k], hist3[k], true);
                // Slope s_{a-1} paired with matrix a.
                if (a >= 1) hist1[k].noalias() += D.BT(a, n) * (D.inner.H(n, a - 1) * (C.col(a) - C.col(a - 1)) / D.h(a - 1));
                for (int i = a; i < n; ++i) {
                    cacheB.push_back(D.BT(i, n));
                    cacheD.push_back(D.DtT(i, n));
                }
            }
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(M);
            for (int j = 0; j <= a; ++j) acc += D.outer.node(n, j) * R.col(j);
            outerHist[k] = D.calpha * acc;
        }
    }

    // Values of P on window nodes for the current C.
    Eigen::MatrixXd apply_window(int a, int e)
    {
        const int M = D.M, nw = e - a;
        Eigen::MatrixXd Rw(M, nw), F2w(M, nw), P(M, nw);
        size_t idx = 0;
        for (int n = a + 1; n <= e; ++n) {
            const int k = n - a - 1;
            Eigen::VectorXd h1 = hist1[k], h3 = hist3[k];
            if (D.moving) {
                for (int i = a; i < n; ++i, ++idx) {
                    Eigen::VectorXd v = D.inner.L(n, i) * (C.col(i + 1) - C.col(i)) / D.h(i);
                    if (i > a) v += D.inner.H(n, i - 1) * (C.col(i) - C.col(i - 1)) / D.h(i - 1);
                    h1.noalias() += cacheB[idx] * v;
                    h3.noalias() += cacheD[idx] * (D.inner.node(n, i) * C.col(i));
                }
            }
            Rw.col(k) = D.G.col(n) - h1 - h3 - D.Ediag.col(n).cwiseProduct(C.col(n));
            F2w.col(k) = D.f2(C.col(n), n);
        }
        Eigen::VectorXd p2 = p2cum.col(a);
        for (int n = a + 1; n <= e; ++n) {
            const int k = n - a - 1;
            const Eigen::VectorXd fprev = (n - 1 == a) ? F2.col(a) : Eigen::VectorXd(F2w.col(k - 1));
            p2 += D.pl[n - 1] * fprev + D.ph[n - 1] * F2w.col(k);
            Eigen::VectorXd acc = outerHist[k];
            for (int j = a + 1; j <= n; ++j) acc += D.calpha * D.outer.node(n, j) * Rw.col(j - a - 1);
            P.col(k) = C.col(0) + acc - p2;
        }
        lastR = Rw;
        lastF2 = F2w;
        return P;
    }

    Eigen::VectorXd kterm(int a, int n, const Eigen::MatrixXd& c) const
    {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(D.M);
        for (int j = a + 1; j <= n; ++j) acc += D.outer.node(n, j) * c.col(j);
        return D.calpha * Estar.cwiseProduct(acc);
    }

    const Discretization& D;
    Eigen::MatrixXd& C;
    Eigen::VectorXd Estar;
    int base = 0, end = 0;
    std::vector<Eigen::VectorXd> hist1, hist3, outerHist;
    std::vector<Eigen::MatrixXd> cacheB, cacheD;
    Eigen::MatrixXd lastR, lastF2;
};

int window_end(const std::vector<double>& t, int a, double len, const SolverOptions& opt)
{
    const int N = int(t.size()) - 1;
    const double target = t[a] + len;
    int e = int(std::lower_bound(t.begin(), t.end(), target * (1.0 - 1e-12)) - t.begin());
    e = std::max(e, a + opt.min_window_cells);
    e = std::min(e, a + opt.max_window_cells);
    return std::min(e, N);
}

void check_ops(const GalerkinOperators& ops)
{
    if (ops.grid.N() < 1) throw std::invalid_argument("solver: grid needs at least one interval");
    if (ops.c0.size() != ops.basis.size()) throw std::invalid_argument("solver: initial coefficients mismatch");
}

} // namespace

CoefficientPath apply_P(const GalerkinOperators& ops, const CoefficientPath& c)
{
    check_ops(ops);
    if (c.c.cols() != ops.grid.size() || c.c.rows() != ops.basis.size())
        throw std::invalid_argument("apply_P: path shape mismatch");
    Discretization D(ops);
    Evaluation ev = evaluate(D, c.c);
    return CoefficientPath{ops.grid, ev.P, ev.W};
}

std::pair<double, double> fixed_point_residual(const GalerkinOperators& ops, const CoefficientPath& c)
{
    CoefficientPath p = apply_P(ops, c);
    double rv = 0.0, rw = 0.0;
    for (int j = 0; j < p.c.cols(); ++j) {
        rv = std::max(rv, (c.c.col(j) - p.c.col(j)).norm());
        rw = std::max(rw, (c.w.col(j) - p.w.col(j)).norm());
    }
    return {rv, rw};
}

WindowOutcome picard_window(const GalerkinOperators& ops, CoefficientPath& path, int start, int end,
                            const SolverOptions& opt)
{
    check_ops(ops);
    if (start < 0 || end <= start || end > ops.grid.N()) throw std::out_of_range("picard_window: bad window");
    if (path.c.rows() != ops.basis.size() || path.c.cols() != ops.grid.size()) {
        path.grid = ops.grid;
        path.c = Eigen::MatrixXd::Zero(ops.basis.size(), ops.grid.size());
        path.w = Eigen::MatrixXd::Zero(ops.basis.size(), ops.grid.size());
    }
    path.c.col(0) = ops.c0;
    Discretization D(ops);
    WindowIterator W(D, path.c);
    return W.run(start, end, opt, false);
}

SolveResult solve(const GalerkinOperators& ops, const SolverOptions& opt)
{
    check_ops(ops);
    const auto t_begin = std::chrono::steady_clock::now();
    Discretization D(ops);
    const int N = D.N, M = D.M;
    SolveResult out{CoefficientPath{ops.grid, Eigen::MatrixXd::Zero(M, N + 1), Eigen::MatrixXd::Zero(M, N + 1)}, {}};
    SolveReport& rep = out.report;
    rep.method = "picard";
    out.path.c.col(0) = ops.c0;
    WindowIterator it(D, out.path.c);

    int a = 0, successes = 0;
    double len = opt.initial_window * ops.grid.T();
    while (a < N) {
        const int e = window_end(D.t, a, len, opt);
        const bool can_halve = (e - a) > opt.min_window_cells;
        WindowOutcome w = it.run(a, e, opt, can_halve);
        WindowRecord rec{D.t[a], D.t[e], e - a, w.iterations, w.rho, false};
        rep.total_iterations += w.iterations;
        rep.max_rho = std::max(rep.max_rho, w.rho);
        if (!w.contractive && can_halve) {
            rep.history.push_back(rec);
            ++rep.halvings;
            len = 0.5 * (D.t[e] - D.t[a]);
            successes = 0;
            continue;
        }
        if (!w.converged) {
            rep.history.push_back(rec);
            rep.converged = false;
            rep.message = "window [" + std::to_string(D.t[a]) + ", " + std::to_string(D.t[e]) +
                          "] did not converge (rho " + std::to_string(w.rho) + ")";
            rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
            return out;
        }
        rec.accepted = true;
        rep.history.push_back(rec);
        ++rep.windows;
        it.finalize_history(e);
        a = e;
        if (++successes >= opt.successes_to_grow) {
            len *= 2.0;
            successes = 0;
        }
    }

    // One plain sweep: the stored path is the function Pc of the converged iterate,
    // so w is its exact regularized derivative rather than a grid difference.
    Evaluation ev = evaluate(D, out.path.c);
    out.path.c = ev.P;
    out.path.w = ev.W;
    Evaluation ev2 = evaluate(D, out.path.c);
    double rv = 0.0, rw = 0.0;
    for (int j = 0; j <= N; ++j) {
        rv = std::max(rv, (out.path.c.col(j) - ev2.P.col(j)).norm());
        rw = std::max(rw, (out.path.w.col(j) - ev2.W.col(j)).norm());
    }
    rep.residual_values = rv;
    rep.residual_derivative = rw;
    rep.converged = true;
    rep.message = "ok";
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return out;
}

SolveResult l1_direct_solve(const GalerkinOperators& ops)
{
    check_ops(ops);
    const auto t_begin = std::chrono::steady_clock::now();
    Discretization D(ops);
    const int N = D.N, M = D.M;
    SolveResult out{CoefficientPath{ops.grid, Eigen::MatrixXd::Zero(M, N + 1), Eigen::MatrixXd::Zero(M, N + 1)}, {}};
    out.report.method = "l1";
    Eigen::MatrixXd& c = out.path.c;
    c.col(0) = ops.c0;
    const double g1ma = ops.order.gamma_one_minus();
    (void)g1ma;
    for (int n = 1; n <= N; ++n) {
        const double hl = D.h(n - 1);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, M);
        Eigen::VectorXd rhs = D.G.col(n);
        // Caputo part: sum of slopes against int (t_n - tau)^(-alpha).
        const double mlast = D.inner.mass(n, n - 1) / hl;
        A.diagonal().array() += mlast;
        rhs += mlast * c.col(n - 1);
        for (int i = 0; i + 1 < n; ++i) rhs -= D.inner.mass(n, i) * (c.col(i + 1) - c.col(i)) / D.h(i);
        A.diagonal() += D.Ediag.col(n);
        if (D.moving) {
            for (int i = 0; i < n; ++i) {
                const Eigen::MatrixXd Bt = D.BT(i, n);
                Eigen::VectorXd known = Eigen::VectorXd::Zero(M);
                if (i + 1 < n) known += D.inner.L(n, i) * (c.col(i + 1) - c.col(i)) / D.h(i);
                else {
                    const double wl = D.inner.L(n, i) / hl;
                    A += wl * Bt;
                    known -= wl * c.col(i);
                }
                if (i >= 1) known += D.inner.H(n, i - 1) * (c.col(i) - c.col(i - 1)) / D.h(i - 1);
                rhs -= Bt * known;
                rhs -= D.DT(i, n) * (D.inner.node(n, i) * c.col(i));
            }
            A += D.inner.node(n, n) * D.DT(n, n);
        }
        c.col(n) = A.partialPivLu().solve(rhs);
    }
    out.path.w = alpha_differences(D.t, c, D.alpha);
    out.report.converged = c.allFinite();
    out.report.message = out.report.converged ? "ok" : "non-finite coefficients";
    out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return out;
}

std::vector<FieldSample> reconstruct_field(const GalerkinOperators& ops, const CoefficientPath& path,
                                           const std::vector<double>& xs, const std::vector<double>& ts)
{
    const Boundary& s = ops.boundary();
    const double T = path.grid.T();
    std::vector<FieldSample> out;
    out.reserve(xs.size() * ts.size());
    for (double t : ts) {
        const bool tin = t >= 0.0 && t <= T * (1.0 + 1e-12);
        Eigen::VectorXd ct;
        double st = 0.0, ht = 0.0;
        if (tin) {
            ct = path.value_at(std::min(t, T));
            st = s(std::min(t, T));
            if (ops.problem.lifted) ht = ops.problem.h(t);
        }
        for (double x : xs) {
            FieldSample f{x, t, std::numeric_limits<double>::quiet_NaN(), false};
            if (tin && x >= 0.0 && x <= st) {
                f.inside = true;
                f.u = ops.basis.expand(ct, x, std::min(t, T));
                if (ops.problem.lifted) f.u -= ht * ops.problem.cutoff.eta(x);
            }
            out.push_back(f);
        }
    }
    return out;
}

} // namespace fracmove
