#include "nambu/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nambu/linalg.hpp"

namespace nambu {

Trajectory integrate(const FlowSpec& spec, std::span<const double> X0,
                     std::pair<double, double> t_span, const IntegratorConfig& cfg) {
    const auto [t0, t1] = t_span;
    if (t0 == t1) throw std::invalid_argument("integrate: degenerate t_span");
    const int n_samples = std::max(2, cfg.samples);
    for (double v : X0)
        if (!std::isfinite(v)) throw std::invalid_argument("integrate: X0 not finite");

    RkOptions opt{cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.max_steps};
    Dopri5 rk(
        [&spec](double, std::span<const double> y, std::span<double> dydt) {
            const std::vector<double> r = nambu_rhs(spec, y);
            std::copy(r.begin(), r.end(), dydt.begin());
        },
        t0, std::vector<double>(X0.begin(), X0.end()), t1, opt);

    Trajectory traj;
    const int nh = static_cast<int>(spec.hamiltonians.size());
    auto push_sample = [&](double t, std::vector<double> X) {
        std::vector<double> hv(nh);
        for (int j = 0; j < nh; ++j) hv[j] = spec.hamiltonians[j](X);
        if (!traj.invariant_values.empty())
            for (int j = 0; j < nh; ++j)
                traj.drift = std::max(traj.drift,
                                      std::fabs(hv[j] - traj.invariant_values.front()[j]));
        traj.samples.push_back({t, std::move(X)});
        traj.invariant_values.push_back(std::move(hv));
    };

    push_sample(t0, {X0.begin(), X0.end()});
    int next = 1;
    std::vector<double> buf(X0.size());
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    while (rk.step()) {
        while (next < n_samples) {
            const double ts = t0 + (t1 - t0) * next / (n_samples - 1.0);
            if ((ts - rk.t()) * dir > 0.0 && !rk.finished()) break;
            if (next == n_samples - 1 && rk.finished()) {
                push_sample(t1, rk.y());
            } else {
                rk.eval_dense(std::min(ts * dir, rk.t() * dir) * dir, buf);
                push_sample(ts, buf);
            }
            ++next;
        }
    }
    traj.n_steps = rk.steps_taken();
    traj.n_rejected = rk.steps_rejected();
    if (rk.failed()) {
        traj.complete = false;
        traj.error = rk.error();
    }
    return traj;
}

DriftStats conservation_report(const Trajectory& traj, const FlowSpec& spec) {
    DriftStats st;
    const int nh = static_cast<int>(spec.hamiltonians.size());
    st.max_abs.assign(nh, 0.0);
    st.mean_abs.assign(nh, 0.0);
    if (traj.samples.empty()) return st;
    std::vector<double> h0(nh);
    for (int j = 0; j < nh; ++j) h0[j] = spec.hamiltonians[j](traj.samples.front().X);
    for (const auto& s : traj.samples)
        for (int j = 0; j < nh; ++j) {
            const double d = std::fabs(spec.hamiltonians[j](s.X) - h0[j]);
            st.max_abs[j] = std::max(st.max_abs[j], d);
            st.mean_abs[j] += d;
        }
    for (int j = 0; j < nh; ++j) {
        st.mean_abs[j] /= static_cast<double>(traj.samples.size());
        st.overall_max = std::max(st.overall_max, st.max_abs[j]);
    }
    return st;
}

std::vector<double> solve_constraints(const std::vector<MultiPoly>& f,
                                      std::span<const double> x_target,
                                      std::span<const double> guess) {
    const int n = static_cast<int>(f.size());
    if (static_cast<int>(x_target.size()) != n || static_cast<int>(guess.size()) != n)
        throw std::invalid_argument("solve_constraints: dimension mismatch");
    std::vector<double> X(guess.begin(), guess.end());
    double scale = 1.0;
    for (double v : x_target) scale = std::max(scale, std::fabs(v));
    for (int it = 0; it < 60; ++it) {
        std::vector<double> res(n);
        double worst = 0.0;
        for (int j = 0; j < n; ++j) {
            res[j] = f[j](X) - x_target[j];
            worst = std::max(worst, std::fabs(res[j]));
        }
        if (worst <= 1e-13 * scale) return X;
        Mat jac(n, n);
        for (int r = 0; r < n; ++r) {
            const std::vector<double> g = grad(f[r], X);
            for (int c = 0; c < n; ++c) jac(r, c) = g[c];
        }
        std::vector<double> dx;
        try {
            dx = lu_solve(std::move(jac), res);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("solve_constraints: singular constraint Jacobian");
        }
        for (int j = 0; j < n; ++j) X[j] -= dx[j];
    }
    throw std::runtime_error("solve_constraints: Newton did not converge");
}

double volume_check(const FlowSpec& spec, std::span<const double> x_const, double t,
                    const State& seed) {
    const int n = spec.n;
    if (static_cast<int>(spec.constraint_map.size()) != n)
        throw std::invalid_argument("volume_check: full constraint map unavailable");
    if (static_cast<int>(x_const.size()) != n - 1)
        throw std::invalid_argument("volume_check: need n-1 constants");
    if (static_cast<int>(seed.X.size()) != n)
        throw std::invalid_argument("volume_check: seed dimension mismatch");

    const double xn_seed = spec.constraint_map[n - 1](seed.X);
    auto endpoint = [&](std::span<const double> xv) {
        std::vector<double> target(xv.begin(), xv.end());
        target.push_back(xn_seed);
        std::vector<double> X0;
        try {
            X0 = solve_constraints(spec.constraint_map, target, seed.X);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(std::string("volume_check: ") + e.what());
        }
        if (t == 0.0) return X0;
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-12;
        cfg.abs_tol = 1e-13;
        cfg.samples = 2;
        Trajectory tr = integrate(spec, X0, {0.0, t}, cfg);
        if (!tr.complete) throw std::runtime_error("volume_check: " + tr.error);
        return tr.samples.back().X;
    };

    Mat jac(n, n);
    std::vector<double> xv(x_const.begin(), x_const.end());
    for (int j = 0; j < n - 1; ++j) {
        const double h = 1e-5 * std::max(1.0, std::fabs(xv[j]));
        const double save = xv[j];
        xv[j] = save + h;
        const std::vector<double> Xp = endpoint(xv);
        xv[j] = save - h;
        const std::vector<double> Xm = endpoint(xv);
        xv[j] = save;
        for (int r = 0; r < n; ++r) jac(r, j) = (Xp[r] - Xm[r]) / (2.0 * h);
    }
    const std::vector<double> Xt = endpoint(xv);
    const std::vector<double> rhs = nambu_rhs(spec, Xt);
    for (int r = 0; r < n; ++r) jac(r, n - 1) = rhs[r];
    return lu_det(std::move(jac));
}

double scalar_reduce(const FlowSpec& spec, std::span<const double> X) {
    const int n = spec.n;
    const std::vector<double> rhs = nambu_rhs(spec, X);
    const double rhs_w = rhs[n - 1];
    double f2 = 0.0;  // F(W)^2 from the constraint-eliminated closed form

    if (spec.family == FlowFamily::symmetric && spec.free_index == n) {
        const double W = X[n - 1];
        std::vector<double> xv(n, 0.0);
        for (int j = 0; j < n - 1; ++j) xv[j] = spec.hamiltonians[j](X);
        SymConstants sc(n, xv, n);
        const std::vector<double> h = h_from_x(sc, W);
        std::vector<double> hfull(h.size() + 1, 1.0);
        std::copy(h.begin(), h.end(), hfull.begin() + 1);
        if (n >= 3 && n <= 5) {
            f2 = d_formula(n, hfull);
        } else {
            f2 = discriminant(reduced_poly(sc, n, W));
        }
    } else if (spec.family == FlowFamily::diagonal) {
        const double W = X[n - 1];
        std::vector<double> xv(n - 1);
        for (int j = 0; j < n - 1; ++j) xv[j] = spec.hamiltonians[j](X);
        // alpha_j = 2(x_j - x_{j+1} + ... -(-1)^{n-j} x_{n-1})
        f2 = 1.0;
        for (int j = 1; j <= n - 1; ++j) {
            double alpha = 0.0, s = 2.0;
            for (int k = j; k <= n - 1; ++k) {
                alpha += s * xv[k - 1];
                s = -s;
            }
            const double sign = ((n - j) % 2 == 0) ? 1.0 : -1.0;
            f2 *= alpha + sign * W * W;
        }
    } else {
        throw std::invalid_argument(
            "scalar_reduce: supported for the symmetric (free x_n) and diagonal families");
    }

    const double f = (rhs_w < 0.0 ? -1.0 : 1.0) * std::sqrt(std::max(f2, 0.0));
    const double tol = 1e-6 * std::max(1.0, std::fabs(rhs_w));
    if (std::fabs(f - rhs_w) > tol)
        throw std::runtime_error("scalar_reduce: branch mismatch against nambu_rhs");
    return f;
}

} // namespace nambu
