#include "nambu/special.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nambu/rk45.hpp"

namespace nambu {

namespace {

JacobiTriple jacobi_agm(double u, double m) {
    // A&S 16.4: ascending sequence of arithmetic-geometric means.
    constexpr int kMaxIter = 24;
    double a[kMaxIter + 1], c[kMaxIter + 1];
    a[0] = 1.0;
    c[0] = std::sqrt(m);
    double b = std::sqrt(1.0 - m);
    int N = 0;
    while (std::fabs(c[N]) > 4e-18 * a[N] && N < kMaxIter) {
        const double an = 0.5 * (a[N] + b);
        const double cn = 0.5 * (a[N] - b);
        b = std::sqrt(a[N] * b);
        ++N;
        a[N] = an;
        c[N] = cn;
    }
    double phi = std::ldexp(a[N] * u, N);
    double phi_next = phi;
    for (int i = N; i >= 1; --i) {
        phi_next = phi;
        const double s = std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0);
        phi = 0.5 * (phi + std::asin(s));
    }
    JacobiTriple j;
    j.sn = std::sin(phi);
    j.cn = std::cos(phi);
    j.dn = (N >= 1) ? j.cn / std::cos(phi_next - phi)
                    : std::sqrt(1.0 - m * j.sn * j.sn);
    return j;
}

} // namespace

JacobiTriple jacobi(double u, double m) {
    if (m > 1.0)
        throw std::invalid_argument("jacobi: m > 1; use reciprocal-parameter transform externally");
    if (m == 0.0) return {std::sin(u), std::cos(u), 1.0};
    if (m == 1.0) {
        const double sech = 1.0 / std::cosh(u);
        return {std::tanh(u), sech, sech};
    }
    if (m < 0.0) {
        const double mu = -m / (1.0 - m);
        const double f = std::sqrt(1.0 - m);
        const JacobiTriple b = jacobi_agm(u * f, mu);
        return {b.sn / (f * b.dn), b.cn / b.dn, 1.0 / b.dn};
    }
    return jacobi_agm(u, m);
}

std::array<double, 3> circle_solution(double x1, double x2, double t) {
    const double rad2 = x1 * x1 - 3.0 * x2;
    if (rad2 < 0.0) throw std::invalid_argument("circle_solution: no real circle (x1^2 < 3 x2)");
    const double r = 2.0 * std::sqrt(rad2);
    const double th = std::sqrt(3.0) * t;
    constexpr double k2pi3 = 2.0 * std::numbers::pi / 3.0;
    return {(x1 + r * std::cos(th)) / 3.0,
            (x1 + r * std::cos(th - k2pi3)) / 3.0,
            (x1 + r * std::cos(th + k2pi3)) / 3.0};
}

std::array<double, 3> diagonal_solution_n3(double x1, double x2, double t) {
    if (!(x1 > x2 && x2 > 0.0))
        throw std::invalid_argument("diagonal_solution_n3: requires x1 > x2 > 0");
    const double m = x2 / (x2 - x1);  // negative
    const double s = std::sqrt(2.0 * (x1 - x2));
    const JacobiTriple j = jacobi(s * t, m);
    return {s * j.dn, std::sqrt(2.0 * x2) * j.cn, std::sqrt(2.0 * x2) * j.sn};
}

std::array<double, 3> elliptic_solution_x2_free(double x1, double x3, double t) {
    const UniPoly cubic({-4.0 * x3, x1 * x1, -2.0 * x1, 1.0});
    const auto roots = cubic_roots(cubic);
    double scale = 1.0;
    for (const auto& z : roots) scale = std::max(scale, std::abs(z));
    std::array<double, 3> re;
    for (int k = 0; k < 3; ++k) {
        if (std::fabs(roots[k].imag()) > 1e-9 * scale)
            throw std::runtime_error("elliptic_solution_x2_free: cubic has complex roots");
        re[k] = roots[k].real();
    }
    std::sort(re.begin(), re.end(), std::greater<>());
    const double al = re[0], be = re[1], ga = re[2];

    if (be < 0.0 || (al - ga) * be < 0.0)
        throw std::runtime_error("elliptic_solution_x2_free: negative (alpha-gamma) beta, no real parametrization");
    const double denom = be * (al - ga);
    if (denom == 0.0)
        throw std::runtime_error("elliptic_solution_x2_free: degenerate root configuration");
    const double m = al * (be - ga) / denom;
    if (m >= 1.0 - 1e-12)
        throw std::runtime_error("elliptic_solution_x2_free: modulus k >= 1 for these (x1, x3)");

    const double u = 0.5 * std::sqrt((al - ga) * be) * t;
    const JacobiTriple j = jacobi(u, m);
    const double den = ga - al * j.cn * j.cn;
    const double X1 = al * ga * j.sn * j.sn / den;
    const double pm = std::pow(al - ga, 1.5) * std::sqrt(be) * j.cn * j.dn /
                      (2.0 * den * j.sn);
    const std::array<double, 3> X{X1, (x1 - X1) / 2.0 + pm, (x1 - X1) / 2.0 - pm};

    // constraint check, skipped close to the sn = 0 poles
    if (std::fabs(j.sn) > 1e-5 && std::fabs(den) > 1e-8 * std::fabs(al)) {
        const double e1 = X[0] + X[1] + X[2];
        const double e3 = X[0] * X[1] * X[2];
        const double ref = std::max({1.0, std::fabs(x1), std::fabs(x3)});
        if (std::fabs(e1 - x1) > 1e-8 * ref || std::fabs(e3 - x3) > 1e-8 * ref)
            throw std::runtime_error("elliptic_solution_x2_free: constraint residual above tolerance");
    }
    return X;
}

namespace {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 abscissae).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct Panel {
    double a, b;
    int depth;
};

double adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                     double abs_tol) {
    if (a == b) return 0.0;
    std::vector<Panel> stack{{a, b, 0}};
    const double total_len = std::fabs(b - a);
    double sum = 0.0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.a + p.b), half = 0.5 * (p.b - p.a);
        const double fc = f(mid);
        double resg = kWg[3] * fc, resk = kWgk[7] * fc;
        for (int j = 0; j < 7; ++j) {
            const double dx = half * kXgk[j];
            const double fsum = f(mid - dx) + f(mid + dx);
            resk += kWgk[j] * fsum;
            if (j % 2 == 1) resg += kWg[j / 2] * fsum;
        }
        resk *= half;
        resg *= half;
        const double err = std::fabs(resk - resg);
        const double budget = abs_tol * std::max(std::fabs(half) / total_len, 1e-14);
        if (err <= budget || p.depth >= 48) {
            if (p.depth >= 48 && err > 64.0 * budget)
                throw std::runtime_error("adaptive quadrature failed to converge");
            sum += resk;
        } else {
            stack.push_back({p.a, mid, p.depth + 1});
            stack.push_back({mid, p.b, p.depth + 1});
        }
    }
    return sum;
}

double poly_scale_at(const UniPoly& p, double w) {
    double s = 0.0, pw = 1.0;
    for (double c : p.coeffs) {
        s += std::fabs(c * pw);
        pw *= w;
    }
    return std::max(s, 1e-300);
}

// Newton refinement of a root of D starting at w; returns NaN if it
// wanders away or fails to converge.
double refine_root(const UniPoly& D, const UniPoly& Dp, double w, double radius) {
    double r = w;
    for (int it = 0; it < 60; ++it) {
        const double f = D(r), df = Dp(r);
        if (df == 0.0) return std::numeric_limits<double>::quiet_NaN();
        const double step = f / df;
        r -= step;
        if (std::fabs(r - w) > radius) return std::numeric_limits<double>::quiet_NaN();
        if (std::fabs(step) <= 1e-15 * std::max(1.0, std::fabs(r))) return r;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Synthetic division: D(w) = (w - r) Q(w) + remainder.
UniPoly deflate(const UniPoly& D, double r) {
    const int d = D.degree();
    std::vector<double> q(d, 0.0);
    double carry = D.coeffs[d];
    for (int k = d - 1; k >= 0; --k) {
        q[k] = carry;
        carry = D.coeffs[k] + r * carry;
    }
    return UniPoly(std::move(q));
}

} // namespace

double hyperelliptic_time(const HyperEllipticProblem& prob, double W) {
    const UniPoly& D = prob.D;
    if (D.degree() < 1) throw std::invalid_argument("hyperelliptic_time: D must be non-constant");
    const UniPoly Dp = D.derivative();
    const double a = prob.W0, b = W;
    if (a == b) return 0.0;
    const double span = std::fabs(b - a);

    // detect a simple root of D at (or adjacent to) an endpoint
    auto endpoint_root = [&](double e) -> double {
        if (std::fabs(D(e)) > 1e-6 * poly_scale_at(D, e))
            return std::numeric_limits<double>::quiet_NaN();
        const double r = refine_root(D, Dp, e, 0.25 * span + 1e-6);
        if (!std::isfinite(r)) return std::numeric_limits<double>::quiet_NaN();
        if (std::fabs(Dp(r)) < 1e-9 * poly_scale_at(Dp, r))
            throw std::runtime_error("hyperelliptic_time: non-integrable singularity (double root)");
        return r;
    };
    const double ra = endpoint_root(a);
    const double rb = endpoint_root(b);

    // signed integral over one leg anchored at `outer`, which may carry a
    // refined root; `inner` is strictly inside the D > 0 region.
    auto leg = [&](double outer, double root, double inner) -> double {
        const double dir = (inner >= outer) ? 1.0 : -1.0;
        if (std::isfinite(root)) {
            const UniPoly Q = deflate(D, root);
            auto piece = [&](double from_s2) {  // int_root^{root+dir*from_s2}
                if (from_s2 < 0.0)
                    throw std::runtime_error("hyperelliptic_time: path crosses a root of D");
                const double smax = std::sqrt(from_s2);
                return adaptive_gk15(
                    [&](double s) {
                        const double qv = dir * Q(root + dir * s * s);
                        if (qv <= 0.0)
                            throw std::runtime_error("hyperelliptic_time: D negative on the path");
                        return 2.0 / std::sqrt(qv);
                    },
                    0.0, smax, 1e-11);
            };
            double v = piece(dir * (inner - root));
            if ((outer - root) * dir > 0.0) v -= piece(dir * (outer - root));
            else if ((outer - root) * dir < 0.0)
                throw std::runtime_error("hyperelliptic_time: path crosses a root of D");
            return dir * v;
        }
        // regular endpoint: plain sqrt substitution
        const double smax = std::sqrt(std::fabs(inner - outer));
        const double v = adaptive_gk15(
            [&](double s) {
                const double dv = D(outer + dir * s * s);
                if (dv <= 0.0)
                    throw std::runtime_error("hyperelliptic_time: D negative on the path");
                return 2.0 / std::sqrt(dv) * s;
            },
            0.0, smax, 1e-11);
        return dir * v;
    };

    const double mid = 0.5 * (a + b);
    const double integral = leg(a, ra, mid) + (-(leg(b, rb, mid)));
    return prob.branch_sign * integral;
}

InversionResult invert_hyperelliptic(const HyperEllipticProblem& prob, double t) {
    const UniPoly& D = prob.D;
    const UniPoly Dp = D.derivative();
    const double d0 = D(prob.W0);
    if (d0 < -1e-12 * poly_scale_at(D, prob.W0))
        throw std::invalid_argument("invert_hyperelliptic: D(W0) < 0");

    InversionResult out;
    out.final_branch = prob.branch_sign;
    if (t == 0.0) {
        out.W = prob.W0;
        return out;
    }

    const double v0 = prob.branch_sign * std::sqrt(std::max(d0, 0.0));
    RkOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    Dopri5 rk(
        [&](double, std::span<const double> y, std::span<double> dy) {
            dy[0] = y[1];
            dy[1] = 0.5 * Dp(y[0]);
        },
        0.0, {prob.W0, v0}, t, opt);

    double v_scale = std::max(std::fabs(v0), 1e-3);
    std::vector<double> buf(2);
    double v_prev = v0;
    int last_sign = (v0 > 0.0) - (v0 < 0.0);
    while (rk.step()) {
        const double v_cur = rk.y()[1];
        v_scale = std::max(v_scale, std::fabs(v_cur));
        const int cur_sign = (v_cur > 0.0) - (v_cur < 0.0);
        if (cur_sign != 0 && last_sign != 0 && cur_sign != last_sign) {
            // bisection on the dense interpolant, then one Newton step
            double lo = rk.t_prev(), hi = rk.t();
            for (int it = 0; it < 60; ++it) {
                const double midt = 0.5 * (lo + hi);
                rk.eval_dense(midt, buf);
                if (buf[1] * v_prev > 0.0) lo = midt; else hi = midt;
            }
            double tc = 0.5 * (lo + hi);
            rk.eval_dense(tc, buf);
            const double vdot = 0.5 * Dp(buf[0]);
            if (vdot != 0.0) tc -= buf[1] / vdot;
            tc = std::clamp(tc, rk.t_prev(), rk.t());
            rk.eval_dense(tc, buf);
            out.turnings.push_back({tc, buf[0]});
            out.final_branch = -out.final_branch;
        }
        if (std::fabs(v_cur) < 1e-10 * v_scale &&
            std::fabs(Dp(rk.y()[0])) < 1e-10 * poly_scale_at(Dp, rk.y()[0]) &&
            std::fabs(D(rk.y()[0])) < 1e-10 * poly_scale_at(D, rk.y()[0]))
            throw std::runtime_error("invert_hyperelliptic: stall at a double root of D");
        v_prev = v_cur;
        if (cur_sign != 0) last_sign = cur_sign;
    }
    if (rk.failed())
        throw std::runtime_error("invert_hyperelliptic: " + rk.error());
    out.W = rk.y()[0];
    return out;
}

namespace {

double free_xi_quadrature(int n, int i, const SymConstants& x, double W0, double W,
                          bool printed_power) {
    if (W0 == W) return 0.0;
    if ((W0 <= 0.0 && W >= 0.0) || (W0 >= 0.0 && W <= 0.0))
        throw std::invalid_argument("free_xi_time: path crosses W = 0");
    auto integrand = [&](double w) {
        const double d = discriminant(reduced_poly(x, i, w));
        if (d <= 0.0)
            throw std::runtime_error("free_xi_time: D_{n-1,i} not positive on the path");
        double denom;
        if (printed_power) {
            denom = std::pow(w, n) * std::sqrt(d);
        } else {
            denom = std::pow(-w, n - i) * std::sqrt(d);
        }
        if (denom == 0.0) throw std::runtime_error("free_xi_time: vanishing denominator");
        return 1.0 / denom;
    };
    const double v = adaptive_gk15(integrand, W0, W, 1e-11);
    const double sign = printed_power ? (((n - i) % 2 == 0) ? 1.0 : -1.0) : 1.0;
    return sign * v;
}

} // namespace

double free_xi_time(int n, int i, const SymConstants& x, double W0, double W) {
    return free_xi_quadrature(n, i, x, W0, W, true);
}

FreeXiReport free_xi_consistency(int n, int i, const SymConstants& x, double W0, double W) {
    FreeXiReport r{};
    r.t_printed = free_xi_quadrature(n, i, x, W0, W, true);
    r.t_flow = free_xi_quadrature(n, i, x, W0, W, false);
    r.discrepancy = std::fabs(r.t_printed - r.t_flow);
    return r;
}

} // namespace nambu
