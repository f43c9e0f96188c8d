#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nambu/integrate.hpp"
#include "nambu/special.hpp"

using namespace nambu;

namespace {

SymConstants free_n_constants(int n, std::vector<double> fixed) {
    fixed.push_back(0.0);
    return SymConstants(n, fixed, n);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
    return m;
}

} // namespace

TEST_CASE("constant-field n=2 flow lands exactly") {
    const FlowSpec spec = symmetric_flow(2, free_n_constants(2, {1.0}));
    const Trajectory traj = integrate(spec, std::vector<double>{0.0, 1.0}, {0.0, 1.0});
    REQUIRE(traj.complete);
    CHECK(traj.samples.back().X[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(traj.samples.back().X[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(traj.samples.size() == 512);
    for (std::size_t k = 1; k < traj.samples.size(); ++k)
        CHECK(traj.samples[k].t > traj.samples[k - 1].t);
}

TEST_CASE("n=3 symmetric flow is periodic with period 2 pi / sqrt(3)") {
    const FlowSpec spec = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.0);
    const std::vector<double> X0(c0.begin(), c0.end());
    const double period = 2.0 * std::numbers::pi / std::sqrt(3.0);
    const Trajectory traj = integrate(spec, X0, {0.0, period});
    REQUIRE(traj.complete);
    CHECK(max_abs_diff(traj.samples.back().X, X0) < 1e-8);
}

TEST_CASE("diagonal flow matches the Jacobi closed form pointwise") {
    const FlowSpec spec = diagonal_flow(3, std::vector<double>{2.0, 1.0});
    const auto d0 = diagonal_solution_n3(2.0, 1.0, 0.0);
    const Trajectory traj =
        integrate(spec, std::vector<double>(d0.begin(), d0.end()), {0.0, 5.0});
    REQUIRE(traj.complete);
    double worst = 0.0;
    for (const auto& s : traj.samples) {
        const auto closed = diagonal_solution_n3(2.0, 1.0, s.t);
        worst = std::max(worst, max_abs_diff(s.X, closed));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("conservation drift stays tiny at default tolerances") {
    const FlowSpec spec = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.0);
    const Trajectory traj =
        integrate(spec, std::vector<double>(c0.begin(), c0.end()), {0.0, 10.0});
    REQUIRE(traj.complete);
    const DriftStats st = conservation_report(traj, spec);
    CHECK(st.overall_max < 1e-8);
    CHECK(st.max_abs.size() == 2);
    CHECK(traj.drift == doctest::Approx(st.overall_max).epsilon(1e-9));

    // loose tolerances must not beat the tight ones (monotone sanity)
    IntegratorConfig loose;
    loose.rel_tol = 1e-3;
    loose.abs_tol = 1e-5;
    const Trajectory tl =
        integrate(spec, std::vector<double>(c0.begin(), c0.end()), {0.0, 10.0}, loose);
    const DriftStats sl = conservation_report(tl, spec);
    CHECK(sl.overall_max > st.overall_max);
}

TEST_CASE("drift bound holds for all three built-in n=3 families") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uni(0.5, 1.5);

    const FlowSpec sym = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.0);
    CHECK(conservation_report(
              integrate(sym, std::vector<double>(c0.begin(), c0.end()), {0.0, 10.0}), sym)
              .overall_max < 1e-8);

    const FlowSpec diag = diagonal_flow(3, std::vector<double>{2.0, 1.0});
    const auto d0 = diagonal_solution_n3(2.0, 1.0, 0.0);
    CHECK(conservation_report(
              integrate(diag, std::vector<double>(d0.begin(), d0.end()), {0.0, 10.0}), diag)
              .overall_max < 1e-8);

    const FlowSpec nahm = quadratic_flow({3, {1.0, -1.0, 0.0, 0.0, 1.0, -1.0}});
    std::vector<double> X0(3);
    for (auto& v : X0) v = uni(rng);
    CHECK(conservation_report(integrate(nahm, X0, {0.0, 10.0}), nahm).overall_max < 1e-8);
}

TEST_CASE("self-convergence under tightened tolerances") {
    const FlowSpec spec = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.0);
    const std::vector<double> X0(c0.begin(), c0.end());

    IntegratorConfig ref_cfg;
    ref_cfg.rel_tol = 1e-13;
    ref_cfg.abs_tol = 1e-15;
    ref_cfg.samples = 2;
    const std::vector<double> ref = integrate(spec, X0, {0.0, 4.0}, ref_cfg).samples.back().X;

    auto endpoint_err = [&](double rel, double abs) {
        IntegratorConfig cfg;
        cfg.rel_tol = rel;
        cfg.abs_tol = abs;
        cfg.samples = 2;
        return max_abs_diff(integrate(spec, X0, {0.0, 4.0}, cfg).samples.back().X, ref);
    };
    const double coarse = endpoint_err(1e-6, 1e-8);
    const double fine = endpoint_err(1e-8, 1e-10);
    CHECK(fine * 4.0 <= coarse);
}

TEST_CASE("time reversal returns to the start") {
    const FlowSpec spec = diagonal_flow(3, std::vector<double>{2.0, 1.0});
    const auto d0 = diagonal_solution_n3(2.0, 1.0, 0.0);
    const std::vector<double> X0(d0.begin(), d0.end());
    const Trajectory fwd = integrate(spec, X0, {0.0, 3.0});
    const Trajectory bwd = integrate(spec, fwd.samples.back().X, {3.0, 0.0});
    REQUIRE(bwd.complete);
    CHECK(max_abs_diff(bwd.samples.back().X, X0) < 1e-7);
}

TEST_CASE("step budget exhaustion flags a partial trajectory") {
    const FlowSpec spec = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.0);
    IntegratorConfig cfg;
    cfg.max_steps = 4;
    const Trajectory traj =
        integrate(spec, std::vector<double>(c0.begin(), c0.end()), {0.0, 10.0}, cfg);
    CHECK_FALSE(traj.complete);
    CHECK(traj.error == "max_steps exceeded");
    CHECK(!traj.samples.empty());
}

TEST_CASE("volume_check: the (x, t) -> X map has unit Jacobian") {
    const FlowSpec sym = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.0);
    const State seed{0.0, {c0.begin(), c0.end()}};
    const std::vector<double> xc{3.0, 2.0};

    CHECK(volume_check(sym, xc, 0.0, seed) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(volume_check(sym, xc, 0.7, seed) == doctest::Approx(1.0).epsilon(1e-5));

    const FlowSpec diag = diagonal_flow(3, std::vector<double>{2.0, 1.0});
    const auto d0 = diagonal_solution_n3(2.0, 1.0, 0.1);
    const State dseed{0.0, {d0.begin(), d0.end()}};
    CHECK(volume_check(diag, std::vector<double>{2.0, 1.0}, 0.5, dseed) ==
          doctest::Approx(1.0).epsilon(1e-5));

    // unsolvable perturbation: x1^2 < 3 x2 has no real section nearby
    CHECK_THROWS_AS(volume_check(sym, std::vector<double>{1e6, 2.0}, 0.1, seed),
                    std::runtime_error);
}

TEST_CASE("scalar_reduce agrees with the bracket and the discriminant") {
    const FlowSpec sym = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.0);
    const std::vector<double> X(c0.begin(), c0.end());
    const double f = scalar_reduce(sym, X);
    CHECK(f == doctest::Approx(X[0] - X[1]).epsilon(1e-9));

    SymConstants sc = free_n_constants(3, {3.0, 2.0});
    const UniPoly D = discriminant_in_W(sc, 3);
    CHECK(f * f == doctest::Approx(D(X[2])).epsilon(1e-9));

    // repeated root: a turning point with F = 0 and D = 0
    const std::vector<double> Xr{1.0, 1.0, 0.7};
    CHECK(scalar_reduce(sym, Xr) == doctest::Approx(0.0).epsilon(0).scale(1e-12));
    std::vector<double> xr(3, 0.0);
    for (int j = 0; j < 2; ++j) xr[j] = sym.hamiltonians[j](Xr);
    SymConstants scr(3, xr, 3);
    CHECK(discriminant(reduced_poly(scr, 3, Xr[2])) ==
          doctest::Approx(0.0).epsilon(0).scale(1e-12));

    // diagonal family at the Jacobi starting point
    const FlowSpec diag = diagonal_flow(3, std::vector<double>{2.0, 1.0});
    const std::vector<double> Xd{std::sqrt(2.0), std::sqrt(2.0), 0.0};
    CHECK(scalar_reduce(diag, Xd) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("|F|^2 = D(W) along a symmetric trajectory") {
    const FlowSpec sym = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.3);
    const Trajectory traj =
        integrate(sym, std::vector<double>(c0.begin(), c0.end()), {0.0, 5.0});
    SymConstants sc = free_n_constants(3, {3.0, 2.0});
    const UniPoly D = discriminant_in_W(sc, 3);
    double dscale = 0.0;
    for (const auto& s : traj.samples) dscale = std::max(dscale, std::fabs(D(s.X[2])));
    int checked = 0;
    for (const auto& s : traj.samples) {
        const double dw = D(s.X[2]);
        if (std::fabs(dw) < 1e-3 * dscale) continue;  // turning-point neighbourhood
        const double f = nambu_rhs(sym, s.X)[2];
        CHECK(std::fabs(f * f - dw) < 1e-7 * std::fabs(dw));
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("reparametrize verifies Proposition-2 behaviour") {
    const FlowSpec sym = symmetric_flow(3, free_n_constants(3, {3.0, 2.0}));
    const auto c0 = circle_solution(3.0, 2.0, 0.15);
    const Trajectory traj =
        integrate(sym, std::vector<double>(c0.begin(), c0.end()), {0.0, 0.5});
    REQUIRE(traj.complete);

    // the paper's det J is the inverse-map Jacobian 1 / det d(x)/d(X)
    auto detJ = [&](std::span<const double> X) {
        return 1.0 / map_jacobian_det(sym.constraint_map, X);
    };
    const ReparamReport rep = reparametrize(traj, sym.constraint_map[2], detJ);
    CHECK(rep.max_constant_drift < 1e-10);
    CHECK(rep.max_rate_residual < 1e-4);  // first-order finite differences on the grid
    // x_n = X1 X2 X3 is monotone while det J keeps its sign
    for (std::size_t k = 1; k < rep.xn.size(); ++k) CHECK(rep.xn[k] > rep.xn[k - 1]);
}

TEST_CASE("unit-Jacobian custom map gives x_n = t + const") {
    // f_j = X_j for j < n, f_n = X_n: det J = 1, flow dX/dt = (0, ..., 1)
    const int n = 3;
    FlowSpec spec;
    spec.n = n;
    spec.family = FlowFamily::custom;
    spec.free_index = n;
    for (int j = 0; j < n; ++j) {
        if (j < n - 1) spec.hamiltonians.push_back(MultiPoly::variable(n, j));
        spec.constraint_map.push_back(MultiPoly::variable(n, j));
    }
    const Trajectory traj = integrate(spec, std::vector<double>{0.3, -0.2, 0.9}, {0.0, 2.0});
    const ReparamReport rep = reparametrize(
        traj, spec.constraint_map[n - 1],
        [](std::span<const double>) { return 1.0; });
    CHECK(rep.max_rate_residual < 1e-9);
    for (std::size_t k = 0; k < traj.samples.size(); ++k)
        CHECK(rep.xn[k] == doctest::Approx(0.9 + traj.samples[k].t).epsilon(1e-10));
}
