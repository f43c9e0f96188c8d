#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "nambu/polycore.hpp"
#include "nambu/special.hpp"
#include "nambu/toda.hpp"

using namespace nambu;
using nambu::toda::TodaState;

namespace {

TodaState random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.5, 2.0);
    std::vector<double> iv(3), vv(3);
    for (auto& x : iv) x = uni(rng);
    for (auto& x : vv) x = uni(rng);
    return TodaState(std::move(iv), std::move(vv));
}

// Oracle: sum of k x k principal minors by direct enumeration (m = 3).
std::array<double, 3> principal_minor_sums(const Mat& M) {
    std::array<double, 3> x{};
    x[0] = M(0, 0) + M(1, 1) + M(2, 2);
    auto minor2 = [&](int a, int b) {
        return M(a, a) * M(b, b) - M(a, b) * M(b, a);
    };
    x[1] = minor2(0, 1) + minor2(0, 2) + minor2(1, 2);
    x[2] = M(0, 0) * minor2(1, 2) - M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
           M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
    return x;
}

// spectral constants of the state as a real 3-vector, when the spectrum
// is real; returns false otherwise
bool real_spectrum(const TodaState& s, std::array<double, 3>& lam) {
    const auto inv = toda::invariants_from_state(s);
    const UniPoly chi({-inv.x[2], inv.x[1], -inv.x[0], 1.0});
    const auto roots = cubic_roots(chi);
    for (int k = 0; k < 3; ++k) {
        if (std::fabs(roots[k].imag()) > 1e-9) return false;
        lam[k] = roots[k].real();
    }
    return true;
}

} // namespace

TEST_CASE("build_M entries") {
    const TodaState ones({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    const Mat M = toda::build_M(ones);
    const Mat expect(3, 3, {2, 1, 1, 1, 2, 1, 1, 1, 2});
    CHECK(M == expect);

    const TodaState s({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
    const Mat Ms = toda::build_M(s);
    CHECK(Ms(1, 0) == 2.0);   // i2 v1
    CHECK(Ms(2, 1) == 3.0);   // i3 v2
    CHECK(Ms(0, 2) == 1.0);   // i1 v3
    CHECK(Ms(2, 0) == 1.0);
    double trace = 0.0;
    for (int k = 0; k < 3; ++k) trace += Ms(k, k);
    CHECK(trace == doctest::Approx(1 + 2 + 3 + 3.0));
}

TEST_CASE("build_U entries and determinant identity") {
    const TodaState ones({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    const Mat U = toda::build_U(ones);
    CHECK(U == Mat(3, 3, {1, 1, 0, 0, 1, 1, 1, 0, 1}));
    CHECK(lu_det(U) == doctest::Approx(2.0));

    const TodaState twos({2.0, 2.0, 2.0}, {1.0, 1.0, 1.0});
    CHECK(lu_det(toda::build_U(twos)) == doctest::Approx(9.0));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const TodaState s = random_state(rng);
        const double det = lu_det(toda::build_U(s));
        const double expect = s.i[0] * s.i[1] * s.i[2] + 1.0;
        CHECK(std::fabs(det - expect) < 1e-12 * std::fabs(expect));
    }
}

TEST_CASE("step fixes polynomials in U and preserves the spectrum") {
    const TodaState s({1.3, 0.8, 1.6}, {0.9, 1.2, 1.1});
    const Mat U = toda::build_U(s);
    // M commuting with U: M = U^2 + 2U + 3I
    Mat M = U * U;
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) M(r, c) += 2.0 * U(r, c);
        M(r, r) += 3.0;
    }
    const Mat Mp = toda::step(M, U);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(Mp(r, c) == doctest::Approx(M(r, c)).epsilon(1e-12));

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const TodaState st = random_state(rng);
        const Mat M0 = toda::build_M(st);
        const Mat M1 = toda::step(M0, toda::build_U(st));
        const auto i0 = toda::invariants_from_matrix(M0);
        const auto i1 = toda::invariants_from_matrix(M1);
        for (int k = 0; k < 3; ++k)
            CHECK(std::fabs(i0.x[k] - i1.x[k]) < 1e-12 * std::max(1.0, std::fabs(i0.x[k])));
    }
}

TEST_CASE("invariants_from_matrix equals principal-minor sums") {
    const TodaState ones({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    const Mat M = toda::build_M(ones);
    const auto inv = toda::invariants_from_matrix(M);
    CHECK(inv.x[0] == doctest::Approx(6.0));
    CHECK(inv.x[2] == doctest::Approx(4.0));  // (1 + i1 i2 i3)(1 + v1 v2 v3) = 2 * 2

    Mat ident(3, 3);
    for (int k = 0; k < 3; ++k) ident(k, k) = 1.0;
    const auto ii = toda::invariants_from_matrix(ident);
    CHECK(ii.x[0] == doctest::Approx(3.0));
    CHECK(ii.x[1] == doctest::Approx(3.0));
    CHECK(ii.x[2] == doctest::Approx(1.0));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        Mat A(3, 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) A(r, c) = uni(rng);
        const auto got = toda::invariants_from_matrix(A);
        const auto oracle = principal_minor_sums(A);
        for (int k = 0; k < 3; ++k)
            CHECK(std::fabs(got.x[k] - oracle[k]) < 1e-12 * std::max(1.0, std::fabs(oracle[k])));
    }
}

TEST_CASE("invariants_from_state matches the matrix invariants") {
    const TodaState ones({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    const auto inv = toda::invariants_from_state(ones);
    CHECK(inv.x[0] == doctest::Approx(6.0));
    CHECK(inv.x[1] == doctest::Approx(9.0));
    CHECK(inv.x[2] == doctest::Approx(4.0));

    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        const TodaState s = random_state(rng);
        const auto a = toda::invariants_from_state(s);
        const auto b = toda::invariants_from_matrix(toda::build_M(s));
        for (int k = 0; k < 3; ++k) CHECK(std::fabs(a.x[k] - b.x[k]) < 1e-10);
    }

    // scaling v by lambda moves x3 as (1 + i1 i2 i3)(1 + lambda^3 v1 v2 v3)
    const TodaState base = random_state(rng);
    const double lam = 1.7;
    TodaState scaled = base;
    for (auto& v : scaled.v) v *= lam;
    scaled.c = scaled.v[0] * scaled.v[1] * scaled.v[2];
    const double ip = base.i[0] * base.i[1] * base.i[2];
    const double vp = base.v[0] * base.v[1] * base.v[2];
    CHECK(toda::invariants_from_state(scaled).x[2] ==
          doctest::Approx((1.0 + ip) * (1.0 + lam * lam * lam * vp)).epsilon(1e-13));

    TodaState m4;
    m4.m = 4;
    m4.i = {1, 1, 1, 1};
    m4.v = {1, 1, 1, 1};
    m4.c = 1.0;
    CHECK_THROWS_AS(toda::invariants_from_state(m4), std::invalid_argument);
}

TEST_CASE("invariants survive 100 map applications") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const TodaState s = random_state(rng);
        Mat M = toda::build_M(s);
        const Mat U = toda::build_U(s);
        const auto i0 = toda::invariants_from_matrix(M);
        double worst_struct = 0.0;
        for (int k = 0; k < 100; ++k) {
            M = toda::step(M, U);
            worst_struct = std::max(worst_struct, toda::structural_residual(M));
        }
        const auto i1 = toda::invariants_from_matrix(M);
        for (int k = 0; k < 3; ++k)
            CHECK(std::fabs(i1.x[k] - i0.x[k]) < 1e-8 * std::max(1.0, std::fabs(i0.x[k])));
        // the structured form survives conjugation (superdiagonal 1, corner 1)
        CHECK(worst_struct < 1e-6);
    }
}

TEST_CASE("continuum bridge: v = 2a turns a1 a2 a3 = 1/8 into c = 1") {
    const std::array<double, 3> a{0.5, 0.4, 1.0 / (8.0 * 0.5 * 0.4)};
    CHECK(8.0 * a[0] * a[1] * a[2] == doctest::Approx(1.0));
    const TodaState s({1.0, 1.0, 1.0}, {2 * a[0], 2 * a[1], 2 * a[2]});
    CHECK(s.c == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("reconstruct recovers a state from its invariants") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> bump(-0.01, 0.01);
    int done = 0;
    while (done < 25) {
        const TodaState truth = random_state(rng);
        std::array<double, 3> lam;
        if (!real_spectrum(truth, lam)) continue;
        const auto inv = toda::invariants_from_state(truth);
        if (inv.x[0] * inv.x[0] < 3.0 * inv.x[1]) continue;  // no real circle point
        ++done;

        const auto Xc = circle_solution(inv.x[0], inv.x[1], 0.0);
        const std::array<double, 3> X{Xc[0], Xc[1], Xc[2]};
        const double v1 = truth.v[0], v2 = truth.v[1];
        const std::array<toda::GaugeCondition, 2> gauge{
            [v1](const TodaState& s) { return s.v[0] - v1; },
            [v2](const TodaState& s) { return s.v[1] - v2; }};

        TodaState guess = truth;
        for (auto& z : guess.i) z += bump(rng);
        for (auto& z : guess.v) z += bump(rng);
        guess.c = guess.v[0] * guess.v[1] * guess.v[2];

        const TodaState got = toda::reconstruct(lam, truth.c, X, gauge, guess);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::fabs(got.i[k] - truth.i[k]) < 1e-9);
            CHECK(std::fabs(got.v[k] - truth.v[k]) < 1e-9);
        }
        // postcondition: every constraint equation within 1e-10
        const auto gi = toda::invariants_from_state(got);
        for (int k = 0; k < 3; ++k) {
            const std::vector<double> lv{lam[0], lam[1], lam[2]};
            const std::vector<double> e = elementary_symmetric(lv);
            CHECK(std::fabs(gi.x[k] - e[k]) < 1e-10 * std::max(1.0, std::fabs(e[k])));
        }
        CHECK(std::fabs(got.v[0] * got.v[1] * got.v[2] - truth.c) < 1e-10);
    }
}

TEST_CASE("reconstruct rejects an off-level-set X") {
    const TodaState truth({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    std::array<double, 3> lam{4.0, 1.0, 1.0};  // spectrum of the all-ones state
    const std::array<toda::GaugeCondition, 2> gauge{
        [](const TodaState& s) { return s.v[0] - 1.0; },
        [](const TodaState& s) { return s.v[1] - 1.0; }};
    const std::array<double, 3> bad{9.0, 9.0, 9.0};
    CHECK_THROWS_AS(toda::reconstruct(lam, 1.0, bad, gauge, truth), std::invalid_argument);
}

TEST_CASE("gauge-tracked reconstruction along a Nambu trajectory") {
    // anchor the sweep at a generic base state so the t = 0 system is
    // solved by construction, then track with continuation
    const TodaState base({1.2, 0.8, 1.1}, {0.9, 1.15, 1.0 / (0.9 * 1.15)});
    std::array<double, 3> lam;
    REQUIRE(real_spectrum(base, lam));
    const auto inv0 = toda::invariants_from_state(base);
    REQUIRE(inv0.x[0] * inv0.x[0] >= 3.0 * inv0.x[1]);

    TodaState guess = base;
    double drift = 0.0;
    for (double t = 0.0; t <= 2.0; t += 0.1) {
        const auto Xc = circle_solution(inv0.x[0], inv0.x[1], t);
        // a smooth two-parameter gauge sweep closing the system
        const double g1 = base.v[0] + 0.05 * std::sin(t);
        const double g2 = base.v[1] + 0.05 * (std::cos(t) - 1.0);
        const std::array<toda::GaugeCondition, 2> gauge{
            [g1](const TodaState& s) { return s.v[0] - g1; },
            [g2](const TodaState& s) { return s.v[1] - g2; }};
        const TodaState st =
            toda::reconstruct(lam, base.c, {Xc[0], Xc[1], Xc[2]}, gauge, guess);
        const auto inv = toda::invariants_from_state(st);
        for (int k = 0; k < 3; ++k) drift = std::max(drift, std::fabs(inv.x[k] - inv0.x[k]));
        guess = st;  // continuation
    }
    CHECK(drift < 1e-8);
}
