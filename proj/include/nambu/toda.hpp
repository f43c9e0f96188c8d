#pragma once

#include <array>
#include <functional>
#include <vector>

#include "nambu/linalg.hpp"

namespace nambu::toda {

/// Cyclic variables (i_1..i_m, v_1..v_m) of the discrete-time m-point
/// Toda lattice, with the product constraint v_1...v_m = c.
struct TodaState {
    int m = 0;
    std::vector<double> i;
    std::vector<double> v;
    double c = 1.0;

    TodaState() = default;
    TodaState(std::vector<double> i_, std::vector<double> v_);
    void validate() const;
};

/// The structured lattice matrix: diagonal i_j + v_j, superdiagonal 1,
/// subdiagonal i_{j+1} v_j, corners M(1,m) = i_1 v_m and M(m,1) = 1.
Mat build_M(const TodaState& s);

/// Upper bidiagonal factor: diagonal i_j, superdiagonal 1, corner U(m,1) = 1.
Mat build_U(const TodaState& s);

/// One map application M -> U^{-1} M U, computed as the linear solve
/// U M' = M U (U is never inverted explicitly). Throws on singular U.
Mat step(const Mat& M, const Mat& U);

struct SpectralInvariants {
    std::vector<double> x;  // x_k = sum of k x k principal minors of M
};

/// Signed characteristic-polynomial coefficients via the
/// Faddeev-LeVerrier recursion.
SpectralInvariants invariants_from_matrix(const Mat& M);

/// The printed closed forms for the 3-point lattice:
///   x1 = sum i + sum v
///   x2 = i-pairs + (i1 v2 + i2 v3 + i3 v1) + v-pairs
///   x3 = (1 + i1 i2 i3)(1 + v1 v2 v3)
/// Only m = 3 is supported.
SpectralInvariants invariants_from_state(const TodaState& s);

using GaugeCondition = std::function<double(const TodaState&)>;

/// Damped Newton solve for the six unknowns (i, v) of the m = 3 lattice
/// from: the three invariant equations x_k(i,v) = e_k(lam), the product
/// constraint v1 v2 v3 = c, and two caller-supplied gauge conditions.
/// X must sit on the matching level set (e1(X) = e1(lam), e2(X) = e2(lam)
/// to 1e-8); it closes no equation itself - the printed relations leave a
/// two-parameter family and the gauge picks the member.
TodaState reconstruct(const std::array<double, 3>& lam, double c,
                      const std::array<double, 3>& X,
                      const std::array<GaugeCondition, 2>& gauge,
                      const TodaState& guess);

/// Residuals of the structured form after a step: deviations of the
/// superdiagonal and corner M(m,1) from 1, and of the out-of-band entries
/// from 0.
double structural_residual(const Mat& M);

} // namespace nambu::toda
