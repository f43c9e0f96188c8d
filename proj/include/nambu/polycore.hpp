#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "nambu/unipoly.hpp"

namespace nambu {

/// The constants x_1..x_n of a rigid-box constraint set, with exactly one
/// entry left free. The free entry's stored value is ignored.
struct SymConstants {
    int n = 0;
    std::vector<double> x;  // size n
    int free_index = 0;     // 1-based

    SymConstants() = default;
    SymConstants(int n_, std::vector<double> x_, int free_index_);
};

/// e_1..e_n of the given values, by incrementally multiplying out the
/// factors (1 + v_k z).
std::vector<double> elementary_symmetric(std::span<const double> values);

/// Determinant of the Sylvester matrix of p and q, evaluated with
/// partial-pivoting elimination. Sign convention:
///   Res(p, q) = lc(p)^deg(q) * prod_i q(alpha_i)  over the roots alpha of p.
double resultant(const UniPoly& p, const UniPoly& q);

/// (-1)^(d(d-1)/2) Res(p, p') / lc(p). For a monic p of degree d this is
/// exactly the root product  prod_{k<l} (r_k - r_l)^2.
double discriminant(const UniPoly& p);

/// The explicit printed discriminant expansions D_2, D_3, D_4 in the
/// coefficients h_0..h_{n-1}; supported for n = 3, 4, 5 only.
double d_formula(int n, std::span<const double> h);

/// h_1..h_{n-1} with h_k = x_k - x_{k-1} W + ... + (-1)^k W^k (x_0 = 1).
/// Needs x_1..x_{n-1} fixed (the x_n slot is free).
std::vector<double> h_from_x(const SymConstants& x, double W);

/// Coefficients h'_1..h'_{n-1} of P_{n-1,i}(X) = prod_{j != i} (X - X_j)
/// as functions of W = X_i, using x_k = h'_k + W h'_{k-1} forward for
/// k < i and backward from h'_n = 0 for k >= i. Entries with k >= i pick
/// up negative powers of W, so W must be nonzero there.
std::vector<double> hprime_from_x(const SymConstants& x, int i, double W);

/// Builds P_{n-1}(X) (or P_{n-1,i} for free_index < n) at the given W and
/// returns it as a monic UniPoly in X.
UniPoly reduced_poly(const SymConstants& x, int free_index, double W);

/// D(W) as a polynomial of degree <= (n-1)(n-2), obtained by sampling the
/// discriminant of the reduced polynomial at Chebyshev nodes and Newton
/// interpolation. Three extra nodes guard the degree bound; a residual
/// above tolerance throws ("degree bound violated"). For free_index < n
/// the sampled function generally has a pole at W = 0 and is not a
/// polynomial at all, which this guard is designed to catch.
UniPoly discriminant_in_W(const SymConstants& x, int free_index);

/// All three roots of a real cubic: Cardano with the trigonometric branch
/// for three real roots, then one Newton polish step per root.
std::array<std::complex<double>, 3> cubic_roots(const UniPoly& p);

} // namespace nambu
