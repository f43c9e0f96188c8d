#pragma once

#include <array>
#include <vector>

#include "nambu/polycore.hpp"
#include "nambu/unipoly.hpp"

namespace nambu {

struct JacobiTriple {
    double sn, cn, dn;
};

/// Jacobi elliptic functions at real argument u and parameter m = k^2,
/// by the descending-Landen/AGM scheme. Negative m goes through the
/// standard negative-parameter transformation; m = 0 and m = 1 are the
/// circular and hyperbolic limits. m > 1 is rejected.
JacobiTriple jacobi(double u, double m);

/// The n=3 symmetric-family circle solution (three cosines at phases
/// 0, -2pi/3, +2pi/3). Requires x1^2 >= 3 x2.
std::array<double, 3> circle_solution(double x1, double x2, double t);

/// The n=3 diagonal-family closed form X = (sqrt(2(x1-x2)) dn,
/// sqrt(2 x2) cn, sqrt(2 x2) sn) with u = sqrt(2(x1-x2)) t and the real
/// negative parameter m = x2/(x2-x1). Requires x1 > x2 > 0.
std::array<double, 3> diagonal_solution_n3(double x1, double x2, double t);

/// The n=3 elliptic parametrization with x1, x3 fixed and x2 free.
/// alpha >= beta >= gamma are the roots of x^3 - 2 x1 x^2 + x1^2 x - 4 x3;
/// u = (1/2) sqrt((alpha-gamma) beta) t and k^2 = alpha(beta-gamma) /
/// (beta(alpha-gamma)). X2 and X3 carry (x1 - X1)/2 plus/minus the printed
/// cn dn / sn term; the printed "x1 - X1" by itself breaks e1 = x1.
/// Verifies e1 and e3 to 1e-8 away from the sn = 0 poles.
std::array<double, 3> elliptic_solution_x2_free(double x1, double x3, double t);

/// Scalar motion (dW/dt)^2 = D(W) started at W0 with the given velocity
/// branch. D(W0) must be >= 0.
struct HyperEllipticProblem {
    UniPoly D;
    double W0 = 0.0;
    int branch_sign = +1;
};

/// t(W) = branch_sign * int_{W0}^{W} dw / sqrt(D(w)). Simple roots of D at
/// (or next to) either endpoint are removed analytically: the root is
/// refined, D is deflated by it, and the substitution w = r +- s^2 leaves
/// a regular integrand 2/sqrt(|Q|). A root strictly inside the path or a
/// double root at an endpoint throws. Absolute accuracy 1e-10.
double hyperelliptic_time(const HyperEllipticProblem& prob, double W);

struct TurningPoint {
    double t;
    double W;
};

struct InversionResult {
    double W = 0.0;
    int final_branch = +1;
    std::vector<TurningPoint> turnings;
};

/// Solves dW/dt = branch * sqrt(D(W)) for W(t) by propagating the smooth
/// second-order form (W' = V, V' = D'(W)/2), which carries the motion
/// through simple turning points where the branch sign flips. Turning
/// times are located by sign changes of V, refined by bisection plus one
/// Newton step. Stalls at a double root of D are detected and thrown.
InversionResult invert_hyperelliptic(const HyperEllipticProblem& prob, double t);

/// Quadrature of the printed free-x_i time integrand
///   t = (-1)^(n-i) int dW / (W^n sqrt(D_{n-1,i}(W))),
/// with D_{n-1,i} sampled pointwise from the h' coefficients. The path
/// must avoid W = 0 and roots of D.
double free_xi_time(int n, int i, const SymConstants& x, double W0, double W);

struct FreeXiReport {
    double t_printed;      // the paper's W^n integrand
    double t_flow;         // the integrand implied by dW/dt = (-W)^(n-i) sqrt(D)
    double discrepancy;    // |t_printed - t_flow|
};

/// Evaluates both the printed integral and the one implied by the flow
/// equation so the mismatch in the W-power can be reported rather than
/// hidden.
FreeXiReport free_xi_consistency(int n, int i, const SymConstants& x, double W0, double W);

} // namespace nambu
