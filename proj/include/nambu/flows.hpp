#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nambu/multipoly.hpp"
#include "nambu/polycore.hpp"
#include "nambu/trajectory.hpp"

namespace nambu {

enum class FlowFamily { symmetric, diagonal, quadratic, custom };

/// The (n-1) x n coefficient matrix of a quadratic constraint family
/// x_j = (1/2) sum_k a_jk X_k^2.
struct ConstraintMatrix {
    int n = 0;                // number of columns
    std::vector<double> a;    // (n-1) x n, row-major

    double at(int row, int col) const { return a[row * n + col]; }
    /// Determinant of the (n-1)x(n-1) minor with column j (0-based) deleted.
    double minor_det(int j) const;
};

/// One Nambu flow: dimension, the n-1 polynomial Hamiltonians, and, when
/// the family provides one, the full constraint map f_1..f_n used for
/// Jacobian and volume checks.
struct FlowSpec {
    int n = 0;
    std::vector<MultiPoly> hamiltonians;   // exactly n-1
    FlowFamily family = FlowFamily::custom;
    int free_index = 0;                    // 1-based; which constraint is relaxed
    std::vector<double> constants;         // fixed x values (free slot ignored)
    std::vector<MultiPoly> constraint_map; // f_1..f_n, empty when unavailable
    ConstraintMatrix A;                    // quadratic family only
};

/// dX_j/dt = (-1)^(n-j) det of the Hamiltonian gradient matrix with
/// column j deleted (the Nambu bracket {H_1,...,H_{n-1}, X_j}).
std::vector<double> nambu_rhs(const FlowSpec& spec, std::span<const double> X);

/// Hamiltonians e_1..e_{n-1}, free hyper-volume x_n.
FlowSpec symmetric_flow(int n, const SymConstants& x);

/// Hamiltonians {e_j : j != i}; the X_i component of the bracket equals
/// the closed form (-W)^(n-i) prod_{k<l, k,l != i} (X_k - X_l).
FlowSpec symmetric_flow_free_i(int n, const SymConstants& x, int i);

/// Cyclic diagonal constraints x_j = (X_j^2 + X_{j+1}^2)/2, x_n relaxed.
/// `x` carries the fixed x_1..x_{n-1}.
FlowSpec diagonal_flow(int n, std::span<const double> x);

/// General quadratic family from an (n-1) x n coefficient matrix.
FlowSpec quadratic_flow(const ConstraintMatrix& A);

/// Determinant of the forward constraint Jacobian d(x)/d(X) at X.
/// If `near_singular` is given it is set when the determinant is tiny
/// relative to the matrix scale; the value is still returned.
double map_jacobian_det(const std::vector<MultiPoly>& f, std::span<const double> X,
                        bool* near_singular = nullptr);

struct ReparamReport {
    std::vector<double> xn;          // f_n along the trajectory
    double max_rate_residual = 0.0;  // max |d(x_n)/dt * detJ - 1| (finite differences)
    double max_constant_drift = 0.0; // max |H_j(t) - H_j(t0)| over j < n
};

/// Evaluates x_n(t) = f_n(X(t)) per sample and checks Proposition-2
/// behaviour: d(x_n)/dt times the map Jacobian det J (a function of X)
/// equals 1, while x_1..x_{n-1} stay constant. Violations are reported in
/// the result, not thrown.
ReparamReport reparametrize(const Trajectory& traj, const MultiPoly& f_n,
                            const std::function<double(std::span<const double>)>& detJ);

} // namespace nambu
