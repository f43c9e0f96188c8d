#pragma once

#include <span>
#include <utility>
#include <vector>

#include "nambu/flows.hpp"
#include "nambu/rk45.hpp"
#include "nambu/trajectory.hpp"

namespace nambu {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 => span length
    long max_steps = 1000000;
    int samples = 512;      // dense-output grid size
};

/// Integrate the Nambu flow from X0 over t_span, sampling on a uniform
/// grid. On stepper failure the partial trajectory is returned with
/// complete = false and the failure message set.
Trajectory integrate(const FlowSpec& spec, std::span<const double> X0,
                     std::pair<double, double> t_span,
                     const IntegratorConfig& cfg = {});

struct DriftStats {
    std::vector<double> max_abs;   // per Hamiltonian
    std::vector<double> mean_abs;  // per Hamiltonian
    double overall_max = 0.0;
};

DriftStats conservation_report(const Trajectory& traj, const FlowSpec& spec);

/// Finite-difference determinant of the map (x_1..x_{n-1}, t) -> X(t).
/// The base point solves the full constraint map for X with x_n pinned to
/// its value at `seed`; each perturbed trajectory re-solves and
/// re-integrates. Requires spec.constraint_map. Expected value 1.
double volume_check(const FlowSpec& spec, std::span<const double> x_const, double t,
                    const State& seed);

/// Scalar velocity F(W) of the constraint-eliminated motion, with the
/// branch sign matched to nambu_rhs at X. Supported for the symmetric
/// (free x_n) and diagonal families; throws on branch mismatch beyond
/// tolerance.
double scalar_reduce(const FlowSpec& spec, std::span<const double> X);

/// Newton solve of constraint_map(X) = x_target starting from `guess`.
/// Shared by volume_check and the CLI section logic.
std::vector<double> solve_constraints(const std::vector<MultiPoly>& f,
                                      std::span<const double> x_target,
                                      std::span<const double> guess);

} // namespace nambu
