#pragma once

#include <string>
#include <vector>

namespace nambu {

/// One point on a flow: time plus the box-edge vector X.
struct State {
    double t = 0.0;
    std::vector<double> X;
};

/// Integration output: dense samples, the per-sample Hamiltonian values,
/// and the worst conservation drift seen. `complete` is false when the
/// stepper gave up (step underflow or step budget); the samples gathered
/// up to that point are kept.
struct Trajectory {
    std::vector<State> samples;
    std::vector<std::vector<double>> invariant_values;  // samples x (n-1)
    double drift = 0.0;
    bool complete = true;
    std::string error;
    long n_steps = 0;
    long n_rejected = 0;
};

} // namespace nambu
