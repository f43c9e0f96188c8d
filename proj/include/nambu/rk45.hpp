#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nambu {

struct RkOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;   // 0 => |t_end - t0|
    long max_steps = 1000000;
};

/// Embedded Dormand-Prince 5(4) pair with PI step control and the standard
/// 4th-order dense-output interpolant. The right-hand side is a callable
/// rhs(t, y, dydt). One instance integrates one trajectory; callers pull
/// accepted steps one at a time and may evaluate the interpolant anywhere
/// inside the last step.
class Dopri5 {
public:
    using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;

    Dopri5(Rhs rhs, double t0, std::vector<double> y0, double t_end, RkOptions opt = {});

    /// Advance by one accepted step. Returns false when the integration is
    /// finished or has failed; check failed()/error() to tell which.
    bool step();

    bool finished() const { return finished_; }
    bool failed() const { return failed_; }
    const std::string& error() const { return error_; }

    double t_prev() const { return t_prev_; }
    double t() const { return t_; }
    const std::vector<double>& y() const { return y_; }

    /// Dense evaluation at ti in [t_prev, t] of the last accepted step.
    void eval_dense(double ti, std::span<double> out) const;

    long steps_taken() const { return n_accepted_; }
    long steps_rejected() const { return n_rejected_; }

private:
    void compute_dense_coeffs();
    double initial_step() const;

    Rhs rhs_;
    std::size_t dim_;
    double t_, t_prev_, t_end_, dir_;
    std::vector<double> y_, y_prev_;
    std::vector<std::vector<double>> k_;
    std::vector<double> rcont_[5];
    double h_ = 0.0, h_last_ = 0.0;
    double facold_ = 1e-4;
    RkOptions opt_;
    double hmax_;
    bool reject_ = false, finished_ = false, failed_ = false, first_ = true;
    long n_accepted_ = 0, n_rejected_ = 0;
    std::string error_;
};

} // namespace nambu
