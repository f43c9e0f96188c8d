#include "nambu/rk45.hpp"

#include <algorithm>
#include <limits>

namespace nambu {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// b_i - bhat_i (5th order solution minus 4th order embedded)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

constexpr double kSafe = 0.9, kBeta = 0.04, kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kFacc1 = 5.0, kFacc2 = 0.1;  // h shrink/growth bounds per step

} // namespace

Dopri5::Dopri5(Rhs rhs, double t0, std::vector<double> y0, double t_end, RkOptions opt)
    : rhs_(std::move(rhs)), dim_(y0.size()), t_(t0), t_prev_(t0), t_end_(t_end),
      y_(std::move(y0)), opt_(opt) {
    dir_ = (t_end_ >= t_) ? 1.0 : -1.0;
    hmax_ = (opt_.max_step > 0.0) ? opt_.max_step : std::fabs(t_end_ - t_);
    y_prev_ = y_;
    k_.assign(7, std::vector<double>(dim_));
    for (auto& r : rcont_) r.assign(dim_, 0.0);
    if (t_ == t_end_) finished_ = true;
    else {
        rhs_(t_, y_, k_[0]);
        h_ = initial_step();
    }
}

double Dopri5::initial_step() const {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sc = opt_.abs_tol + opt_.rel_tol * std::fabs(y_[i]);
        dnf += (k_[0][i] / sc) * (k_[0][i] / sc);
        dny += (y_[i] / sc) * (y_[i] / sc);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax_);

    // one explicit Euler probe to estimate the second derivative
    std::vector<double> y1(dim_), f1(dim_);
    for (std::size_t i = 0; i < dim_; ++i) y1[i] = y_[i] + h * dir_ * k_[0][i];
    rhs_(t_ + h * dir_, y1, f1);
    double der2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sc = opt_.abs_tol + opt_.rel_tol * std::fabs(y_[i]);
        der2 += ((f1[i] - k_[0][i]) / sc) * ((f1[i] - k_[0][i]) / sc);
    }
    der2 = std::sqrt(der2) / h;
    const double der12 = std::max(std::fabs(der2), std::sqrt(dnf));
    const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                       : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, hmax_});
}

bool Dopri5::step() {
    if (finished_ || failed_) return false;
    std::vector<double> yt(dim_), y_new(dim_), err_vec(dim_);

    while (true) {
        if (n_accepted_ + n_rejected_ >= opt_.max_steps) {
            failed_ = true;
            error_ = "max_steps exceeded";
            return false;
        }
        const double tiny = 4.0 * std::numeric_limits<double>::epsilon() *
                            std::max(std::fabs(t_), std::fabs(t_end_));
        if (h_ < tiny) {
            failed_ = true;
            error_ = "step size underflow";
            return false;
        }
        bool last = false;
        if ((t_ + 1.01 * h_ * dir_ - t_end_) * dir_ > 0.0) {
            h_ = std::fabs(t_end_ - t_);
            last = true;
        }
        const double h = h_ * dir_;

        for (std::size_t i = 0; i < dim_; ++i) yt[i] = y_[i] + h * a21 * k_[0][i];
        rhs_(t_ + c2 * h, yt, k_[1]);
        for (std::size_t i = 0; i < dim_; ++i)
            yt[i] = y_[i] + h * (a31 * k_[0][i] + a32 * k_[1][i]);
        rhs_(t_ + c3 * h, yt, k_[2]);
        for (std::size_t i = 0; i < dim_; ++i)
            yt[i] = y_[i] + h * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
        rhs_(t_ + c4 * h, yt, k_[3]);
        for (std::size_t i = 0; i < dim_; ++i)
            yt[i] = y_[i] + h * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] +
                                 a54 * k_[3][i]);
        rhs_(t_ + c5 * h, yt, k_[4]);
        for (std::size_t i = 0; i < dim_; ++i)
            yt[i] = y_[i] + h * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] +
                                 a64 * k_[3][i] + a65 * k_[4][i]);
        rhs_(t_ + h, yt, k_[5]);
        for (std::size_t i = 0; i < dim_; ++i)
            y_new[i] = y_[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] +
                                    a75 * k_[4][i] + a76 * k_[5][i]);
        rhs_(t_ + h, y_new, k_[6]);

        double err = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            err_vec[i] = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                              e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
            const double sc = opt_.abs_tol +
                              opt_.rel_tol * std::max(std::fabs(y_[i]), std::fabs(y_new[i]));
            err += (err_vec[i] / sc) * (err_vec[i] / sc);
        }
        err = std::sqrt(err / static_cast<double>(dim_));

        const double fac11 = std::pow(err, kExpo1);
        if (err <= 1.0) {
            facold_ = std::max(err, 1e-4);
            double fac = fac11 / std::pow(facold_, kBeta);
            fac = std::max(kFacc2, std::min(kFacc1, fac / kSafe));
            double hnew = h_ / fac;

            t_prev_ = t_;
            y_prev_ = y_;
            t_ = last ? t_end_ : t_ + h;
            y_ = y_new;
            h_last_ = h;
            compute_dense_coeffs();
            std::swap(k_[0], k_[6]);  // FSAL

            if (hnew > hmax_) hnew = hmax_;
            if (reject_) hnew = std::min(hnew, h_);
            reject_ = false;
            h_ = hnew;
            ++n_accepted_;
            if (last || (t_ - t_end_) * dir_ >= 0.0) finished_ = true;
            return true;
        }
        h_ = h_ / std::min(kFacc1, fac11 / kSafe);
        reject_ = true;
        ++n_rejected_;
    }
}

void Dopri5::compute_dense_coeffs() {
    const double h = h_last_;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double ydiff = y_[i] - y_prev_[i];
        const double bspl = h * k_[0][i] - ydiff;
        rcont_[0][i] = y_prev_[i];
        rcont_[1][i] = ydiff;
        rcont_[2][i] = bspl;
        rcont_[3][i] = ydiff - h * k_[6][i] - bspl;
        rcont_[4][i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] +
                            d5 * k_[4][i] + d6 * k_[5][i] + d7 * k_[6][i]);
    }
}

void Dopri5::eval_dense(double ti, std::span<double> out) const {
    if (h_last_ == 0.0) {
        for (std::size_t i = 0; i < dim_; ++i) out[i] = y_[i];
        return;
    }
    const double th = (ti - t_prev_) / h_last_;
    const double th1 = 1.0 - th;
    for (std::size_t i = 0; i < dim_; ++i)
        out[i] = rcont_[0][i] +
                 th * (rcont_[1][i] +
                       th1 * (rcont_[2][i] + th * (rcont_[3][i] + th1 * rcont_[4][i])));
}

} // namespace nambu
