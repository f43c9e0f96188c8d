#include "nambu/toda.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nambu::toda {

TodaState::TodaState(std::vector<double> i_, std::vector<double> v_)
    : m(static_cast<int>(i_.size())), i(std::move(i_)), v(std::move(v_)) {
    c = 1.0;
    for (double vj : v) c *= vj;
    validate();
}

void TodaState::validate() const {
    if (m < 3) throw std::invalid_argument("TodaState: m must be >= 3");
    if (static_cast<int>(i.size()) != m || static_cast<int>(v.size()) != m)
        throw std::invalid_argument("TodaState: i and v must have m entries");
    double prod = 1.0;
    for (double vj : v) prod *= vj;
    if (std::fabs(prod - c) > 1e-12 * std::max(1.0, std::fabs(c)))
        throw std::invalid_argument("TodaState: product constraint v1...vm = c violated");
    double iprod = 1.0;
    for (double ij : i) {
        if (ij == 0.0) throw std::invalid_argument("TodaState: i entries must be nonzero");
        iprod *= ij;
    }
    const double detU = iprod - ((m % 2 == 0) ? 1.0 : -1.0);
    if (std::fabs(detU) < 1e-12)
        throw std::invalid_argument("TodaState: U is singular for these i");
}

Mat build_M(const TodaState& s) {
    const int m = s.m;
    Mat M(m, m);
    for (int j = 0; j < m; ++j) M(j, j) = s.i[j] + s.v[j];
    for (int j = 0; j + 1 < m; ++j) {
        M(j, j + 1) = 1.0;
        M(j + 1, j) = s.i[j + 1] * s.v[j];
    }
    M(0, m - 1) = s.i[0] * s.v[m - 1];
    M(m - 1, 0) = 1.0;
    return M;
}

Mat build_U(const TodaState& s) {
    const int m = s.m;
    Mat U(m, m);
    for (int j = 0; j < m; ++j) U(j, j) = s.i[j];
    for (int j = 0; j + 1 < m; ++j) U(j, j + 1) = 1.0;
    U(m - 1, 0) = 1.0;
    return U;
}

Mat step(const Mat& M, const Mat& U) {
    if (!M.square() || !U.square() || M.rows() != U.rows())
        throw std::invalid_argument("toda::step: shape mismatch");
    return lu_solve(U, M * U);
}

SpectralInvariants invariants_from_matrix(const Mat& M) {
    if (!M.square()) throw std::invalid_argument("invariants_from_matrix: not square");
    const int m = static_cast<int>(M.rows());
    // Faddeev-LeVerrier: B_0 = I; C_k = M B_{k-1}; c_k = tr(C_k)/k;
    // B_k = C_k - c_k I. Then e_k = (-1)^{k+1} c_k.
    SpectralInvariants inv;
    inv.x.resize(m);
    Mat B(m, m);
    for (int j = 0; j < m; ++j) B(j, j) = 1.0;
    double sign = 1.0;
    for (int k = 1; k <= m; ++k) {
        Mat C = M * B;
        double tr = 0.0;
        for (int j = 0; j < m; ++j) tr += C(j, j);
        const double ck = tr / k;
        inv.x[k - 1] = sign * ck;
        sign = -sign;
        B = C;
        for (int j = 0; j < m; ++j) B(j, j) -= ck;
    }
    return inv;
}

SpectralInvariants invariants_from_state(const TodaState& s) {
    if (s.m != 3)
        throw std::invalid_argument("invariants_from_state: printed formulas are m=3 only");
    const double i1 = s.i[0], i2 = s.i[1], i3 = s.i[2];
    const double v1 = s.v[0], v2 = s.v[1], v3 = s.v[2];
    SpectralInvariants inv;
    inv.x = {i1 + i2 + i3 + v1 + v2 + v3,
             i1 * i2 + i1 * i3 + i2 * i3 + i1 * v2 + i2 * v3 + i3 * v1 +
                 v1 * v2 + v1 * v3 + v2 * v3,
             (1.0 + i1 * i2 * i3) * (1.0 + v1 * v2 * v3)};
    return inv;
}

namespace {

std::array<double, 3> esym3(const std::array<double, 3>& r) {
    return {r[0] + r[1] + r[2],
            r[0] * r[1] + r[0] * r[2] + r[1] * r[2],
            r[0] * r[1] * r[2]};
}

} // namespace

TodaState reconstruct(const std::array<double, 3>& lam, double c,
                      const std::array<double, 3>& X,
                      const std::array<GaugeCondition, 2>& gauge,
                      const TodaState& guess) {
    if (guess.m != 3) throw std::invalid_argument("reconstruct: m=3 only");
    const std::array<double, 3> ex = esym3(X);
    const std::array<double, 3> el = esym3(lam);
    const double ref = std::max({1.0, std::fabs(el[0]), std::fabs(el[1])});
    if (std::fabs(ex[0] - el[0]) > 1e-8 * ref || std::fabs(ex[1] - el[1]) > 1e-8 * ref)
        throw std::invalid_argument(
            "reconstruct: X does not sit on the spectral level set (e1, e2 mismatch)");

    auto residual = [&](const std::array<double, 6>& z, std::array<double, 6>& r) {
        TodaState s;
        s.m = 3;
        s.i = {z[0], z[1], z[2]};
        s.v = {z[3], z[4], z[5]};
        s.c = z[3] * z[4] * z[5];
        const SpectralInvariants inv = invariants_from_state(s);
        r[0] = inv.x[0] - el[0];
        r[1] = inv.x[1] - el[1];
        r[2] = inv.x[2] - el[2];
        r[3] = z[3] * z[4] * z[5] - c;
        r[4] = gauge[0](s);
        r[5] = gauge[1](s);
    };

    std::array<double, 6> z{guess.i[0], guess.i[1], guess.i[2],
                            guess.v[0], guess.v[1], guess.v[2]};
    std::array<double, 6> r{}, rt{};
    auto norm_inf = [](const std::array<double, 6>& a) {
        double n = 0.0;
        for (double v : a) n = std::max(n, std::fabs(v));
        return n;
    };

    residual(z, r);
    for (int it = 0; it < 100; ++it) {
        const double rn = norm_inf(r);
        if (rn < 1e-10) {
            TodaState s;
            s.m = 3;
            s.i = {z[0], z[1], z[2]};
            s.v = {z[3], z[4], z[5]};
            s.c = z[3] * z[4] * z[5];
            return s;
        }
        Mat J(6, 6);
        for (int k = 0; k < 6; ++k) {
            const double h = 1e-7 * std::max(1.0, std::fabs(z[k]));
            std::array<double, 6> zp = z, zm = z;
            zp[k] += h;
            zm[k] -= h;
            std::array<double, 6> rp{}, rm{};
            residual(zp, rp);
            residual(zm, rm);
            for (int row = 0; row < 6; ++row) J(row, k) = (rp[row] - rm[row]) / (2.0 * h);
        }
        std::vector<double> dz;
        try {
            dz = lu_solve(J, std::vector<double>(r.begin(), r.end()));
        } catch (const std::runtime_error&) {
            throw std::runtime_error("reconstruct: singular Jacobian at iterate");
        }
        // backtracking damping on the residual norm
        double lambda = 1.0;
        std::array<double, 6> zt{};
        bool moved = false;
        for (int bt = 0; bt < 40; ++bt) {
            for (int k = 0; k < 6; ++k) zt[k] = z[k] - lambda * dz[k];
            residual(zt, rt);
            if (norm_inf(rt) < rn) {
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!moved) break;
        z = zt;
        r = rt;
    }
    throw std::runtime_error("reconstruct: Newton did not converge; final residual " +
                             std::to_string(norm_inf(r)));
}

double structural_residual(const Mat& M) {
    const int m = static_cast<int>(M.rows());
    double res = 0.0;
    for (int r = 0; r < m; ++r)
        for (int col = 0; col < m; ++col) {
            const bool diag = (col == r);
            const bool super = (col == r + 1);
            const bool sub = (col == r - 1);
            const bool corner_lo = (r == m - 1 && col == 0);
            const bool corner_hi = (r == 0 && col == m - 1);
            if (super || corner_lo)
                res = std::max(res, std::fabs(M(r, col) - 1.0));
            else if (!diag && !sub && !corner_hi)
                res = std::max(res, std::fabs(M(r, col)));
        }
    return res;
}

} // namespace nambu::toda
