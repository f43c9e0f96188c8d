#include "nambu/flows.hpp"

#include <cmath>
#include <stdexcept>

#include "nambu/linalg.hpp"

namespace nambu {

double ConstraintMatrix::minor_det(int j) const {
    const int rows = n - 1;
    Mat m(rows, rows);
    for (int r = 0; r < rows; ++r) {
        int cc = 0;
        for (int c = 0; c < n; ++c) {
            if (c == j) continue;
            m(r, cc++) = at(r, c);
        }
    }
    return lu_det(std::move(m));
}

std::vector<double> nambu_rhs(const FlowSpec& spec, std::span<const double> X) {
    const int n = spec.n;
    if (static_cast<int>(spec.hamiltonians.size()) != n - 1)
        throw std::invalid_argument("nambu_rhs: need exactly n-1 Hamiltonians");
    if (static_cast<int>(X.size()) != n)
        throw std::invalid_argument("nambu_rhs: state dimension mismatch");

    std::vector<std::vector<double>> grads(n - 1);
    for (int r = 0; r < n - 1; ++r) grads[r] = grad(spec.hamiltonians[r], X);

    std::vector<double> rhs(n);
    for (int j = 1; j <= n; ++j) {
        Mat m(n - 1, n - 1);
        for (int r = 0; r < n - 1; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j - 1) continue;
                m(r, cc++) = grads[r][c];
            }
        }
        const double sign = ((n - j) % 2 == 0) ? 1.0 : -1.0;
        rhs[j - 1] = sign * lu_det(std::move(m));
    }
    return rhs;
}

FlowSpec symmetric_flow(int n, const SymConstants& x) {
    if (n < 2) throw std::invalid_argument("symmetric_flow: n must be >= 2");
    if (x.n != n || x.free_index != n)
        throw std::invalid_argument("symmetric_flow: constants must leave x_n free");
    FlowSpec spec;
    spec.n = n;
    spec.family = FlowFamily::symmetric;
    spec.free_index = n;
    spec.constants = x.x;
    for (int k = 1; k <= n - 1; ++k)
        spec.hamiltonians.push_back(elementary_symmetric_poly(n, k));
    for (int k = 1; k <= n; ++k)
        spec.constraint_map.push_back(elementary_symmetric_poly(n, k));
    return spec;
}

FlowSpec symmetric_flow_free_i(int n, const SymConstants& x, int i) {
    if (i < 1 || i > n) throw std::invalid_argument("symmetric_flow_free_i: i out of range");
    if (i == n) return symmetric_flow(n, x);
    if (x.n != n || x.free_index != i)
        throw std::invalid_argument("symmetric_flow_free_i: free index mismatch");
    FlowSpec spec;
    spec.n = n;
    spec.family = FlowFamily::symmetric;
    spec.free_index = i;
    spec.constants = x.x;
    for (int k = 1; k <= n; ++k) {
        if (k != i) spec.hamiltonians.push_back(elementary_symmetric_poly(n, k));
        spec.constraint_map.push_back(elementary_symmetric_poly(n, k));
    }
    return spec;
}

FlowSpec diagonal_flow(int n, std::span<const double> x) {
    if (n < 3) throw std::invalid_argument("diagonal_flow: n must be >= 3");
    if (static_cast<int>(x.size()) < n - 1)
        throw std::invalid_argument("diagonal_flow: need x_1..x_{n-1}");
    FlowSpec spec;
    spec.n = n;
    spec.family = FlowFamily::diagonal;
    spec.free_index = n;
    spec.constants.assign(x.begin(), x.begin() + (n - 1));
    for (int j = 0; j < n; ++j) {
        MultiPoly h(n);
        std::vector<int> e(n, 0);
        e[j] = 2;
        h.add_term(e, 0.5);
        std::vector<int> e2(n, 0);
        e2[(j + 1) % n] = 2;
        h.add_term(e2, 0.5);
        if (j < n - 1) spec.hamiltonians.push_back(h);
        spec.constraint_map.push_back(h);
    }
    // x_j = H_j rows double as the first n-1 entries of the full map A
    spec.A.n = n;
    spec.A.a.assign((n - 1) * n, 0.0);
    for (int j = 0; j < n - 1; ++j) {
        spec.A.a[j * n + j] = 1.0;
        spec.A.a[j * n + (j + 1) % n] = 1.0;
    }
    return spec;
}

FlowSpec quadratic_flow(const ConstraintMatrix& A) {
    const int n = A.n;
    if (n < 2 || static_cast<int>(A.a.size()) != (n - 1) * n)
        throw std::invalid_argument("quadratic_flow: A must be (n-1) x n");
    FlowSpec spec;
    spec.n = n;
    spec.family = FlowFamily::quadratic;
    spec.free_index = n;
    spec.A = A;
    for (int j = 0; j < n - 1; ++j) {
        MultiPoly h(n);
        for (int k = 0; k < n; ++k) {
            if (A.at(j, k) == 0.0) continue;
            std::vector<int> e(n, 0);
            e[k] = 2;
            h.add_term(std::move(e), 0.5 * A.at(j, k));
        }
        spec.hamiltonians.push_back(std::move(h));
    }
    return spec;
}

double map_jacobian_det(const std::vector<MultiPoly>& f, std::span<const double> X,
                        bool* near_singular) {
    const int n = static_cast<int>(f.size());
    if (static_cast<int>(X.size()) != n)
        throw std::invalid_argument("map_jacobian_det: dimension mismatch");
    Mat m(n, n);
    double scale = 0.0;
    for (int r = 0; r < n; ++r) {
        const std::vector<double> g = grad(f[r], X);
        for (int c = 0; c < n; ++c) {
            m(r, c) = g[c];
            scale = std::max(scale, std::fabs(g[c]));
        }
    }
    const double det = lu_det(std::move(m));
    if (near_singular) {
        double ref = 1.0;
        for (int k = 0; k < n; ++k) ref *= std::max(scale, 1e-300);
        *near_singular = std::fabs(det) < 1e-12 * ref;
    }
    return det;
}

ReparamReport reparametrize(const Trajectory& traj, const MultiPoly& f_n,
                            const std::function<double(std::span<const double>)>& detJ) {
    ReparamReport rep;
    const std::size_t ns = traj.samples.size();
    rep.xn.resize(ns);
    for (std::size_t k = 0; k < ns; ++k) rep.xn[k] = f_n(traj.samples[k].X);

    for (std::size_t k = 0; k + 1 < ns; ++k) {
        // centred where possible, one-sided at the ends
        std::size_t a = (k == 0) ? 0 : k - 1;
        std::size_t b = (k + 1 < ns) ? k + 1 : k;
        const double dt = traj.samples[b].t - traj.samples[a].t;
        if (dt == 0.0) continue;
        const double rate = (rep.xn[b] - rep.xn[a]) / dt;
        const double res = std::fabs(rate * detJ(traj.samples[k].X) - 1.0);
        rep.max_rate_residual = std::max(rep.max_rate_residual, res);
    }

    if (!traj.invariant_values.empty()) {
        const auto& h0 = traj.invariant_values.front();
        for (const auto& hk : traj.invariant_values)
            for (std::size_t j = 0; j < h0.size(); ++j)
                rep.max_constant_drift =
                    std::max(rep.max_constant_drift, std::fabs(hk[j] - h0[j]));
    }
    return rep;
}

} // namespace nambu
