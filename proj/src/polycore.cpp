#include "nambu/polycore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nambu/linalg.hpp"

namespace nambu {

SymConstants::SymConstants(int n_, std::vector<double> x_, int free_index_)
    : n(n_), x(std::move(x_)), free_index(free_index_) {
    if (n < 2) throw std::invalid_argument("SymConstants: n must be >= 2");
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("SymConstants: x must have n entries");
    if (free_index < 1 || free_index > n)
        throw std::invalid_argument("SymConstants: free_index out of range");
    for (int k = 0; k < n; ++k)
        if (k != free_index - 1 && !std::isfinite(x[k]))
            throw std::invalid_argument("SymConstants: fixed entries must be finite");
}

std::vector<double> elementary_symmetric(std::span<const double> values) {
    std::vector<double> e(values.size() + 1, 0.0);
    e[0] = 1.0;
    std::size_t used = 0;
    for (double v : values) {
        ++used;
        for (std::size_t j = used; j >= 1; --j) e[j] += v * e[j - 1];
    }
    return {e.begin() + 1, e.end()};
}

double resultant(const UniPoly& p, const UniPoly& q) {
    if (p.is_zero() || q.is_zero())
        throw std::invalid_argument("undefined resultant of the zero polynomial");
    const int m = p.degree(), n = q.degree();
    if (m == 0 && n == 0) return 1.0;
    Mat s(m + n, m + n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) s(r, r + k) = p.coeffs[m - k];
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) s(n + r, r + k) = q.coeffs[n - k];
    return lu_det(std::move(s));
}

double discriminant(const UniPoly& p) {
    const int d = p.degree();
    if (d < 2) throw std::invalid_argument("discriminant: degree must be >= 2");
    const double sign = ((d * (d - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
    return sign * resultant(p, p.derivative()) / p.leading();
}

double d_formula(int n, std::span<const double> h) {
    if (static_cast<int>(h.size()) != n)
        throw std::invalid_argument("d_formula: h must have n entries h_0..h_{n-1}");
    switch (n) {
    case 3: {
        const double h0 = h[0], h1 = h[1], h2 = h[2];
        return h1 * h1 - 4 * h0 * h2;
    }
    case 4: {
        const double h0 = h[0], h1 = h[1], h2 = h[2], h3 = h[3];
        return h1 * h1 * h2 * h2 - 4 * h0 * h2 * h2 * h2 - 4 * h1 * h1 * h1 * h3
             + 18 * h0 * h1 * h2 * h3 - 27 * h0 * h0 * h3 * h3;
    }
    case 5: {
        const double h0 = h[0], h1 = h[1], h2 = h[2], h3 = h[3], h4 = h[4];
        return h1*h1*h2*h2*h3*h3 - 4*h1*h1*h2*h2*h2*h4 - 4*h1*h1*h1*h3*h3*h3
             + 18*h1*h1*h1*h2*h3*h4 - 27*h1*h1*h1*h1*h4*h4 - 4*h0*h2*h2*h2*h3*h3
             + 18*h0*h1*h2*h3*h3*h3 + 16*h0*h2*h2*h2*h2*h4 - 80*h0*h1*h2*h2*h3*h4
             + 144*h0*h1*h1*h2*h4*h4 - 6*h0*h1*h1*h3*h3*h4 + 144*h0*h0*h2*h3*h3*h4
             - 128*h0*h0*h2*h2*h4*h4 - 192*h0*h0*h1*h3*h4*h4 - 27*h0*h0*h3*h3*h3*h3
             + 256*h0*h0*h0*h4*h4*h4;
    }
    default:
        throw std::invalid_argument("d_formula: no printed formula for this n");
    }
}

std::vector<double> h_from_x(const SymConstants& x, double W) {
    if (x.free_index != x.n)
        throw std::invalid_argument("h_from_x: requires x_1..x_{n-1} fixed (free x_n)");
    const int n = x.n;
    std::vector<double> h(n - 1);
    double prev = 1.0;  // h_0
    for (int k = 1; k <= n - 1; ++k) {
        h[k - 1] = x.x[k - 1] - W * prev;
        prev = h[k - 1];
    }
    return h;
}

std::vector<double> hprime_from_x(const SymConstants& x, int i, double W) {
    const int n = x.n;
    if (i < 1 || i > n) throw std::invalid_argument("hprime_from_x: i out of range");
    if (i != x.free_index)
        throw std::invalid_argument("hprime_from_x: i must match the free constraint index");
    if (i == n) return h_from_x(x, W);
    if (W == 0.0)
        throw std::invalid_argument("hprime_from_x: W = 0 is a pole of the coefficients");
    std::vector<double> h(n, 0.0);  // h[k-1] holds h'_k, k = 1..n-1; h[n-1] = h'_n = 0
    double prev = 1.0;
    for (int k = 1; k < i; ++k) {
        h[k - 1] = x.x[k - 1] - W * prev;
        prev = h[k - 1];
    }
    for (int k = n - 1; k >= i; --k)
        h[k - 1] = (x.x[k] - h[k]) / W;
    h.resize(n - 1);
    return h;
}

UniPoly reduced_poly(const SymConstants& x, int free_index, double W) {
    const int n = x.n;
    const std::vector<double> h = hprime_from_x(x, free_index, W);
    std::vector<double> c(n, 0.0);  // degree n-1, ascending
    c[n - 1] = 1.0;
    for (int k = 1; k <= n - 1; ++k)
        c[n - 1 - k] = (k % 2 == 0 ? 1.0 : -1.0) * h[k - 1];
    return UniPoly(std::move(c));
}

UniPoly discriminant_in_W(const SymConstants& x, int free_index) {
    const int n = x.n;
    if (n < 3) throw std::invalid_argument("discriminant_in_W: need n >= 3");
    const int deg_bound = (n - 1) * (n - 2);
    // Chebyshev nodes; the free-x_i (i < n) coefficients have a pole at
    // W = 0, so that case samples on [1, 3] instead of [-2, 2].
    const double lo = (free_index == n) ? -2.0 : 1.0;
    const double hi = (free_index == n) ? 2.0 : 3.0;
    const int m = deg_bound + 1;
    std::vector<double> nodes(m), vals(m);
    for (int k = 0; k < m; ++k) {
        const double th = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * m);
        nodes[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(th);
        vals[k] = discriminant(reduced_poly(x, free_index, nodes[k]));
    }

    // Newton divided differences, then expand to monomial coefficients.
    std::vector<double> dd = vals;
    for (int j = 1; j < m; ++j)
        for (int k = m - 1; k >= j; --k)
            dd[k] = (dd[k] - dd[k - 1]) / (nodes[k] - nodes[k - j]);
    UniPoly d = UniPoly::constant(dd[m - 1]);
    for (int k = m - 2; k >= 0; --k) {
        d = d * UniPoly({-nodes[k], 1.0});
        d = d + UniPoly::constant(dd[k]);
    }

    // Exactness check at 3 extra nodes.
    double scale = 1.0;
    for (double v : vals) scale = std::max(scale, std::fabs(v));
    const double span = hi - lo;
    for (double f : {0.1234, 0.5711, 0.8866}) {
        const double w = lo + f * span;
        const double sampled = discriminant(reduced_poly(x, free_index, w));
        scale = std::max(scale, std::fabs(sampled));
        if (std::fabs(d(w) - sampled) > 1e-7 * scale)
            throw std::runtime_error("discriminant_in_W: degree bound violated");
    }
    d.trim(1e-13);
    return d;
}

std::array<std::complex<double>, 3> cubic_roots(const UniPoly& p) {
    if (p.degree() != 3) throw std::invalid_argument("cubic_roots: degree must be 3");
    const double a = p.coeffs[3], b = p.coeffs[2], c = p.coeffs[1], d = p.coeffs[0];
    // depressed form t^3 + q1 t + q0 with x = t - b/(3a)
    const double shift = -b / (3.0 * a);
    const double q1 = (3.0 * a * c - b * b) / (3.0 * a * a);
    const double q0 = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a * a * a);
    const double disc = -4.0 * q1 * q1 * q1 - 27.0 * q0 * q0;

    std::array<std::complex<double>, 3> roots;
    const double magnitude = std::max({std::fabs(q1), std::fabs(q0), 1e-300});
    if (std::fabs(q1) < 1e-14 * magnitude && std::fabs(q0) < 1e-14 * magnitude) {
        roots.fill(shift);
        return roots;
    }
    if (disc >= 0.0) {
        // three real roots
        const double r = 2.0 * std::sqrt(-q1 / 3.0);
        const double arg = std::clamp(3.0 * q0 / (q1 * r), -1.0, 1.0);
        const double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k)
            roots[k] = shift + r * std::cos(phi / 3.0 - 2.0 * std::numbers::pi * k / 3.0);
    } else {
        const double s = std::sqrt(q0 * q0 / 4.0 + q1 * q1 * q1 / 27.0);
        const double u = std::cbrt(-q0 / 2.0 + s);
        const double v = std::cbrt(-q0 / 2.0 - s);
        roots[0] = shift + (u + v);
        const std::complex<double> im(0.0, std::sqrt(3.0) / 2.0 * (u - v));
        roots[1] = shift - (u + v) / 2.0 + im;
        roots[2] = shift - (u + v) / 2.0 - im;
    }
    // one Newton polish step each
    for (auto& z : roots) {
        const std::complex<double> f = ((a * z + b) * z + c) * z + d;
        const std::complex<double> df = (3.0 * a * z + 2.0 * b) * z + c;
        if (std::abs(df) > 0.0) z -= f / df;
    }
    return roots;
}

} // namespace nambu
