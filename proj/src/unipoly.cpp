#include "nambu/unipoly.hpp"

#include <algorithm>
#include <cmath>

namespace nambu {

UniPoly::UniPoly(std::vector<double> c) : coeffs(std::move(c)) { trim(); }

UniPoly UniPoly::constant(double c) {
    UniPoly p;
    if (c != 0.0) p.coeffs = {c};
    return p;
}

void UniPoly::trim(double eps) {
    double scale = 0.0;
    for (double c : coeffs) scale = std::max(scale, std::fabs(c));
    const double cut = eps * scale;
    while (!coeffs.empty() && std::fabs(coeffs.back()) <= cut) coeffs.pop_back();
}

double UniPoly::operator()(double x) const {
    double y = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) y = y * x + coeffs[k];
    return y;
}

UniPoly UniPoly::derivative() const {
    UniPoly d;
    if (coeffs.size() <= 1) return d;
    d.coeffs.resize(coeffs.size() - 1);
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        d.coeffs[k - 1] = static_cast<double>(k) * coeffs[k];
    d.trim();
    return d;
}

UniPoly UniPoly::operator*(const UniPoly& q) const {
    if (is_zero() || q.is_zero()) return {};
    UniPoly r;
    r.coeffs.assign(coeffs.size() + q.coeffs.size() - 1, 0.0);
    for (std::size_t a = 0; a < coeffs.size(); ++a)
        for (std::size_t b = 0; b < q.coeffs.size(); ++b)
            r.coeffs[a + b] += coeffs[a] * q.coeffs[b];
    r.trim();
    return r;
}

UniPoly UniPoly::operator+(const UniPoly& q) const {
    UniPoly r;
    r.coeffs.assign(std::max(coeffs.size(), q.coeffs.size()), 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) r.coeffs[k] += coeffs[k];
    for (std::size_t k = 0; k < q.coeffs.size(); ++k) r.coeffs[k] += q.coeffs[k];
    r.trim();
    return r;
}

UniPoly UniPoly::operator-(const UniPoly& q) const {
    UniPoly r;
    r.coeffs.assign(std::max(coeffs.size(), q.coeffs.size()), 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) r.coeffs[k] += coeffs[k];
    for (std::size_t k = 0; k < q.coeffs.size(); ++k) r.coeffs[k] -= q.coeffs[k];
    r.trim();
    return r;
}

UniPoly poly_from_roots(std::span<const double> roots) {
    UniPoly p = UniPoly::constant(1.0);
    for (double r : roots) {
        // multiply by (X - r) in place
        p.coeffs.insert(p.coeffs.begin(), 0.0);
        for (std::size_t k = 0; k + 1 < p.coeffs.size(); ++k)
            p.coeffs[k] -= r * p.coeffs[k + 1];
    }
    return p;
}

} // namespace nambu
