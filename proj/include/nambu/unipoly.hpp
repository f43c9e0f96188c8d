#pragma once

#include <span>
#include <vector>

namespace nambu {

/// Univariate polynomial with real coefficients stored by ascending power.
/// The zero polynomial keeps an empty coefficient vector and reports
/// degree() == -1; otherwise the last stored coefficient is nonzero.
struct UniPoly {
    std::vector<double> coeffs;

    UniPoly() = default;
    explicit UniPoly(std::vector<double> c);
    static UniPoly constant(double c);

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const { return coeffs.empty(); }
    double leading() const { return coeffs.empty() ? 0.0 : coeffs.back(); }

    double operator()(double x) const;
    UniPoly derivative() const;

    UniPoly operator*(const UniPoly& q) const;
    UniPoly operator+(const UniPoly& q) const;
    UniPoly operator-(const UniPoly& q) const;

    /// Drop trailing coefficients with |c| <= eps * max|c|.
    void trim(double eps = 0.0);
};

/// Monic polynomial with the given root multiset; the coefficients come out
/// as signed elementary symmetric functions of the roots. An empty root
/// list gives the constant 1.
UniPoly poly_from_roots(std::span<const double> roots);

} // namespace nambu
