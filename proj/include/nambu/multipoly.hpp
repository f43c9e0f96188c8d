#pragma once

#include <map>
#include <span>
#include <vector>

namespace nambu {

/// Sparse multivariate polynomial: exponent tuple -> coefficient, with no
/// zero-coefficient terms stored. Gradients are evaluated analytically
/// term by term, so differentiation adds no rounding beyond the products.
class MultiPoly {
public:
    explicit MultiPoly(int nvars = 0) : nvars_(nvars) {}

    static MultiPoly constant(int nvars, double c);
    static MultiPoly variable(int nvars, int j);  // 0-based variable index

    void add_term(std::vector<int> expo, double coeff);

    int nvars() const { return nvars_; }
    bool empty() const { return terms_.empty(); }
    const std::map<std::vector<int>, double>& terms() const { return terms_; }

    double operator()(std::span<const double> X) const;

    MultiPoly partial(int j) const;

    MultiPoly operator+(const MultiPoly& q) const;
    MultiPoly operator*(const MultiPoly& q) const;
    MultiPoly operator*(double s) const;

private:
    int nvars_;
    std::map<std::vector<int>, double> terms_;
};

/// Analytic gradient of p evaluated at X.
std::vector<double> grad(const MultiPoly& p, std::span<const double> X);

/// e_k(X_1..X_nvars) as a MultiPoly (sum over k-subsets).
MultiPoly elementary_symmetric_poly(int nvars, int k);

} // namespace nambu
