#include "nambu/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace nambu {

Mat::Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries)
    : rows_(rows), cols_(cols), a_(entries) {
    if (a_.size() != rows * cols)
        throw std::invalid_argument("Mat: initializer size does not match shape");
}

Mat Mat::transposed() const {
    Mat t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("Mat: incompatible shapes in product");
    Mat out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double arc = a(r, k);
            if (arc == 0.0) continue;
            for (std::size_t c = 0; c < b.cols(); ++c)
                out(r, c) += arc * b(k, c);
        }
    return out;
}

namespace {

// In-place LU with partial pivoting. Returns the permutation parity sign,
// or 0 if a pivot is exactly zero. `piv[k]` records the row swapped into k.
int lu_factor(Mat& m, std::vector<std::size_t>& piv) {
    const std::size_t n = m.rows();
    piv.resize(n);
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::fabs(m(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double v = std::fabs(m(r, k));
            if (v > best) { best = v; p = r; }
        }
        piv[k] = p;
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(p, c));
            sign = -sign;
        }
        if (m(k, k) == 0.0) return 0;
        const double inv = 1.0 / m(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = m(r, k) * inv;
            m(r, k) = f;
            for (std::size_t c = k + 1; c < n; ++c) m(r, c) -= f * m(k, c);
        }
    }
    return sign;
}

} // namespace

double lu_det(Mat m) {
    if (!m.square())
        throw std::invalid_argument("lu_det: matrix not square");
    if (m.rows() == 0) return 1.0;
    std::vector<std::size_t> piv;
    const int sign = lu_factor(m, piv);
    if (sign == 0) return 0.0;
    double det = sign;
    for (std::size_t k = 0; k < m.rows(); ++k) det *= m(k, k);
    return det;
}

Mat lu_solve(Mat a, const Mat& b) {
    if (!a.square() || a.rows() != b.rows())
        throw std::invalid_argument("lu_solve: incompatible shapes");
    const std::size_t n = a.rows();
    std::vector<std::size_t> piv;
    if (lu_factor(a, piv) == 0)
        throw std::runtime_error("lu_solve: singular matrix");
    Mat x = b;
    for (std::size_t k = 0; k < n; ++k)
        if (piv[k] != k)
            for (std::size_t c = 0; c < x.cols(); ++c) std::swap(x(k, c), x(piv[k], c));
    // forward substitution with unit lower factor
    for (std::size_t r = 1; r < n; ++r)
        for (std::size_t k = 0; k < r; ++k) {
            const double f = a(r, k);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) -= f * x(k, c);
        }
    // back substitution
    for (std::size_t ri = n; ri-- > 0;) {
        for (std::size_t k = ri + 1; k < n; ++k) {
            const double f = a(ri, k);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < x.cols(); ++c) x(ri, c) -= f * x(k, c);
        }
        const double inv = 1.0 / a(ri, ri);
        for (std::size_t c = 0; c < x.cols(); ++c) x(ri, c) *= inv;
    }
    return x;
}

std::vector<double> lu_solve(Mat a, std::vector<double> b) {
    Mat col(b.size(), 1);
    for (std::size_t r = 0; r < b.size(); ++r) col(r, 0) = b[r];
    Mat x = lu_solve(std::move(a), col);
    for (std::size_t r = 0; r < b.size(); ++r) b[r] = x(r, 0);
    return b;
}

} // namespace nambu
