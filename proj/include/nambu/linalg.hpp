#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nambu {

/// Small dense row-major matrix. Everything in this project is at most a
/// handful of rows, so no blocking or views, just bounds-unchecked storage.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}
    Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> entries);

    double& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    Mat transposed() const;

    friend Mat operator*(const Mat& a, const Mat& b);
    friend bool operator==(const Mat& a, const Mat& b) = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

/// Determinant by LU with partial pivoting; the matrix is taken by value
/// and factored in place.
double lu_det(Mat m);

/// Solve A x = b for square A. Throws std::runtime_error on a singular pivot.
std::vector<double> lu_solve(Mat a, std::vector<double> b);

/// Solve A X = B column-by-column (B may have any number of columns).
Mat lu_solve(Mat a, const Mat& b);

} // namespace nambu
