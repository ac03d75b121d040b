#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "rdob/errors.hpp"

namespace rdob::num {

using Complex = std::complex<double>;

// Dense row-major matrix over double or std::complex<double>. Column vectors
// are n-by-1 matrices.
template <class T>
class Mat {
public:
    Mat() = default;

    Mat(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Mat(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw std::invalid_argument("Mat: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    static Mat column(const std::vector<T>& v) {
        Mat m(v.size(), 1);
        for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    bool square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Mat operator+(const Mat& o) const {
        check_same_shape(o);
        Mat r = *this;
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] += o.data_[k];
        return r;
    }

    Mat operator-(const Mat& o) const {
        check_same_shape(o);
        Mat r = *this;
        for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] -= o.data_[k];
        return r;
    }

    Mat operator-() const {
        Mat r = *this;
        for (auto& x : r.data_) x = -x;
        return r;
    }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("Mat: incompatible shapes for product");
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const T a = (*this)(i, k);
                if (a == T{}) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        }
        return r;
    }

    Mat operator*(T s) const {
        Mat r = *this;
        for (auto& x : r.data_) x *= s;
        return r;
    }

    friend Mat operator*(T s, const Mat& m) { return m * s; }

    Mat transpose() const {
        Mat r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    void set_block(std::size_t i0, std::size_t j0, const Mat& b) {
        if (i0 + b.rows_ > rows_ || j0 + b.cols_ > cols_)
            throw std::invalid_argument("Mat: block out of range");
        for (std::size_t i = 0; i < b.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) (*this)(i0 + i, j0 + j) = b(i, j);
    }

    Mat block(std::size_t i0, std::size_t j0, std::size_t h, std::size_t w) const {
        if (i0 + h > rows_ || j0 + w > cols_) throw std::invalid_argument("Mat: block out of range");
        Mat r(h, w);
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j) r(i, j) = (*this)(i0 + i, j0 + j);
        return r;
    }

    bool all_finite() const {
        for (const auto& x : data_)
            if (!std::isfinite(std::abs(x))) return false;
        return true;
    }

private:
    void check_same_shape(const Mat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("Mat: shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RMat = Mat<double>;
using CMat = Mat<Complex>;

inline CMat to_complex(const RMat& m) {
    CMat r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Complex(m(i, j), 0.0);
    return r;
}

template <class T>
double inf_norm(const Mat<T>& m) {
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

template <class T>
double one_norm(const Mat<T>& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

// Solves A X = B by LU with scaled partial pivoting (rows here can differ in
// magnitude by many orders: companion realizations of wide-dynamic-range
// polynomials). Throws numeric_error when A is singular to working precision.
template <class T>
Mat<T> solve(Mat<T> a, Mat<T> b) {
    if (!a.square()) throw std::invalid_argument("solve: matrix must be square");
    if (a.rows() != b.rows()) throw std::invalid_argument("solve: rhs rows mismatch");
    const std::size_t n = a.rows();

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = -1.0;
        for (std::size_t i = k; i < n; ++i) {
            double rscale = 0.0;
            for (std::size_t j = k; j < n; ++j) rscale = std::max(rscale, std::abs(a(i, j)));
            const double ratio = (rscale > 0.0) ? std::abs(a(i, k)) / rscale : 0.0;
            if (ratio > best) {
                best = ratio;
                piv = i;
            }
        }
        if (best <= 1e-14 || std::abs(a(piv, k)) < 1e-300)
            throw numeric_error("solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const T f = a(i, k) / a(k, k);
            if (f == T{}) continue;
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (std::size_t ri = n; ri-- > 0;) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            T s = b(ri, j);
            for (std::size_t k = ri + 1; k < n; ++k) s -= a(ri, k) * b(k, j);
            b(ri, j) = s / a(ri, ri);
        }
    }
    return b;
}

template <class T>
Mat<T> inverse(const Mat<T>& a) {
    return solve(a, Mat<T>::identity(a.rows()));
}

}  // namespace rdob::num
