#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hocl/error.hpp"

namespace hocl {

using Vector = std::vector<double>;

// Dense row-major matrix. Small and boring on purpose: the models here are
// desk-scale and the hot loops are over sparse neighborhoods, not GEMMs.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ArgumentError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
    }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(std::span<const double> a) noexcept {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline double norm(std::span<const double> a) noexcept { return std::sqrt(squared_norm(a)); }

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "squared_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline bool all_finite(std::span<const double> a) noexcept {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

// y = M x
inline Vector multiply(const Matrix& m, std::span<const double> x) {
    require_same_size(m.cols(), x.size(), "multiply");
    Vector y(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) y[r] = dot(m.row(r), x);
    return y;
}

}  // namespace hocl
