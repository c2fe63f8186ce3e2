#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace fraudward {

// Dense row-major matrix of doubles.
struct Matrix {
    int64_t n_rows = 0;
    int64_t n_cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(int64_t rows, int64_t cols)
        : n_rows(rows), n_cols(cols), values(static_cast<size_t>(rows * cols), 0.0) {}

    double& at(int64_t r, int64_t c) { return values[static_cast<size_t>(r * n_cols + c)]; }
    double at(int64_t r, int64_t c) const { return values[static_cast<size_t>(r * n_cols + c)]; }

    const double* row_ptr(int64_t r) const { return values.data() + r * n_cols; }
    std::span<const double> row(int64_t r) const { return {row_ptr(r), static_cast<size_t>(n_cols)}; }

    bool all_finite() const {
        for (double v : values) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }
};

}  // namespace fraudward
