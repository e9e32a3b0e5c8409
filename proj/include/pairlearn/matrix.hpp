#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pairlearn/error.hpp"

namespace pairlearn {

// Dense row-major matrix of doubles. Scalars are 1x1.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
    Matrix(std::size_t r, std::size_t c, std::vector<double> values)
        : rows(r), cols(c), data(std::move(values)) {
        if (data.size() != rows * cols) {
            throw ContractError("Matrix: data size does not match rows*cols");
        }
    }

    static Matrix scalar(double v) { return Matrix(1, 1, {v}); }
    static Matrix row_vector(std::vector<double> values) {
        const std::size_t n = values.size();
        return Matrix(1, n, std::move(values));
    }
    static Matrix column_vector(std::vector<double> values) {
        const std::size_t n = values.size();
        return Matrix(n, 1, std::move(values));
    }

    std::size_t size() const { return rows * cols; }

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

} // namespace pairlearn
