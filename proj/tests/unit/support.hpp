#pragma once

#include "cpals/kruskal.hpp"
#include "cpals/random.hpp"
#include "cpals/tensor.hpp"

#include <gtest/gtest.h>

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace cpals::test {

inline std::size_t draw_size(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Shape random_shape(Rng& rng, std::size_t min_order, std::size_t max_order,
                          std::size_t max_extent) {
    Shape shape(draw_size(rng, min_order, max_order));
    for (auto& e : shape) e = draw_size(rng, 1, max_extent);
    return shape;
}

inline DenseTensor random_tensor(Rng& rng, const Shape& shape) {
    DenseTensor x(shape);
    std::normal_distribution<double> normal;
    for (double& v : x.data()) v = normal(rng);
    return x;
}

/// Gaussian weights and unit factor columns.
inline KruskalModel random_model(Rng& rng, const Shape& shape, std::size_t rank) {
    const auto R = static_cast<Eigen::Index>(rank);
    std::vector<Matrix> factors;
    for (std::size_t extent : shape)
        factors.push_back(normalize_columns_copy(
            gaussian_matrix(rng, static_cast<Eigen::Index>(extent), R)));
    return KruskalModel(gaussian_vector(rng, R), std::move(factors));
}

/// Tensor with entries 1..size in colex order.
inline DenseTensor iota_tensor(const Shape& shape) {
    DenseTensor x(shape);
    double v = 1.0;
    for (double& e : x.data()) e = v++;
    return x;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

/// Largest relative difference between columns after aligning signs.
inline double signed_column_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < a.cols(); ++r) {
        const double s = a.col(r).dot(b.col(r)) < 0.0 ? -1.0 : 1.0;
        worst = std::max(worst, (a.col(r) - s * b.col(r)).norm());
    }
    return worst;
}

}  // namespace cpals::test
