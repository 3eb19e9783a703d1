#pragma once

#include "cpals/tensor.hpp"

#include <cstdint>
#include <random>

namespace cpals {

using Rng = std::mt19937_64;

/// Independent draw streams derived from one seed. Each purpose gets a fixed
/// offset so changing how much one stream consumes never shifts another.
enum class Stream : std::uint64_t {
    weights = 1,
    factors = 2,
    incoherence = 3,
    init = 4,
    restarts = 5,
    lemmas = 6,
};

/// SplitMix64 finalizer.
std::uint64_t mix_seed(std::uint64_t value);

Rng substream(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Vector gaussian_vector(Rng& rng, Eigen::Index size);
Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi);

/// First `cols` columns of the orthogonal factor of a QR of a Gaussian
/// rows x rows matrix.
Matrix random_orthonormal(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Columns scaled to unit 2-norm; a zero column throws DegenerateComponentError.
Matrix normalize_columns_copy(const Matrix& a);

}  // namespace cpals
