#include "cpals/random.hpp"

#include "cpals/errors.hpp"

#include <cmath>

namespace cpals {

std::uint64_t mix_seed(std::uint64_t value) {
    value += 0x9e3779b97f4a7c15ULL;
    value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
    value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
    return value ^ (value >> 31);
}

Rng substream(std::uint64_t seed, Stream stream, std::uint64_t index) {
    const auto tag = static_cast<std::uint64_t>(stream);
    return Rng(mix_seed(mix_seed(seed) ^ mix_seed(tag << 32 | index)));
}

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(rows, cols);
    // Fill in storage order so the draw sequence is fixed.
    for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = normal(rng);
    return out;
}

Vector gaussian_vector(Rng& rng, Eigen::Index size) { return gaussian_matrix(rng, size, 1); }

Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    std::uniform_real_distribution<double> uniform(lo, hi);
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        double v = uniform(rng);
        // generate_canonical may round up to the open end.
        if (v >= hi) v = std::nextafter(hi, lo);
        out.data()[i] = v;
    }
    return out;
}

Matrix random_orthonormal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    if (cols > rows) throw DimensionError("random_orthonormal: more columns than rows");
    const Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rng, rows, rows));
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

Matrix normalize_columns_copy(const Matrix& a) {
    Matrix out = a;
    for (Eigen::Index r = 0; r < a.cols(); ++r) {
        const double norm = a.col(r).norm();
        if (!(norm > 0.0)) throw DegenerateComponentError(static_cast<std::size_t>(r));
        out.col(r) /= norm;
    }
    return out;
}

}  // namespace cpals
