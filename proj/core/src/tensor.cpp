#include "cpals/tensor.hpp"

#include "cpals/errors.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace cpals {

namespace {

void validate_shape(const Shape& shape) {
    if (shape.empty()) throw DimensionError("tensor order must be at least 1");
    if (shape.size() > DenseTensor::max_order)
        throw DimensionError("tensor order " + std::to_string(shape.size()) +
                             " exceeds the supported maximum of 8");
    for (std::size_t extent : shape)
        if (extent == 0) throw DimensionError("tensor extents must be positive");
}

Eigen::Index as_index(std::size_t n) { return static_cast<Eigen::Index>(n); }

// Sizes of the index blocks before and after `mode` in colex layout.
std::pair<std::size_t, std::size_t> split_extents(const Shape& shape, std::size_t mode) {
    std::size_t left = 1;
    for (std::size_t m = 0; m < mode; ++m) left *= shape[m];
    std::size_t right = 1;
    for (std::size_t m = mode + 1; m < shape.size(); ++m) right *= shape[m];
    return {left, right};
}

void check_mode(const DenseTensor& x, std::size_t mode) {
    if (mode >= x.order())
        throw DimensionError("mode " + std::to_string(mode) + " out of range for order " +
                             std::to_string(x.order()));
}

}  // namespace

std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
    validate_shape(shape_);
    values_.assign(shape_size(shape_), 0.0);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    validate_shape(shape_);
    if (values_.size() != shape_size(shape_))
        throw DimensionError("tensor payload has " + std::to_string(values_.size()) +
                             " values, shape requires " + std::to_string(shape_size(shape_)));
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) throw DimensionError("index order mismatch");
    std::size_t linear = 0;
    std::size_t stride = 1;
    for (std::size_t m = 0; m < shape_.size(); ++m) {
        if (index[m] >= shape_[m]) throw DimensionError("index out of range");
        linear += index[m] * stride;
        stride *= shape_[m];
    }
    return linear;
}

Eigen::Map<const Matrix> DenseTensor::mode1_view() const {
    const std::size_t rows = shape_.at(0);
    return {values_.data(), as_index(rows), as_index(values_.size() / rows)};
}

double inner_product(const DenseTensor& x, const DenseTensor& y) {
    if (x.shape() != y.shape()) throw DimensionError("inner_product: shape mismatch");
    const auto xs = x.values();
    const auto ys = y.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sum += xs[i] * ys[i];
    return sum;
}

double frobenius_norm(const DenseTensor& x) { return std::sqrt(inner_product(x, x)); }

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw DimensionError("khatri_rao: column counts differ (" + std::to_string(a.cols()) +
                             " vs " + std::to_string(b.cols()) + ")");
    const Eigen::Index rows_b = b.rows();
    Matrix out(a.rows() * rows_b, a.cols());
    for (Eigen::Index k = 0; k < a.cols(); ++k)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.col(k).segment(i * rows_b, rows_b) = a(i, k) * b.col(k);
    return out;
}

Matrix khatri_rao_except(std::span<const Matrix> factors, std::size_t skip_mode) {
    if (skip_mode >= factors.size()) throw DimensionError("khatri_rao_except: mode out of range");
    const Eigen::Index cols = factors[0].cols();
    Matrix out = Matrix::Ones(1, cols);
    // Build right to left: the lowest mode ends up varying fastest.
    for (std::size_t m = factors.size(); m-- > 0;) {
        if (m == skip_mode) continue;
        out = khatri_rao(out, factors[m]);
    }
    return out;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("hadamard: shape mismatch");
    return a.cwiseProduct(b);
}

Matrix hadamard_except(std::span<const Matrix> mats, std::size_t skip_mode) {
    if (skip_mode >= mats.size()) throw DimensionError("hadamard_except: mode out of range");
    if (mats.size() < 2) throw DimensionError("hadamard_except: need at least two matrices");
    Matrix out;
    for (std::size_t m = mats.size(); m-- > 0;) {
        if (m == skip_mode) continue;
        out = out.size() == 0 ? mats[m] : hadamard(out, mats[m]);
    }
    return out;
}

Matrix matricize(const DenseTensor& x, std::size_t mode) {
    check_mode(x, mode);
    const std::size_t rows = x.extent(mode);
    const auto [left, right] = split_extents(x.shape(), mode);
    Matrix out(as_index(rows), as_index(left * right));
    const auto values = x.values();
    for (std::size_t r = 0; r < right; ++r)
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t l = 0; l < left; ++l)
                out(as_index(i), as_index(l + left * r)) = values[l + left * (i + rows * r)];
    return out;
}

Matrix mttkrp(const DenseTensor& x, const Matrix& khatri_rao_product, std::size_t mode) {
    check_mode(x, mode);
    const std::size_t rows = x.extent(mode);
    const auto [left, right] = split_extents(x.shape(), mode);
    if (static_cast<std::size_t>(khatri_rao_product.rows()) != left * right)
        throw DimensionError("mttkrp: Khatri-Rao row count does not match tensor");
    if (mode == 0) return x.mode1_view() * khatri_rao_product;

    // Each trailing index r selects a contiguous (left x rows) slab whose
    // transpose multiplies the matching block of Khatri-Rao rows.
    Matrix out = Matrix::Zero(as_index(rows), khatri_rao_product.cols());
    const double* base = x.values().data();
    for (std::size_t r = 0; r < right; ++r) {
        Eigen::Map<const Matrix> slab(base + r * left * rows, as_index(left), as_index(rows));
        out.noalias() +=
            slab.transpose() * khatri_rao_product.middleRows(as_index(r * left), as_index(left));
    }
    return out;
}

DenseTensor outer(std::span<const Vector> vectors) {
    Shape shape;
    for (const auto& v : vectors) shape.push_back(static_cast<std::size_t>(v.size()));
    DenseTensor out(shape);
    auto data = out.data();
    data[0] = 1.0;
    std::size_t filled = 1;
    // Expand one mode at a time; each pass scales the filled prefix.
    for (const auto& v : vectors) {
        for (Eigen::Index i = v.size(); i-- > 0;)
            for (std::size_t j = 0; j < filled; ++j)
                data[static_cast<std::size_t>(i) * filled + j] = v(i) * data[j];
        filled *= static_cast<std::size_t>(v.size());
    }
    return out;
}

Matrix diag_part(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("diag_part: matrix is not square");
    Matrix out = Matrix::Zero(a.rows(), a.cols());
    out.diagonal() = a.diagonal();
    return out;
}

Matrix offdiag_part(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("offdiag_part: matrix is not square");
    Matrix out = a;
    out.diagonal().setZero();
    return out;
}

double norm_max(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double norm_one_two(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.colwise().norm().maxCoeff();
}

}  // namespace cpals
