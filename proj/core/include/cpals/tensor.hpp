#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace cpals {

using Matrix = Eigen::MatrixXd;  // column-major
using Vector = Eigen::VectorXd;
using Shape = std::vector<std::size_t>;

/// Dense N-way array stored colexicographically (first index fastest).
///
/// Orders up to 8 are supported. Values are immutable once constructed
/// except through `data()`, which generators and parsers use to fill storage.
class DenseTensor {
public:
    static constexpr std::size_t max_order = 8;

    DenseTensor() = default;

    /// Zero tensor of the given shape.
    explicit DenseTensor(Shape shape);

    /// Takes ownership of `values` laid out colexicographically.
    DenseTensor(Shape shape, std::vector<double> values);

    std::size_t order() const noexcept { return shape_.size(); }
    const Shape& shape() const noexcept { return shape_; }
    std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> data() noexcept { return values_; }

    double operator()(std::span<const std::size_t> index) const {
        return values_[linear_index(index)];
    }
    double& operator()(std::span<const std::size_t> index) {
        return values_[linear_index(index)];
    }

    std::size_t linear_index(std::span<const std::size_t> index) const;

    /// Zero-copy view of the mode-1 matricization (I_1 x prod_{m>1} I_m).
    Eigen::Map<const Matrix> mode1_view() const;

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape shape_;
    std::vector<double> values_;
};

std::size_t shape_size(const Shape& shape);

// Tensor reductions

double inner_product(const DenseTensor& x, const DenseTensor& y);
double frobenius_norm(const DenseTensor& x);

// Matrix products

/// Column-wise Kronecker product: row (i*J + j) of column k is a(i,k) * b(j,k).
Matrix khatri_rao(const Matrix& a, const Matrix& b);

/// Khatri-Rao product of all factors except `skip_mode`, in decreasing mode
/// order: A(N-1) . ... . A(skip+1) . A(skip-1) . ... . A(0). The row index
/// therefore runs colexicographically over the remaining modes.
Matrix khatri_rao_except(std::span<const Matrix> factors, std::size_t skip_mode);

Matrix kronecker(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Hadamard product of all matrices except `skip_mode`. Requires at least
/// two matrices; for a single remaining matrix this is that matrix.
Matrix hadamard_except(std::span<const Matrix> mats, std::size_t skip_mode);

/// Mode-n matricization, 0-based mode. Columns are mode-n fibres in
/// colexicographic order of the remaining indices.
Matrix matricize(const DenseTensor& x, std::size_t mode);

/// X_(n) * K without materializing the permuted unfolding.
Matrix mttkrp(const DenseTensor& x, const Matrix& khatri_rao_product, std::size_t mode);

/// Outer product of vectors a(0) o a(1) o ... o a(N-1).
DenseTensor outer(std::span<const Vector> vectors);

// Diagonal split and norms

Matrix diag_part(const Matrix& a);
Matrix offdiag_part(const Matrix& a);

/// (1, inf)-norm: largest absolute entry.
double norm_max(const Matrix& a);

/// (1, 2)-norm: largest column 2-norm.
double norm_one_two(const Matrix& a);

}  // namespace cpals
