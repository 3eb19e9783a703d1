#include "support.hpp"

#include "cpals/errors.hpp"
#include "cpals/kruskal.hpp"
#include "cpals/tensor.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace cpals;
using cpals::test::iota_tensor;
using cpals::test::random_model;
using cpals::test::random_shape;
using cpals::test::random_tensor;
using cpals::test::rel_diff;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

// Colex multi-index of a linear offset.
std::vector<std::size_t> unravel(std::size_t offset, const Shape& shape) {
    std::vector<std::size_t> idx(shape.size());
    for (std::size_t n = 0; n < shape.size(); ++n) {
        idx[n] = offset % shape[n];
        offset /= shape[n];
    }
    return idx;
}

}  // namespace

TEST(DenseTensor, ColexLinearIndex) {
    const DenseTensor x = iota_tensor({2, 3, 4});
    const std::array<std::size_t, 3> idx{1, 2, 3};
    EXPECT_EQ(x.linear_index(idx), 1u + 2u * 2u + 3u * 6u);
    EXPECT_DOUBLE_EQ(x(idx), 24.0);
}

TEST(DenseTensor, RejectsBadShapes) {
    EXPECT_THROW(DenseTensor(Shape{2, 2}, std::vector<double>(3)), DimensionError);
    EXPECT_THROW(DenseTensor(Shape(9, 1)), DimensionError);
}

TEST(InnerProduct, Examples) {
    const DenseTensor ones({2, 2}, std::vector<double>(4, 1.0));
    EXPECT_DOUBLE_EQ(inner_product(ones, ones), 4.0);
    Rng rng(3);
    const DenseTensor x = random_tensor(rng, {3, 2, 2});
    EXPECT_DOUBLE_EQ(inner_product(x, DenseTensor({3, 2, 2})), 0.0);

    const DenseTensor y = iota_tensor({2, 2, 2});
    double oracle = 0.0;
    for (int i = 1; i <= 8; ++i) oracle += i * i;
    EXPECT_DOUBLE_EQ(inner_product(y, y), oracle);
    EXPECT_DOUBLE_EQ(oracle, 204.0);
}

TEST(InnerProduct, ShapeMismatchThrows) {
    EXPECT_THROW(inner_product(DenseTensor({2, 3}), DenseTensor({3, 2})), DimensionError);
}

TEST(KhatriRao, Examples) {
    const Matrix i2 = Matrix::Identity(2, 2);
    Matrix expected = Matrix::Zero(4, 2);
    expected(0, 0) = 1.0;
    expected(3, 1) = 1.0;
    EXPECT_EQ(khatri_rao(i2, i2), expected);

    EXPECT_EQ(khatri_rao(mat({{1, 2}, {3, 4}}), mat({{0, 1}, {1, 0}})),
              mat({{0, 2}, {1, 0}, {0, 4}, {3, 0}}));

    Rng rng(5);
    const Matrix a = gaussian_matrix(rng, 4, 3);
    EXPECT_EQ(khatri_rao(a, Matrix::Ones(1, 3)), a);
}

TEST(KhatriRao, ColumnMismatchThrows) {
    EXPECT_THROW(khatri_rao(Matrix::Ones(2, 2), Matrix::Ones(2, 3)), DimensionError);
}

TEST(Kronecker, Examples) {
    Rng rng(7);
    const Matrix b = gaussian_matrix(rng, 3, 2);
    EXPECT_TRUE(kronecker(mat({{2.5}}), b).isApprox(2.5 * b, 0.0));
    EXPECT_EQ(kronecker(Matrix::Identity(2, 2), Matrix::Identity(2, 2)), Matrix::Identity(4, 4));
    EXPECT_EQ(kronecker(mat({{1, 2}}), mat({{3}, {4}})), mat({{3, 6}, {4, 8}}));
}

TEST(Hadamard, Examples) {
    Rng rng(11);
    const Matrix a = gaussian_matrix(rng, 3, 4);
    EXPECT_EQ(hadamard(a, Matrix::Ones(3, 4)), a);
    EXPECT_EQ(hadamard(a, Matrix::Zero(3, 4)), Matrix::Zero(3, 4));
    EXPECT_EQ(hadamard(mat({{1, 2}, {3, 4}}), mat({{5, 6}, {7, 8}})), mat({{5, 12}, {21, 32}}));
    EXPECT_THROW(hadamard(a, Matrix::Ones(4, 3)), DimensionError);
}

TEST(Matricize, Examples) {
    const DenseTensor x = iota_tensor({2, 2, 2});
    EXPECT_EQ(matricize(x, 0), mat({{1, 3, 5, 7}, {2, 4, 6, 8}}));
    EXPECT_EQ(matricize(x, 2), mat({{1, 2, 3, 4}, {5, 6, 7, 8}}));

    const DenseTensor v = iota_tensor({5});
    const Matrix m = matricize(v, 0);
    ASSERT_EQ(m.rows(), 5);
    ASSERT_EQ(m.cols(), 1);
    for (Eigen::Index i = 0; i < 5; ++i) EXPECT_EQ(m(i, 0), i + 1.0);
}

TEST(Matricize, MatchesIndexOracle) {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Shape shape = random_shape(rng, 1, 5, 4);
        const DenseTensor x = random_tensor(rng, shape);
        for (std::size_t n = 0; n < shape.size(); ++n) {
            const Matrix m = matricize(x, n);
            for (std::size_t off = 0; off < x.size(); ++off) {
                const auto idx = unravel(off, shape);
                std::size_t col = 0, stride = 1;
                for (std::size_t k = 0; k < shape.size(); ++k) {
                    if (k == n) continue;
                    col += idx[k] * stride;
                    stride *= shape[k];
                }
                ASSERT_EQ(m(static_cast<Eigen::Index>(idx[n]), static_cast<Eigen::Index>(col)),
                          x.values()[off]);
            }
        }
    }
}

TEST(Mttkrp, MatchesMatricizedProduct) {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Shape shape = random_shape(rng, 2, 4, 5);
        const DenseTensor x = random_tensor(rng, shape);
        const KruskalModel m = random_model(rng, shape, cpals::test::draw_size(rng, 1, 4));
        for (std::size_t n = 0; n < shape.size(); ++n) {
            const Matrix k = khatri_rao_except(m.factors, n);
            EXPECT_LT(rel_diff(mttkrp(x, k, n), matricize(x, n) * k), 1e-13);
        }
    }
}

TEST(DiagSplit, Examples) {
    const Matrix i3 = Matrix::Identity(3, 3);
    EXPECT_EQ(diag_part(i3), i3);
    EXPECT_EQ(offdiag_part(i3), Matrix::Zero(3, 3));
    EXPECT_EQ(diag_part(Matrix::Ones(2, 2)), Matrix::Identity(2, 2));
    EXPECT_EQ(offdiag_part(Matrix::Ones(2, 2)), mat({{0, 1}, {1, 0}}));
    EXPECT_THROW(diag_part(Matrix::Ones(2, 3)), DimensionError);
    EXPECT_THROW(offdiag_part(Matrix::Ones(2, 3)), DimensionError);
}

TEST(Norms, Examples) {
    EXPECT_DOUBLE_EQ(norm_max(Matrix::Identity(3, 3)), 1.0);
    EXPECT_DOUBLE_EQ(norm_one_two(Matrix::Identity(3, 3)), 1.0);
    EXPECT_DOUBLE_EQ(norm_one_two(mat({{3, 0}, {4, 0}})), 5.0);
    EXPECT_DOUBLE_EQ(norm_max(mat({{1, -7}, {4, 0}})), 7.0);
    EXPECT_DOUBLE_EQ(norm_max(Matrix::Zero(2, 2)), 0.0);
    EXPECT_DOUBLE_EQ(norm_one_two(Matrix::Zero(2, 2)), 0.0);
}

TEST(Kruskal, ReconstructExamples) {
    const Shape shape{3, 2, 4};
    std::vector<Matrix> factors;
    for (std::size_t e : shape) factors.push_back(Matrix(Vector::Unit(static_cast<Eigen::Index>(e), 0)));
    const DenseTensor x = kruskal_reconstruct(KruskalModel(Vector::Ones(1), factors));
    DenseTensor expected(shape);
    expected.data()[0] = 1.0;
    EXPECT_EQ(x, expected);

    Rng rng(19);
    KruskalModel m = random_model(rng, shape, 3);
    m.weights.setZero();
    EXPECT_EQ(kruskal_reconstruct(m), DenseTensor(shape));
}

TEST(Kruskal, ReconstructMatchesTripleLoop) {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const Shape shape = random_shape(rng, 3, 3, 6);
        const KruskalModel m = random_model(rng, shape, 2);
        const DenseTensor x = kruskal_reconstruct(m);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < shape[0]; ++i)
            for (std::size_t j = 0; j < shape[1]; ++j)
                for (std::size_t k = 0; k < shape[2]; ++k) {
                    double v = 0.0;
                    for (Eigen::Index r = 0; r < 2; ++r)
                        v += m.weights(r) * m.factors[0](static_cast<Eigen::Index>(i), r) *
                             m.factors[1](static_cast<Eigen::Index>(j), r) *
                             m.factors[2](static_cast<Eigen::Index>(k), r);
                    const std::array<std::size_t, 3> idx{i, j, k};
                    err = std::max(err, std::abs(x(idx) - v));
                    scale = std::max(scale, std::abs(v));
                }
        EXPECT_LE(err, 1e-13 * scale);
    }
}

TEST(Kruskal, NormalizedKeepsTensor) {
    Rng rng(29);
    KruskalModel m = random_model(rng, {3, 4, 5}, 3);
    for (auto& a : m.factors) a *= 3.0;
    const KruskalModel n = m.normalized();
    EXPECT_TRUE(n.has_unit_columns());
    EXPECT_FALSE(m.has_unit_columns());
    EXPECT_LT((kruskal_reconstruct(m).mode1_view() - kruskal_reconstruct(n).mode1_view()).norm(),
              1e-12 * frobenius_norm(kruskal_reconstruct(m)));
}

TEST(Kruskal, CheckModelRejectsMismatch) {
    EXPECT_THROW(KruskalModel(Vector::Ones(2), {Matrix::Ones(3, 2), Matrix::Ones(3, 3)}),
                 DimensionError);
    KruskalModel m(Vector::Ones(2), {Matrix::Ones(3, 2)});
    m.factors.push_back(Matrix::Ones(3, 3));
    EXPECT_THROW(check_model(m), DimensionError);
}

// Properties over random shapes.

TEST(TensorProperties, NormSquaredIsSelfInnerProduct) {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const DenseTensor x = random_tensor(rng, random_shape(rng, 1, 5, 5));
        const double n = frobenius_norm(x);
        const double ip = inner_product(x, x);
        EXPECT_NEAR(n * n, ip, 1e-13 * ip);
    }
}

TEST(TensorProperties, KhatriRaoGramIsHadamardOfGrams) {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cols = static_cast<Eigen::Index>(cpals::test::draw_size(rng, 1, 6));
        const Matrix a = gaussian_matrix(rng, static_cast<Eigen::Index>(cpals::test::draw_size(rng, 1, 7)), cols);
        const Matrix b = gaussian_matrix(rng, static_cast<Eigen::Index>(cpals::test::draw_size(rng, 1, 7)), cols);
        const Matrix kr = khatri_rao(a, b);
        EXPECT_LT(rel_diff(kr.transpose() * kr,
                           hadamard(a.transpose() * a, b.transpose() * b)),
                  1e-12);
    }
}

TEST(TensorProperties, KhatriRaoColumnIsKroneckerOfColumns) {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto cols = static_cast<Eigen::Index>(cpals::test::draw_size(rng, 1, 5));
        const Matrix a = gaussian_matrix(rng, static_cast<Eigen::Index>(cpals::test::draw_size(rng, 1, 6)), cols);
        const Matrix b = gaussian_matrix(rng, static_cast<Eigen::Index>(cpals::test::draw_size(rng, 1, 6)), cols);
        const Matrix kr = khatri_rao(a, b);
        for (Eigen::Index k = 0; k < cols; ++k)
            EXPECT_EQ(Matrix(kr.col(k)), kronecker(a.col(k), b.col(k)));
    }
}

TEST(TensorProperties, MatricizedReconstructionFactorizes) {
    Rng rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const Shape shape = random_shape(rng, 2, 5, 5);
        const KruskalModel m = random_model(rng, shape, cpals::test::draw_size(rng, 1, 4));
        const DenseTensor x = kruskal_reconstruct(m);
        for (std::size_t n = 0; n < shape.size(); ++n) {
            const Matrix expected = m.factors[n] * m.weights.asDiagonal() *
                                    khatri_rao_except(m.factors, n).transpose();
            EXPECT_LT(rel_diff(matricize(x, n), expected), 1e-12);
        }
    }
}

TEST(TensorProperties, HadamardExceptMatchesKhatriRaoGram) {
    Rng rng(47);
    const KruskalModel m = random_model(rng, {3, 4, 2, 5}, 3);
    std::vector<Matrix> grams;
    for (const auto& a : m.factors) grams.push_back(a.transpose() * a);
    for (std::size_t n = 0; n < 4; ++n) {
        const Matrix k = khatri_rao_except(m.factors, n);
        EXPECT_LT(rel_diff(hadamard_except(grams, n), k.transpose() * k), 1e-13);
    }
}
