#include "cpals/kruskal.hpp"

#include "cpals/errors.hpp"

#include <cmath>
#include <string>

namespace cpals {

KruskalModel::KruskalModel(Vector w, std::vector<Matrix> f)
    : weights(std::move(w)), factors(std::move(f)) {
    check_model(*this);
}

Shape KruskalModel::shape() const {
    Shape shape;
    for (const auto& a : factors) shape.push_back(static_cast<std::size_t>(a.rows()));
    return shape;
}

bool KruskalModel::has_unit_columns(double tol) const {
    for (const auto& a : factors)
        for (Eigen::Index r = 0; r < a.cols(); ++r)
            if (std::abs(a.col(r).norm() - 1.0) > tol) return false;
    return true;
}

KruskalModel KruskalModel::normalized() const {
    KruskalModel out = *this;
    for (auto& a : out.factors) {
        for (Eigen::Index r = 0; r < a.cols(); ++r) {
            const double norm = a.col(r).norm();
            if (!(norm > 0.0)) throw DegenerateComponentError(static_cast<std::size_t>(r));
            a.col(r) /= norm;
            out.weights(r) *= norm;
        }
    }
    return out;
}

KruskalModel KruskalModel::permuted(const std::vector<std::size_t>& perm) const {
    if (perm.size() != rank()) throw DimensionError("permutation length differs from rank");
    KruskalModel out = *this;
    for (std::size_t r = 0; r < perm.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(perm[r]);
        out.weights(static_cast<Eigen::Index>(r)) = weights(src);
        for (std::size_t n = 0; n < factors.size(); ++n)
            out.factors[n].col(static_cast<Eigen::Index>(r)) = factors[n].col(src);
    }
    return out;
}

void check_model(const KruskalModel& model) {
    if (model.factors.empty()) throw DimensionError("Kruskal model needs at least one factor");
    if (model.factors.size() > DenseTensor::max_order)
        throw DimensionError("Kruskal model order exceeds 8");
    if (model.weights.size() < 1) throw DimensionError("Kruskal model rank must be at least 1");
    for (std::size_t n = 0; n < model.factors.size(); ++n) {
        const auto& a = model.factors[n];
        if (a.cols() != model.weights.size())
            throw DimensionError("factor " + std::to_string(n) + " has " +
                                 std::to_string(a.cols()) + " columns, rank is " +
                                 std::to_string(model.weights.size()));
        if (a.rows() < 1) throw DimensionError("factor " + std::to_string(n) + " has no rows");
    }
}

DenseTensor kruskal_reconstruct(const KruskalModel& model) {
    check_model(model);
    const Matrix kr = khatri_rao_except(model.factors, 0);
    const Matrix full = model.factors[0] * model.weights.asDiagonal() * kr.transpose();
    return DenseTensor(model.shape(), std::vector<double>(full.data(), full.data() + full.size()));
}

double direct_error(const DenseTensor& x, const KruskalModel& model) {
    const DenseTensor approx = kruskal_reconstruct(model);
    if (approx.shape() != x.shape()) throw DimensionError("model shape differs from tensor");
    const auto xs = x.values();
    const auto ys = approx.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sum += (xs[i] - ys[i]) * (xs[i] - ys[i]);
    return std::sqrt(sum);
}

}  // namespace cpals
