#pragma once

#include "cpals/tensor.hpp"

#include <cstddef>
#include <vector>

namespace cpals {

/// Weights plus one factor matrix per mode: sum_r w_r a1_r o ... o aN_r.
///
/// Construction only checks that the pieces fit together. Solvers expect unit
/// factor columns; `normalized()` produces that form without changing the
/// represented tensor.
struct KruskalModel {
    Vector weights;
    std::vector<Matrix> factors;

    KruskalModel() = default;
    KruskalModel(Vector weights, std::vector<Matrix> factors);

    std::size_t order() const noexcept { return factors.size(); }
    std::size_t rank() const noexcept { return static_cast<std::size_t>(weights.size()); }
    Shape shape() const;

    /// True when every factor column has unit 2-norm within `tol`.
    bool has_unit_columns(double tol = 1e-12) const;

    /// Moves all column norms into the weights. Zero columns throw
    /// DegenerateComponentError.
    KruskalModel normalized() const;

    /// Consistent permutation of components: new component r is old `perm[r]`.
    KruskalModel permuted(const std::vector<std::size_t>& perm) const;
};

/// Validates sizes; throws DimensionError on mismatch.
void check_model(const KruskalModel& model);

/// The Kruskal operator.
DenseTensor kruskal_reconstruct(const KruskalModel& model);

/// ||x - reconstruct(model)|| computed from the dense reconstruction.
double direct_error(const DenseTensor& x, const KruskalModel& model);

}  // namespace cpals
