#pragma once

#include "cpals/kruskal.hpp"
#include "cpals/tensor.hpp"
#include "cpals/trace.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cpals {

/// How computed components are matched to ground-truth components.
enum class Pairing {
    identity,  // component r of the model against component r of the truth
    greedy,    // largest mode-averaged |cos| first
};

/// |sin| of the angle between span{u} and span{v}. Throws
/// DegenerateComponentError for a zero vector.
///
/// Evaluated from the residual of projecting one unit vector onto the other,
/// which keeps full relative accuracy for nearly parallel vectors; the
/// textbook sqrt(1 - cos^2) form cannot resolve angles below ~1e-8.
double sin_angle(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v);

/// match[r] = index of the model component paired with truth component r.
std::vector<std::size_t> component_pairing(const KruskalModel& model, const KruskalModel& truth,
                                           Pairing pairing);

/// max over modes and components of sin_angle(model a_{match[r]}, truth a_r).
double epsilon_metric(const KruskalModel& model, const KruskalModel& truth,
                      Pairing pairing = Pairing::identity);

/// ||truth.w * truth.w - model.w * model.w||_inf under the same pairing.
double weight_error(const KruskalModel& model, const KruskalModel& truth,
                    Pairing pairing = Pairing::identity);

/// max_{i != j} |<a_i, a_j>|. Columns must be unit length within 1e-8.
double coherence(const Matrix& a);

/// max |w| / min |w|. A zero weight throws DegenerateComponentError.
double kappa(const Vector& weights);

/// Least-squares slope of y against x in log-log space.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Empirical convergence order: slope of log eps_k against log eps_{k-1}.
///
/// The k = 0 entry and the trailing entries below `floor` are dropped. At
/// least three entries must remain, otherwise InsufficientDataError.
double estimate_order(std::span<const double> epsilons, double floor = 1e-13);

/// Indices k >= 1 with eps_k >= floor, up to the first entry below the floor.
std::vector<std::size_t> pre_saturation_window(std::span<const double> epsilons,
                                               double floor = 1e-13);

struct BoundReport {
    std::size_t iteration = 0;
    bool hypothesis_holds = false;  // R (2 sqrt2 eps_{k-1})^{N-1} <= 1/3
    double lhs = 0.0;               // eps_k
    double bound = 0.0;             // 9 kappa sqrt(R) (4 sqrt2 eps_{k-1})^{N-1}
    double margin = 0.0;
    bool satisfied() const { return !hypothesis_holds || lhs <= bound; }
};

/// Per-iteration check of the order-(N-1) odeco contraction bound. Iterations
/// where the hypothesis fails are reported with hypothesis_holds = false.
std::vector<BoundReport> theorem_bound_check(std::span<const double> epsilons, double kappa,
                                             std::size_t rank, std::size_t order);

/// Checks max_r |lambda_r^(k)^2 - lambda_r^2| <= C eps_{k-1} with C fit at
/// k = 1 and widened by `slack`. Returns the iterations that violate it.
std::vector<std::size_t> weight_bound_violations(std::span<const double> epsilons,
                                                 std::span<const double> weight_errors,
                                                 double slack = 1.0, double floor = 1e-13);

}  // namespace cpals
