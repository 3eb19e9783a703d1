#pragma once

#include "cpals/diagnostics.hpp"
#include "cpals/kruskal.hpp"
#include "cpals/tensor.hpp"
#include "cpals/trace.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cpals {

enum class Variant {
    serial,    // modes see factors already updated in the current sweep
    parallel,  // every mode solves against the previous iterate
};

std::string_view to_string(Variant variant);

/// Loop guard for `run`. A zero tolerance or floor disables that test.
struct StoppingRule {
    std::size_t max_iterations = 100;
    double error_change_tol = 1e-10;  // relative change of the relative error
    double epsilon_floor = 0.0;       // needs ground truth in the hooks

    void validate() const;
};

/// Per-mode workspace. Index n holds G, K, H, M for mode n.
struct AltLSState {
    std::vector<Matrix> grams;        // A(n)^T A(n)
    std::vector<Matrix> khatri_rao;   // K(n), decreasing mode order
    std::vector<Matrix> hadamard;     // H(n) = Hadamard of G(m), m != n
    std::vector<Matrix> mttkrp;       // M(n) = X_(n) K(n)
    std::size_t iteration = 0;
    std::size_t weight_mode = 0;      // mode whose column norms become the weights
    bool error_terms_current = false; // M, H at weight_mode match the model's factors
};

/// Mode with the smallest extent; ties go to the highest such mode so the
/// serial sweep can reuse its last products for the error.
std::size_t default_weight_mode(const Shape& shape);

/// Workspace with Grams of `model` formed.
AltLSState make_state(const KruskalModel& model);

/// Solves A H = M for A, i.e. returns M H^+. Uses Cholesky when H is
/// numerically SPD (reciprocal condition >= 1e-12) and otherwise an
/// eigendecomposition pseudoinverse with cutoff R * eps * lambda_max.
Matrix solve_gram_system(const Matrix& mttkrp, const Matrix& hadamard);

/// Unnormalized least-squares update M(n) H(n)^+ for mode n. Forms and
/// stores M(n); K(n) and H(n) must already be present in `state`.
Matrix mode_update(const DenseTensor& x, AltLSState& state, std::size_t mode);

struct NormalizedColumns {
    Matrix factor;
    Vector norms;
};

/// Splits a_hat into unit columns and their norms. A zero (or non-finite)
/// column throws DegenerateComponentError naming the column.
NormalizedColumns normalize_columns(const Matrix& a_hat);

/// One iteration where every mode solves against the previous factors. All
/// G and K are frozen first. `mode_order` permutes the processing order of
/// the second phase; `concurrent` runs the modes on separate threads.
void step_parallel(const DenseTensor& x, KruskalModel& model, AltLSState& state,
                   std::span<const std::size_t> mode_order = {}, bool concurrent = false);

/// One Gauss-Seidel sweep over the modes.
void step_serial(const DenseTensor& x, KruskalModel& model, AltLSState& state);

void step(Variant variant, const DenseTensor& x, KruskalModel& model, AltLSState& state);

/// Forms K, H and M at state.weight_mode from the model's current factors.
void refresh_error_terms(const DenseTensor& x, const KruskalModel& model, AltLSState& state);

/// ||X - [[w; A]]|| from the products at state.weight_mode, without forming
/// the approximation. Loses about half the digits to cancellation.
double fast_error(double x_norm_sq, const AltLSState& state, const KruskalModel& model);

/// Optional instrumentation for `run`.
struct RunHooks {
    const KruskalModel* truth = nullptr;  // enables epsilon and weight_error columns
    Pairing pairing = Pairing::identity;
    bool direct_error = false;            // record ||X - X_k|| from the dense reconstruction
    bool concurrent_modes = false;        // parallel variant only
    std::function<void(const IterationRecord&, const KruskalModel&)> on_iteration;
};

enum class StopReason { max_iterations, error_change, epsilon_floor };

std::string_view to_string(StopReason reason);

struct RunResult {
    KruskalModel model;
    ConvergenceTrace trace;
    StopReason reason = StopReason::max_iterations;
};

/// Builds a trace record for `model`. `error` is the absolute fit error used
/// unless hooks.direct_error asks for the dense one.
IterationRecord make_record(std::size_t iteration, const DenseTensor& x, double x_norm,
                            const KruskalModel& model, double error, const RunHooks& hooks,
                            Phase phase, double wall_seconds);

/// True when `rule` says to stop after iteration `iteration`. The error
/// change test uses the fast errors of the previous and current iterates.
bool should_stop(const StoppingRule& rule, std::size_t iteration, double previous_error,
                 double current_error, std::optional<double> epsilon, StopReason& reason);

/// Iterates `variant` from `init` until `rule` fires. The initial factors
/// must have unit columns. DegenerateComponentError escapes with the
/// iteration index attached.
RunResult run(const DenseTensor& x, const KruskalModel& init, Variant variant,
              const StoppingRule& rule = {}, const RunHooks& hooks = {});

}  // namespace cpals
