#include "cpals/coherence_reduction.hpp"

#include "cpals/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace cpals {

void HybridSchedule::validate() const {
    if (!(omega >= 0.0 && omega <= 1.0)) throw PreconditionError("omega must lie in [0, 1]");
}

CoherenceReduced coherence_reduce(const Matrix& a_hat, double omega) {
    if (!(omega >= 0.0 && omega <= 1.0)) throw PreconditionError("omega must lie in [0, 1]");
    if (omega == 1.0 || a_hat.size() == 0) return {a_hat, false};

    const Eigen::JacobiSVD<Matrix> svd(a_hat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double cutoff = static_cast<double>(std::max(a_hat.rows(), a_hat.cols())) *
                          std::numeric_limits<double>::epsilon() *
                          (sigma.size() ? sigma(0) : 0.0);
    CoherenceReduced out;
    Vector powered(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cutoff) {
            powered(i) = std::pow(sigma(i), omega);
        } else {
            powered(i) = 0.0;
            out.rank_deficient = true;
        }
    }
    // A thin SVD of a wide matrix has fewer singular values than columns.
    if (sigma.size() < a_hat.cols()) out.rank_deficient = true;
    out.matrix = svd.matrixU() * powered.asDiagonal() * svd.matrixV().transpose();
    return out;
}

void step_reduced(const DenseTensor& x, KruskalModel& model, AltLSState& state,
                  const HybridSchedule& schedule) {
    schedule.validate();
    const std::size_t order = model.order();
    if (model.shape() != x.shape()) throw DimensionError("model shape differs from tensor shape");

    for (std::size_t n = 0; n < order; ++n) {
        state.khatri_rao[n] = khatri_rao_except(model.factors, n);
        state.hadamard[n] = order == 1 ? Matrix::Ones(model.rank(), model.rank())
                                       : hadamard_except(state.grams, n);
        Matrix reduced = coherence_reduce(mode_update(x, state, n), schedule.omega).matrix;
        if (schedule.defer_normalization) {
            model.factors[n] = std::move(reduced);
        } else {
            auto [factor, norms] = normalize_columns(reduced);
            model.factors[n] = std::move(factor);
            if (n == state.weight_mode) model.weights = norms;
        }
        state.grams[n] = model.factors[n].transpose() * model.factors[n];
    }

    if (schedule.defer_normalization) {
        // The sweep solved against unit weights, so the represented tensor is
        // [[1; A(1..N)]]; folding every column norm keeps it unchanged.
        model.weights = Vector::Ones(static_cast<Eigen::Index>(model.rank()));
        for (std::size_t n = 0; n < order; ++n) {
            auto [factor, norms] = normalize_columns(model.factors[n]);
            model.factors[n] = std::move(factor);
            model.weights = model.weights.cwiseProduct(norms);
            state.grams[n] = model.factors[n].transpose() * model.factors[n];
        }
    }
    state.error_terms_current = false;
    ++state.iteration;
}

RunResult run_hybrid(const DenseTensor& x, const KruskalModel& init,
                     const HybridSchedule& schedule, const StoppingRule& rule,
                     const RunHooks& hooks) {
    schedule.validate();
    rule.validate();
    check_model(init);
    if (init.shape() != x.shape()) throw DimensionError("initial model shape differs from tensor");
    if (!init.has_unit_columns(1e-10))
        throw PreconditionError("initial factor matrices must have unit columns");

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

    RunResult result{init, {}, StopReason::max_iterations};
    KruskalModel& model = result.model;
    AltLSState state = make_state(model);
    const double x_norm_sq = inner_product(x, x);
    const double x_norm = std::sqrt(x_norm_sq);

    double previous_error = 0.0;
    double current_error = 0.0;
    auto record = [&](std::size_t k, Phase phase) {
        if (!state.error_terms_current) refresh_error_terms(x, model, state);
        previous_error = current_error;
        current_error = fast_error(x_norm_sq, state, model);
        auto rec = make_record(k, x, x_norm, model, current_error, hooks, phase, elapsed());
        result.trace.records.push_back(rec);
        if (hooks.on_iteration) hooks.on_iteration(rec, model);
    };

    const std::size_t total = std::min(schedule.reduced_iterations + schedule.regular_iterations,
                                       rule.max_iterations);
    record(0, schedule.reduced_iterations > 0 ? Phase::reduced : Phase::regular);
    for (std::size_t k = 1; k <= total; ++k) {
        const bool reduced = k <= schedule.reduced_iterations;
        try {
            if (reduced)
                step_reduced(x, model, state, schedule);
            else
                step_serial(x, model, state);
        } catch (const DegenerateComponentError& e) {
            throw e.at_iteration(k);
        }
        record(k, reduced ? Phase::reduced : Phase::regular);
        if (reduced) continue;
        const auto& rec = result.trace.back();
        if (should_stop(rule, k, previous_error, current_error, rec.epsilon, result.reason)) break;
    }
    if (schedule.reduced_iterations > 0)
        result.trace.phase_boundary = std::min(schedule.reduced_iterations, total);
    return result;
}

}  // namespace cpals
