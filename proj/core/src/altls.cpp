#include "cpals/altls.hpp"

#include "cpals/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

namespace cpals {

std::string_view to_string(Variant variant) {
    return variant == Variant::serial ? "serial" : "parallel";
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::error_change: return "error_change";
        case StopReason::epsilon_floor: return "epsilon_floor";
    }
    return "unknown";
}

void StoppingRule::validate() const {
    if (max_iterations < 1) throw PreconditionError("max_iterations must be at least 1");
    if (!(error_change_tol >= 0.0) || !(epsilon_floor >= 0.0))
        throw PreconditionError("stopping tolerances must be non-negative");
}

std::size_t default_weight_mode(const Shape& shape) {
    std::size_t best = 0;
    for (std::size_t n = 1; n < shape.size(); ++n)
        if (shape[n] <= shape[best]) best = n;
    return best;
}

AltLSState make_state(const KruskalModel& model) {
    check_model(model);
    const std::size_t order = model.order();
    AltLSState state;
    state.grams.resize(order);
    state.khatri_rao.resize(order);
    state.hadamard.resize(order);
    state.mttkrp.resize(order);
    for (std::size_t n = 0; n < order; ++n)
        state.grams[n] = model.factors[n].transpose() * model.factors[n];
    state.weight_mode = default_weight_mode(model.shape());
    return state;
}

namespace {

// Hadamard of the Grams other than `mode`; all-ones for a first-order model.
Matrix gram_hadamard(const std::vector<Matrix>& grams, std::size_t mode) {
    if (grams.size() == 1) return Matrix::Ones(grams[0].rows(), grams[0].cols());
    return hadamard_except(grams, mode);
}

void check_inputs(const DenseTensor& x, const KruskalModel& model, const AltLSState& state) {
    check_model(model);
    if (model.shape() != x.shape()) throw DimensionError("model shape differs from tensor shape");
    if (state.grams.size() != model.order())
        throw DimensionError("solver state was built for a different model order");
}

void refresh_grams(const KruskalModel& model, AltLSState& state) {
    for (std::size_t n = 0; n < model.order(); ++n)
        state.grams[n] = model.factors[n].transpose() * model.factors[n];
}

}  // namespace

Matrix solve_gram_system(const Matrix& mttkrp_product, const Matrix& gram_hadamard_product) {
    if (gram_hadamard_product.rows() != gram_hadamard_product.cols() ||
        gram_hadamard_product.cols() != mttkrp_product.cols())
        throw DimensionError("solve_gram_system: incompatible shapes");

    const Eigen::LLT<Matrix> llt(gram_hadamard_product);
    if (llt.info() == Eigen::Success && llt.rcond() >= 1e-12)
        return llt.solve(mttkrp_product.transpose()).transpose();

    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_hadamard_product);
    const Vector& values = eig.eigenvalues();
    const double largest = values.cwiseAbs().maxCoeff();
    const double cutoff = static_cast<double>(values.size()) *
                          std::numeric_limits<double>::epsilon() * largest;
    Vector inverted = Vector::Zero(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) > cutoff) inverted(i) = 1.0 / values(i);
    const Matrix& vecs = eig.eigenvectors();
    return (mttkrp_product * vecs) * inverted.asDiagonal() * vecs.transpose();
}

Matrix mode_update(const DenseTensor& x, AltLSState& state, std::size_t mode) {
    if (mode >= state.khatri_rao.size()) throw DimensionError("mode_update: mode out of range");
    state.mttkrp[mode] = mttkrp(x, state.khatri_rao[mode], mode);
    return solve_gram_system(state.mttkrp[mode], state.hadamard[mode]);
}

NormalizedColumns normalize_columns(const Matrix& a_hat) {
    NormalizedColumns out{a_hat, Vector(a_hat.cols())};
    for (Eigen::Index r = 0; r < a_hat.cols(); ++r) {
        const double norm = a_hat.col(r).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw DegenerateComponentError(static_cast<std::size_t>(r));
        out.factor.col(r) /= norm;
        out.norms(r) = norm;
    }
    return out;
}

void step_parallel(const DenseTensor& x, KruskalModel& model, AltLSState& state,
                   std::span<const std::size_t> mode_order, bool concurrent) {
    check_inputs(x, model, state);
    const std::size_t order = model.order();

    std::vector<std::size_t> modes(order);
    if (mode_order.empty()) {
        std::iota(modes.begin(), modes.end(), std::size_t{0});
    } else {
        modes.assign(mode_order.begin(), mode_order.end());
        auto sorted = modes;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t n = 0; n < order; ++n)
            if (sorted.size() != order || sorted[n] != n)
                throw PreconditionError("mode_order must be a permutation of the modes");
    }

    // Phase 1: freeze everything derived from iteration k-1.
    refresh_grams(model, state);
    for (std::size_t n = 0; n < order; ++n) state.khatri_rao[n] = khatri_rao_except(model.factors, n);

    // Phase 2: every mode writes only its own slot.
    std::vector<NormalizedColumns> updated(order);
    auto update_mode = [&](std::size_t n) {
        state.hadamard[n] = gram_hadamard(state.grams, n);
        updated[n] = normalize_columns(mode_update(x, state, n));
    };

    if (concurrent && order > 1) {
        std::vector<std::exception_ptr> errors(order);
        {
            std::vector<std::jthread> workers;
            workers.reserve(order);
            for (std::size_t n : modes)
                workers.emplace_back([&, n] {
                    try {
                        update_mode(n);
                    } catch (...) {
                        errors[n] = std::current_exception();
                    }
                });
        }
        for (auto& err : errors)
            if (err) std::rethrow_exception(err);
    } else {
        for (std::size_t n : modes) update_mode(n);
    }

    for (std::size_t n = 0; n < order; ++n) model.factors[n] = std::move(updated[n].factor);
    model.weights = updated[state.weight_mode].norms;
    state.error_terms_current = false;
    ++state.iteration;
}

void step_serial(const DenseTensor& x, KruskalModel& model, AltLSState& state) {
    check_inputs(x, model, state);
    const std::size_t order = model.order();
    for (std::size_t n = 0; n < order; ++n) {
        state.khatri_rao[n] = khatri_rao_except(model.factors, n);
        state.hadamard[n] = gram_hadamard(state.grams, n);
        auto [factor, norms] = normalize_columns(mode_update(x, state, n));
        model.factors[n] = std::move(factor);
        if (n == state.weight_mode) model.weights = norms;
        state.grams[n] = model.factors[n].transpose() * model.factors[n];
    }
    // The last mode's K, H, M were built from the final factors of all other modes.
    state.error_terms_current = state.weight_mode == order - 1;
    ++state.iteration;
}

void step(Variant variant, const DenseTensor& x, KruskalModel& model, AltLSState& state) {
    if (variant == Variant::serial)
        step_serial(x, model, state);
    else
        step_parallel(x, model, state);
}

void refresh_error_terms(const DenseTensor& x, const KruskalModel& model, AltLSState& state) {
    check_inputs(x, model, state);
    const std::size_t n = state.weight_mode;
    refresh_grams(model, state);
    state.khatri_rao[n] = khatri_rao_except(model.factors, n);
    state.hadamard[n] = gram_hadamard(state.grams, n);
    state.mttkrp[n] = mttkrp(x, state.khatri_rao[n], n);
    state.error_terms_current = true;
}

double fast_error(double x_norm_sq, const AltLSState& state, const KruskalModel& model) {
    const std::size_t n = state.weight_mode;
    const Matrix& m = state.mttkrp.at(n);
    const Matrix& h = state.hadamard.at(n);
    const Matrix& g = state.grams.at(n);
    const Matrix scaled = model.factors.at(n) * model.weights.asDiagonal();
    const double cross = m.cwiseProduct(scaled).sum();
    const Matrix weighted_gram = model.weights.asDiagonal() * g * model.weights.asDiagonal();
    const double approx_sq = h.cwiseProduct(weighted_gram).sum();
    return std::sqrt(std::max(0.0, x_norm_sq - 2.0 * cross + approx_sq));
}

IterationRecord make_record(std::size_t iteration, const DenseTensor& x, double x_norm,
                            const KruskalModel& model, double error, const RunHooks& hooks,
                            Phase phase, double wall_seconds) {
    IterationRecord rec;
    rec.iteration = iteration;
    rec.phase = phase;
    rec.wall_seconds = wall_seconds;
    const double err = hooks.direct_error ? direct_error(x, model) : error;
    rec.relative_error = x_norm > 0.0 ? err / x_norm : err;
    if (hooks.truth) {
        rec.epsilon = epsilon_metric(model, *hooks.truth, hooks.pairing);
        rec.weight_error = weight_error(model, *hooks.truth, hooks.pairing);
    }
    return rec;
}

bool should_stop(const StoppingRule& rule, std::size_t iteration, double previous_error,
                 double current_error, std::optional<double> epsilon, StopReason& reason) {
    if (rule.epsilon_floor > 0.0 && epsilon && *epsilon < rule.epsilon_floor) {
        reason = StopReason::epsilon_floor;
        return true;
    }
    if (rule.error_change_tol > 0.0) {
        const double change = std::abs(current_error - previous_error);
        if (previous_error > 0.0 ? change < rule.error_change_tol * previous_error
                                 : current_error == 0.0) {
            reason = StopReason::error_change;
            return true;
        }
    }
    if (iteration >= rule.max_iterations) {
        reason = StopReason::max_iterations;
        return true;
    }
    return false;
}

RunResult run(const DenseTensor& x, const KruskalModel& init, Variant variant,
              const StoppingRule& rule, const RunHooks& hooks) {
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
    auto record = [&](std::size_t k) {
        if (!state.error_terms_current) refresh_error_terms(x, model, state);
        previous_error = current_error;
        current_error = fast_error(x_norm_sq, state, model);
        auto rec = make_record(k, x, x_norm, model, current_error, hooks, Phase::regular, elapsed());
        result.trace.records.push_back(rec);
        if (hooks.on_iteration) hooks.on_iteration(rec, model);
    };

    record(0);
    for (std::size_t k = 1;; ++k) {
        try {
            if (variant == Variant::parallel)
                step_parallel(x, model, state, {}, hooks.concurrent_modes);
            else
                step_serial(x, model, state);
        } catch (const DegenerateComponentError& e) {
            throw e.at_iteration(k);
        }
        record(k);
        const auto& rec = result.trace.back();
        if (should_stop(rule, k, previous_error, current_error, rec.epsilon, result.reason)) break;
    }
    return result;
}

}  // namespace cpals
