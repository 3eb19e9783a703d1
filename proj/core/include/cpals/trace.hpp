#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace cpals {

enum class Phase { regular, reduced };

std::string_view to_string(Phase phase);

/// One row of a convergence trace. Iteration 0 is the initialization.
struct IterationRecord {
    std::size_t iteration = 0;
    std::optional<double> epsilon;       // max |sin| angle to ground truth
    double relative_error = 0.0;         // ||X - X_k|| / ||X||
    std::optional<double> weight_error;  // ||l*l - l_k*l_k||_inf
    Phase phase = Phase::regular;
    double wall_seconds = 0.0;
};

struct ConvergenceTrace {
    std::vector<IterationRecord> records;
    /// Last iteration of the coherence-reduced phase, when there was one.
    std::optional<std::size_t> phase_boundary;

    bool empty() const noexcept { return records.empty(); }
    const IterationRecord& back() const { return records.back(); }

    /// Epsilon column; throws std::logic_error if any record lacks it.
    std::vector<double> epsilons() const;
    std::vector<double> weight_errors() const;
    std::vector<double> relative_errors() const;
};

}  // namespace cpals
