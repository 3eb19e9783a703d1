#pragma once

#include "cpals/altls.hpp"
#include "cpals/kruskal.hpp"
#include "cpals/tensor.hpp"

#include <cstddef>

namespace cpals {

/// Coherence-reduced sweeps followed by regular serial sweeps.
struct HybridSchedule {
    double omega = 1.0;                  // singular-value exponent in [0, 1]
    std::size_t reduced_iterations = 0;
    std::size_t regular_iterations = 0;
    bool defer_normalization = true;     // normalize all factors once per reduced sweep

    void validate() const;
};

struct CoherenceReduced {
    Matrix matrix;
    bool rank_deficient = false;  // some singular value was treated as zero
};

/// U S^omega V^T for a thin SVD U S V^T of `a_hat`. Singular values below
/// max(rows, cols) * eps * s_max count as zero and stay zero for every omega
/// (so 0^0 is taken as 0). omega = 1 returns `a_hat` unchanged; omega = 0
/// yields orthonormal columns spanning the column space of a full-rank input.
CoherenceReduced coherence_reduce(const Matrix& a_hat, double omega);

/// One serial sweep in which each mode's unnormalized update passes through
/// `coherence_reduce`. With deferred normalization the sweep carries unit
/// weights and all column norms are folded into the weights at the end.
void step_reduced(const DenseTensor& x, KruskalModel& model, AltLSState& state,
                  const HybridSchedule& schedule);

/// Runs the reduced phase, then the regular serial phase. The trace tags each
/// record with its phase and sets `phase_boundary` when a reduced phase ran.
/// `rule` may end the regular phase early; its max_iterations caps the total.
RunResult run_hybrid(const DenseTensor& x, const KruskalModel& init,
                     const HybridSchedule& schedule, const StoppingRule& rule = {},
                     const RunHooks& hooks = {});

}  // namespace cpals
