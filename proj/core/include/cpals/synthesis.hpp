#pragma once

#include "cpals/altls.hpp"
#include "cpals/kruskal.hpp"
#include "cpals/random.hpp"
#include "cpals/tensor.hpp"
#include "cpals/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>

namespace cpals {

enum class GeneratorKind { odeco, ideco, cyclic, identity_matrix };

std::string_view to_string(GeneratorKind kind);

/// Parameters of a synthetic ground-truth instance.
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::odeco;
    Shape extents;
    std::size_t rank = 1;
    double incoherence_scale = 0.0;        // ideco only
    double init_perturbation_scale = 0.0;
    std::uint64_t seed = 0;

    static GeneratorSpec cubic(GeneratorKind kind, std::size_t order, std::size_t extent,
                               std::size_t rank, std::uint64_t seed);

    void validate() const;
};

/// Measured properties written into CSV headers.
struct InstanceMeta {
    GeneratorKind kind = GeneratorKind::odeco;
    std::uint64_t seed = 0;
    double mu = 0.0;     // largest coherence over the truth factors
    double kappa = 1.0;  // max |w| / min |w| of the truth weights
};

struct Instance {
    KruskalModel truth;
    KruskalModel init;  // unit weights
    InstanceMeta meta;

    DenseTensor tensor() const { return kruskal_reconstruct(truth); }
};

/// Standard-normal weights and orthonormal factors (from QR of Gaussian
/// square matrices); the init adds Gaussian noise scaled by
/// init_perturbation_scale to each factor and renormalizes.
Instance gen_odeco(const GeneratorSpec& spec);

/// As gen_odeco, but each truth factor is first perturbed by Gaussian noise
/// scaled by incoherence_scale and renormalized.
Instance gen_ideco(const GeneratorSpec& spec);

struct CyclicInstance {
    DenseTensor tensor;
    KruskalModel structure;  // unit weights, unnormalized cyclic factors
};

/// a1 o a2 o a3 + a2 o a3 o a1 + a3 o a1 o a2 with entries of a_i uniform in [0, 1).
CyclicInstance gen_cyclic(std::uint64_t seed, std::size_t length = 10);

struct CounterexampleInstance {
    DenseTensor tensor;  // identity matrix as a second-order tensor
    KruskalModel init;   // invertible, unit columns, unit weights
};

CounterexampleInstance gen_identity_counterexample(std::size_t rank, std::uint64_t seed);

/// Gaussian factor columns scaled to the unit sphere, unit weights.
KruskalModel random_init(const Shape& shape, std::size_t rank, Rng& rng);

using InitGenerator = std::function<KruskalModel(Rng&)>;
using RadiusTest = std::function<bool(const ConvergenceTrace&)>;

/// Relative error at the end is at most a tenth of the initial one, or
/// already below 1e-6.
bool default_radius_test(const ConvergenceTrace& trace);

struct RestartResult {
    KruskalModel model;
    ConvergenceTrace trace;
    std::size_t restarts_used = 0;
    bool converged = false;
};

struct RestartOptions {
    Variant variant = Variant::parallel;
    StoppingRule rule{10, 0.0, 0.0};
    RadiusTest radius_test = default_radius_test;
};

/// Runs from fresh random starts until the radius test accepts a trace or
/// `max_restarts` attempts are spent. Attempt i draws from its own substream.
RestartResult restart_until_converged(const DenseTensor& x, const InitGenerator& gen_init,
                                      std::size_t max_restarts, std::uint64_t seed,
                                      const RestartOptions& options = {});

}  // namespace cpals
