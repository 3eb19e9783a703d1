#include "cpals/synthesis.hpp"

#include "cpals/diagnostics.hpp"
#include "cpals/errors.hpp"

#include <algorithm>
#include <string>

namespace cpals {

std::string_view to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::odeco: return "odeco";
        case GeneratorKind::ideco: return "ideco";
        case GeneratorKind::cyclic: return "cyclic";
        case GeneratorKind::identity_matrix: return "identity-matrix";
    }
    return "unknown";
}

GeneratorSpec GeneratorSpec::cubic(GeneratorKind kind, std::size_t order, std::size_t extent,
                                   std::size_t rank, std::uint64_t seed) {
    GeneratorSpec spec;
    spec.kind = kind;
    spec.extents.assign(order, extent);
    spec.rank = rank;
    spec.seed = seed;
    return spec;
}

void GeneratorSpec::validate() const {
    if (extents.empty() || extents.size() > DenseTensor::max_order)
        throw DimensionError("generator order must be in [1, 8]");
    if (rank < 1) throw DimensionError("generator rank must be at least 1");
    for (std::size_t extent : extents)
        if (extent == 0) throw DimensionError("generator extents must be positive");
    if (!(incoherence_scale >= 0.0) || !(init_perturbation_scale >= 0.0))
        throw PreconditionError("generator scales must be non-negative");
    if ((kind == GeneratorKind::odeco || kind == GeneratorKind::ideco) &&
        rank > *std::min_element(extents.begin(), extents.end()))
        throw DimensionError("rank " + std::to_string(rank) +
                             " exceeds the smallest extent; no orthogonal decomposition exists");
}

namespace {

Instance make_instance(const GeneratorSpec& spec, double incoherence_scale) {
    spec.validate();
    const auto R = static_cast<Eigen::Index>(spec.rank);
    const std::size_t order = spec.extents.size();

    Rng weight_rng = substream(spec.seed, Stream::weights);
    Rng factor_rng = substream(spec.seed, Stream::factors);
    Rng incoherence_rng = substream(spec.seed, Stream::incoherence);
    Rng init_rng = substream(spec.seed, Stream::init);

    Vector weights = gaussian_vector(weight_rng, R);
    std::vector<Matrix> truth_factors;
    std::vector<Matrix> init_factors;
    for (std::size_t n = 0; n < order; ++n) {
        const auto rows = static_cast<Eigen::Index>(spec.extents[n]);
        Matrix a = random_orthonormal(factor_rng, rows, R);
        // Always draw so the init stream is independent of the incoherence scale.
        const Matrix tilt = gaussian_matrix(incoherence_rng, rows, R);
        if (incoherence_scale > 0.0) a = normalize_columns_copy(a + incoherence_scale * tilt);
        const Matrix noise = gaussian_matrix(init_rng, rows, R);
        init_factors.push_back(spec.init_perturbation_scale > 0.0
                                   ? normalize_columns_copy(a + spec.init_perturbation_scale * noise)
                                   : a);
        truth_factors.push_back(std::move(a));
    }

    Instance inst;
    inst.truth = KruskalModel(weights, std::move(truth_factors));
    inst.init = KruskalModel(Vector::Ones(R), std::move(init_factors));
    inst.meta.kind = spec.kind;
    inst.meta.seed = spec.seed;
    for (const auto& a : inst.truth.factors) inst.meta.mu = std::max(inst.meta.mu, coherence(a));
    inst.meta.kappa = kappa(inst.truth.weights);
    return inst;
}

}  // namespace

Instance gen_odeco(const GeneratorSpec& spec) {
    if (spec.kind != GeneratorKind::odeco) throw PreconditionError("gen_odeco: kind must be odeco");
    return make_instance(spec, 0.0);
}

Instance gen_ideco(const GeneratorSpec& spec) {
    if (spec.kind != GeneratorKind::ideco) throw PreconditionError("gen_ideco: kind must be ideco");
    return make_instance(spec, spec.incoherence_scale);
}

CyclicInstance gen_cyclic(std::uint64_t seed, std::size_t length) {
    if (length == 0) throw DimensionError("gen_cyclic: vector length must be positive");
    Rng rng = substream(seed, Stream::factors);
    const auto I = static_cast<Eigen::Index>(length);
    const Matrix a = uniform_matrix(rng, I, 3, 0.0, 1.0);  // columns a1, a2, a3

    // Component r is a_{r} o a_{r+1} o a_{r+2} (indices mod 3).
    std::vector<Matrix> factors(3, Matrix(I, 3));
    for (Eigen::Index n = 0; n < 3; ++n)
        for (Eigen::Index r = 0; r < 3; ++r) factors[n].col(r) = a.col((r + n) % 3);

    CyclicInstance inst;
    inst.structure = KruskalModel(Vector::Ones(3), std::move(factors));
    inst.tensor = kruskal_reconstruct(inst.structure);
    return inst;
}

CounterexampleInstance gen_identity_counterexample(std::size_t rank, std::uint64_t seed) {
    if (rank < 2) throw DimensionError("counterexample needs rank at least 2");
    const auto R = static_cast<Eigen::Index>(rank);
    const Matrix identity = Matrix::Identity(R, R);

    CounterexampleInstance inst;
    inst.tensor = DenseTensor({rank, rank},
                              std::vector<double>(identity.data(), identity.data() + identity.size()));
    Rng rng = substream(seed, Stream::init);
    // Redraw until both factors are comfortably invertible.
    for (;;) {
        std::vector<Matrix> factors;
        bool ok = true;
        for (int n = 0; n < 2; ++n) {
            Matrix a = normalize_columns_copy(gaussian_matrix(rng, R, R));
            const Eigen::JacobiSVD<Matrix> svd(a);
            const Vector& s = svd.singularValues();
            ok = ok && s(s.size() - 1) > 1e-3 * s(0);
            factors.push_back(std::move(a));
        }
        if (ok) {
            inst.init = KruskalModel(Vector::Ones(R), std::move(factors));
            return inst;
        }
    }
}

KruskalModel random_init(const Shape& shape, std::size_t rank, Rng& rng) {
    std::vector<Matrix> factors;
    const auto R = static_cast<Eigen::Index>(rank);
    for (std::size_t extent : shape)
        factors.push_back(
            normalize_columns_copy(gaussian_matrix(rng, static_cast<Eigen::Index>(extent), R)));
    return KruskalModel(Vector::Ones(R), std::move(factors));
}

bool default_radius_test(const ConvergenceTrace& trace) {
    if (trace.records.size() < 2) return false;
    const double first = trace.records.front().relative_error;
    const double last = trace.back().relative_error;
    return last <= 1e-6 || last <= 0.1 * first;
}

RestartResult restart_until_converged(const DenseTensor& x, const InitGenerator& gen_init,
                                      std::size_t max_restarts, std::uint64_t seed,
                                      const RestartOptions& options) {
    RestartResult result;
    for (std::size_t attempt = 0; attempt < max_restarts; ++attempt) {
        Rng rng = substream(seed, Stream::restarts, attempt);
        result.restarts_used = attempt + 1;
        try {
            RunResult run_result = run(x, gen_init(rng), options.variant, options.rule);
            const bool accepted = options.radius_test(run_result.trace);
            result.model = std::move(run_result.model);
            result.trace = std::move(run_result.trace);
            if (accepted) {
                result.converged = true;
                return result;
            }
        } catch (const DegenerateComponentError&) {
            // A collapsed start counts as a failed attempt.
        }
    }
    return result;
}

}  // namespace cpals
