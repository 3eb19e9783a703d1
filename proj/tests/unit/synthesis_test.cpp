#include "support.hpp"

#include "cpals/altls.hpp"
#include "cpals/diagnostics.hpp"
#include "cpals/errors.hpp"
#include "cpals/synthesis.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

using namespace cpals;

namespace {

// Largest off-diagonal |<a_i, a_j>| by explicit pairs.
double all_pairs_coherence(const Matrix& a) {
    double mu = 0.0;
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        for (Eigen::Index j = i + 1; j < a.cols(); ++j)
            mu = std::max(mu, std::abs(a.col(i).dot(a.col(j))));
    return mu;
}

bool same_model(const KruskalModel& a, const KruskalModel& b) {
    if (a.weights != b.weights || a.factors.size() != b.factors.size()) return false;
    for (std::size_t n = 0; n < a.factors.size(); ++n)
        if (a.factors[n] != b.factors[n]) return false;
    return true;
}

GeneratorSpec preset_like(GeneratorKind kind, std::uint64_t seed) {
    auto spec = GeneratorSpec::cubic(kind, 3, 20, 10, seed);
    spec.init_perturbation_scale = 1e-2;
    if (kind == GeneratorKind::ideco) spec.incoherence_scale = 1e-2;
    return spec;
}

}  // namespace

TEST(GenOdeco, OrthonormalTruth) {
    const Instance inst = gen_odeco(preset_like(GeneratorKind::odeco, 1));
    for (const auto& a : inst.truth.factors) {
        EXPECT_LT((a.transpose() * a - Matrix::Identity(10, 10)).norm(), 1e-12);
        EXPECT_LE(coherence(a), 1e-12);
    }
    EXPECT_LE(inst.meta.mu, 1e-12);
    EXPECT_NEAR(inst.meta.kappa, kappa(inst.truth.weights), 0.0);
    const double eps0 = epsilon_metric(inst.init, inst.truth);
    EXPECT_GT(eps0, 1e-3);
    EXPECT_LT(eps0, 1e-1);
    EXPECT_TRUE(inst.init.has_unit_columns());
    EXPECT_EQ(inst.init.weights, Vector::Ones(10));
}

TEST(GenOdeco, ZeroPerturbationStartsAtTruth) {
    auto spec = GeneratorSpec::cubic(GeneratorKind::odeco, 4, 6, 3, 2);
    const Instance inst = gen_odeco(spec);
    EXPECT_EQ(inst.init.factors, inst.truth.factors);
    EXPECT_EQ(epsilon_metric(inst.init, inst.truth), 0.0);
}

TEST(GenOdeco, Deterministic) {
    const auto spec = preset_like(GeneratorKind::odeco, 3);
    const Instance a = gen_odeco(spec), b = gen_odeco(spec);
    EXPECT_TRUE(same_model(a.truth, b.truth));
    EXPECT_TRUE(same_model(a.init, b.init));
    EXPECT_FALSE(same_model(a.truth, gen_odeco(preset_like(GeneratorKind::odeco, 4)).truth));
}

TEST(GenOdeco, PerturbationDoesNotShiftTruth) {
    auto spec = preset_like(GeneratorKind::odeco, 5);
    const Instance a = gen_odeco(spec);
    spec.init_perturbation_scale = 0.1;
    EXPECT_TRUE(same_model(a.truth, gen_odeco(spec).truth));
}

TEST(GenOdeco, RankAboveExtentThrows) {
    auto spec = GeneratorSpec::cubic(GeneratorKind::odeco, 3, 4, 5, 1);
    EXPECT_THROW(gen_odeco(spec), DimensionError);
}

TEST(GenIdeco, CoherenceMatchesAllPairsOracle) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Instance inst = gen_ideco(preset_like(GeneratorKind::ideco, seed));
        double oracle = 0.0;
        for (const auto& a : inst.truth.factors) oracle = std::max(oracle, all_pairs_coherence(a));
        EXPECT_GT(inst.meta.mu, 0.0);
        EXPECT_LE(inst.meta.mu, oracle + 1e-14);
        EXPECT_NEAR(inst.meta.mu, oracle, 1e-14);
        EXPECT_TRUE(inst.truth.has_unit_columns());
    }
}

TEST(GenIdeco, ZeroIncoherenceReducesToOdeco) {
    auto spec = preset_like(GeneratorKind::ideco, 6);
    spec.incoherence_scale = 0.0;
    auto odeco_spec = spec;
    odeco_spec.kind = GeneratorKind::odeco;
    const Instance a = gen_ideco(spec), b = gen_odeco(odeco_spec);
    EXPECT_TRUE(same_model(a.truth, b.truth));
    EXPECT_TRUE(same_model(a.init, b.init));
}

TEST(GenCyclic, MatchesReconstructionAndRange) {
    const CyclicInstance c = gen_cyclic(7);
    EXPECT_EQ(c.tensor.shape(), (Shape{10, 10, 10}));
    EXPECT_EQ(c.structure.weights, Vector::Ones(3));
    const DenseTensor rebuilt = kruskal_reconstruct(c.structure);
    EXPECT_LT((rebuilt.mode1_view() - c.tensor.mode1_view()).norm(), 1e-13 * frobenius_norm(rebuilt));
    for (double v : c.tensor.values()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 3.0);
    }
    // Factors are cyclic shifts of the same three vectors.
    const auto& f = c.structure.factors;
    EXPECT_EQ(f[0].col(1), f[1].col(0));
    EXPECT_EQ(f[0].col(2), f[2].col(0));
    EXPECT_EQ(f[1].col(2), f[2].col(1));
}

TEST(GenCyclic, Deterministic) {
    EXPECT_EQ(gen_cyclic(11).tensor, gen_cyclic(11).tensor);
    EXPECT_NE(gen_cyclic(11).tensor, gen_cyclic(12).tensor);
}

TEST(Counterexample, TensorIsIdentity) {
    const auto c = gen_identity_counterexample(4, 1);
    EXPECT_EQ(c.tensor.shape(), (Shape{4, 4}));
    EXPECT_EQ(Matrix(c.tensor.mode1_view()), Matrix::Identity(4, 4));
    EXPECT_TRUE(c.init.has_unit_columns());
    for (const auto& a : c.init.factors) EXPECT_GT(std::abs(a.determinant()), 1e-6);
}

TEST(Counterexample, ParallelIterationIsTwoPeriodic) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto c = gen_identity_counterexample(3, seed);
        std::vector<KruskalModel> history;
        RunHooks hooks;
        hooks.on_iteration = [&](const IterationRecord&, const KruskalModel& m) { history.push_back(m); };
        run(c.tensor, c.init, Variant::parallel, {12, 0.0, 0.0}, hooks);
        ASSERT_EQ(history.size(), 13u);
        for (std::size_t k = 1; k + 2 < history.size(); ++k)
            for (std::size_t n = 0; n < 2; ++n)
                EXPECT_LT((history[k + 2].factors[n] - history[k].factors[n]).norm(), 1e-10)
                    << "seed " << seed << " k " << k;
    }
}

TEST(Counterexample, IdentityInitIsFixedPoint) {
    const auto c = gen_identity_counterexample(3, 1);
    const KruskalModel init(Vector::Ones(3), {Matrix::Identity(3, 3), Matrix::Identity(3, 3)});
    const RunResult r = run(c.tensor, init, Variant::parallel, {5, 0.0, 0.0});
    for (const auto& a : r.model.factors)
        EXPECT_LT(cpals::test::signed_column_diff(a, Matrix::Identity(3, 3)), 1e-14);
}

TEST(RandomInit, UnitColumns) {
    Rng rng(3);
    const KruskalModel m = random_init({4, 5, 6}, 3, rng);
    EXPECT_TRUE(m.has_unit_columns());
    EXPECT_EQ(m.weights, Vector::Ones(3));
}

TEST(Restart, ExactInitConvergesFirstTime) {
    const Instance inst = gen_odeco(GeneratorSpec::cubic(GeneratorKind::odeco, 3, 5, 3, 1));
    const auto r = restart_until_converged(
        inst.tensor(), [&](Rng&) { return inst.truth.normalized(); }, 5, 1);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.restarts_used, 1u);
}

TEST(Restart, ZeroBudgetReportsNoConvergence) {
    const Instance inst = gen_odeco(GeneratorSpec::cubic(GeneratorKind::odeco, 3, 5, 3, 1));
    const auto r = restart_until_converged(
        inst.tensor(), [&](Rng&) { return inst.truth.normalized(); }, 0, 1);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.restarts_used, 0u);
    EXPECT_TRUE(r.trace.empty());
}

TEST(Restart, RejectingTestSpendsBudget) {
    const Instance inst = gen_odeco(GeneratorSpec::cubic(GeneratorKind::odeco, 3, 5, 3, 1));
    const Shape shape = inst.truth.shape();
    RestartOptions options;
    options.radius_test = [](const ConvergenceTrace&) { return false; };
    const auto r = restart_until_converged(
        inst.tensor(), [&](Rng& rng) { return random_init(shape, 3, rng); }, 4, 1, options);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.restarts_used, 4u);
}

TEST(Restart, SphereInitSucceedsWithPositiveProbability) {
    std::size_t successes = 0;
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        const Instance inst = gen_odeco(GeneratorSpec::cubic(GeneratorKind::odeco, 3, 2, 2, trial));
        const auto r = restart_until_converged(
            inst.tensor(), [](Rng& rng) { return random_init({2, 2, 2}, 2, rng); }, 1, trial);
        successes += r.converged;
    }
    EXPECT_GT(successes, 0u);
}

TEST(RadiusTest, Default) {
    ConvergenceTrace t;
    t.records = {{0, {}, 0.5}, {1, {}, 0.3}, {2, {}, 0.04}};
    EXPECT_TRUE(default_radius_test(t));
    t.records[2].relative_error = 0.2;
    EXPECT_FALSE(default_radius_test(t));
    t.records = {{0, {}, 1e-9}, {1, {}, 5e-10}};
    EXPECT_TRUE(default_radius_test(t));
}

TEST(GeneratorSpec, Validate) {
    auto spec = GeneratorSpec::cubic(GeneratorKind::odeco, 3, 4, 2, 0);
    EXPECT_NO_THROW(spec.validate());
    spec.init_perturbation_scale = -1.0;
    EXPECT_THROW(spec.validate(), PreconditionError);
    spec.init_perturbation_scale = 0.0;
    spec.extents.assign(9, 2);
    EXPECT_THROW(spec.validate(), DimensionError);
}
