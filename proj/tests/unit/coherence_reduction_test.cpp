#include "support.hpp"

#include "cpals/coherence_reduction.hpp"
#include "cpals/diagnostics.hpp"
#include "cpals/errors.hpp"
#include "cpals/synthesis.hpp"

#include <gtest/gtest.h>

using namespace cpals;
using cpals::test::rel_diff;

namespace {

Matrix projector(const Matrix& a) {
    const Eigen::HouseholderQR<Matrix> qr(a);
    const Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
    return q * q.transpose();
}

}  // namespace

TEST(CoherenceReduce, OrthonormalInputIsFixed) {
    Rng rng(301);
    const Matrix q = random_orthonormal(rng, 7, 4);
    for (double omega : {0.0, 0.3, 1.0}) {
        const auto r = coherence_reduce(q, omega);
        EXPECT_LT(rel_diff(r.matrix, q), 1e-13) << omega;
        EXPECT_FALSE(r.rank_deficient);
    }
}

TEST(CoherenceReduce, OmegaOneIsIdentity) {
    Rng rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = gaussian_matrix(rng, 8, 3);
        EXPECT_LT(rel_diff(coherence_reduce(a, 1.0).matrix, a), 1e-13);
    }
}

TEST(CoherenceReduce, OmegaZeroOrthonormalizes) {
    Rng rng(307);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = gaussian_matrix(rng, 9, 5);
        const Matrix r = coherence_reduce(a, 0.0).matrix;
        EXPECT_LT((r.transpose() * r - Matrix::Identity(5, 5)).norm(), 1e-12);
        EXPECT_LT(coherence(normalize_columns_copy(r)), 1e-12);
    }
}

TEST(CoherenceReduce, CoherenceEndpoints) {
    Rng rng(311);
    const Matrix a = gaussian_matrix(rng, 6, 3);
    const double mu = coherence(normalize_columns_copy(a));
    EXPECT_NEAR(coherence(normalize_columns_copy(coherence_reduce(a, 1.0).matrix)), mu, 1e-13);
    EXPECT_LE(coherence(normalize_columns_copy(coherence_reduce(a, 0.0).matrix)), 1e-12);
}

TEST(CoherenceReduce, PreservesColumnSpace) {
    Rng rng(313);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = gaussian_matrix(rng, 8, 4);
        for (double omega : {0.0, 0.25, 0.5, 0.75, 1.0})
            EXPECT_LT((projector(coherence_reduce(a, omega).matrix) - projector(a)).norm(), 1e-10);
    }
}

TEST(CoherenceReduce, RankDeficientInputKeepsZeroDirections) {
    Matrix a(3, 2);
    a << 1, 2, 1, 2, 1, 2;
    const auto r = coherence_reduce(a, 0.0);
    EXPECT_TRUE(r.rank_deficient);
    EXPECT_TRUE(r.matrix.allFinite());
    Eigen::JacobiSVD<Matrix> svd(r.matrix);
    EXPECT_NEAR(svd.singularValues()(0), 1.0, 1e-12);
    EXPECT_NEAR(svd.singularValues()(1), 0.0, 1e-12);
}

TEST(CoherenceReduce, RejectsOmegaOutsideUnitInterval) {
    EXPECT_THROW(coherence_reduce(Matrix::Identity(2, 2), 1.5), PreconditionError);
    EXPECT_THROW(coherence_reduce(Matrix::Identity(2, 2), -0.1), PreconditionError);
}

TEST(RunHybrid, DegenerateScheduleEqualsSerialRun) {
    const CyclicInstance cyc = gen_cyclic(5);
    Rng rng = substream(5, Stream::init);
    const KruskalModel init = random_init(cyc.tensor.shape(), 3, rng);
    const StoppingRule rule{12, 0.0, 0.0};

    HybridSchedule schedule;
    schedule.omega = 1.0;
    schedule.regular_iterations = 12;
    const RunResult hybrid = run_hybrid(cyc.tensor, init, schedule, rule);
    const RunResult serial = run(cyc.tensor, init, Variant::serial, rule);

    ASSERT_EQ(hybrid.trace.records.size(), serial.trace.records.size());
    EXPECT_FALSE(hybrid.trace.phase_boundary.has_value());
    for (std::size_t k = 0; k < serial.trace.records.size(); ++k) {
        EXPECT_EQ(hybrid.trace.records[k].relative_error, serial.trace.records[k].relative_error);
        EXPECT_EQ(hybrid.trace.records[k].phase, Phase::regular);
    }
    EXPECT_EQ(hybrid.model.weights, serial.model.weights);
}

TEST(RunHybrid, TagsPhasesAndBoundary) {
    const CyclicInstance cyc = gen_cyclic(9);
    Rng rng = substream(9, Stream::init);
    const KruskalModel init = random_init(cyc.tensor.shape(), 3, rng);
    HybridSchedule schedule;
    schedule.omega = 0.5;
    schedule.reduced_iterations = 4;
    schedule.regular_iterations = 6;
    const RunResult r = run_hybrid(cyc.tensor, init, schedule, {100, 0.0, 0.0});

    ASSERT_EQ(r.trace.records.size(), 11u);
    ASSERT_TRUE(r.trace.phase_boundary.has_value());
    EXPECT_EQ(*r.trace.phase_boundary, 4u);
    for (const auto& rec : r.trace.records) {
        if (rec.iteration == 0) continue;
        EXPECT_EQ(rec.phase, rec.iteration <= 4 ? Phase::reduced : Phase::regular);
    }
    EXPECT_TRUE(r.model.has_unit_columns(1e-10));
}

TEST(RunHybrid, DeferredNormalizationKeepsTensor) {
    // After a reduced sweep the model is normalized without changing what it represents.
    const CyclicInstance cyc = gen_cyclic(2);
    Rng rng = substream(2, Stream::init);
    KruskalModel model = random_init(cyc.tensor.shape(), 3, rng);
    AltLSState state = make_state(model);
    HybridSchedule schedule;
    schedule.omega = 1.0;
    schedule.reduced_iterations = 1;

    KruskalModel plain = model;
    AltLSState plain_state = make_state(plain);
    step_reduced(cyc.tensor, model, state, schedule);
    step_serial(cyc.tensor, plain, plain_state);
    EXPECT_TRUE(model.has_unit_columns(1e-12));
    const DenseTensor a = kruskal_reconstruct(model);
    const DenseTensor b = kruskal_reconstruct(plain);
    EXPECT_LT((a.mode1_view() - b.mode1_view()).norm(), 1e-10 * frobenius_norm(b));
}

TEST(HybridSchedule, Validate) {
    HybridSchedule s;
    s.omega = 2.0;
    EXPECT_THROW(s.validate(), PreconditionError);
}
