#include "cpals/lemmas.hpp"

#include "cpals/diagnostics.hpp"
#include "cpals/errors.hpp"
#include "cpals/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace cpals {

namespace {

constexpr double unit_tol = 1e-12;

LemmaReport report(LemmaId id, const char* part, bool hypotheses, double lhs, double bound) {
    return {id, part, hypotheses, lhs, bound, bound - lhs};
}

bool unit_columns(const Matrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (std::abs(a.col(j).norm() - 1.0) > unit_tol) return false;
    return true;
}

bool orthonormal_columns(const Matrix& a) {
    const Matrix gram = a.transpose() * a;
    return norm_max(gram - Matrix::Identity(a.cols(), a.cols())) <= unit_tol;
}

bool acute_pairs(const Matrix& a, const Matrix& b) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (a.col(j).dot(b.col(j)) < 0.0) return false;
    return true;
}

double max_sin(const Matrix& a, const Matrix& b) {
    double eps = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) eps = std::max(eps, sin_angle(a.col(j), b.col(j)));
    return eps;
}

bool unit_diagonal(const Matrix& a) {
    return (a.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-15;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError(std::string(what) + ": operand shapes differ");
}

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() < 1)
        throw DimensionError(std::string(what) + ": matrix must be square");
}

Matrix dense_inverse(const Matrix& a) { return a.fullPivLu().inverse(); }

double weights_kappa(const Vector& w) {
    const Vector mag = w.cwiseAbs();
    return mag.maxCoeff() / mag.minCoeff();
}

// Shared prefix of the two normalization lemmas: W = Lambda^{-1} V, A = B V.
struct NormalizationTerms {
    Matrix a;
    Matrix w;
    double eps_diag;
    double kappa;
    double lhs;
};

NormalizationTerms normalization_terms(const NormalizationInput& in, const char* what) {
    const auto n = in.coefficients.rows();
    require_square(in.coefficients, what);
    if (in.basis.cols() != n || in.weights.size() != n)
        throw DimensionError(std::string(what) + ": basis, coefficients and weights disagree");
    if ((in.weights.array() == 0.0).any())
        throw DimensionError(std::string(what) + ": weights must be nonzero");
    NormalizationTerms t;
    t.a = in.basis * in.coefficients;
    t.w = in.weights.cwiseInverse().asDiagonal() * in.coefficients;
    t.eps_diag = norm_max(diag_part(t.w) - Matrix::Identity(n, n));
    t.kappa = weights_kappa(in.weights);
    t.lhs = t.eps_diag < 1.0 ? max_sin(t.a, in.basis) : 0.0;
    return t;
}

}  // namespace

std::string_view to_string(LemmaId id) {
    switch (id) {
        case LemmaId::innerprod_i: return "A1-innerprod-i";
        case LemmaId::innerprod_o: return "A2-innerprod-o";
        case LemmaId::inverse: return "A3-inverse";
        case LemmaId::inverse_corollary: return "A3c-corollary";
        case LemmaId::product_o: return "A4-product-o";
        case LemmaId::normalization_o: return "A5-normalization-o";
        case LemmaId::product_i: return "A6-product-i";
        case LemmaId::normalization_i: return "A7-normalization-i";
    }
    return "unknown";
}

std::optional<LemmaId> parse_lemma_id(std::string_view text) {
    for (LemmaId id : all_lemmas)
        if (to_string(id) == text) return id;
    return std::nullopt;
}

bool LemmaReport::violated(double rel_tol) const {
    return hypotheses_hold && margin < -rel_tol * std::max(1.0, bound);
}

std::vector<LemmaReport> check_innerprod_i(const ColumnPairInput& in) {
    require_same_shape(in.a, in.b, "innerprod-i");
    const auto id = LemmaId::innerprod_i;
    const bool hyp = unit_columns(in.a) && unit_columns(in.b) && acute_pairs(in.a, in.b);
    const double eps = max_sin(in.a, in.b);
    const Matrix btb = in.b.transpose() * in.b;
    const double sqrt2 = std::numbers::sqrt2;
    return {
        report(id, "a", hyp, norm_max(in.b.transpose() * in.a - btb), sqrt2 * eps),
        report(id, "b", hyp, norm_max(in.a.transpose() * in.a - btb), 2.0 * sqrt2 * eps),
    };
}

std::vector<LemmaReport> check_innerprod_o(const ColumnPairInput& in) {
    require_same_shape(in.a, in.b, "innerprod-o");
    const bool hyp =
        unit_columns(in.a) && orthonormal_columns(in.b) && acute_pairs(in.a, in.b);
    const double eps = max_sin(in.a, in.b);
    return {report(LemmaId::innerprod_o, "a", hyp,
                   norm_one_two(offdiag_part(in.b.transpose() * in.a)), eps)};
}

std::vector<LemmaReport> check_inverse(const SquarePairInput& in) {
    require_square(in.a, "inverse");
    require_same_shape(in.a, in.b, "inverse");
    const auto id = LemmaId::inverse;
    const double m = static_cast<double>(in.a.rows() - 1);
    const double eps = norm_max(offdiag_part(in.a - in.b));
    const double eps_b = norm_max(offdiag_part(in.b));
    const bool hyp = unit_diagonal(in.a) && unit_diagonal(in.b) && m * (eps + eps_b) < 1.0;
    if (!hyp) return {report(id, "a", false, 0.0, 0.0)};

    const Matrix a_inv = dense_inverse(in.a);
    const Matrix b_inv = dense_inverse(in.b);
    const double diff = norm_max(a_inv - b_inv);
    const double joint = 1.0 - m * (eps + eps_b);
    const double single = 1.0 - m * eps_b;
    return {
        report(id, "a", hyp, diff, eps / (joint * single)),
        report(id, "a2", hyp, diff, eps / (joint * joint)),
        report(id, "b", hyp, norm_max(b_inv), 1.0 / single),
        report(id, "c", hyp, norm_max(offdiag_part(b_inv)), m * eps_b / single),
    };
}

std::vector<LemmaReport> check_inverse_corollary(const SquareInput& in) {
    require_square(in.a, "inverse corollary");
    const auto n = in.a.rows();
    const double m = static_cast<double>(n - 1);
    const double eps = norm_max(offdiag_part(in.a));
    const bool hyp = unit_diagonal(in.a) && m * eps < 1.0;
    if (!hyp) return {report(LemmaId::inverse_corollary, "a", false, 0.0, 0.0)};
    const double lhs = norm_max(dense_inverse(in.a) - Matrix::Identity(n, n));
    return {report(LemmaId::inverse_corollary, "a", hyp, lhs, eps / (1.0 - m * eps))};
}

std::vector<LemmaReport> check_product_o(const SquarePairInput& in) {
    require_square(in.a, "product-o");
    require_same_shape(in.a, in.b, "product-o");
    const auto id = LemmaId::product_o;
    const auto n = in.a.rows();
    const Matrix identity = Matrix::Identity(n, n);
    const double m = static_cast<double>(n - 1);
    const double eps_a = norm_max(diag_part(in.a) - identity);
    const double eps_a_off = norm_one_two(offdiag_part(in.a));
    const double eps_b = norm_max(in.b - identity);
    const bool hyp = norm_max(diag_part(in.a)) <= 1.0 && eps_a <= 1.0 && eps_b <= 1.0;

    const Matrix ab = in.a * in.b;
    return {
        report(id, "a", hyp, norm_max(diag_part(ab) - identity),
               1.0 - (1.0 - eps_a) * (1.0 - eps_b) + m * eps_a_off * eps_b),
        report(id, "b", hyp, norm_one_two(offdiag_part(ab)),
               std::sqrt(m) * eps_b + eps_a_off * (1.0 + eps_b) + m * eps_a_off * eps_b),
    };
}

std::vector<LemmaReport> check_normalization_o(const NormalizationInput& in) {
    const auto t = normalization_terms(in, "normalization-o");
    const double eps_off = norm_one_two(offdiag_part(t.w));
    const bool hyp = orthonormal_columns(in.basis) && t.eps_diag < 1.0;
    const double bound = hyp ? t.kappa * eps_off / (1.0 - t.eps_diag) : 0.0;
    return {report(LemmaId::normalization_o, "a", hyp, t.lhs, bound)};
}

std::vector<LemmaReport> check_product_i(const PerturbedProductInput& in) {
    require_square(in.a, "product-i");
    for (const Matrix* m : {&in.a_tilde, &in.b, &in.b_tilde})
        require_same_shape(in.a, *m, "product-i");
    const auto id = LemmaId::product_i;
    const double m = static_cast<double>(in.a.rows() - 1);
    const Matrix da = in.a_tilde - in.a;
    const Matrix db = in.b_tilde - in.b;
    const double eps_a = norm_max(diag_part(da));
    const double eps_a_off = norm_max(offdiag_part(da));
    const double eps_b = norm_max(diag_part(db));
    const double eps_b_off = norm_max(offdiag_part(db));
    const Matrix diff = in.a_tilde * in.b_tilde - in.a * in.b;

    const double at_diag = norm_max(diag_part(in.a_tilde));
    const double at_off = norm_max(offdiag_part(in.a_tilde));
    const double b_diag = norm_max(diag_part(in.b));
    const double b_off = norm_max(offdiag_part(in.b));
    return {
        report(id, "a", true, norm_max(diag_part(diff)),
               m * at_off * eps_b_off + at_diag * eps_b + m * b_off * eps_a_off + b_diag * eps_a),
        report(id, "b", true, norm_max(offdiag_part(diff)),
               m * norm_max(in.a_tilde) * eps_b_off + at_off * eps_b +
                   m * norm_max(in.b) * eps_a_off + b_off * eps_a),
    };
}

std::vector<LemmaReport> check_normalization_i(const NormalizationInput& in) {
    const auto t = normalization_terms(in, "normalization-i");
    const double m = static_cast<double>(in.coefficients.rows() - 1);
    const double eps_off = norm_max(offdiag_part(t.w));
    const double spread = m * t.kappa * eps_off;
    const double denom = (1.0 - t.eps_diag) * (1.0 - t.eps_diag) - 4.0 * spread - spread * spread;
    const bool hyp = unit_columns(in.basis) && t.eps_diag < 1.0 && denom > 0.0;
    const double bound = hyp ? std::sqrt(2.0 / denom) * spread : 0.0;
    return {report(LemmaId::normalization_i, "a", hyp, t.lhs, bound)};
}

std::vector<LemmaReport> lemma_oracle(LemmaId id, const LemmaInput& input) {
    auto expect = [&]<class T>(std::type_identity<T>) -> const T& {
        if (const auto* p = std::get_if<T>(&input)) return *p;
        throw DimensionError("lemma_oracle: input kind does not match " +
                             std::string(to_string(id)));
    };
    switch (id) {
        case LemmaId::innerprod_i:
            return check_innerprod_i(expect(std::type_identity<ColumnPairInput>{}));
        case LemmaId::innerprod_o:
            return check_innerprod_o(expect(std::type_identity<ColumnPairInput>{}));
        case LemmaId::inverse:
            return check_inverse(expect(std::type_identity<SquarePairInput>{}));
        case LemmaId::inverse_corollary:
            return check_inverse_corollary(expect(std::type_identity<SquareInput>{}));
        case LemmaId::product_o:
            return check_product_o(expect(std::type_identity<SquarePairInput>{}));
        case LemmaId::normalization_o:
            return check_normalization_o(expect(std::type_identity<NormalizationInput>{}));
        case LemmaId::product_i:
            return check_product_i(expect(std::type_identity<PerturbedProductInput>{}));
        case LemmaId::normalization_i:
            return check_normalization_i(expect(std::type_identity<NormalizationInput>{}));
    }
    throw DimensionError("lemma_oracle: unknown lemma");
}

LemmaReport worst_part(const std::vector<LemmaReport>& parts) {
    if (parts.empty()) throw DimensionError("worst_part: no reports");
    auto score = [](const LemmaReport& r) { return r.margin / std::max(1.0, r.bound); };
    return *std::min_element(parts.begin(), parts.end(),
                             [&](const auto& x, const auto& y) { return score(x) < score(y); });
}

namespace {

// Random draws for the lemma inputs.
struct Draw {
    Rng rng;

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    Eigen::Index size(Eigen::Index lo, Eigen::Index hi) {
        return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
    }
    // Occasionally exactly zero so the degenerate corner is exercised.
    double scale(double lo, double hi) { return uniform(0.0, 1.0) < 0.05 ? 0.0 : log_uniform(lo, hi); }
    Matrix offdiag(Eigen::Index n, double s) {
        return offdiag_part(uniform_matrix(rng, n, n, -1.0, 1.0)) * s;
    }
    Vector weights(Eigen::Index n) {
        Vector w(n);
        for (Eigen::Index i = 0; i < n; ++i)
            w(i) = (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(0.5, 2.0);
        return w;
    }
};

Matrix perturb_columns(Draw& d, const Matrix& b, double scale) {
    Matrix a = normalize_columns_copy(b + scale * gaussian_matrix(d.rng, b.rows(), b.cols()));
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        if (a.col(j).dot(b.col(j)) < 0.0) a.col(j) = -a.col(j);
    return a;
}

}  // namespace

LemmaInput random_lemma_input(LemmaId id, std::uint64_t instance_seed) {
    Draw d{Rng(mix_seed(instance_seed))};
    const Eigen::Index n = d.size(2, 10);
    const Eigen::Index rows = n + d.size(0, 4);
    const Matrix identity = Matrix::Identity(n, n);

    switch (id) {
        case LemmaId::innerprod_i: {
            Matrix b = normalize_columns_copy(gaussian_matrix(d.rng, rows, n));
            Matrix a = perturb_columns(d, b, d.scale(1e-6, 1.0));
            return ColumnPairInput{std::move(a), std::move(b)};
        }
        case LemmaId::innerprod_o: {
            Matrix b = random_orthonormal(d.rng, rows, n);
            Matrix a = perturb_columns(d, b, d.scale(1e-6, 1.0));
            return ColumnPairInput{std::move(a), std::move(b)};
        }
        case LemmaId::inverse: {
            const double total = d.uniform(0.0, 0.95) / static_cast<double>(n - 1);
            const double split = d.uniform(0.0, 1.0);
            Matrix b = identity + d.offdiag(n, split * total);
            Matrix a = b + d.offdiag(n, (1.0 - split) * total);
            return SquarePairInput{std::move(a), std::move(b)};
        }
        case LemmaId::inverse_corollary: {
            const double s = d.uniform(0.0, 0.99) / static_cast<double>(n - 1);
            return SquareInput{identity + d.offdiag(n, s)};
        }
        case LemmaId::product_o: {
            const double eps_a = d.uniform(0.0, 1.0);
            Matrix a = d.offdiag(n, d.scale(1e-4, 1.0) / std::sqrt(static_cast<double>(n)));
            for (Eigen::Index i = 0; i < n; ++i) a(i, i) = d.uniform(1.0 - eps_a, 1.0);
            Matrix b = identity + uniform_matrix(d.rng, n, n, -1.0, 1.0) * d.uniform(0.0, 1.0);
            return SquarePairInput{std::move(a), std::move(b)};
        }
        case LemmaId::normalization_o:
        case LemmaId::normalization_i: {
            const bool orthonormal = id == LemmaId::normalization_o;
            Matrix basis = orthonormal ? random_orthonormal(d.rng, rows, n)
                                       : normalize_columns_copy(gaussian_matrix(d.rng, rows, n));
            Vector weights = d.weights(n);
            const double k = weights_kappa(weights);
            const double eps = d.uniform(0.0, orthonormal ? 0.9 : 0.5);
            // For normalization-i this keeps 4 m k s + (m k s)^2 below (1 - eps)^2.
            const double off = orthonormal
                                   ? d.scale(1e-6, 0.3)
                                   : d.uniform(0.0, 1.0) * (1.0 - eps) * (1.0 - eps) /
                                         (8.0 * static_cast<double>(n - 1) * k);
            Matrix w = identity + d.offdiag(n, off);
            for (Eigen::Index i = 0; i < n; ++i) w(i, i) += d.uniform(-eps, eps);
            Matrix coefficients = weights.asDiagonal() * w;
            return NormalizationInput{std::move(basis), std::move(coefficients), std::move(weights)};
        }
        case LemmaId::product_i: {
            Matrix a = gaussian_matrix(d.rng, n, n);
            Matrix b = gaussian_matrix(d.rng, n, n);
            Matrix at = a + d.scale(1e-6, 1.0) * gaussian_matrix(d.rng, n, n);
            Matrix bt = b + d.scale(1e-6, 1.0) * gaussian_matrix(d.rng, n, n);
            return PerturbedProductInput{std::move(a), std::move(at), std::move(b), std::move(bt)};
        }
    }
    throw DimensionError("random_lemma_input: unknown lemma");
}

std::vector<LemmaSuiteRow> run_lemma_suite(std::size_t instances, std::uint64_t seed) {
    std::vector<LemmaSuiteRow> rows;
    rows.reserve(instances * all_lemmas.size());
    for (LemmaId id : all_lemmas) {
        for (std::size_t i = 0; i < instances; ++i) {
            const std::uint64_t instance_seed =
                mix_seed(seed ^ mix_seed((static_cast<std::uint64_t>(id) + 1) << 40 | i));
            const auto parts = lemma_oracle(id, random_lemma_input(id, instance_seed));
            rows.push_back({id, instance_seed, worst_part(parts)});
        }
    }
    return rows;
}

void write_lemma_csv(std::ostream& out, const std::vector<LemmaSuiteRow>& rows) {
    out << "lemma_id,seed,hypotheses_hold,lhs,bound,margin\n";
    for (const auto& row : rows)
        out << to_string(row.id) << ',' << row.seed << ','
            << (row.report.hypotheses_hold ? "true" : "false") << ','
            << format_double(row.report.lhs) << ',' << format_double(row.report.bound) << ','
            << format_double(row.report.margin) << '\n';
    if (!out) throw std::runtime_error("failed to write lemma CSV");
}

}  // namespace cpals
