#pragma once

#include "cpals/random.hpp"
#include "cpals/tensor.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cpals {

/// Executable checks of the perturbation inequalities behind the local
/// convergence proofs. Each oracle evaluates the hypotheses, both sides of
/// every lettered inequality, and reports instead of asserting.
enum class LemmaId {
    innerprod_i,      // Gram perturbation for normalized columns
    innerprod_o,      // off-diagonal Bessel bound for orthonormal columns
    inverse,          // inverse perturbation with unit diagonals
    inverse_corollary,
    product_o,        // products near the identity
    normalization_o,  // column angles after normalization, orthonormal basis
    product_i,        // products of perturbed matrices
    normalization_i,  // column angles after normalization, normalized basis
};

inline constexpr std::array<LemmaId, 8> all_lemmas{
    LemmaId::innerprod_i,     LemmaId::innerprod_o,     LemmaId::inverse,
    LemmaId::inverse_corollary, LemmaId::product_o,     LemmaId::normalization_o,
    LemmaId::product_i,       LemmaId::normalization_i,
};

/// Stable identifiers such as "A1-innerprod-i" used in CSV output.
std::string_view to_string(LemmaId id);
std::optional<LemmaId> parse_lemma_id(std::string_view text);

struct LemmaReport {
    LemmaId id = LemmaId::innerprod_i;
    std::string part;  // lettered inequality, e.g. "a", "b"
    bool hypotheses_hold = false;
    double lhs = 0.0;
    double bound = 0.0;
    double margin = 0.0;  // bound - lhs

    /// Only meaningful when the hypotheses hold.
    bool violated(double rel_tol = 1e-10) const;
};

/// Two m x n matrices with paired columns (innerprod lemmas, second one is B).
struct ColumnPairInput {
    Matrix a;
    Matrix b;
};

/// Two square matrices (inverse: A and B; product_o: A and B).
struct SquarePairInput {
    Matrix a;
    Matrix b;
};

struct SquareInput {
    Matrix a;
};

/// A = B V with basis B (m x n), coefficients V (n x n) and diagonal weights.
struct NormalizationInput {
    Matrix basis;
    Matrix coefficients;
    Vector weights;
};

struct PerturbedProductInput {
    Matrix a, a_tilde;
    Matrix b, b_tilde;
};

using LemmaInput = std::variant<ColumnPairInput, SquarePairInput, SquareInput,
                                NormalizationInput, PerturbedProductInput>;

std::vector<LemmaReport> check_innerprod_i(const ColumnPairInput& in);
std::vector<LemmaReport> check_innerprod_o(const ColumnPairInput& in);
std::vector<LemmaReport> check_inverse(const SquarePairInput& in);
std::vector<LemmaReport> check_inverse_corollary(const SquareInput& in);
std::vector<LemmaReport> check_product_o(const SquarePairInput& in);
std::vector<LemmaReport> check_normalization_o(const NormalizationInput& in);
std::vector<LemmaReport> check_product_i(const PerturbedProductInput& in);
std::vector<LemmaReport> check_normalization_i(const NormalizationInput& in);

/// Dispatches on `id`; a mismatched input alternative throws DimensionError.
std::vector<LemmaReport> lemma_oracle(LemmaId id, const LemmaInput& input);

/// The part with the smallest margin relative to max(1, bound).
LemmaReport worst_part(const std::vector<LemmaReport>& parts);

/// A random input that satisfies the lemma's hypotheses by construction,
/// with matrix size n drawn from {2, ..., 10}.
LemmaInput random_lemma_input(LemmaId id, std::uint64_t instance_seed);

struct LemmaSuiteRow {
    LemmaId id;
    std::uint64_t seed;  // regenerates the instance via random_lemma_input
    LemmaReport report;  // worst part
};

/// `instances` random instances for each of the eight lemmas.
std::vector<LemmaSuiteRow> run_lemma_suite(std::size_t instances, std::uint64_t seed);

/// Header lemma_id,seed,hypotheses_hold,lhs,bound,margin and one line per row.
void write_lemma_csv(std::ostream& out, const std::vector<LemmaSuiteRow>& rows);

}  // namespace cpals
