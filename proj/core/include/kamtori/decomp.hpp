// Unique decompositions of series in powers of (z_i w_i) and (z_i w_i - c_i),
// and the canonical parts f^(0), f^(1), f^(2), f^[2], f^[3].
#ifndef KAMTORI_DECOMP_HPP
#define KAMTORI_DECOMP_HPP

#include <map>
#include <vector>

#include "kamtori/series.hpp"

namespace kamtori {

/// True iff alpha_i * beta_i == 0 for every i (z/w exponents of the key).
bool is_non_resonant_key(MonoKey key, int dof);
bool is_non_resonant(const TruncatedSeries& f);
/// Diagonal monomial: alpha == beta.
bool is_diagonal_key(MonoKey key, int dof);

struct NRReduction {
    std::vector<int> n;            // per-coordinate min(alpha_i, beta_i)
    std::vector<int> alpha_prime;  // alpha - n
    std::vector<int> beta_prime;   // beta - n
};

/// Unique split (alpha, beta) = (n, n) + (alpha', beta') with
/// alpha'_i beta'_i = 0 for all i.
NRReduction nr_reduce(std::span<const int> alpha, std::span<const int> beta);

/// Expansion f = sum_n (zw)^n f_n or f = sum_n (zw - c)^n f_n with every
/// f_n non-resonant. The index n is packed in the low dof nibbles.
struct ActionDecomposition {
    enum class Basis { ZW, ZWMinusC };

    SeriesSpace space;
    Basis basis = Basis::ZW;
    std::map<MonoKey, TruncatedSeries> terms;

    TruncatedSeries recombine() const;
    const TruncatedSeries* term(std::span<const int> n) const;
};

ActionDecomposition decompose_zw(const TruncatedSeries& f);
ActionDecomposition decompose_action(const TruncatedSeries& f);

/// Grouping of the action decomposition by |n| = 0, 1, 2, >=2, >=3.
/// Both recombinations hold exactly at truncated order:
///   f = f0 + <f1, D> + <D, f2_full D>                      (D = zw - c)
///   f = f0 + <f1, D> + <D, f2 D> + f3_full . D^(x3)
struct CanonicalParts {
    SeriesSpace space;
    TruncatedSeries f0;
    std::vector<TruncatedSeries> f1;                // d entries, non-resonant
    std::vector<std::vector<TruncatedSeries>> f2;   // d x d symmetric, non-resonant
    std::vector<std::vector<TruncatedSeries>> f2_full;  // d x d symmetric
    std::vector<std::vector<std::vector<TruncatedSeries>>> f3_full;  // d^3, symmetric

    TruncatedSeries recombine_candec1() const;
    TruncatedSeries recombine_candec2() const;
};

CanonicalParts canonical_parts(const TruncatedSeries& f);

/// The series z_i w_i - c_i.
TruncatedSeries zw_minus_c(const SeriesSpace& space, int i);

}  // namespace kamtori

#endif
