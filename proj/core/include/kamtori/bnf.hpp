// Birkhoff normal form to a prescribed order, degeneracy rank of the
// action jet, and Russmann transversality parameters.
#ifndef KAMTORI_BNF_HPP
#define KAMTORI_BNF_HPP

#include <map>
#include <vector>

#include "kamtori/symplectic.hpp"

namespace kamtori {

struct HamiltonianSpec {
    TruncatedSeries H;           // c-free, sigma-symmetric, <omega0,zw> + O^3
    std::vector<double> omega0;

    /// Throws series_error when the quadratic part is not exactly
    /// <omega0, zw> or the series fails sigma-symmetry / c-freeness.
    void validate(double tol = 1e-13) const;
};

enum class BNFMethod { Lie, Generating };

struct BNFResult {
    TruncatedSeries N;           // diagonal series, N(zw)
    SymplecticMap normalizer;
    int residual_order = 0;      // H o Z - N(zw) is O^residual_order
    std::vector<double> omega0;

    /// Jet of N as a real series in the actions r: exponent vector -> coeff.
    std::map<std::vector<int>, double> action_jet() const;
    /// Gradient of the action jet evaluated at a real point r near 0.
    std::vector<double> gradient_at(std::span<const double> r) const;
};

/// Degree-graded elimination of non-diagonal terms up to `order`.
/// A nonzero permutation_seed shuffles the order in which same-degree
/// monomials are eliminated (the resulting N must not change).
BNFResult birkhoff_normal_form(const HamiltonianSpec& spec, int order,
                               BNFMethod method = BNFMethod::Lie,
                               unsigned permutation_seed = 0);

struct DegeneracyReport {
    int j = 0;                                  // number of dead directions
    std::vector<std::vector<double>> directions;  // orthonormal kernel basis
    double threshold = 0.0;
};

/// Rank of the coefficient matrix of the NONLINEAR part of grad N over the
/// r-monomials; j = d - rank. Singular values below
/// threshold * sigma_max count as zero.
DegeneracyReport degeneracy_rank(const BNFResult& res, double threshold = 1e-9);

struct TransversalityRow {
    std::vector<int> k;
    std::vector<double> u;  // best unit vector in the closed positive orthant
    double value = 0.0;     // max_{0<=j<=p} |d^j/dt^j f_k(t u)|_{t=0}|
    int order = 0;          // j attaining it
};

struct TransversalityReport {
    int p = 0;
    double sigma = 0.0;
    std::vector<TransversalityRow> table;
};

/// For each 0 < |k|_inf <= k_range searches u in the closed positive
/// orthant maximizing the derivatives of f_k(r) = <k/|k|, grad N(r)>;
/// returns the smallest p <= p_max such that every k attains a derivative
/// bounded away from zero, with sigma the worst such bound.
/// Throws series_error when the jet is degenerate or p_max is too small.
TransversalityReport transversality_params(const BNFResult& res, int p_max,
                                           int k_range);

}  // namespace kamtori

#endif
