// Diagonal projection, the derivations D_i and D^omega, the smooth small
// divisor cut-off P, and the truncated solver L for the cohomological
// equation D^omega u + P f + M f = f.
#ifndef KAMTORI_SMALLDIV_HPP
#define KAMTORI_SMALLDIV_HPP

#include <vector>

#include "kamtori/series.hpp"

namespace kamtori {

struct DiophantineParams {
    double kappa = 0.1;  // in (0, 1)
    double tau = 2.0;    // > dof - 1
    void validate(int dof) const;
};

/// Exhaustive check of |<k, omega>| >= kappa / |k|^tau for all integer
/// vectors 0 < |k|_inf <= k_max (Euclidean norm on the right-hand side).
/// Returns the largest violating |<k,omega>| ratio witness, or empty.
struct DCWitness {
    bool ok = true;
    std::vector<int> worst_k;     // k minimising |<k,omega>| |k|^tau
    double worst_margin = 0.0;    // |<k,omega>| |k|^tau / kappa at worst_k
};

DCWitness dc_check(std::span<const double> omega, const DiophantineParams& p,
                   long k_max);

/// Frequency used by the operators: either the concrete vector omega0, or
/// the formal family omega0 + mu when `formal` is set. Formal mode needs a
/// series space with n_params == dof; the mu_j are the parameter variables.
struct OmegaSpec {
    std::vector<double> omega0;
    bool formal = false;
};

/// M f: keep monomials with alpha == beta.
TruncatedSeries project_diagonal(const TruncatedSeries& f);

/// D_i f: multiply each monomial by (alpha_i - beta_i).
TruncatedSeries apply_D_component(const TruncatedSeries& f, int i);
std::vector<TruncatedSeries> apply_D(const TruncatedSeries& f);

/// D^omega f: multiply by <omega, alpha - beta>. In formal mode the result
/// gains one mu-degree from the <mu, alpha - beta> part.
TruncatedSeries apply_D_omega(const TruncatedSeries& f, const OmegaSpec& omega);

/// Fixed smooth bump: 1 on |x| <= 1/4, 0 on |x| >= 1/2, exp(-1/t)-glued in
/// between. Infinitely flat at both ends of the transition.
double cutoff_profile(double x);

/// P f: off-diagonal monomials scaled by
///   l(<alpha - beta, omega0> (|alpha| + |beta|)^tau / kappa),
/// diagonal monomials dropped. Weights always use the numeric omega0.
TruncatedSeries cutoff(const TruncatedSeries& f, const OmegaSpec& omega,
                       const DiophantineParams& p);

/// L f: truncated solution u of D^omega u = f - P f - M f, with u = 0 on the
/// diagonal. Off-diagonal: u = f (1 - l) / <omega, alpha - beta>; in formal
/// mode the division is by <omega0 + mu, alpha - beta> expanded as a
/// geometric series in mu, truncated at the space's parameter degree.
/// Throws series_error on an exact zero divisor with nonzero retained load.
TruncatedSeries solve_L(const TruncatedSeries& f, const OmegaSpec& omega,
                        const DiophantineParams& p);

}  // namespace kamtori

#endif
