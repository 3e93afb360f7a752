// Counterterm normal form at truncated order: the inductive step, the
// iterated scheme, the frequency map solving Omega + Lambda(c, Omega) = 0,
// torus construction with invariance residuals, and flow integration.
#ifndef KAMTORI_KAM_HPP
#define KAMTORI_KAM_HPP

#include <vector>

#include "kamtori/bnf.hpp"
#include "kamtori/decomp.hpp"
#include "kamtori/smalldiv.hpp"
#include "kamtori/symplectic.hpp"

namespace kamtori {

struct contraction_error : series_error {
    contraction_error(const std::string& msg, double before, double after)
        : series_error(msg), majorant_before(before), majorant_after(after) {}
    double majorant_before = 0.0;
    double majorant_after = 0.0;
};

/// Jet: omega = omega0 + mu with a formal parameter block mu of dimension d.
/// Numeric: omega fixed at omega0, no parameter block.
enum class OmegaMode { Jet, Numeric };

struct KamParams {
    double kappa = 1e-3;
    double tau = 2.0;
    int q = 3;
    int steps = 8;
    OmegaMode mode = OmegaMode::Jet;
    int max_degree = 8;    // truncation of the scheme's series space
    int param_degree = 2;  // mu-jet cap in jet mode
    double delta0 = 0.4;   // base radius of the majorant ladder
    double contraction_window = 1e4;  // require after <= window * before^2
    double majorant_floor = 1e-14;    // stop once [H] falls below this
    bool skip_bnf = false;  // treat H as already in normal form (N^q linear)
};

struct StepDiagnostics {
    int step = 0;
    double delta = 0.0;             // radius used for the majorants
    double majorant_before = 0.0;   // [H] entering the step
    double majorant_after = 0.0;    // [H] after the step
    double m_residual = 0.0;        // majorant of M_H after the counterterm fit
    double ledger_residual = 0.0;   // conjugacy re-expansion defect
    double lambda_increment = 0.0;  // majorant of the step's counterterm
};

/// Running state of the scheme. The conjugacy ledger
///   (H_input + <omega + Lambda, zw - c>) o Z
///     = Gamma + <omega, zw - c> + H + g
/// holds coefficient-exactly after every step; H carries the residual
/// (including its O^2(zw - c) block) and g the cut-off-supported flat part.
struct NormalFormState {
    SeriesSpace space;  // (z, w, c [, mu])
    TruncatedSeries H;
    TruncatedSeries Gamma;                // c/mu-only
    std::vector<TruncatedSeries> Lambda;  // scheme counterterm, c/mu-only
    TruncatedSeries g;
    SymplecticMap Z;
    TruncatedSeries H_input;  // the shifted Hamiltonian fed to the scheme
    TruncatedSeries H_base;   // the c-free Hamiltonian after BNF preparation
    TruncatedSeries Nq;       // Birkhoff jet N^q(c), c-only
    std::vector<TruncatedSeries> grad_Nq;  // d entries, c-only
    OmegaSpec omega;
    DiophantineParams dc;
    KamParams params;
    int step_count = 0;
    std::vector<StepDiagnostics> diagnostics;

    double current_delta() const;
    /// [H] = max of the (0)/(1)-part majorants and their D L images.
    double bracket_majorant() const;
    /// Lambda(c, omega) = scheme counterterm - grad N^q(c).
    std::vector<TruncatedSeries> counterterm() const;
    /// Max re-expansion defect of the conjugacy ledger, recomputed from
    /// H_input and the accumulated Z.
    double ledger_residual() const;
};

/// One step of the scheme: fits the counterterm increment so M_H vanishes,
/// solves the cohomological equations for the generator k, applies the
/// sigma-symmetric Lie map of k, and re-derives the state by exact truncated
/// re-expansion. Throws contraction_error when the residual fails to
/// contract quadratically within the configured window.
NormalFormState inductive_step(const NormalFormState& state);

/// Prepares H (Birkhoff normal form to order 2q + 1 unless skip_bnf), shifts
/// by N^q, and iterates inductive_step until the majorant floor or the step
/// budget is reached.
NormalFormState normal_form(const HamiltonianSpec& spec, const KamParams& params);

/// Minimum of |alpha| + |beta| + 2 |gamma| over the support: the degree
/// grading in which c carries the weight of zw (the c -> c^2 scan).
int min_weighted_degree(const TruncatedSeries& f, double tol = 1e-11);
int min_weighted_displacement(const SymplecticMap& Z, double tol = 1e-11);

struct FrequencyJet {
    std::vector<TruncatedSeries> jet;  // d entries, c-only
    std::vector<double> omega0;
    double kappa = 0.0;
    double tau = 0.0;
    double residual = 0.0;  // max coefficient of Omega + Lambda(c, Omega)
    std::vector<std::vector<double>> grid_points;
    std::vector<std::vector<double>> grid_values;

    std::vector<Complex> evaluate(std::span<const Complex> c) const;
    std::vector<double> evaluate_real(std::span<const double> c) const;
};

/// Solves Omega(c) + Lambda(c, Omega(c)) = 0 as jets in c (fixed point on
/// the mu-block substitution), to tolerance 1e-12, and optionally evaluates
/// Omega on a numeric c-grid.
FrequencyJet frequency_map(const NormalFormState& state,
                           std::span<const std::vector<double>> c_grid = {});

struct TorusCandidate {
    std::vector<Complex> c_star;
    std::vector<Complex> omega_star;
    int theta_grid = 0;
    // points[t] = (z_1..z_d, w_1..w_d) at theta node t under Z
    std::vector<std::vector<Complex>> points;
    double residual = 0.0;  // max |{I_j o Z^{-1}, H_base}| over the grid
    bool real_torus = false;
};

/// Samples Z({zw = c*}) on a theta-grid and measures the invariance defect
/// of the pulled-back actions under the H_base flow. Real positive c* gives
/// a real torus; complex c* uses principal-branch square roots and throws
/// when an entry sits on the negative real axis.
TorusCandidate build_torus(const NormalFormState& state,
                           std::span<const Complex> c_star, int theta_grid);

/// The d series (z, w) -> (Z^{-1})_z,j (Z^{-1})_w,j with c and mu fixed at
/// c* and Omega(c*) - omega0: numeric invariants whose level set is the
/// torus.
std::vector<TruncatedSeries> torus_action_functions(const NormalFormState& state,
                                                    std::span<const Complex> c_star);

struct FlowResult {
    std::vector<double> times;
    std::vector<std::vector<double>> points;  // rows (x_1..x_d, y_1..y_d)
    double energy_drift = 0.0;
    double max_invariant_drift = 0.0;
};

/// Adaptive RK4 on the real form of H (z = (x + iy)/sqrt(2)): dx = dH/dy,
/// dy = -dH/dx. Tracks the drift of H and of the supplied invariant series
/// (evaluated in the complex variables) along the trajectory.
FlowResult integrate_flow(const TruncatedSeries& H, std::span<const double> start,
                          double T, double local_tol = 1e-10,
                          std::span<const TruncatedSeries> invariants = {});

}  // namespace kamtori

#endif
