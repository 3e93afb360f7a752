#include "kamtori/kam.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

namespace kamtori {

namespace {

bool is_cmu_key(const SeriesSpace& sp, MonoKey key) {
    return block_degree(key, 0, 2 * sp.dof) == 0;
}

TruncatedSeries cmu_part(const TruncatedSeries& f) {
    const SeriesSpace& sp = f.space();
    return f.filtered([&](MonoKey k) { return is_cmu_key(sp, k); });
}

/// <omega, zw - c> in the state's space; formal mode adds <mu, zw - c>.
TruncatedSeries omega_pairing(const SeriesSpace& sp, const OmegaSpec& omega) {
    TruncatedSeries s(sp);
    for (int i = 0; i < sp.dof; ++i) {
        TruncatedSeries D = zw_minus_c(sp, i);
        s += Complex(omega.omega0[i], 0.0) * D;
        if (omega.formal)
            s += TruncatedSeries::variable(sp, VarRole::P, i) * D;
    }
    return s;
}

/// Non-resonant slot (n = 0) of the (zw - c)-decomposition.
TruncatedSeries nr_slot(const TruncatedSeries& f) {
    auto dec = decompose_action(f);
    std::vector<int> zero(f.space().dof, 0);
    const TruncatedSeries* t = dec.term(zero);
    return t ? *t : TruncatedSeries(f.space());
}

struct StepData {
    CanonicalParts parts;
    TruncatedSeries k0;
    std::vector<TruncatedSeries> DLk0;  // D_j L f0
    std::vector<TruncatedSeries> arg;   // f1_i - nr(<f2_i., DLk0>)
    std::vector<TruncatedSeries> M;     // c/mu-only mean values
};

StepData step_data(const TruncatedSeries& H, const OmegaSpec& omega,
                   const DiophantineParams& dc) {
    const SeriesSpace& sp = H.space();
    const int d = sp.dof;
    StepData s{canonical_parts(H), {}, {}, {}, {}};
    s.k0 = solve_L(s.parts.f0, omega, dc);
    s.DLk0.reserve(d);
    for (int j = 0; j < d; ++j) s.DLk0.push_back(apply_D_component(s.k0, j));
    s.arg.reserve(d);
    s.M.reserve(d);
    for (int i = 0; i < d; ++i) {
        // {F2, k0} feeds (f2_ij + f2_ji) D_j k0 back into the linear slot.
        TruncatedSeries prod(sp);
        for (int j = 0; j < d; ++j)
            prod += (s.parts.f2[i][j] + s.parts.f2[j][i]) * s.DLk0[j];
        TruncatedSeries a = s.parts.f1[i] - nr_slot(prod);
        s.M.push_back(cmu_part(a));
        s.arg.push_back(std::move(a));
    }
    return s;
}

/// Weighted degree with z, w of weight 1 and c, mu of weight 2. Monomials
/// beyond the space's truncation order in this grading carry coefficients
/// the plain-degree truncation no longer controls.
int weighted_key_degree(const SeriesSpace& sp, MonoKey key) {
    return block_degree(key, 0, 2 * sp.dof) +
           2 * block_degree(key, 2 * sp.dof, sp.n_vars() - 2 * sp.dof);
}

TruncatedSeries trusted_part(const TruncatedSeries& f) {
    const SeriesSpace& sp = f.space();
    return f.filtered([&](MonoKey key) {
        return weighted_key_degree(sp, key) <= sp.max_degree;
    });
}

double parts_majorant(const CanonicalParts& parts, const OmegaSpec& omega,
                      const DiophantineParams& dc, double delta) {
    const int d = parts.space.dof;
    auto weigh = [&](const TruncatedSeries& f) {
        return majorant_norm(trusted_part(f), delta);
    };
    double m = weigh(parts.f0);
    TruncatedSeries L0 = solve_L(parts.f0, omega, dc);
    for (int j = 0; j < d; ++j)
        m = std::max(m, weigh(apply_D_component(L0, j)));
    for (int i = 0; i < d; ++i) {
        m = std::max(m, weigh(parts.f1[i]));
        TruncatedSeries L1 = solve_L(parts.f1[i], omega, dc);
        for (int j = 0; j < d; ++j)
            m = std::max(m, weigh(apply_D_component(L1, j)));
    }
    return m;
}

/// Re-derives Gamma, H, g (and the ledger residual) from scratch:
/// the full pullback of H_input + <omega + Lambda, zw - c> through the
/// accumulated Z, split into the ledger's right-hand side.
double rebuild_split(NormalFormState& st) {
    const SeriesSpace& sp = st.space;
    TruncatedSeries pairing = omega_pairing(sp, st.omega);
    TruncatedSeries lhs = st.H_input + pairing;
    for (int i = 0; i < sp.dof; ++i)
        lhs += st.Lambda[i] * zw_minus_c(sp, i);
    TruncatedSeries F = pullback(lhs, st.Z);
    TruncatedSeries S = F - pairing;
    CanonicalParts parts = canonical_parts(S);
    // Gamma is the c/mu-only slice of the resonant zero slot; pulling the
    // raw c-only monomials out of S instead would break the (zw - c) grading.
    st.Gamma = cmu_part(parts.f0);
    TruncatedSeries g = cutoff(parts.f0, st.omega, st.dc);
    for (int i = 0; i < sp.dof; ++i)
        g += zw_minus_c(sp, i) * cutoff(parts.f1[i], st.omega, st.dc);
    st.g = g;
    st.H = S - st.Gamma - g;
    TruncatedSeries rhs = st.Gamma + pairing + st.H + st.g;
    return max_coeff_diff(F, rhs);
}

constexpr int kCountertermIters = 50;
constexpr double kCountertermTol = 1e-12;
constexpr double kFrequencyTol = 1e-12;

}  // namespace

double NormalFormState::current_delta() const {
    double delta = params.delta0;
    for (int k = 0; k < step_count; ++k)
        delta -= params.delta0 / double(1 << (k + 2));
    return delta;
}

double NormalFormState::bracket_majorant() const {
    return parts_majorant(canonical_parts(H), omega, dc, current_delta());
}

std::vector<TruncatedSeries> NormalFormState::counterterm() const {
    std::vector<TruncatedSeries> full = Lambda;
    for (int i = 0; i < space.dof; ++i) full[i] -= grad_Nq[i];
    return full;
}

double NormalFormState::ledger_residual() const {
    NormalFormState copy = *this;
    return rebuild_split(copy);
}

NormalFormState inductive_step(const NormalFormState& state) {
    const SeriesSpace& sp = state.space;
    const int d = sp.dof;
    const double m_before = state.bracket_majorant();

    NormalFormState out = state;
    StepDiagnostics diag;
    diag.step = state.step_count + 1;
    diag.majorant_before = m_before;

    if (m_before == 0.0) {
        diag.delta = state.current_delta();
        out.diagnostics.push_back(diag);
        return out;
    }

    // (z_i + R_i)(w_i + T_i) - c_i for the accumulated map: the counterterm
    // increment acts through the coordinates already in place.
    std::vector<TruncatedSeries> B(d);
    for (int i = 0; i < d; ++i)
        B[i] = state.Z.z_component(i) * state.Z.w_component(i) -
               TruncatedSeries::variable(sp, VarRole::C, i);

    std::vector<TruncatedSeries> dLam(d, TruncatedSeries(sp));
    TruncatedSeries Htil;
    StepData data;
    double m_res = 0.0;
    for (int it = 0;; ++it) {
        Htil = state.H;
        for (int i = 0; i < d; ++i) Htil += dLam[i] * B[i];
        data = step_data(Htil, state.omega, state.dc);
        m_res = 0.0;
        for (int i = 0; i < d; ++i)
            m_res = std::max(m_res, data.M[i].max_abs_coeff());
        if (m_res <= kCountertermTol) break;
        if (it >= kCountertermIters)
            throw series_error("inductive_step: counterterm fit stalled at M = " +
                               std::to_string(m_res));
        for (int i = 0; i < d; ++i) dLam[i] -= data.M[i];
    }
    diag.m_residual = m_res;

    TruncatedSeries k = solve_L(data.parts.f0, state.omega, state.dc);
    for (int i = 0; i < d; ++i)
        k += zw_minus_c(sp, i) * solve_L(data.arg[i], state.omega, state.dc);

    SymplecticMap Zk =
        k.empty() ? SymplecticMap::identity(sp) : lie_time_one(k);
    out.Z = compose(state.Z, Zk);
    for (int i = 0; i < d; ++i) {
        out.Lambda[i] += dLam[i];
        diag.lambda_increment =
            std::max(diag.lambda_increment,
                     majorant_norm(dLam[i], state.current_delta()));
    }
    out.step_count = state.step_count + 1;
    diag.ledger_residual = rebuild_split(out);
    diag.delta = out.current_delta();

    const double m_after = out.bracket_majorant();
    diag.majorant_after = m_after;
    const auto& p = state.params;
    if (m_after > p.majorant_floor &&
        m_after > p.contraction_window * m_before * m_before)
        throw contraction_error(
            "inductive_step: residual failed to contract (before " +
                std::to_string(m_before) + ", after " + std::to_string(m_after) +
                ")",
            m_before, m_after);
    out.diagnostics.push_back(diag);
    return out;
}

namespace {

TruncatedSeries lift(const TruncatedSeries& f, const SeriesSpace& sp) {
    if (f.space().dof != sp.dof)
        throw space_mismatch_error("lift: dof mismatch");
    TruncatedSeries out(sp);
    for (const auto& [key, v] : f.coeffs()) out.add_to(key, v);
    return out;
}

}  // namespace

NormalFormState normal_form(const HamiltonianSpec& spec, const KamParams& params) {
    spec.validate();
    const int d = static_cast<int>(spec.omega0.size());

    TruncatedSeries Hb = spec.H;
    std::map<std::vector<int>, double> njet;
    if (params.skip_bnf) {
        std::vector<int> unit(d, 0);
        for (int i = 0; i < d; ++i) {
            unit.assign(d, 0);
            unit[i] = 1;
            njet[unit] = spec.omega0[i];
        }
    } else {
        BNFResult res =
            birkhoff_normal_form(spec, 2 * params.q + 1, BNFMethod::Lie);
        Hb = pullback(spec.H, res.normalizer);
        for (const auto& [m, v] : res.action_jet()) {
            int total = 0;
            for (int e : m) total += e;
            if (total <= params.q) njet[m] = v;
        }
    }

    const int np = params.mode == OmegaMode::Jet ? d : 0;
    SeriesSpace sp(d, params.max_degree, np, np ? params.param_degree : -1);

    NormalFormState st;
    st.space = sp;
    st.params = params;
    st.omega = OmegaSpec{spec.omega0, params.mode == OmegaMode::Jet};
    st.dc = DiophantineParams{params.kappa, params.tau};
    st.H_base = lift(Hb, sp);

    st.Nq = TruncatedSeries(sp);
    for (const auto& [m, v] : njet) {
        std::vector<int> exps(sp.n_vars(), 0);
        for (int i = 0; i < d; ++i) exps[sp.var_index(VarRole::C, i)] = m[i];
        st.Nq += TruncatedSeries::monomial(sp, exps, Complex(v, 0.0));
    }
    st.grad_Nq.reserve(d);
    for (int i = 0; i < d; ++i)
        st.grad_Nq.push_back(partial_derivative(st.Nq, VarRole::C, i));

    // The quadratic <omega0, zw> inside H_base cancels against the linear
    // part of the invariant jet, leaving a perturbation of order (zw - c)^2;
    // the pairing <omega, zw - c> is carried separately in the ledger.
    st.H_input = st.H_base - st.Nq;
    for (int i = 0; i < d; ++i)
        st.H_input -= st.grad_Nq[i] * zw_minus_c(sp, i);

    st.Lambda.assign(d, TruncatedSeries(sp));
    st.Z = SymplecticMap::identity(sp);
    rebuild_split(st);

    for (int k = 0; k < params.steps; ++k) {
        if (st.bracket_majorant() <= params.majorant_floor) break;
        st = inductive_step(st);
    }
    return st;
}

int min_weighted_degree(const TruncatedSeries& f, double tol) {
    const SeriesSpace& sp = f.space();
    int best = -1;
    for (const auto& [key, v] : f.coeffs()) {
        if (std::abs(v) <= tol) continue;
        int deg = block_degree(key, 0, 2 * sp.dof) +
                  2 * block_degree(key, 2 * sp.dof, sp.dof);
        if (best < 0 || deg < best) best = deg;
    }
    return best;
}

int min_weighted_displacement(const SymplecticMap& Z, double tol) {
    int best = -1;
    auto fold = [&](const TruncatedSeries& s) {
        int m = min_weighted_degree(s, tol);
        if (m >= 0 && (best < 0 || m < best)) best = m;
    };
    for (const auto& s : Z.R) fold(s);
    for (const auto& s : Z.T) fold(s);
    return best;
}

std::vector<Complex> FrequencyJet::evaluate(std::span<const Complex> c) const {
    const SeriesSpace& sp = jet.front().space();
    std::vector<Complex> point(sp.n_vars(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < c.size(); ++i)
        point[sp.var_index(VarRole::C, static_cast<int>(i))] = c[i];
    std::vector<Complex> out;
    out.reserve(jet.size());
    for (const auto& s : jet) out.push_back(s.evaluate(point));
    return out;
}

std::vector<double> FrequencyJet::evaluate_real(std::span<const double> c) const {
    std::vector<Complex> cc(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) cc[i] = Complex(c[i], 0.0);
    auto v = evaluate(cc);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
}

FrequencyJet frequency_map(const NormalFormState& state,
                           std::span<const std::vector<double>> c_grid) {
    const SeriesSpace& sp = state.space;
    const int d = sp.dof;
    std::vector<TruncatedSeries> full = state.counterterm();

    FrequencyJet out;
    out.omega0 = state.omega.omega0;
    out.kappa = state.dc.kappa;
    out.tau = state.dc.tau;

    std::vector<TruncatedSeries> Om(d);
    for (int i = 0; i < d; ++i)
        Om[i] = TruncatedSeries::constant(sp, Complex(state.omega.omega0[i], 0.0));

    auto lambda_at = [&](const std::vector<TruncatedSeries>& Omega, int i) {
        if (!state.omega.formal) return full[i];
        std::vector<std::optional<TruncatedSeries>> subs(sp.n_vars());
        for (int j = 0; j < d; ++j) {
            TruncatedSeries mu = Omega[j];
            mu.add_to(MonoKey{0}, Complex(-state.omega.omega0[j], 0.0));
            subs[sp.var_index(VarRole::P, j)] = std::move(mu);
        }
        return substitute(full[i], subs, true);
    };

    double residual = 0.0;
    for (int it = 0;; ++it) {
        double move = 0.0;
        residual = 0.0;
        std::vector<TruncatedSeries> next(d);
        for (int i = 0; i < d; ++i) {
            TruncatedSeries li = lambda_at(Om, i);
            residual = std::max(residual, (Om[i] + li).max_abs_coeff());
            next[i] = -li;
            move = std::max(move, max_coeff_diff(next[i], Om[i]));
        }
        Om = std::move(next);
        if (residual <= kFrequencyTol || move <= 1e-15) {
            // Re-measure at the settled jet.
            residual = 0.0;
            for (int i = 0; i < d; ++i)
                residual =
                    std::max(residual, (Om[i] + lambda_at(Om, i)).max_abs_coeff());
            if (residual <= kFrequencyTol) break;
        }
        if (it >= 50)
            throw series_error("frequency_map: fixed point stalled at residual " +
                               std::to_string(residual));
    }
    out.residual = residual;

    // Keep only the trusted region of the grading: c-orders whose weighted
    // degree fits within the truncation.
    const int jet_cap = sp.max_degree / 2;
    for (int i = 0; i < d; ++i)
        out.jet.push_back(Om[i].filtered([&](MonoKey key) {
            return total_degree(key) <= jet_cap;
        }));

    for (const auto& c : c_grid) {
        out.grid_points.push_back(c);
        out.grid_values.push_back(out.evaluate_real(c));
    }
    return out;
}

std::vector<TruncatedSeries> torus_action_functions(
    const NormalFormState& state, std::span<const Complex> c_star) {
    const SeriesSpace& sp = state.space;
    const int d = sp.dof;
    FrequencyJet freq = frequency_map(state);
    std::vector<Complex> omega_star = freq.evaluate(c_star);

    std::vector<std::optional<TruncatedSeries>> subs(sp.n_vars());
    for (int j = 0; j < d; ++j) {
        subs[sp.var_index(VarRole::C, j)] =
            TruncatedSeries::constant(sp, c_star[j]);
        if (state.omega.formal)
            subs[sp.var_index(VarRole::P, j)] = TruncatedSeries::constant(
                sp, omega_star[j] - Complex(state.omega.omega0[j], 0.0));
    }
    SymplecticMap G = invert(state.Z);
    std::vector<TruncatedSeries> A;
    A.reserve(d);
    for (int j = 0; j < d; ++j) {
        TruncatedSeries zj = substitute(G.z_component(j), subs, true);
        TruncatedSeries wj = substitute(G.w_component(j), subs, true);
        A.push_back(zj * wj);
    }
    return A;
}

TorusCandidate build_torus(const NormalFormState& state,
                           std::span<const Complex> c_star, int theta_grid) {
    const SeriesSpace& sp = state.space;
    const int d = sp.dof;
    if (static_cast<int>(c_star.size()) != d)
        throw series_error("build_torus: c* has wrong dimension");
    for (const Complex& c : c_star)
        if (c.real() < 0.0 && std::abs(c.imag()) <= 1e-14 * std::abs(c.real()))
            throw series_error(
                "build_torus: c* entry on the negative real axis; the "
                "principal square-root branch cut is ambiguous there");

    TorusCandidate torus;
    torus.c_star.assign(c_star.begin(), c_star.end());
    torus.theta_grid = theta_grid;
    torus.real_torus = true;
    for (const Complex& c : c_star)
        if (c.imag() != 0.0 || c.real() < 0.0) torus.real_torus = false;

    FrequencyJet freq = frequency_map(state);
    torus.omega_star = freq.evaluate(c_star);

    std::vector<TruncatedSeries> A = torus_action_functions(state, c_star);
    std::vector<TruncatedSeries> defect;
    defect.reserve(d);
    for (int j = 0; j < d; ++j)
        defect.push_back(poisson_bracket(A[j], state.H_base));

    std::vector<Complex> roots(d);
    for (int j = 0; j < d; ++j) roots[j] = std::sqrt(c_star[j]);

    std::vector<std::optional<TruncatedSeries>> subs(sp.n_vars());
    for (int j = 0; j < d; ++j) {
        subs[sp.var_index(VarRole::C, j)] =
            TruncatedSeries::constant(sp, c_star[j]);
        if (state.omega.formal)
            subs[sp.var_index(VarRole::P, j)] = TruncatedSeries::constant(
                sp, torus.omega_star[j] - Complex(state.omega.omega0[j], 0.0));
    }
    std::vector<TruncatedSeries> zc(d), wc(d);
    for (int j = 0; j < d; ++j) {
        zc[j] = substitute(state.Z.z_component(j), subs, true);
        wc[j] = substitute(state.Z.w_component(j), subs, true);
    }

    const long nodes_total =
        static_cast<long>(std::pow(double(theta_grid), d));
    std::vector<int> idx(d, 0);
    std::vector<Complex> point(sp.n_vars(), Complex(0.0, 0.0));
    double worst = 0.0;
    for (long node = 0; node < nodes_total; ++node) {
        for (int j = 0; j < d; ++j) {
            double th = 2.0 * M_PI * double(idx[j]) / double(theta_grid);
            Complex e(std::cos(th), std::sin(th));
            point[sp.var_index(VarRole::Z, j)] = roots[j] * e;
            point[sp.var_index(VarRole::W, j)] = roots[j] / e;
        }
        std::vector<Complex> image(2 * d);
        for (int j = 0; j < d; ++j) {
            image[j] = zc[j].evaluate(point);
            image[d + j] = wc[j].evaluate(point);
        }
        std::vector<Complex> image_point(sp.n_vars(), Complex(0.0, 0.0));
        for (int j = 0; j < d; ++j) {
            image_point[sp.var_index(VarRole::Z, j)] = image[j];
            image_point[sp.var_index(VarRole::W, j)] = image[d + j];
        }
        for (int j = 0; j < d; ++j)
            worst = std::max(worst, std::abs(defect[j].evaluate(image_point)));
        torus.points.push_back(std::move(image));
        for (int j = 0; j < d; ++j) {
            if (++idx[j] < theta_grid) break;
            idx[j] = 0;
        }
    }
    torus.residual = worst;
    return torus;
}

FlowResult integrate_flow(const TruncatedSeries& H, std::span<const double> start,
                          double T, double local_tol,
                          std::span<const TruncatedSeries> invariants) {
    const SeriesSpace& sp = H.space();
    const int d = sp.dof;
    if (static_cast<int>(start.size()) != 2 * d)
        throw series_error("integrate_flow: start point has wrong dimension");

    std::vector<TruncatedSeries> gz(d), gw(d);
    for (int j = 0; j < d; ++j) {
        gz[j] = partial_derivative(H, VarRole::Z, j);
        gw[j] = partial_derivative(H, VarRole::W, j);
    }

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto to_complex = [&](std::span<const double> xy,
                          std::vector<Complex>& point) {
        for (int j = 0; j < d; ++j) {
            Complex z(xy[j] * inv_sqrt2, xy[d + j] * inv_sqrt2);
            point[sp.var_index(VarRole::Z, j)] = z;
            point[sp.var_index(VarRole::W, j)] = std::conj(z);
        }
    };
    std::vector<Complex> point(sp.n_vars(), Complex(0.0, 0.0));
    auto deriv = [&](const std::vector<double>& xy, std::vector<double>& dxy) {
        to_complex(xy, point);
        for (int j = 0; j < d; ++j) {
            Complex a = gz[j].evaluate(point);
            Complex b = gw[j].evaluate(point);
            double dHdx = ((a + b) * inv_sqrt2).real();
            double dHdy = (Complex(0.0, 1.0) * (a - b) * inv_sqrt2).real();
            dxy[j] = dHdy;
            dxy[d + j] = -dHdx;
        }
    };
    auto rk4 = [&](const std::vector<double>& y, double h,
                   std::vector<double>& out) {
        const std::size_t n = y.size();
        std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
        deriv(y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        deriv(tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        deriv(tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        deriv(tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };

    FlowResult res;
    std::vector<double> y(start.begin(), start.end());
    to_complex(y, point);
    const double E0 = H.evaluate(point).real();
    std::vector<Complex> inv0(invariants.size());
    for (std::size_t j = 0; j < invariants.size(); ++j)
        inv0[j] = invariants[j].evaluate(point);

    auto record = [&](double t, const std::vector<double>& state) {
        res.times.push_back(t);
        res.points.push_back(state);
        to_complex(state, point);
        res.energy_drift =
            std::max(res.energy_drift, std::abs(H.evaluate(point).real() - E0));
        for (std::size_t j = 0; j < invariants.size(); ++j)
            res.max_invariant_drift =
                std::max(res.max_invariant_drift,
                         std::abs(invariants[j].evaluate(point) - inv0[j]));
    };
    record(0.0, y);

    double t = 0.0;
    double h = std::min(0.01, T / 10.0);
    const double record_dt = T / 512.0;
    double next_record = record_dt;
    std::vector<double> full(y.size()), half(y.size()), two(y.size());
    while (t < T) {
        if (t + h > T) h = T - t;
        rk4(y, h, full);
        rk4(y, 0.5 * h, half);
        rk4(half, 0.5 * h, two);
        double err = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            err = std::max(err, std::abs(two[i] - full[i]) / 15.0);
        if (err <= local_tol) {
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] = two[i] + (two[i] - full[i]) / 15.0;
            t += h;
            if (t >= next_record || t >= T) {
                record(t, y);
                while (next_record <= t) next_record += record_dt;
            }
        }
        double scale = err > 0.0 ? 0.9 * std::pow(local_tol / err, 0.2) : 5.0;
        h *= std::clamp(scale, 0.2, 5.0);
        if (h < 1e-12) throw series_error("integrate_flow: step underflow");
    }
    return res;
}

}  // namespace kamtori
