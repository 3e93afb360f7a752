#include "kamtori/symplectic.hpp"

#include <cmath>

namespace kamtori {

namespace {

std::vector<std::optional<TruncatedSeries>> zw_substitution(
    const SeriesSpace& sp, const std::vector<TruncatedSeries>* z_to,
    const std::vector<TruncatedSeries>* w_to) {
    std::vector<std::optional<TruncatedSeries>> subs(sp.n_vars());
    for (int j = 0; j < sp.dof; ++j) {
        if (z_to) subs[sp.var_index(VarRole::Z, j)] = (*z_to)[j];
        if (w_to) subs[sp.var_index(VarRole::W, j)] = (*w_to)[j];
    }
    return subs;
}

void require_order_2(const TruncatedSeries& f, const char* what) {
    int m = f.min_total_degree();
    if (m >= 0 && m < 2)
        throw series_error(std::string(what) +
                           " needs a series of order >= 2, got order " +
                           std::to_string(m));
}

constexpr int kMaxFixedPointIters = 400;
constexpr double kFixedPointTol = 1e-15;

}  // namespace

SymplecticMap SymplecticMap::identity(const SeriesSpace& space) {
    SymplecticMap Z{space, {}, {}, MapProvenance::Identity};
    Z.R.assign(space.dof, TruncatedSeries(space));
    Z.T.assign(space.dof, TruncatedSeries(space));
    return Z;
}

TruncatedSeries SymplecticMap::z_component(int j) const {
    return TruncatedSeries::variable(space, VarRole::Z, j) + R[j];
}

TruncatedSeries SymplecticMap::w_component(int j) const {
    return TruncatedSeries::variable(space, VarRole::W, j) + T[j];
}

int SymplecticMap::displacement_order() const {
    int m = -1;
    for (const auto& s : R) {
        int d = s.min_total_degree();
        if (d >= 0 && (m < 0 || d < m)) m = d;
    }
    for (const auto& s : T) {
        int d = s.min_total_degree();
        if (d >= 0 && (m < 0 || d < m)) m = d;
    }
    return m;
}

bool SymplecticMap::is_identity(double tol) const {
    for (const auto& s : R)
        if (s.max_abs_coeff() > tol) return false;
    for (const auto& s : T)
        if (s.max_abs_coeff() > tol) return false;
    return true;
}

double map_sigma_defect(const SymplecticMap& Z) {
    double worst = 0.0;
    for (int j = 0; j < Z.space.dof; ++j)
        worst = std::max(worst, max_coeff_diff(Z.R[j], sigma_conjugate(Z.T[j])));
    return worst;
}

bool is_map_sigma_symmetric(const SymplecticMap& Z, double tol) {
    return map_sigma_defect(Z) <= tol;
}

SymplecticMap from_generating(const TruncatedSeries& f) {
    require_order_2(f, "from_generating");
    const SeriesSpace& sp = f.space();
    const int d = sp.dof;
    SymplecticMap Z = SymplecticMap::identity(sp);
    Z.provenance = MapProvenance::Generating;
    if (f.empty()) return Z;

    std::vector<TruncatedSeries> df_z(d), df_w(d);
    for (int j = 0; j < d; ++j) {
        df_z[j] = partial_derivative(f, VarRole::Z, j);
        df_w[j] = partial_derivative(f, VarRole::W, j);
    }

    // Solve w' = w - d_z f(z, w', c); the w-slot of f plays the role of w'.
    std::vector<TruncatedSeries> wp(d);
    for (int j = 0; j < d; ++j)
        wp[j] = TruncatedSeries::variable(sp, VarRole::W, j);
    for (int it = 0;; ++it) {
        auto subs = zw_substitution(sp, nullptr, &wp);
        double delta = 0.0;
        std::vector<TruncatedSeries> next(d);
        for (int j = 0; j < d; ++j) {
            next[j] = TruncatedSeries::variable(sp, VarRole::W, j) -
                      substitute(df_z[j], subs);
            delta = std::max(delta, max_coeff_diff(next[j], wp[j]));
        }
        wp = std::move(next);
        if (delta <= kFixedPointTol) break;
        if (it >= kMaxFixedPointIters || !(delta < 1e6))
            throw series_error("from_generating: implicit solve did not settle");
    }

    auto subs = zw_substitution(sp, nullptr, &wp);
    for (int j = 0; j < d; ++j) {
        Z.R[j] = substitute(df_w[j], subs);
        Z.T[j] = wp[j] - TruncatedSeries::variable(sp, VarRole::W, j);
    }
    return Z;
}

namespace {

// One-form coefficients of Z*(z dw) - z dw over the 2d (z,w) variables.
std::vector<TruncatedSeries> pullback_one_form(const SymplecticMap& Z) {
    const SeriesSpace& sp = Z.space;
    const int d = sp.dof;
    std::vector<TruncatedSeries> A(2 * d, TruncatedSeries(sp));
    for (int v = 0; v < 2 * d; ++v) {
        for (int j = 0; j < d; ++j) {
            TruncatedSeries zj = Z.z_component(j);
            A[v] += zj * partial_derivative(Z.T[j], v);
            if (v == d + j) A[v] += Z.R[j];
        }
    }
    return A;
}

double closedness_defect(const std::vector<TruncatedSeries>& A) {
    double worst = 0.0;
    for (std::size_t u = 0; u < A.size(); ++u)
        for (std::size_t v = u + 1; v < A.size(); ++v)
            worst = std::max(
                worst, max_coeff_diff(partial_derivative(A[u], int(v)),
                                      partial_derivative(A[v], int(u))));
    return worst;
}

}  // namespace

double exactness_residual(const SymplecticMap& Z) {
    return closedness_defect(pullback_one_form(Z));
}

TruncatedSeries to_generating(const SymplecticMap& Z, double tol) {
    const SeriesSpace& sp = Z.space;
    const int d = sp.dof;
    std::vector<TruncatedSeries> A = pullback_one_form(Z);
    double defect = closedness_defect(A);
    if (defect > tol)
        throw series_error("to_generating: map is not exact symplectic "
                           "(closedness residual " + std::to_string(defect) + ")");

    // Poincare primitive g with dg = A: divide each monomial of
    // sum_v x_v A_v by its (z,w)-degree.
    TruncatedSeries s(sp);
    for (int v = 0; v < 2 * d; ++v)
        s += TruncatedSeries::variable(sp, sp.role_of(v), v % d) * A[v];
    TruncatedSeries g = s.mapped([&](MonoKey key, Complex c) {
        int k = block_degree(key, 0, 2 * d);
        return c / double(k);
    });

    // Invert the w-map: w = w' - T(z, w, c), then
    // f(z, w', c) = g(z, w(z,w'), c) + <z, w(z,w') - w'>.
    std::vector<TruncatedSeries> wb(d);
    for (int j = 0; j < d; ++j)
        wb[j] = TruncatedSeries::variable(sp, VarRole::W, j);
    for (int it = 0;; ++it) {
        auto subs = zw_substitution(sp, nullptr, &wb);
        double delta = 0.0;
        std::vector<TruncatedSeries> next(d);
        for (int j = 0; j < d; ++j) {
            next[j] = TruncatedSeries::variable(sp, VarRole::W, j) -
                      substitute(Z.T[j], subs);
            delta = std::max(delta, max_coeff_diff(next[j], wb[j]));
        }
        wb = std::move(next);
        if (delta <= kFixedPointTol) break;
        if (it >= kMaxFixedPointIters || !(delta < 1e6))
            throw series_error("to_generating: w-map inversion did not settle");
    }
    auto subs = zw_substitution(sp, nullptr, &wb);
    TruncatedSeries f = substitute(g, subs);
    for (int j = 0; j < d; ++j)
        f += TruncatedSeries::variable(sp, VarRole::Z, j) *
             (wb[j] - TruncatedSeries::variable(sp, VarRole::W, j));
    f.trim();
    return f;
}

TruncatedSeries poisson_bracket(const TruncatedSeries& g,
                                const TruncatedSeries& f) {
    TruncatedSeries out(g.space());
    for (int j = 0; j < g.space().dof; ++j) {
        out += partial_derivative(g, VarRole::Z, j) *
               partial_derivative(f, VarRole::W, j);
        out -= partial_derivative(g, VarRole::W, j) *
               partial_derivative(f, VarRole::Z, j);
    }
    return out;
}

SymplecticMap lie_time_one(const TruncatedSeries& f) {
    require_order_2(f, "lie_time_one");
    const SeriesSpace& sp = f.space();
    const int d = sp.dof;
    SymplecticMap Z = SymplecticMap::identity(sp);
    Z.provenance = MapProvenance::Lie;

    auto flow_coordinate = [&](const TruncatedSeries& coord) {
        TruncatedSeries sum = coord;
        TruncatedSeries term = coord;
        for (int k = 1;; ++k) {
            term = poisson_bracket(term, f) * Complex(1.0 / k, 0.0);
            if (term.empty()) break;
            sum += term;
            if (term.max_abs_coeff() < 1e-17) break;
            if (k > 600)
                throw series_error("lie_time_one: Lie series did not converge");
        }
        return sum;
    };
    for (int j = 0; j < d; ++j) {
        Z.R[j] = flow_coordinate(TruncatedSeries::variable(sp, VarRole::Z, j)) -
                 TruncatedSeries::variable(sp, VarRole::Z, j);
        Z.T[j] = flow_coordinate(TruncatedSeries::variable(sp, VarRole::W, j)) -
                 TruncatedSeries::variable(sp, VarRole::W, j);
    }
    return Z;
}

TruncatedSeries pullback(const TruncatedSeries& h, const SymplecticMap& Z) {
    if (h.space() != Z.space) throw space_mismatch_error("pullback spaces differ");
    std::vector<TruncatedSeries> zs(Z.space.dof), ws(Z.space.dof);
    for (int j = 0; j < Z.space.dof; ++j) {
        zs[j] = Z.z_component(j);
        ws[j] = Z.w_component(j);
    }
    return substitute(h, zw_substitution(Z.space, &zs, &ws));
}

SymplecticMap compose(const SymplecticMap& A, const SymplecticMap& B) {
    if (A.space != B.space) throw space_mismatch_error("compose spaces differ");
    const int d = A.space.dof;
    std::vector<TruncatedSeries> zs(d), ws(d);
    for (int j = 0; j < d; ++j) {
        zs[j] = B.z_component(j);
        ws[j] = B.w_component(j);
    }
    auto subs = zw_substitution(A.space, &zs, &ws);
    SymplecticMap C = SymplecticMap::identity(A.space);
    C.provenance = MapProvenance::Composite;
    for (int j = 0; j < d; ++j) {
        C.R[j] = B.R[j] + substitute(A.R[j], subs);
        C.T[j] = B.T[j] + substitute(A.T[j], subs);
    }
    return C;
}

SymplecticMap invert(const SymplecticMap& Z) {
    const int d = Z.space.dof;
    SymplecticMap W = SymplecticMap::identity(Z.space);
    W.provenance = MapProvenance::Inverse;
    for (int j = 0; j < d; ++j) {
        W.R[j] = -Z.R[j];
        W.T[j] = -Z.T[j];
    }
    for (int it = 0;; ++it) {
        std::vector<TruncatedSeries> zs(d), ws(d);
        for (int j = 0; j < d; ++j) {
            zs[j] = W.z_component(j);
            ws[j] = W.w_component(j);
        }
        auto subs = zw_substitution(Z.space, &zs, &ws);
        double delta = 0.0;
        for (int j = 0; j < d; ++j) {
            TruncatedSeries r = -substitute(Z.R[j], subs);
            TruncatedSeries t = -substitute(Z.T[j], subs);
            delta = std::max(delta, max_coeff_diff(r, W.R[j]));
            delta = std::max(delta, max_coeff_diff(t, W.T[j]));
            W.R[j] = std::move(r);
            W.T[j] = std::move(t);
        }
        if (delta <= kFixedPointTol) break;
        if (it >= kMaxFixedPointIters || !(delta < 1e6))
            throw series_error("invert: fixed point did not settle");
    }
    return W;
}

MapComparison compare_gen_vs_lie(const TruncatedSeries& f,
                                 std::span<const double> eps_grid,
                                 double radius) {
    MapComparison rep;
    for (double eps : eps_grid) {
        SymplecticMap gen = from_generating(f * Complex(eps, 0.0));
        SymplecticMap lie = lie_time_one(f * Complex(eps, 0.0));
        SymplecticMap diff = compose(invert(lie), gen);
        double D = 0.0;
        for (const auto& s : diff.R) D = std::max(D, majorant_norm(s, radius));
        for (const auto& s : diff.T) D = std::max(D, majorant_norm(s, radius));
        rep.eps.push_back(eps);
        rep.difference.push_back(D);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < rep.eps.size(); ++i) {
        if (rep.difference[i] <= 0.0) continue;
        double x = std::log(rep.eps[i]), y = std::log(rep.difference[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2)
        rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    else
        rep.exact_zero = true;
    return rep;
}

}  // namespace kamtori
