#include "kamtori/bnf.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kamtori/smalldiv.hpp"

namespace kamtori {

namespace {

double dot(std::span<const double> a, std::span<const int> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// All k with 0 < |k|_1 <= range, one representative per {k, -k} pair.
std::vector<std::vector<int>> half_lattice_l1(int d, int range) {
    std::vector<std::vector<int>> out;
    std::vector<int> k(d, -range);
    for (;;) {
        int l1 = 0;
        for (int v : k) l1 += std::abs(v);
        if (l1 > 0 && l1 <= range) {
            int first = 0;
            while (k[first] == 0) ++first;
            if (k[first] > 0) out.push_back(k);
        }
        int i = 0;
        while (i < d && k[i] == range) k[i++] = -range;
        if (i == d) break;
        ++k[i];
    }
    return out;
}

}  // namespace

void HamiltonianSpec::validate(double tol) const {
    const SeriesSpace& sp = H.space();
    const int d = sp.dof;
    if (static_cast<int>(omega0.size()) != d)
        throw series_error("HamiltonianSpec: omega0 dimension mismatch");
    if (sigma_symmetry_defect(H) > tol)
        throw series_error("HamiltonianSpec: H is not sigma-symmetric");
    for (const auto& [key, c] : H.coeffs()) {
        if (block_degree(key, 2 * d, d + sp.n_params) != 0)
            throw series_error("HamiltonianSpec: H must be c-free");
        int deg = total_degree(key);
        if (deg < 2)
            throw series_error("HamiltonianSpec: constant or linear part present");
        if (deg == 2) {
            bool diag_quadratic = false;
            for (int j = 0; j < d; ++j)
                if (exponent_of(key, j) == 1 && exponent_of(key, d + j) == 1)
                    diag_quadratic = true;
            if (!diag_quadratic)
                throw series_error(
                    "HamiltonianSpec: quadratic part is not <omega0, zw>");
        }
    }
    for (int j = 0; j < d; ++j) {
        std::vector<int> e(sp.n_vars(), 0);
        e[j] = 1;
        e[d + j] = 1;
        if (std::abs(H.coeff(e) - Complex(omega0[j])) > tol)
            throw series_error(
                "HamiltonianSpec: quadratic part is not <omega0, zw>");
    }
}

BNFResult birkhoff_normal_form(const HamiltonianSpec& spec, int order,
                               BNFMethod method, unsigned permutation_seed) {
    spec.validate();
    const SeriesSpace& sp = spec.H.space();
    const int d = sp.dof;
    if (order < 2 || order > sp.max_degree)
        throw series_error("birkhoff_normal_form: order out of range");

    for (const auto& k : half_lattice_l1(d, order)) {
        if (std::abs(dot(spec.omega0, k)) < 1e-12) {
            std::string msg = "birkhoff_normal_form: resonance at k = (";
            for (int i = 0; i < d; ++i)
                msg += (i ? "," : "") + std::to_string(k[i]);
            throw series_error(msg + ")");
        }
    }

    TruncatedSeries Hcur = spec.H;
    SymplecticMap Ztot = SymplecticMap::identity(sp);

    for (int m = 3; m <= order; ++m) {
        TruncatedSeries Rm = Hcur.filtered([&](MonoKey key) {
            if (total_degree(key) != m) return false;
            for (int j = 0; j < d; ++j)
                if (exponent_of(key, j) != exponent_of(key, d + j)) return true;
            return false;
        });
        if (Rm.empty()) continue;

        std::vector<std::pair<MonoKey, Complex>> monos(Rm.coeffs().begin(),
                                                       Rm.coeffs().end());
        std::sort(monos.begin(), monos.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<TruncatedSeries> chunks;
        if (permutation_seed == 0) {
            TruncatedSeries k(sp);
            for (const auto& [key, c] : monos) {
                std::vector<int> kv(d);
                for (int j = 0; j < d; ++j)
                    kv[j] = exponent_of(key, j) - exponent_of(key, d + j);
                k.add_to(key, c / dot(spec.omega0, kv));
            }
            chunks.push_back(std::move(k));
        } else {
            std::mt19937_64 rng(permutation_seed);
            std::shuffle(monos.begin(), monos.end(), rng);
            for (const auto& [key, c] : monos) {
                std::vector<int> kv(d);
                for (int j = 0; j < d; ++j)
                    kv[j] = exponent_of(key, j) - exponent_of(key, d + j);
                TruncatedSeries k(sp);
                k.add_to(key, c / dot(spec.omega0, kv));
                chunks.push_back(std::move(k));
            }
        }
        for (const TruncatedSeries& k : chunks) {
            SymplecticMap Zm = method == BNFMethod::Lie ? lie_time_one(k)
                                                        : from_generating(k);
            Hcur = pullback(Hcur, Zm);
            Ztot = compose(Ztot, Zm);
        }
    }

    BNFResult res;
    res.omega0 = spec.omega0;
    res.normalizer = std::move(Ztot);
    res.N = Hcur.filtered([&](MonoKey key) {
        if (total_degree(key) > order) return false;
        for (int j = 0; j < d; ++j)
            if (exponent_of(key, j) != exponent_of(key, d + j)) return false;
        return true;
    });
    TruncatedSeries residual = Hcur - res.N;
    residual.trim(1e-12);
    int mr = residual.min_total_degree();
    res.residual_order = mr < 0 ? sp.max_degree + 1 : mr;
    return res;
}

std::map<std::vector<int>, double> BNFResult::action_jet() const {
    const int d = N.space().dof;
    std::map<std::vector<int>, double> jet;
    for (const auto& [key, c] : N.coeffs()) {
        std::vector<int> m(d);
        for (int j = 0; j < d; ++j) m[j] = exponent_of(key, j);
        jet[m] += c.real();
    }
    return jet;
}

std::vector<double> BNFResult::gradient_at(std::span<const double> r) const {
    const int d = N.space().dof;
    std::vector<double> g(d, 0.0);
    for (const auto& [m, coeff] : action_jet()) {
        for (int i = 0; i < d; ++i) {
            if (m[i] == 0) continue;
            double term = coeff * m[i];
            for (int j = 0; j < d; ++j)
                for (int e = 0; e < m[j] - (j == i ? 1 : 0); ++e) term *= r[j];
            g[i] += term;
        }
    }
    return g;
}

namespace {

// Rows: coefficient vectors of grad(N - <omega0, r>) over r-monomials.
std::map<std::vector<int>, std::vector<double>> gradient_jet_rows(
    const BNFResult& res) {
    const int d = res.N.space().dof;
    std::map<std::vector<int>, std::vector<double>> rows;
    for (const auto& [m, coeff] : res.action_jet()) {
        int deg = 0;
        for (int v : m) deg += v;
        if (deg < 2) continue;  // constant gradient rows excluded
        for (int i = 0; i < d; ++i) {
            if (m[i] == 0) continue;
            std::vector<int> e = m;
            --e[i];
            auto [it, ins] = rows.try_emplace(e, std::vector<double>(d, 0.0));
            it->second[i] += coeff * m[i];
        }
    }
    return rows;
}

}  // namespace

DegeneracyReport degeneracy_rank(const BNFResult& res, double threshold) {
    const int d = res.N.space().dof;
    DegeneracyReport rep;
    rep.threshold = threshold;
    auto rows = gradient_jet_rows(res);

    if (rows.empty()) {
        // Purely linear jet: every direction is dead, capped at d-1 with the
        // kernel orthogonal to omega0.
        rep.j = d - 1;
        Eigen::VectorXd w(d);
        for (int i = 0; i < d; ++i) w(i) = res.omega0[i];
        Eigen::MatrixXd M = w.transpose();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
        for (int c = 1; c < d; ++c) {
            std::vector<double> dir(d);
            for (int i = 0; i < d; ++i) dir[i] = svd.matrixV()(i, c);
            rep.directions.push_back(dir);
        }
        return rep;
    }

    Eigen::MatrixXd M(static_cast<int>(rows.size()), d);
    int r = 0;
    for (const auto& [m, row] : rows) {
        for (int i = 0; i < d; ++i) M(r, i) = row[i];
        ++r;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cut = threshold * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    rep.j = d - rank;
    for (int c = rank; c < d; ++c) {
        std::vector<double> dir(d);
        for (int i = 0; i < d; ++i) dir[i] = svd.matrixV()(i, c);
        rep.directions.push_back(dir);
    }
    return rep;
}

namespace {

// max_{0<=j<=p} |d^j/dt^j f(t u)|_{t=0}| for f given as an r-jet.
std::pair<double, int> transversality_value(
    const std::map<std::vector<int>, double>& fjet, std::span<const double> u,
    int p) {
    double best = 0.0;
    int best_j = 0;
    for (int j = 0; j <= p; ++j) {
        double s = 0.0;
        for (const auto& [m, g] : fjet) {
            int deg = 0;
            for (int v : m) deg += v;
            if (deg != j) continue;
            double term = g;
            for (std::size_t i = 0; i < u.size(); ++i)
                for (int e = 0; e < m[i]; ++e) term *= u[i];
            s += term;
        }
        double fact = 1.0;
        for (int t = 2; t <= j; ++t) fact *= t;
        double v = std::abs(fact * s);
        if (v > best) {
            best = v;
            best_j = j;
        }
    }
    return {best, best_j};
}

std::vector<std::vector<double>> positive_orthant_grid(int d, int nodes) {
    std::vector<std::vector<double>> grid;
    if (d == 1) {
        grid.push_back({1.0});
        return grid;
    }
    if (d == 2) {
        for (int i = 0; i < nodes; ++i) {
            double t = (i + 0.5) / nodes * 1.5707963267948966;
            grid.push_back({std::cos(t), std::sin(t)});
        }
        return grid;
    }
    // Halton-style low-discrepancy fill mapped through |.|-normalization.
    auto halton = [](int idx, int base) {
        double f = 1.0, r = 0.0;
        while (idx > 0) {
            f /= base;
            r += f * (idx % base);
            idx /= base;
        }
        return r;
    };
    const int primes[] = {2, 3, 5, 7, 11};
    for (int i = 1; i <= nodes; ++i) {
        std::vector<double> u(d);
        double norm = 0.0;
        for (int c = 0; c < d; ++c) {
            u[c] = halton(i, primes[c % 5]) + 1e-6;
            norm += u[c] * u[c];
        }
        norm = std::sqrt(norm);
        for (double& x : u) x /= norm;
        grid.push_back(u);
    }
    return grid;
}

}  // namespace

TransversalityReport transversality_params(const BNFResult& res, int p_max,
                                           int k_range) {
    const int d = res.N.space().dof;
    if (degeneracy_rank(res).j != 0)
        throw series_error("transversality_params: jet is degenerate");

    // Gradient jet with the constant row included: f_k(0) = <k/|k|, omega0>.
    std::map<std::vector<int>, std::vector<double>> rows;
    rows[std::vector<int>(d, 0)] =
        std::vector<double>(res.omega0.begin(), res.omega0.end());
    for (const auto& [m, coeff] : res.action_jet()) {
        int deg = 0;
        for (int v : m) deg += v;
        if (deg < 1) continue;
        for (int i = 0; i < d; ++i) {
            if (m[i] == 0) continue;
            std::vector<int> e = m;
            --e[i];
            int edeg = deg - 1;
            if (edeg == 0 && e == std::vector<int>(d, 0)) continue;  // omega0
            auto [it, ins] = rows.try_emplace(e, std::vector<double>(d, 0.0));
            it->second[i] += coeff * m[i];
        }
    }

    auto grid = positive_orthant_grid(d, 1000);
    std::vector<std::vector<int>> ks;
    {
        std::vector<int> k(d, -k_range);
        for (;;) {
            bool zero = true;
            int first = -1;
            for (int i = 0; i < d; ++i)
                if (k[i] != 0) {
                    zero = false;
                    if (first < 0) first = i;
                }
            if (!zero && k[first] > 0) ks.push_back(k);
            int i = 0;
            while (i < d && k[i] == k_range) k[i++] = -k_range;
            if (i == d) break;
            ++k[i];
        }
    }

    const double floor_tol = 1e-8;
    for (int p = 0; p <= p_max; ++p) {
        TransversalityReport rep;
        rep.p = p;
        rep.sigma = std::numeric_limits<double>::infinity();
        bool all_pass = true;
        for (const auto& k : ks) {
            double kn = 0.0;
            for (int v : k) kn += double(v) * v;
            kn = std::sqrt(kn);
            std::map<std::vector<int>, double> fjet;
            for (const auto& [m, row] : rows) {
                double s = 0.0;
                for (int i = 0; i < d; ++i) s += k[i] / kn * row[i];
                fjet[m] = s;
            }
            TransversalityRow best;
            best.k = k;
            for (const auto& u : grid) {
                auto [v, j] = transversality_value(fjet, u, p);
                if (v > best.value) {
                    best.value = v;
                    best.order = j;
                    best.u = u;
                }
            }
            // local refinement around the best grid node
            if (!best.u.empty()) {
                double step = 0.05;
                while (step > 1e-6) {
                    bool improved = false;
                    for (int i = 0; i < d; ++i) {
                        for (double sgn : {1.0, -1.0}) {
                            std::vector<double> u = best.u;
                            u[i] = std::max(0.0, u[i] + sgn * step);
                            double norm = 0.0;
                            for (double x : u) norm += x * x;
                            if (norm <= 0.0) continue;
                            norm = std::sqrt(norm);
                            for (double& x : u) x /= norm;
                            auto [v, j] = transversality_value(fjet, u, p);
                            if (v > best.value) {
                                best.value = v;
                                best.order = j;
                                best.u = u;
                                improved = true;
                            }
                        }
                    }
                    if (!improved) step *= 0.5;
                }
            }
            rep.sigma = std::min(rep.sigma, best.value);
            rep.table.push_back(std::move(best));
            if (rep.table.back().value < floor_tol) {
                all_pass = false;
                break;
            }
        }
        if (all_pass) return rep;
    }
    throw series_error(
        "transversality_params: no (p, sigma) found up to p_max");
}

}  // namespace kamtori
