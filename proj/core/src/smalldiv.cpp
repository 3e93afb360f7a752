#include "kamtori/smalldiv.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

namespace kamtori {

void DiophantineParams::validate(int dof) const {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw series_error("kappa must lie in (0, 1)");
    if (!(tau > dof - 1))
        throw series_error("tau must exceed dof - 1");
}

DCWitness dc_check(std::span<const double> omega, const DiophantineParams& p,
                   long k_max) {
    const int d = static_cast<int>(omega.size());
    DCWitness w;
    double best = std::numeric_limits<double>::infinity();
    // Only half the box matters: k and -k give the same margin.
    auto consider = [&](std::span<const long> k) {
        double dot = 0.0, norm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            dot += k[i] * omega[i];
            norm2 += double(k[i]) * k[i];
        }
        double margin = std::abs(dot) * std::pow(norm2, 0.5 * p.tau);
        if (margin < best) {
            best = margin;
            w.worst_k.assign(k.begin(), k.end());
        }
    };
    if (d == 1) {
        long k[1];
        for (k[0] = 1; k[0] <= k_max; ++k[0]) consider(k);
    } else if (d == 2) {
        const double w0 = omega[0], w1 = omega[1];
        long kb[2];
        for (long k1 = 0; k1 <= k_max; ++k1) {
            for (long k2 = (k1 == 0 ? 1 : -k_max); k2 <= k_max; ++k2) {
                double dot = std::abs(k1 * w0 + k2 * w1);
                if (dot >= best) continue;  // margin >= dot since |k| >= 1
                double norm2 = double(k1) * k1 + double(k2) * k2;
                double margin = dot * std::pow(norm2, 0.5 * p.tau);
                if (margin < best) {
                    best = margin;
                    kb[0] = k1;
                    kb[1] = k2;
                    w.worst_k.assign(kb, kb + 2);
                }
            }
        }
    } else {
        std::vector<long> k(d, -k_max);
        for (;;) {
            int first = -1;
            for (int i = 0; i < d; ++i)
                if (k[i] != 0) {
                    first = i;
                    break;
                }
            if (first >= 0 && k[first] > 0) consider(k);
            int i = 0;
            while (i < d && k[i] == k_max) k[i++] = -k_max;
            if (i == d) break;
            ++k[i];
        }
    }
    w.worst_margin = best / p.kappa;
    w.ok = best >= p.kappa;
    return w;
}

TruncatedSeries project_diagonal(const TruncatedSeries& f) {
    const int d = f.space().dof;
    return f.filtered([d](MonoKey key) {
        for (int i = 0; i < d; ++i)
            if (exponent_of(key, i) != exponent_of(key, d + i)) return false;
        return true;
    });
}

TruncatedSeries apply_D_component(const TruncatedSeries& f, int i) {
    const int d = f.space().dof;
    return f.mapped([d, i](MonoKey key, Complex c) {
        return c * double(exponent_of(key, i) - exponent_of(key, d + i));
    });
}

std::vector<TruncatedSeries> apply_D(const TruncatedSeries& f) {
    std::vector<TruncatedSeries> out;
    out.reserve(f.space().dof);
    for (int i = 0; i < f.space().dof; ++i)
        out.push_back(apply_D_component(f, i));
    return out;
}

namespace {

std::vector<int> key_k_vector(MonoKey key, int d) {
    std::vector<int> k(d);
    for (int i = 0; i < d; ++i)
        k[i] = exponent_of(key, i) - exponent_of(key, d + i);
    return k;
}

double omega_dot_k(std::span<const double> omega, std::span<const int> k) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) s += omega[i] * k[i];
    return s;
}

void require_formal_params(const TruncatedSeries& f, const OmegaSpec& omega) {
    if (omega.formal && f.space().n_params != f.space().dof)
        throw space_mismatch_error(
            "formal frequency mode needs n_params == dof");
    if (static_cast<int>(omega.omega0.size()) != f.space().dof)
        throw space_mismatch_error("omega dimension does not match space");
}

}  // namespace

TruncatedSeries apply_D_omega(const TruncatedSeries& f,
                              const OmegaSpec& omega) {
    require_formal_params(f, omega);
    const int d = f.space().dof;
    TruncatedSeries out = f.mapped([&](MonoKey key, Complex c) {
        return c * omega_dot_k(omega.omega0, key_k_vector(key, d));
    });
    if (omega.formal) {
        for (int j = 0; j < d; ++j) {
            TruncatedSeries mu =
                TruncatedSeries::variable(f.space(), VarRole::P, j);
            out += mu * apply_D_component(f, j);
        }
    }
    return out;
}

double cutoff_profile(double x) {
    double t = std::abs(x);
    if (t <= 0.25) return 1.0;
    if (t >= 0.5) return 0.0;
    double s = (t - 0.25) / 0.25;  // in (0, 1), transition variable
    double a = std::exp(-1.0 / (1.0 - s));
    double b = std::exp(-1.0 / s);
    return a / (a + b);
}

TruncatedSeries cutoff(const TruncatedSeries& f, const OmegaSpec& omega,
                       const DiophantineParams& p) {
    require_formal_params(f, omega);
    p.validate(f.space().dof);
    const int d = f.space().dof;
    return f.mapped([&](MonoKey key, Complex c) {
        std::vector<int> k = key_k_vector(key, d);
        bool diag = true;
        for (int v : k)
            if (v != 0) diag = false;
        if (diag) return Complex(0.0);
        int order = 0;
        for (int i = 0; i < 2 * d; ++i) order += exponent_of(key, i);
        double arg = omega_dot_k(omega.omega0, k) *
                     std::pow(double(order), p.tau) / p.kappa;
        return c * cutoff_profile(arg);
    });
}

TruncatedSeries solve_L(const TruncatedSeries& f, const OmegaSpec& omega,
                        const DiophantineParams& p) {
    require_formal_params(f, omega);
    p.validate(f.space().dof);
    const int d = f.space().dof;
    const SeriesSpace& space = f.space();

    // Formal mode: cache 1 / <omega0 + mu, k> as a truncated geometric
    // series in mu, keyed by the packed shifted k vector.
    std::unordered_map<std::uint64_t, TruncatedSeries> inv_cache;
    auto inverse_series = [&](std::span<const int> k) -> const TruncatedSeries& {
        std::uint64_t ck = 0;
        for (std::size_t i = 0; i < k.size(); ++i)
            ck |= static_cast<std::uint64_t>(k[i] + 15) << (5 * i);
        auto it = inv_cache.find(ck);
        if (it != inv_cache.end()) return it->second;
        double a = omega_dot_k(omega.omega0, k);
        TruncatedSeries mu_k(space);
        for (int j = 0; j < d; ++j)
            mu_k += TruncatedSeries::variable(space, VarRole::P, j) *
                    Complex(double(k[j]), 0.0);
        TruncatedSeries inv = TruncatedSeries::constant(space, 1.0 / a);
        TruncatedSeries term = inv;
        for (int m = 1; m <= space.param_degree; ++m) {
            term = term * mu_k * Complex(-1.0 / a, 0.0);
            if (term.empty()) break;
            inv += term;
        }
        return inv_cache.emplace(ck, std::move(inv)).first->second;
    };

    TruncatedSeries u(space);
    for (const auto& [key, c] : f.coeffs()) {
        std::vector<int> k = key_k_vector(key, d);
        bool diag = true;
        for (int v : k)
            if (v != 0) diag = false;
        if (diag) continue;
        int order = 0;
        for (int i = 0; i < 2 * d; ++i) order += exponent_of(key, i);
        double dot = omega_dot_k(omega.omega0, k);
        double load =
            1.0 - cutoff_profile(dot * std::pow(double(order), p.tau) / p.kappa);
        if (load == 0.0) continue;
        if (dot == 0.0)
            throw series_error("zero divisor with nonzero retained load");
        Complex scaled = c * load;
        if (omega.formal) {
            TruncatedSeries mono(space);
            mono.add_to(key, scaled);
            u += mono * inverse_series(k);
        } else {
            u.add_to(key, scaled / dot);
        }
    }
    return u;
}

}  // namespace kamtori
