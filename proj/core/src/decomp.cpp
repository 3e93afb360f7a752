#include "kamtori/decomp.hpp"

#include <algorithm>
#include <cstdint>

namespace kamtori {

namespace {

MonoKey pack_index(std::span<const int> n) {
    MonoKey key = 0;
    for (std::size_t i = 0; i < n.size(); ++i)
        key |= static_cast<MonoKey>(n[i] & 0xF) << (4 * i);
    return key;
}

std::vector<int> unpack_index(MonoKey key, int dof) {
    std::vector<int> n(dof);
    for (int i = 0; i < dof; ++i) n[i] = static_cast<int>((key >> (4 * i)) & 0xF);
    return n;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// Product of (z_i w_i)^{n_i} or (z_i w_i - c_i)^{n_i}.
TruncatedSeries basis_power(const SeriesSpace& space, std::span<const int> n,
                            ActionDecomposition::Basis basis) {
    TruncatedSeries p = TruncatedSeries::constant(space, 1.0);
    for (int i = 0; i < space.dof; ++i) {
        if (n[i] == 0) continue;
        TruncatedSeries base =
            basis == ActionDecomposition::Basis::ZW
                ? TruncatedSeries::variable(space, VarRole::Z, i) *
                      TruncatedSeries::variable(space, VarRole::W, i)
                : zw_minus_c(space, i);
        p = p * pow(base, n[i]);
    }
    return p;
}

}  // namespace

bool is_non_resonant_key(MonoKey key, int dof) {
    for (int i = 0; i < dof; ++i)
        if (exponent_of(key, i) > 0 && exponent_of(key, dof + i) > 0) return false;
    return true;
}

bool is_non_resonant(const TruncatedSeries& f) {
    for (const auto& [key, c] : f.coeffs())
        if (!is_non_resonant_key(key, f.space().dof)) return false;
    return true;
}

bool is_diagonal_key(MonoKey key, int dof) {
    for (int i = 0; i < dof; ++i)
        if (exponent_of(key, i) != exponent_of(key, dof + i)) return false;
    return true;
}

NRReduction nr_reduce(std::span<const int> alpha, std::span<const int> beta) {
    NRReduction r;
    r.n.resize(alpha.size());
    r.alpha_prime.resize(alpha.size());
    r.beta_prime.resize(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        r.n[i] = std::min(alpha[i], beta[i]);
        r.alpha_prime[i] = alpha[i] - r.n[i];
        r.beta_prime[i] = beta[i] - r.n[i];
    }
    return r;
}

TruncatedSeries zw_minus_c(const SeriesSpace& space, int i) {
    TruncatedSeries d = TruncatedSeries::variable(space, VarRole::Z, i) *
                        TruncatedSeries::variable(space, VarRole::W, i);
    d -= TruncatedSeries::variable(space, VarRole::C, i);
    return d;
}

TruncatedSeries ActionDecomposition::recombine() const {
    TruncatedSeries out(space);
    for (const auto& [nk, fn] : terms) {
        std::vector<int> n = unpack_index(nk, space.dof);
        out += basis_power(space, n, basis) * fn;
    }
    return out;
}

const TruncatedSeries* ActionDecomposition::term(std::span<const int> n) const {
    auto it = terms.find(pack_index(n));
    return it == terms.end() ? nullptr : &it->second;
}

ActionDecomposition decompose_zw(const TruncatedSeries& f) {
    const SeriesSpace& space = f.space();
    const int d = space.dof;
    ActionDecomposition dec{space, ActionDecomposition::Basis::ZW, {}};
    for (const auto& [key, c] : f.coeffs()) {
        MonoKey reduced = key;
        MonoKey nk = 0;
        for (int i = 0; i < d; ++i) {
            int n = std::min(exponent_of(key, i), exponent_of(key, d + i));
            nk |= static_cast<MonoKey>(n) << (4 * i);
            reduced -= static_cast<MonoKey>(n) << (4 * i);
            reduced -= static_cast<MonoKey>(n) << (4 * (d + i));
        }
        auto [it, inserted] = dec.terms.try_emplace(nk, space);
        it->second.add_to(reduced, c);
    }
    return dec;
}

ActionDecomposition decompose_action(const TruncatedSeries& f) {
    ActionDecomposition zw = decompose_zw(f);
    const SeriesSpace& space = f.space();
    const int d = space.dof;
    ActionDecomposition dec{space, ActionDecomposition::Basis::ZWMinusC, {}};
    // (zw)^k = ((zw - c) + c)^k expanded multi-binomially.
    for (const auto& [kk, fk] : zw.terms) {
        std::vector<int> k = unpack_index(kk, d);
        std::vector<int> n(d, 0);
        for (;;) {
            double w = 1.0;
            for (int i = 0; i < d; ++i) w *= binom(k[i], n[i]);
            TruncatedSeries cpow = TruncatedSeries::constant(space, w);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < k[i] - n[i]; ++j)
                    cpow = cpow * TruncatedSeries::variable(space, VarRole::C, i);
            TruncatedSeries contrib = cpow * fk;
            if (!contrib.empty()) {
                auto [it, ins] = dec.terms.try_emplace(pack_index(n), space);
                it->second += contrib;
            }
            int i = 0;
            while (i < d && n[i] == k[i]) n[i++] = 0;
            if (i == d) break;
            ++n[i];
        }
    }
    for (auto it = dec.terms.begin(); it != dec.terms.end();)
        it = it->second.empty() ? dec.terms.erase(it) : std::next(it);
    return dec;
}

CanonicalParts canonical_parts(const TruncatedSeries& f) {
    const SeriesSpace& space = f.space();
    const int d = space.dof;
    CanonicalParts cp{space, TruncatedSeries(space), {}, {}, {}, {}};
    cp.f1.assign(d, TruncatedSeries(space));
    cp.f2.assign(d, std::vector<TruncatedSeries>(d, TruncatedSeries(space)));
    cp.f2_full = cp.f2;
    cp.f3_full.assign(
        d, std::vector<std::vector<TruncatedSeries>>(
               d, std::vector<TruncatedSeries>(d, TruncatedSeries(space))));

    ActionDecomposition dec = decompose_action(f);
    for (const auto& [nk, fn] : dec.terms) {
        std::vector<int> n = unpack_index(nk, d);
        int tot = 0;
        for (int v : n) tot += v;
        if (tot == 0) {
            cp.f0 += fn;
            continue;
        }
        if (tot == 1) {
            for (int i = 0; i < d; ++i)
                if (n[i] == 1) cp.f1[i] += fn;
            continue;
        }
        if (tot == 2) {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double w = n[i] * (n[j] - (i == j ? 1 : 0)) / 2.0;
                    if (w != 0.0) cp.f2[i][j] += fn * Complex(w, 0.0);
                }
        }
        // f^[2]: split Delta^n f_n as <Delta, A Delta> with symmetric weights
        // w_ij = n_i (n_j - d_ij) / (|n| (|n|-1)).
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double w = n[i] * (n[j] - (i == j ? 1 : 0)) /
                           (double(tot) * (tot - 1));
                if (w == 0.0) continue;
                std::vector<int> m = n;
                --m[i];
                --m[j];
                TruncatedSeries rest =
                    basis_power(space, m, ActionDecomposition::Basis::ZWMinusC);
                cp.f2_full[i][j] += rest * fn * Complex(w, 0.0);
            }
        if (tot >= 3) {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        double w = n[i];
                        w *= n[j] - (j == i ? 1 : 0);
                        w *= n[k] - (k == i ? 1 : 0) - (k == j ? 1 : 0);
                        w /= double(tot) * (tot - 1) * (tot - 2);
                        if (w == 0.0) continue;
                        std::vector<int> m = n;
                        --m[i];
                        --m[j];
                        --m[k];
                        TruncatedSeries rest = basis_power(
                            space, m, ActionDecomposition::Basis::ZWMinusC);
                        cp.f3_full[i][j][k] += rest * fn * Complex(w, 0.0);
                    }
        }
    }
    return cp;
}

TruncatedSeries CanonicalParts::recombine_candec1() const {
    const int d = space.dof;
    TruncatedSeries out = f0;
    for (int i = 0; i < d; ++i) out += zw_minus_c(space, i) * f1[i];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out += zw_minus_c(space, i) * zw_minus_c(space, j) * f2_full[i][j];
    return out;
}

TruncatedSeries CanonicalParts::recombine_candec2() const {
    const int d = space.dof;
    TruncatedSeries out = f0;
    for (int i = 0; i < d; ++i) out += zw_minus_c(space, i) * f1[i];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out += zw_minus_c(space, i) * zw_minus_c(space, j) * f2[i][j];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                out += zw_minus_c(space, i) * zw_minus_c(space, j) *
                       zw_minus_c(space, k) * f3_full[i][j][k];
    return out;
}

}  // namespace kamtori
