#include "kamtori/series.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kamtori {

SeriesSpace::SeriesSpace(int d, int n, int np, int pd)
    : dof(d), max_degree(n), n_params(np), param_degree(pd < 0 ? n : pd) {
    if (d < 1) throw series_error("SeriesSpace: d must be >= 1");
    if (n < 1 || n > 15) throw series_error("SeriesSpace: N must be in [1,15]");
    if (np < 0) throw series_error("SeriesSpace: n_params must be >= 0");
    if (3 * d + np > 16)
        throw series_error("SeriesSpace: at most 16 variables supported");
}

int SeriesSpace::var_index(VarRole role, int i) const {
    switch (role) {
        case VarRole::Z: return i;
        case VarRole::W: return dof + i;
        case VarRole::C: return 2 * dof + i;
        case VarRole::P: return 3 * dof + i;
    }
    return -1;
}

VarRole SeriesSpace::role_of(int var) const {
    if (var < dof) return VarRole::Z;
    if (var < 2 * dof) return VarRole::W;
    if (var < 3 * dof) return VarRole::C;
    return VarRole::P;
}

MonoKey pack_exponents(std::span<const int> exps) {
    MonoKey key = 0;
    for (std::size_t v = 0; v < exps.size(); ++v) {
        if (exps[v] < 0 || exps[v] > 15)
            throw series_error("exponent out of nibble range");
        key |= static_cast<MonoKey>(exps[v]) << (4 * v);
    }
    return key;
}

std::vector<int> unpack_exponents(MonoKey key, int n_vars) {
    std::vector<int> exps(n_vars);
    for (int v = 0; v < n_vars; ++v) exps[v] = static_cast<int>((key >> (4 * v)) & 0xF);
    return exps;
}

int exponent_of(MonoKey key, int var) {
    return static_cast<int>((key >> (4 * var)) & 0xF);
}

int total_degree(MonoKey key) {
    int s = 0;
    while (key) {
        s += static_cast<int>(key & 0xF);
        key >>= 4;
    }
    return s;
}

int block_degree(MonoKey key, int first_var, int n) {
    int s = 0;
    for (int v = first_var; v < first_var + n; ++v) s += exponent_of(key, v);
    return s;
}

MonoKey swap_zw(MonoKey key, int dof) {
    const MonoKey z_mask = (MonoKey{1} << (4 * dof)) - 1;
    MonoKey z_part = key & z_mask;
    MonoKey w_part = (key >> (4 * dof)) & z_mask;
    MonoKey rest = key & ~((MonoKey{1} << (8 * dof)) - 1);
    return rest | (z_part << (4 * dof)) | w_part;
}

namespace {

bool key_in_bounds(MonoKey key, const SeriesSpace& sp) {
    if (total_degree(key) > sp.max_degree) return false;
    if (sp.n_params > 0 &&
        block_degree(key, 3 * sp.dof, sp.n_params) > sp.param_degree)
        return false;
    return true;
}

void require_same_space(const SeriesSpace& a, const SeriesSpace& b) {
    if (a != b) throw space_mismatch_error("series spaces do not match");
}

}  // namespace

TruncatedSeries TruncatedSeries::constant(const SeriesSpace& space, Complex value) {
    TruncatedSeries s(space);
    s.add_to(0, value);
    return s;
}

TruncatedSeries TruncatedSeries::variable(const SeriesSpace& space, VarRole role, int i) {
    TruncatedSeries s(space);
    s.add_to(MonoKey{1} << (4 * space.var_index(role, i)), Complex{1.0});
    return s;
}

TruncatedSeries TruncatedSeries::monomial(const SeriesSpace& space,
                                          std::span<const int> exps, Complex value) {
    TruncatedSeries s(space);
    s.add_to(pack_exponents(exps), value);
    return s;
}

Complex TruncatedSeries::coeff(MonoKey key) const {
    auto it = coeffs_.find(key);
    return it == coeffs_.end() ? Complex{} : it->second;
}

Complex TruncatedSeries::coeff(std::span<const int> exps) const {
    return coeff(pack_exponents(exps));
}

void TruncatedSeries::add_to(MonoKey key, Complex value) {
    if (value == Complex{}) return;
    if (!key_in_bounds(key, space_)) return;
    auto [it, inserted] = coeffs_.try_emplace(key, value);
    if (!inserted) {
        it->second += value;
        if (it->second == Complex{}) coeffs_.erase(it);
    }
}

void TruncatedSeries::set(MonoKey key, Complex value) {
    if (!key_in_bounds(key, space_)) return;
    if (value == Complex{}) {
        coeffs_.erase(key);
    } else {
        coeffs_[key] = value;
    }
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& o) {
    require_same_space(space_, o.space_);
    for (const auto& [k, v] : o.coeffs_) add_to(k, v);
    return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& o) {
    require_same_space(space_, o.space_);
    for (const auto& [k, v] : o.coeffs_) add_to(k, -v);
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(Complex s) {
    if (s == Complex{}) {
        coeffs_.clear();
        return *this;
    }
    for (auto& [k, v] : coeffs_) v *= s;
    return *this;
}

TruncatedSeries TruncatedSeries::operator-() const {
    TruncatedSeries r(*this);
    for (auto& [k, v] : r.coeffs_) v = -v;
    return r;
}

void TruncatedSeries::trim(double eps) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (std::abs(it->second) <= eps)
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

int TruncatedSeries::min_total_degree() const {
    int m = -1;
    for (const auto& [k, v] : coeffs_) {
        int d = total_degree(k);
        if (m < 0 || d < m) m = d;
    }
    return m;
}

double TruncatedSeries::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [k, v] : coeffs_) m = std::max(m, std::abs(v));
    return m;
}

TruncatedSeries TruncatedSeries::filtered(
    const std::function<bool(MonoKey)>& keep) const {
    TruncatedSeries r(space_);
    for (const auto& [k, v] : coeffs_)
        if (keep(k)) r.coeffs_.emplace(k, v);
    return r;
}

TruncatedSeries TruncatedSeries::mapped(
    const std::function<Complex(MonoKey, Complex)>& fn) const {
    TruncatedSeries r(space_);
    for (const auto& [k, v] : coeffs_) {
        Complex nv = fn(k, v);
        if (nv != Complex{}) r.coeffs_.emplace(k, nv);
    }
    return r;
}

Complex TruncatedSeries::evaluate(std::span<const Complex> point) const {
    const int nv = space_.n_vars();
    if (static_cast<int>(point.size()) != nv)
        throw series_error("evaluate: wrong point dimension");
    Complex sum{};
    for (const auto& [k, v] : coeffs_) {
        Complex term = v;
        MonoKey key = k;
        for (int var = 0; var < nv && key; ++var, key >>= 4) {
            int e = static_cast<int>(key & 0xF);
            for (int i = 0; i < e; ++i) term *= point[var];
        }
        sum += term;
    }
    return sum;
}

namespace {

// Flat open-addressing accumulator; the all-ones key cannot occur as a
// stored monomial (its total degree exceeds any truncation bound).
struct KeyAccumulator {
    static constexpr MonoKey kEmpty = ~MonoKey{0};
    std::vector<MonoKey> keys;
    std::vector<Complex> vals;
    std::size_t mask = 0, used = 0;

    explicit KeyAccumulator(std::size_t expected) {
        std::size_t cap = 64;
        while (cap < 2 * expected) cap <<= 1;
        keys.assign(cap, kEmpty);
        vals.assign(cap, Complex{});
        mask = cap - 1;
    }
    static std::size_t hash(MonoKey k) {
        k ^= k >> 33;
        k *= 0xff51afd7ed558ccdULL;
        k ^= k >> 33;
        return static_cast<std::size_t>(k);
    }
    void add(MonoKey key, Complex v) {
        std::size_t i = hash(key) & mask;
        for (;;) {
            if (keys[i] == key) {
                vals[i] += v;
                return;
            }
            if (keys[i] == kEmpty) {
                keys[i] = key;
                vals[i] = v;
                if (++used * 4 > keys.size() * 3) grow();
                return;
            }
            i = (i + 1) & mask;
        }
    }
    void grow() {
        KeyAccumulator bigger(keys.size());
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys[i] != kEmpty) bigger.add(keys[i], vals[i]);
        *this = std::move(bigger);
    }
};

struct FlatMono {
    MonoKey key;
    Complex val;
    int deg;
    int pdeg;
};

std::vector<FlatMono> flatten_by_degree(const TruncatedSeries& s, bool pcheck) {
    const SeriesSpace& sp = s.space();
    std::vector<FlatMono> out;
    out.reserve(s.size());
    for (const auto& [k, v] : s.coeffs())
        out.push_back({k, v, total_degree(k),
                       pcheck ? block_degree(k, 3 * sp.dof, sp.n_params) : 0});
    std::sort(out.begin(), out.end(),
              [](const FlatMono& x, const FlatMono& y) { return x.deg < y.deg; });
    return out;
}

}  // namespace

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_space(a.space(), b.space());
    const SeriesSpace& sp = a.space();
    const int N = sp.max_degree;
    TruncatedSeries r(sp);
    if (a.empty() || b.empty()) return r;
    const bool pcheck = sp.n_params > 0 && sp.param_degree < N;
    const int pd = sp.param_degree;
    std::vector<FlatMono> A = flatten_by_degree(a, pcheck);
    std::vector<FlatMono> B = flatten_by_degree(b, pcheck);

    std::size_t expected = std::min<std::size_t>(A.size() * B.size(), 1u << 18);
    KeyAccumulator acc(expected);
    for (const FlatMono& x : A) {
        if (x.deg + B.front().deg > N) break;
        for (const FlatMono& y : B) {
            if (x.deg + y.deg > N) break;
            if (pcheck && x.pdeg + y.pdeg > pd) continue;
            // no nibble carries: deg sums <= N <= 15 bound every exponent sum
            acc.add(x.key + y.key, x.val * y.val);
        }
    }
    for (std::size_t i = 0; i < acc.keys.size(); ++i)
        if (acc.keys[i] != KeyAccumulator::kEmpty)
            r.add_to(acc.keys[i], acc.vals[i]);
    return r;
}

TruncatedSeries partial_derivative(const TruncatedSeries& f, int var) {
    TruncatedSeries r(f.space());
    const MonoKey one = MonoKey{1} << (4 * var);
    for (const auto& [k, v] : f.coeffs()) {
        int e = exponent_of(k, var);
        if (e == 0) continue;
        r.add_to(k - one, v * static_cast<double>(e));
    }
    return r;
}

TruncatedSeries pow(const TruncatedSeries& f, int n) {
    TruncatedSeries r = TruncatedSeries::constant(f.space(), Complex{1.0});
    for (int i = 0; i < n; ++i) r = multiply(r, f);
    return r;
}

namespace {

// Recursive Horner over variables: split monomials by the exponent of
// variable `var`, recurse on the tail, then fold with the substitution.
TruncatedSeries subst_rec(
    const SeriesSpace& sp, const std::vector<std::pair<MonoKey, Complex>>& monos,
    int var, std::span<const std::optional<TruncatedSeries>> subs) {
    const int nv = sp.n_vars();
    if (monos.empty()) return TruncatedSeries(sp);
    if (var == nv) {
        TruncatedSeries r(sp);
        for (const auto& [k, v] : monos) r.add_to(0, v);
        return r;
    }

    // bucket by exponent of `var`, clearing that nibble
    std::map<int, std::vector<std::pair<MonoKey, Complex>>> buckets;
    const MonoKey nib_mask = MonoKey{0xF} << (4 * var);
    for (const auto& [k, v] : monos) {
        int e = exponent_of(k, var);
        buckets[e].emplace_back(k & ~nib_mask, v);
    }

    const bool identity = !subs[var].has_value();
    auto coefficient = [&](int e) {
        auto it = buckets.find(e);
        if (it == buckets.end()) return TruncatedSeries(sp);
        return subst_rec(sp, it->second, var + 1, subs);
    };

    if (identity) {
        TruncatedSeries r(sp);
        for (const auto& [e, bucket] : buckets) {
            TruncatedSeries part = subst_rec(sp, bucket, var + 1, subs);
            const MonoKey shift = static_cast<MonoKey>(e) << (4 * var);
            for (const auto& [k, v] : part.coeffs()) r.add_to(k + shift, v);
        }
        return r;
    }

    const int top = buckets.rbegin()->first;
    TruncatedSeries r = coefficient(top);
    for (int e = top - 1; e >= 0; --e) {
        r = multiply(r, *subs[var]);
        r += coefficient(e);
    }
    return r;
}

}  // namespace

TruncatedSeries substitute(const TruncatedSeries& f,
                           std::span<const std::optional<TruncatedSeries>> substitutes,
                           bool allow_constant_terms) {
    const SeriesSpace& sp = f.space();
    if (static_cast<int>(substitutes.size()) != sp.n_vars())
        throw series_error("substitute: need one entry per variable");
    for (const auto& s : substitutes) {
        if (!s) continue;
        require_same_space(sp, s->space());
        if (!allow_constant_terms && s->coeff(MonoKey{0}) != Complex{})
            throw series_error(
                "substitute: nonzero constant term in substitution (pass "
                "allow_constant_terms to evaluate partially)");
    }
    std::vector<std::pair<MonoKey, Complex>> monos(f.coeffs().begin(), f.coeffs().end());
    return subst_rec(sp, monos, 0, substitutes);
}

TruncatedSeries sigma_conjugate(const TruncatedSeries& f) {
    TruncatedSeries r(f.space());
    const int d = f.space().dof;
    for (const auto& [k, v] : f.coeffs()) r.add_to(swap_zw(k, d), std::conj(v));
    return r;
}

double sigma_symmetry_defect(const TruncatedSeries& f) {
    return max_coeff_diff(f, sigma_conjugate(f));
}

bool is_sigma_symmetric(const TruncatedSeries& f, double tol) {
    return sigma_symmetry_defect(f) <= tol;
}

double majorant_norm(const TruncatedSeries& f, double delta) {
    if (delta <= 0.0) throw series_error("majorant_norm: delta must be > 0");
    double sum = 0.0;
    for (const auto& [k, v] : f.coeffs())
        sum += std::abs(v) * std::pow(delta, total_degree(k));
    return sum;
}

double max_coeff_diff(const TruncatedSeries& a, const TruncatedSeries& b) {
    require_same_space(a.space(), b.space());
    double m = 0.0;
    for (const auto& [k, v] : a.coeffs()) m = std::max(m, std::abs(v - b.coeff(k)));
    for (const auto& [k, v] : b.coeffs()) m = std::max(m, std::abs(v - a.coeff(k)));
    return m;
}

}  // namespace kamtori
