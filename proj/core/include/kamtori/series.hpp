// Sparse total-degree-truncated power series in (z, w, c) over complex
// coefficients, with sigma-symmetry as a first-class predicate.
#ifndef KAMTORI_SERIES_HPP
#define KAMTORI_SERIES_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace kamtori {

using Complex = std::complex<double>;

struct series_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct space_mismatch_error : series_error {
    using series_error::series_error;
};

/// Which block a variable index belongs to.
enum class VarRole { Z, W, C, P };

/// Ambient space of a series: d degrees of freedom, variables
/// z_1..z_d, w_1..w_d, c_1..c_d and an optional block of n_params
/// frequency-offset parameters. Total degree is truncated at max_degree.
struct SeriesSpace {
    int dof = 1;
    int max_degree = 10;
    int n_params = 0;
    int param_degree = 10;  // separate cap on the parameter-block degree

    SeriesSpace() = default;
    SeriesSpace(int d, int n, int np = 0, int pd = -1);

    int n_vars() const { return 3 * dof + n_params; }
    int var_index(VarRole role, int i) const;
    VarRole role_of(int var) const;

    bool operator==(const SeriesSpace& o) const {
        return dof == o.dof && max_degree == o.max_degree &&
               n_params == o.n_params && param_degree == o.param_degree;
    }
    bool operator!=(const SeriesSpace& o) const { return !(*this == o); }
};

// Exponent packing: one nibble per variable, up to 16 variables and
// exponents <= 15 (enforced by SeriesSpace: max_degree <= 15).
using MonoKey = std::uint64_t;

MonoKey pack_exponents(std::span<const int> exps);
std::vector<int> unpack_exponents(MonoKey key, int n_vars);
int exponent_of(MonoKey key, int var);
int total_degree(MonoKey key);
int block_degree(MonoKey key, int first_var, int n);
MonoKey swap_zw(MonoKey key, int dof);

class TruncatedSeries {
  public:
    using CoeffMap = std::unordered_map<MonoKey, Complex>;

    TruncatedSeries() = default;
    explicit TruncatedSeries(const SeriesSpace& space) : space_(space) {}

    static TruncatedSeries constant(const SeriesSpace& space, Complex value);
    static TruncatedSeries variable(const SeriesSpace& space, VarRole role, int i);
    static TruncatedSeries monomial(const SeriesSpace& space, std::span<const int> exps,
                                    Complex value);

    const SeriesSpace& space() const { return space_; }
    const CoeffMap& coeffs() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }
    std::size_t size() const { return coeffs_.size(); }

    Complex coeff(MonoKey key) const;
    Complex coeff(std::span<const int> exps) const;
    /// Accumulate into a monomial; drops the entry when it lands on zero,
    /// silently discards keys above the truncation bound.
    void add_to(MonoKey key, Complex value);
    void set(MonoKey key, Complex value);

    TruncatedSeries& operator+=(const TruncatedSeries& o);
    TruncatedSeries& operator-=(const TruncatedSeries& o);
    TruncatedSeries& operator*=(Complex s);
    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) {
        return a += b;
    }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) {
        return a -= b;
    }
    friend TruncatedSeries operator*(TruncatedSeries a, Complex s) { return a *= s; }
    friend TruncatedSeries operator*(Complex s, TruncatedSeries a) { return a *= s; }
    TruncatedSeries operator-() const;

    /// Drop coefficients with |a| <= eps (eps = 0 prunes exact zeros only).
    void trim(double eps = 0.0);

    int min_total_degree() const;  // degree of the lowest nonzero monomial; -1 if zero
    double max_abs_coeff() const;

    /// Keep only monomials selected by the predicate.
    TruncatedSeries filtered(const std::function<bool(MonoKey)>& keep) const;
    /// Map coefficients monomial-wise: value' = fn(key, value).
    TruncatedSeries mapped(const std::function<Complex(MonoKey, Complex)>& fn) const;

    Complex evaluate(std::span<const Complex> point) const;

  private:
    SeriesSpace space_;
    CoeffMap coeffs_;
};

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b);
inline TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    return multiply(a, b);
}

TruncatedSeries partial_derivative(const TruncatedSeries& f, int var);
inline TruncatedSeries partial_derivative(const TruncatedSeries& f, VarRole role, int i) {
    return partial_derivative(f, f.space().var_index(role, i));
}

/// Formal composition: substitutes[v] replaces variable v (empty optional =
/// identity). Substitutions with a nonzero constant term are rejected unless
/// allow_constant_terms is set (partial evaluation).
TruncatedSeries substitute(const TruncatedSeries& f,
                           std::span<const std::optional<TruncatedSeries>> substitutes,
                           bool allow_constant_terms = false);

/// Integer power of a series, truncated.
TruncatedSeries pow(const TruncatedSeries& f, int n);

TruncatedSeries sigma_conjugate(const TruncatedSeries& f);
bool is_sigma_symmetric(const TruncatedSeries& f, double tol);
double sigma_symmetry_defect(const TruncatedSeries& f);

/// Coefficient majorant sum |a| * delta^deg — an upper bound for the
/// sup of |f| on the closed polydisk of radius delta.
double majorant_norm(const TruncatedSeries& f, double delta);

double max_coeff_diff(const TruncatedSeries& a, const TruncatedSeries& b);

}  // namespace kamtori

#endif
