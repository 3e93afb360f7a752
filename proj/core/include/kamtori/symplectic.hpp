// Truncated near-identity exact symplectic maps: construction from a
// generating function or as a Lie time-1 flow, composition, inversion,
// exactness certification, and the quadratic-difference comparison of the
// two constructions.
#ifndef KAMTORI_SYMPLECTIC_HPP
#define KAMTORI_SYMPLECTIC_HPP

#include <vector>

#include "kamtori/series.hpp"

namespace kamtori {

enum class MapProvenance { Identity, Generating, Lie, Composite, Inverse };

/// (z, w) |-> (z + R(z,w,c), w + T(z,w,c)); c rides along as a parameter.
struct SymplecticMap {
    SeriesSpace space;
    std::vector<TruncatedSeries> R, T;
    MapProvenance provenance = MapProvenance::Identity;

    static SymplecticMap identity(const SeriesSpace& space);

    /// Full component series z_j + R_j and w_j + T_j.
    TruncatedSeries z_component(int j) const;
    TruncatedSeries w_component(int j) const;

    /// Minimum total degree over all R, T monomials; -1 for the identity.
    int displacement_order() const;
    bool is_identity(double tol) const;
};

/// sigma o Z o sigma = Z, i.e. R_j == sigma_conjugate(T_j).
double map_sigma_defect(const SymplecticMap& Z);
bool is_map_sigma_symmetric(const SymplecticMap& Z, double tol);

/// z' = z + d_{w'} f(z,w',c), w = w' + d_z f(z,w',c), solved for (z',w')
/// as series in (z,w,c) by degree-graded fixed point. Requires f with
/// minimum total degree >= 2.
SymplecticMap from_generating(const TruncatedSeries& f);

/// Unique generating function (zero constant term) with
/// from_generating(to_generating(Z)) == Z. Throws series_error carrying the
/// closedness residual when Z is not exact symplectic within tol.
TruncatedSeries to_generating(const SymplecticMap& Z, double tol = 1e-12);

/// Time-1 map of the Hamiltonian field dz/dt = d_w f, dw/dt = -d_z f,
/// computed as a Lie series. Requires f with minimum total degree >= 2.
SymplecticMap lie_time_one(const TruncatedSeries& f);

/// Poisson bracket {g, f} = sum_j d_{z_j} g d_{w_j} f - d_{w_j} g d_{z_j} f.
TruncatedSeries poisson_bracket(const TruncatedSeries& g, const TruncatedSeries& f);

/// Pullback of a scalar series through the map: h o Z.
TruncatedSeries pullback(const TruncatedSeries& h, const SymplecticMap& Z);

SymplecticMap compose(const SymplecticMap& A, const SymplecticMap& B);  // A o B
SymplecticMap invert(const SymplecticMap& Z);

/// Max closedness defect of the one-form Z*(z dw) - z dw over all variable
/// pairs; zero for exact symplectic maps up to rounding.
double exactness_residual(const SymplecticMap& Z);

struct MapComparison {
    std::vector<double> eps;
    std::vector<double> difference;  // majorant of lie^{-1} o gen - id
    double slope = 0.0;              // log-log fit; quadratic difference ~ 2
    bool exact_zero = false;
};

MapComparison compare_gen_vs_lie(const TruncatedSeries& f,
                                 std::span<const double> eps_grid,
                                 double radius = 0.1);

}  // namespace kamtori

#endif
