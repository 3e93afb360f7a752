// Text format for series and Hamiltonian files.
//
//   # comment
//   space d=<d> N=<N> [np=<np> pd=<pd>]
//   omega <w1>,...,<wd>            (Hamiltonian files only)
//   a1,...,ad | b1,...,bd | g1,...,gd | <re> <im>
//
// One monomial per line, exponent vectors comma separated. With np > 0 a
// fourth exponent block precedes the coefficient.
#ifndef KAMTORI_IO_HPP
#define KAMTORI_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "kamtori/series.hpp"

namespace kamtori {

struct parse_error : series_error {
    using series_error::series_error;
};

TruncatedSeries read_series(std::istream& in);
TruncatedSeries read_series_string(const std::string& text);

/// Monomials are emitted in sorted key order, so output is deterministic.
void write_series(std::ostream& out, const TruncatedSeries& f);
std::string write_series_string(const TruncatedSeries& f);

struct HamiltonianFile {
    TruncatedSeries hamiltonian;
    std::vector<double> omega;
};

HamiltonianFile read_hamiltonian(std::istream& in);
HamiltonianFile read_hamiltonian_file(const std::string& path);
void write_hamiltonian(std::ostream& out, const HamiltonianFile& h);

}  // namespace kamtori

#endif
