// Built-in benchmark Hamiltonians (d = 2, golden-ratio frequency).
#ifndef KAMTORI_PRESETS_HPP
#define KAMTORI_PRESETS_HPP

#include <string>
#include <vector>

#include "kamtori/bnf.hpp"

namespace kamtori {

/// Names accepted by make_preset, in registry order.
std::vector<std::string> preset_names();

/// Builds the named benchmark Hamiltonian at the given truncation order.
/// Throws series_error on an unknown name.
HamiltonianSpec make_preset(const std::string& name, int max_degree = 8);

/// Text-file rendering of the preset; parsing it back with read_hamiltonian
/// and re-rendering reproduces the same bytes.
std::string preset_text(const std::string& name, int max_degree = 8);

/// Direction gamma along which the preset's Birkhoff invariant is flat,
/// or an empty vector when there is none.
std::vector<double> preset_degenerate_direction(const std::string& name);

/// Resolves "preset:<name>" to a built-in or reads a Hamiltonian file.
HamiltonianSpec resolve_hamiltonian(const std::string& source, int max_degree = 8);

}  // namespace kamtori

#endif
