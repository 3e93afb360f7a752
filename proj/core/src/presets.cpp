#include "kamtori/presets.hpp"

#include <sstream>

#include "kamtori/io.hpp"

namespace kamtori {

namespace {

constexpr double kGolden = 0.61803398874989485;

void add_monomial(TruncatedSeries& H, std::vector<int> exps, double value) {
    H += TruncatedSeries::monomial(H.space(), exps, Complex(value, 0.0));
}

/// <omega0, zw>.
TruncatedSeries pairing_term(const SeriesSpace& sp) {
    TruncatedSeries H(sp);
    add_monomial(H, {1, 0, 1, 0, 0, 0}, 1.0);
    add_monomial(H, {0, 1, 0, 1, 0, 0}, kGolden);
    return H;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"integrable-quadratic", "nondegenerate-cubic", "degenerate-r1",
            "russmann-line"};
}

HamiltonianSpec make_preset(const std::string& name, int max_degree) {
    SeriesSpace sp(2, max_degree);
    HamiltonianSpec spec;
    spec.omega0 = {1.0, kGolden};
    TruncatedSeries H = pairing_term(sp);
    if (name == "integrable-quadratic") {
        add_monomial(H, {2, 0, 2, 0, 0, 0}, 0.5);
        add_monomial(H, {0, 2, 0, 2, 0, 0}, 0.5);
    } else if (name == "nondegenerate-cubic") {
        add_monomial(H, {2, 0, 2, 0, 0, 0}, 0.5);
        add_monomial(H, {0, 2, 0, 2, 0, 0}, 0.5);
        add_monomial(H, {3, 0, 0, 0, 0, 0}, 0.05);
        add_monomial(H, {0, 0, 3, 0, 0, 0}, 0.05);
        add_monomial(H, {0, 3, 0, 0, 0, 0}, 0.05);
        add_monomial(H, {0, 0, 0, 3, 0, 0}, 0.05);
    } else if (name == "degenerate-r1") {
        add_monomial(H, {2, 0, 2, 0, 0, 0}, 1.0);
        add_monomial(H, {3, 0, 0, 0, 0, 0}, 0.1);
        add_monomial(H, {0, 0, 3, 0, 0, 0}, 0.1);
    } else if (name == "russmann-line") {
        // (<omega0, zw>)^2: the Birkhoff invariant varies only along omega0.
        add_monomial(H, {2, 0, 2, 0, 0, 0}, 1.0);
        add_monomial(H, {1, 1, 1, 1, 0, 0}, 2.0 * kGolden);
        add_monomial(H, {0, 2, 0, 2, 0, 0}, kGolden * kGolden);
    } else {
        throw series_error("make_preset: unknown preset \"" + name + "\"");
    }
    spec.H = std::move(H);
    spec.validate();
    return spec;
}

std::string preset_text(const std::string& name, int max_degree) {
    HamiltonianSpec spec = make_preset(name, max_degree);
    HamiltonianFile file{spec.H, spec.omega0};
    std::ostringstream out;
    out << "# preset " << name << "\n";
    write_hamiltonian(out, file);
    return out.str();
}

std::vector<double> preset_degenerate_direction(const std::string& name) {
    if (name == "degenerate-r1") return {0.0, 1.0};
    if (name == "russmann-line") return {kGolden, -1.0};
    if (name == "integrable-quadratic" || name == "nondegenerate-cubic")
        return {};
    throw series_error("preset_degenerate_direction: unknown preset \"" + name +
                       "\"");
}

HamiltonianSpec resolve_hamiltonian(const std::string& source, int max_degree) {
    const std::string prefix = "preset:";
    if (source.rfind(prefix, 0) == 0)
        return make_preset(source.substr(prefix.size()), max_degree);
    HamiltonianFile file = read_hamiltonian_file(source);
    HamiltonianSpec spec{file.hamiltonian, file.omega};
    spec.validate();
    return spec;
}

}  // namespace kamtori
