#include <sstream>

#include "doctest.h"
#include "kamtori/io.hpp"

using namespace kamtori;

TEST_CASE("round trip through text format") {
    SeriesSpace sp(2, 8);
    auto z1 = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w2 = TruncatedSeries::variable(sp, VarRole::W, 1);
    auto c1 = TruncatedSeries::variable(sp, VarRole::C, 0);
    auto f = z1 * w2 * Complex(1.5, -0.25) + c1 * c1 + z1 * Complex(0, 1);

    std::string text = write_series_string(f);
    auto g = read_series_string(text);
    CHECK(g.space() == sp);
    CHECK(max_coeff_diff(f, g) == 0.0);

    // deterministic output
    CHECK(write_series_string(g) == text);
}

TEST_CASE("parses comments and whitespace") {
    auto f = read_series_string(
        "# a Hamiltonian fragment\n"
        "space d=1 N=6\n"
        "\n"
        "1 | 1 | 0 | 1 0  # diagonal\n"
        "2 | 0 | 1 | 0.5 -0.5\n");
    CHECK(f.size() == 2);
    CHECK(f.coeff(std::vector<int>{1, 1, 0}) == Complex(1.0));
    CHECK(f.coeff(std::vector<int>{2, 0, 1}) == Complex(0.5, -0.5));
}

TEST_CASE("rejects malformed input") {
    CHECK_THROWS_AS(read_series_string("1 | 1 | 0 | 1 0\n"), parse_error);
    CHECK_THROWS_AS(read_series_string("space d=1\n"), parse_error);
    CHECK_THROWS_AS(read_series_string("space d=1 N=6\n1 | 1 | 1 0\n"),
                    parse_error);
    CHECK_THROWS_AS(read_series_string("space d=2 N=6\n1 | 1,0 | 0,0 | 1 0\n"),
                    parse_error);
}

TEST_CASE("hamiltonian files carry omega") {
    std::string text =
        "space d=2 N=6\n"
        "omega 1,0.61803398874989485\n"
        "1,0 | 1,0 | 0,0 | 1 0\n"
        "0,1 | 0,1 | 0,0 | 0.61803398874989485 0\n";
    std::stringstream in(text);
    auto h = read_hamiltonian(in);
    CHECK(h.omega.size() == 2);
    CHECK(h.omega[1] == doctest::Approx(0.6180339887498949));
    CHECK(h.hamiltonian.size() == 2);

    std::stringstream out;
    write_hamiltonian(out, h);
    std::stringstream back(out.str());
    auto h2 = read_hamiltonian(back);
    CHECK(max_coeff_diff(h.hamiltonian, h2.hamiltonian) == 0.0);
    CHECK(h2.omega == h.omega);

    std::stringstream no_omega("space d=1 N=4\n1 | 1 | 0 | 1 0\n");
    CHECK_THROWS_AS(read_hamiltonian(no_omega), parse_error);
}

TEST_CASE("parameter block round trip") {
    SeriesSpace sp(1, 6, 1, 3);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto mu = TruncatedSeries::variable(sp, VarRole::P, 0);
    auto f = z * mu * Complex(2.0, 0.0) + mu * mu;
    auto g = read_series_string(write_series_string(f));
    CHECK(g.space() == sp);
    CHECK(max_coeff_diff(f, g) == 0.0);
}
