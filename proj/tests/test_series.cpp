#include <random>

#include "doctest.h"
#include "kamtori/series.hpp"

using namespace kamtori;

namespace {

TruncatedSeries random_series(const SeriesSpace& sp, int max_deg,
                              std::mt19937_64& rng, bool sigma_sym = false) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> exp(0, max_deg);
    TruncatedSeries f(sp);
    for (int t = 0; t < 40; ++t) {
        std::vector<int> e(sp.n_vars(), 0);
        int budget = max_deg;
        for (int v = 0; v < sp.n_vars() && budget > 0; ++v) {
            int x = exp(rng) % (budget + 1);
            e[v] = x;
            budget -= x;
        }
        f.add_to(pack_exponents(e), Complex(coeff(rng), coeff(rng)));
    }
    if (sigma_sym) {
        TruncatedSeries g = sigma_conjugate(f);
        f += g;
        f *= Complex(0.5, 0.0);
    }
    return f;
}

}  // namespace

TEST_CASE("monomial products and truncation") {
    SeriesSpace sp(1, 6);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);

    auto zw = z * w;
    auto p = zw * zw;
    CHECK(p.size() == 1);
    CHECK(p.coeff(std::vector<int>{2, 2, 0}) == Complex(1.0));

    // f = i z - i w; f^2 = -z^2 + 2 zw - w^2
    auto f = z * Complex(0, 1) - w * Complex(0, 1);
    auto f2 = f * f;
    CHECK(f2.coeff(std::vector<int>{2, 0, 0}) == Complex(-1.0));
    CHECK(f2.coeff(std::vector<int>{1, 1, 0}) == Complex(2.0));
    CHECK(f2.coeff(std::vector<int>{0, 2, 0}) == Complex(-1.0));
    CHECK(is_sigma_symmetric(f2, 0.0));

    auto zN = pow(z, sp.max_degree);
    CHECK((zN * z).empty());
}

TEST_CASE("space mismatch rejected") {
    SeriesSpace a(1, 6), b(2, 6);
    auto za = TruncatedSeries::variable(a, VarRole::Z, 0);
    auto zb = TruncatedSeries::variable(b, VarRole::Z, 0);
    CHECK_THROWS_AS(za * zb, space_mismatch_error);
    CHECK_THROWS_AS(za + zb, space_mismatch_error);
}

TEST_CASE("substitute examples") {
    SeriesSpace sp(1, 4);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);

    std::vector<std::optional<TruncatedSeries>> subs(sp.n_vars());
    subs[sp.var_index(VarRole::W, 0)] = w + z;
    auto g = substitute(z * w, subs);
    CHECK(max_coeff_diff(g, z * w + z * z) == 0.0);

    double eps = 0.25;
    std::vector<std::optional<TruncatedSeries>> subs2(sp.n_vars());
    subs2[sp.var_index(VarRole::Z, 0)] = z + z * z * Complex(eps, 0);
    auto h = substitute(z * z, subs2);
    auto want = z * z + pow(z, 3) * Complex(2 * eps, 0) +
                pow(z, 4) * Complex(eps * eps, 0);
    CHECK(max_coeff_diff(h, want) < 1e-15);

    std::vector<std::optional<TruncatedSeries>> ident(sp.n_vars());
    auto same = substitute(z * w + z, ident);
    CHECK(max_coeff_diff(same, z * w + z) == 0.0);

    std::vector<std::optional<TruncatedSeries>> bad(sp.n_vars());
    bad[0] = z + TruncatedSeries::constant(sp, 1.0);
    CHECK_THROWS_AS(substitute(z, bad), series_error);
}

TEST_CASE("partial derivatives") {
    SeriesSpace sp(1, 6);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);
    auto f = z * z * w;
    auto dz = partial_derivative(f, VarRole::Z, 0);
    CHECK(max_coeff_diff(dz, z * w * Complex(2.0, 0)) == 0.0);
    CHECK(partial_derivative(z * z, VarRole::W, 0).empty());

    std::mt19937_64 rng(7);
    auto r = random_series(sp, 5, rng);
    auto zw = partial_derivative(partial_derivative(r, VarRole::Z, 0), VarRole::W, 0);
    auto wz = partial_derivative(partial_derivative(r, VarRole::W, 0), VarRole::Z, 0);
    CHECK(max_coeff_diff(zw, wz) == 0.0);
}

TEST_CASE("sigma symmetry predicate") {
    SeriesSpace sp(1, 6);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);

    CHECK(is_sigma_symmetric(z * w, 0.0));

    Complex a(2.0, 3.0);
    auto f = pow(z, 3) * a + pow(w, 3) * std::conj(a);
    CHECK(is_sigma_symmetric(f, 0.0));

    CHECK_FALSE(is_sigma_symmetric(z * w * Complex(0, 1), 1e-12));

    std::mt19937_64 rng(11);
    auto r = random_series(sp, 5, rng);
    CHECK(max_coeff_diff(sigma_conjugate(sigma_conjugate(r)), r) == 0.0);
}

TEST_CASE("sigma symmetry closed under ring operations") {
    SeriesSpace sp(2, 6);
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        auto f = random_series(sp, 4, rng, true);
        auto g = random_series(sp, 4, rng, true);
        CHECK(sigma_symmetry_defect(f + g) <= 1e-13);
        CHECK(sigma_symmetry_defect(f * g) <= 1e-13);
        CHECK(sigma_symmetry_defect(f * Complex(1.7, 0.0)) <= 1e-13);
    }
}

TEST_CASE("ring axioms at truncated order") {
    SeriesSpace sp(2, 7);
    std::mt19937_64 rng(5);
    auto a = random_series(sp, 4, rng);
    auto b = random_series(sp, 4, rng);
    auto c = random_series(sp, 4, rng);
    CHECK(max_coeff_diff((a + b) * c, a * c + b * c) < 1e-12);
    CHECK(max_coeff_diff(a * b, b * a) <= 1e-14);
    CHECK(max_coeff_diff((a * b) * c, a * (b * c)) < 1e-12);
}

TEST_CASE("substitution composes") {
    SeriesSpace sp(1, 8);
    std::mt19937_64 rng(13);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);

    auto f = random_series(sp, 6, rng);
    // g: z -> z + 0.3 z^2, h: z -> z + 0.2 w^2 (both near-identity)
    auto gz = z + z * z * Complex(0.3, 0);
    auto hz = z + w * w * Complex(0.2, 0);
    std::vector<std::optional<TruncatedSeries>> g(sp.n_vars()), h(sp.n_vars());
    g[0] = gz;
    h[0] = hz;
    auto lhs = substitute(substitute(f, g), h);
    std::vector<std::optional<TruncatedSeries>> gh(sp.n_vars());
    gh[0] = substitute(gz, h);
    auto rhs = substitute(f, gh);
    CHECK(max_coeff_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("majorant norm bounds pointwise values") {
    SeriesSpace sp(1, 6);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    CHECK(majorant_norm(z, 0.5) == doctest::Approx(0.5));
    CHECK(majorant_norm(TruncatedSeries(sp), 0.9) == 0.0);
    CHECK_THROWS_AS(majorant_norm(z, 0.0), series_error);

    std::mt19937_64 rng(31);
    auto f = random_series(sp, 6, rng);
    double delta = 0.3;
    double bound = majorant_norm(f, delta);
    std::uniform_real_distribution<double> rad(0.0, delta), ang(0.0, 6.2831853);
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
        std::vector<Complex> p(sp.n_vars());
        for (auto& x : p) x = std::polar(rad(rng), ang(rng));
        worst = std::max(worst, std::abs(f.evaluate(p)));
    }
    CHECK(bound >= worst);
}

TEST_CASE("evaluation consistency with substitution") {
    SeriesSpace sp(1, 8);
    std::mt19937_64 rng(41);
    auto f = random_series(sp, 5, rng);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);
    std::vector<std::optional<TruncatedSeries>> subs(sp.n_vars());
    subs[0] = z + w * w * Complex(0.1, 0);
    auto g = substitute(f, subs);

    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int s = 0; s < 20; ++s) {
        std::vector<Complex> p(sp.n_vars());
        for (auto& x : p) x = Complex(u(rng), u(rng)) * 0.5;
        std::vector<Complex> q = p;
        q[0] = p[0] + p[1] * p[1] * 0.1;
        // both sides truncate the same way only approximately; small point
        CHECK(std::abs(g.evaluate(p) - f.evaluate(q)) < 1e-6);
    }
}

TEST_CASE("trim and degree helpers") {
    SeriesSpace sp(1, 6);
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto f = z * Complex(1e-20, 0) + pow(z, 3);
    f.trim(1e-15);
    CHECK(f.size() == 1);
    CHECK(f.min_total_degree() == 3);
    CHECK(TruncatedSeries(sp).min_total_degree() == -1);
}
