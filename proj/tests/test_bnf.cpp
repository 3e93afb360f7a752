#include <random>

#include "doctest.h"
#include "kamtori/bnf.hpp"

using namespace kamtori;

namespace {

const double kGolden = 0.61803398874989485;

TruncatedSeries diag_quadratic(const SeriesSpace& sp,
                               std::span<const double> omega) {
    TruncatedSeries H(sp);
    for (int j = 0; j < sp.dof; ++j)
        H += TruncatedSeries::variable(sp, VarRole::Z, j) *
             TruncatedSeries::variable(sp, VarRole::W, j) * Complex(omega[j], 0);
    return H;
}

}  // namespace

TEST_CASE("already-diagonal Hamiltonian is its own normal form") {
    SeriesSpace sp(1, 8);
    std::vector<double> omega{1.0};
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);
    HamiltonianSpec spec{diag_quadratic(sp, omega) + pow(z * w, 2), omega};

    auto res = birkhoff_normal_form(spec, 6);
    CHECK(res.normalizer.is_identity(0.0));
    CHECK(max_coeff_diff(res.N, spec.H) == 0.0);
    CHECK(res.residual_order >= 7);

    auto jet = res.action_jet();
    CHECK(jet.at(std::vector<int>{1}) == doctest::Approx(1.0));
    CHECK(jet.at(std::vector<int>{2}) == doctest::Approx(1.0));
}

TEST_CASE("order-4 coefficient for a cubic perturbation") {
    // H = zw + a z^3 + conj(a) w^3: second-order elimination gives
    // N(r) = r - 3 |a|^2 r^2 + O(r^3)  (hand perturbation theory)
    SeriesSpace sp(1, 8);
    std::vector<double> omega{1.0};
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);
    Complex a(1.0, 0.0);
    HamiltonianSpec spec{
        diag_quadratic(sp, omega) + pow(z, 3) * a + pow(w, 3) * std::conj(a),
        omega};

    for (auto method : {BNFMethod::Lie, BNFMethod::Generating}) {
        auto res = birkhoff_normal_form(spec, 4, method);
        auto jet = res.action_jet();
        CHECK(jet.at(std::vector<int>{2}) == doctest::Approx(-3.0).epsilon(1e-10));
        CHECK(res.residual_order >= 5);
        CHECK(exactness_residual(res.normalizer) <= 1e-10);
        // only the Lie construction preserves sigma-symmetry exactly
        if (method == BNFMethod::Lie)
            CHECK(map_sigma_defect(res.normalizer) <= 1e-10);
    }
}

TEST_CASE("conjugacy identity and reality") {
    SeriesSpace sp(2, 8);
    std::vector<double> omega{1.0, kGolden};
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> u(-0.3, 0.3);

    TruncatedSeries pert(sp);
    for (const auto& e : {std::vector<int>{3, 0, 0, 0, 0, 0},
                          std::vector<int>{1, 2, 0, 1, 0, 0},
                          std::vector<int>{0, 1, 1, 2, 0, 0},
                          std::vector<int>{2, 0, 0, 1, 0, 0}}) {
        pert.add_to(pack_exponents(e), Complex(u(rng), u(rng)));
    }
    pert += sigma_conjugate(pert);
    pert *= Complex(0.5, 0);
    HamiltonianSpec spec{diag_quadratic(sp, omega) + pert, omega};

    auto res = birkhoff_normal_form(spec, 6);
    auto conj = pullback(spec.H, res.normalizer) - res.N;
    conj.trim(1e-12);
    int mr = conj.min_total_degree();
    CHECK((mr < 0 || mr >= 7));

    for (const auto& [key, c] : res.N.coeffs())
        CHECK(std::abs(c.imag()) <= 1e-12);
}

TEST_CASE("uniqueness under method and elimination order") {
    SeriesSpace sp(2, 7);
    std::vector<double> omega{1.0, kGolden};
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    TruncatedSeries pert(sp);
    for (const auto& e : {std::vector<int>{3, 0, 0, 0, 0, 0},
                          std::vector<int>{0, 2, 1, 0, 0, 0},
                          std::vector<int>{1, 1, 0, 1, 0, 0},
                          std::vector<int>{0, 0, 2, 1, 0, 0}}) {
        pert.add_to(pack_exponents(e), Complex(u(rng), u(rng)));
    }
    pert += sigma_conjugate(pert);
    pert *= Complex(0.5, 0);
    HamiltonianSpec spec{diag_quadratic(sp, omega) + pert, omega};

    auto lie = birkhoff_normal_form(spec, 6, BNFMethod::Lie);
    auto gen = birkhoff_normal_form(spec, 6, BNFMethod::Generating);
    CHECK(max_coeff_diff(lie.N, gen.N) <= 1e-10);

    auto perm1 = birkhoff_normal_form(spec, 6, BNFMethod::Lie, 12345);
    auto perm2 = birkhoff_normal_form(spec, 6, BNFMethod::Lie, 99999);
    CHECK(max_coeff_diff(perm1.N, lie.N) <= 1e-10);
    CHECK(max_coeff_diff(perm2.N, lie.N) <= 1e-10);
}

TEST_CASE("resonant frequency rejected") {
    SeriesSpace sp(2, 6);
    std::vector<double> omega{1.0, 1.0};
    auto z1 = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w1 = TruncatedSeries::variable(sp, VarRole::W, 0);
    HamiltonianSpec spec{diag_quadratic(sp, omega) + pow(z1, 3) + pow(w1, 3),
                         omega};
    CHECK_THROWS_WITH_AS(birkhoff_normal_form(spec, 4),
                         doctest::Contains("resonance"), series_error);
}

TEST_CASE("invalid Hamiltonians rejected") {
    SeriesSpace sp(1, 6);
    std::vector<double> omega{1.0};
    auto z = TruncatedSeries::variable(sp, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp, VarRole::W, 0);
    auto c = TruncatedSeries::variable(sp, VarRole::C, 0);

    HamiltonianSpec with_c{diag_quadratic(sp, omega) + c * z * w, omega};
    CHECK_THROWS_AS(with_c.validate(), series_error);

    HamiltonianSpec with_linear{diag_quadratic(sp, omega) + z + w, omega};
    CHECK_THROWS_AS(with_linear.validate(), series_error);

    HamiltonianSpec not_sigma{diag_quadratic(sp, omega) + pow(z, 3) * Complex(0, 1),
                              omega};
    CHECK_THROWS_AS(not_sigma.validate(), series_error);

    HamiltonianSpec wrong_quad{diag_quadratic(sp, std::vector<double>{2.0}),
                               omega};
    CHECK_THROWS_AS(wrong_quad.validate(), series_error);
}

TEST_CASE("degeneracy rank") {
    SeriesSpace sp(2, 8);
    std::vector<double> omega{1.0, kGolden};
    auto r1 = TruncatedSeries::variable(sp, VarRole::Z, 0) *
              TruncatedSeries::variable(sp, VarRole::W, 0);
    auto r2 = TruncatedSeries::variable(sp, VarRole::Z, 1) *
              TruncatedSeries::variable(sp, VarRole::W, 1);

    BNFResult res;
    res.omega0 = omega;
    res.N = diag_quadratic(sp, omega) + r1 * r1;
    auto rep = degeneracy_rank(res);
    CHECK(rep.j == 1);
    REQUIRE(rep.directions.size() == 1);
    CHECK(std::abs(std::abs(rep.directions[0][1]) - 1.0) <= 1e-12);
    CHECK(std::abs(rep.directions[0][0]) <= 1e-12);

    res.N = diag_quadratic(sp, omega) + (r1 * r1 + r2 * r2) * Complex(0.5, 0);
    CHECK(degeneracy_rank(res).j == 0);

    auto lin = diag_quadratic(sp, omega);
    auto q = lin * lin;
    res.N = lin + q;
    rep = degeneracy_rank(res);
    CHECK(rep.j == 1);
    // kernel orthogonal to omega0
    CHECK(std::abs(rep.directions[0][0] * omega[0] +
                   rep.directions[0][1] * omega[1]) <= 1e-12);
}

TEST_CASE("degeneracy rank invariant under rotations of the jet") {
    // rotate r-coordinates of N = <omega,r> + r1^2 + (r1+r2)^2 and check j
    SeriesSpace sp(2, 8);
    std::vector<double> omega{1.0, kGolden};
    std::mt19937_64 rng(113);
    std::uniform_real_distribution<double> u(0.0, 3.14159);

    auto build = [&](double theta) {
        // quadratic form with rank-2 jet expressed in rotated coordinates
        double ct = std::cos(theta), st = std::sin(theta);
        auto r1 = TruncatedSeries::variable(sp, VarRole::Z, 0) *
                  TruncatedSeries::variable(sp, VarRole::W, 0);
        auto r2 = TruncatedSeries::variable(sp, VarRole::Z, 1) *
                  TruncatedSeries::variable(sp, VarRole::W, 1);
        auto a = r1 * Complex(ct, 0) + r2 * Complex(st, 0);
        auto b = r1 * Complex(-st, 0) + r2 * Complex(ct, 0);
        BNFResult res;
        res.omega0 = omega;
        res.N = diag_quadratic(sp, omega) + a * a + b * b * Complex(2, 0);
        return degeneracy_rank(res).j;
    };
    for (int t = 0; t < 5; ++t) CHECK(build(u(rng)) == 0);
}

TEST_CASE("transversality parameters") {
    SeriesSpace sp(2, 8);
    std::vector<double> omega{1.0, kGolden};
    auto r1 = TruncatedSeries::variable(sp, VarRole::Z, 0) *
              TruncatedSeries::variable(sp, VarRole::W, 0);
    auto r2 = TruncatedSeries::variable(sp, VarRole::Z, 1) *
              TruncatedSeries::variable(sp, VarRole::W, 1);

    BNFResult res;
    res.omega0 = omega;
    res.N = diag_quadratic(sp, omega) + (r1 * r1 + r2 * r2) * Complex(0.5, 0);

    auto rep = transversality_params(res, 3, 10);
    CHECK(rep.p <= 1);
    if (rep.p == 1) CHECK(rep.sigma >= 1.0 / std::sqrt(2.0) - 1e-6);

    // k and -k rows give the same value
    auto find = [&](const std::vector<int>& k) {
        for (const auto& row : rep.table)
            if (row.k == k) return row.value;
        std::vector<int> mk{-k[0], -k[1]};
        for (const auto& row : rep.table)
            if (row.k == mk) return row.value;
        return -1.0;
    };
    CHECK(find(std::vector<int>{1, -1}) >= 0.0);

    BNFResult degen;
    degen.omega0 = omega;
    degen.N = diag_quadratic(sp, omega) + r1 * r1;
    CHECK_THROWS_AS(transversality_params(degen, 3, 10), series_error);
}
