// Acceptance suite: one verdict line per criterion, exit 0 only if the
// requested criteria all pass. Usage: acceptance [--criterion N]
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kamtori/decomp.hpp"
#include "kamtori/experiments.hpp"
#include "kamtori/presets.hpp"

using namespace kamtori;

namespace {

const double kGolden = 0.61803398874989485;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

TruncatedSeries random_series(const SeriesSpace& sp, int max_deg,
                              std::mt19937_64& rng, bool sigma_sym = false) {
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> exp(0, max_deg);
    TruncatedSeries f(sp);
    for (int t = 0; t < 50; ++t) {
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
        f += sigma_conjugate(f);
        f *= Complex(0.5, 0.0);
    }
    return f;
}

// make sqrt(-1) f sigma-symmetric
TruncatedSeries i_sigma_symmetrize(const TruncatedSeries& f) {
    auto g = f * Complex(0, 1);
    g += sigma_conjugate(g);
    return g * Complex(0, -0.5);
}

Verdict criterion_1() {
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        int d = 1 + t % 3;
        SeriesSpace sp(d, 8);
        auto f = random_series(sp, 8, rng);
        worst = std::max(worst,
                         max_coeff_diff(decompose_zw(f).recombine(), f));
        worst = std::max(worst,
                         max_coeff_diff(decompose_action(f).recombine(), f));
        auto parts = canonical_parts(f);
        worst = std::max(worst, max_coeff_diff(parts.recombine_candec1(), f));
        worst = std::max(worst, max_coeff_diff(parts.recombine_candec2(), f));
    }
    return {worst <= 1e-12, "max recombination error " + fmt(worst)};
}

Verdict criterion_2() {
    std::mt19937_64 rng(2);
    DiophantineParams p{0.1, 2.0};
    OmegaSpec omega{{1.0, kGolden}};
    const Complex I(0, 1);
    double tight = 0.0;   // operators checked at 1e-13
    double loose = 0.0;   // solver images and maps checked at 1e-12
    for (int t = 0; t < 20; ++t) {
        SeriesSpace sp(2, 7);
        auto f = random_series(sp, 6, rng, true);
        auto parts = canonical_parts(f);
        loose = std::max(loose, sigma_symmetry_defect(parts.f0));
        for (const auto& g : parts.f1)
            loose = std::max(loose, sigma_symmetry_defect(g));
        tight = std::max(tight, sigma_symmetry_defect(project_diagonal(f)));
        tight = std::max(tight,
                         sigma_symmetry_defect(apply_D_component(f, 0) * I));
        tight = std::max(tight, sigma_symmetry_defect(cutoff(f, omega, p)));
        auto u = solve_L(f, omega, p);
        for (int i = 0; i < 2; ++i)
            loose = std::max(loose,
                             sigma_symmetry_defect(apply_D_component(u, i)));
        auto gen = i_sigma_symmetrize(random_series(sp, 4, rng) * 0.05);
        gen = gen.filtered([](MonoKey k) { return total_degree(k) >= 2; });
        loose = std::max(loose, map_sigma_defect(lie_time_one(gen)));
    }
    bool ok = tight <= 1e-13 && loose <= 1e-12;
    return {ok, "operator defect " + fmt(tight) + ", solver/map defect " +
                    fmt(loose)};
}

Verdict criterion_3() {
    std::mt19937_64 rng(3);
    SeriesSpace sp(2, 8);
    DiophantineParams p{1e-2, 2.0};
    OmegaSpec omega{{1.0, kGolden}};
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        auto f = random_series(sp, 7, rng);
        auto u = solve_L(f, omega, p);
        auto lhs = apply_D_omega(u, omega) + cutoff(f, omega, p) +
                   project_diagonal(f);
        worst = std::max(worst, max_coeff_diff(lhs, f));
    }
    return {worst <= 1e-12, "max identity error " + fmt(worst)};
}

Verdict criterion_4() {
    std::mt19937_64 rng(4);
    std::vector<double> grid{1e-1, 1e-2, 1e-3};
    double lo = 2.0, hi = 2.0;
    auto record = [&](const MapComparison& cmp) {
        lo = std::min(lo, cmp.slope);
        hi = std::max(hi, cmp.slope);
    };
    SeriesSpace sp1(1, 9);
    auto z = TruncatedSeries::variable(sp1, VarRole::Z, 0);
    auto w = TruncatedSeries::variable(sp1, VarRole::W, 0);
    record(compare_gen_vs_lie(z * w, grid));
    // degree-6 truncation: the quadratic-difference property is order
    // independent and the composition algebra cost grows steeply with N
    SeriesSpace sp(2, 6);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int t = 0; t < 5; ++t) {
        TruncatedSeries cubic(sp);
        for (const auto& e : {std::vector<int>{3, 0, 0, 0, 0, 0},
                              std::vector<int>{2, 1, 1, 0, 0, 0},
                              std::vector<int>{0, 1, 1, 1, 0, 0},
                              std::vector<int>{1, 0, 0, 2, 0, 0}}) {
            cubic.add_to(pack_exponents(e), Complex(u(rng), u(rng)));
        }
        record(compare_gen_vs_lie(i_sigma_symmetrize(cubic), grid));
    }
    bool ok = lo >= 1.9 && hi <= 2.1;
    return {ok, "slopes in [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

Verdict criterion_5() {
    double method_dev = 0.0, imag_dev = 0.0, perm_dev = 0.0;
    for (const char* name :
         {"integrable-quadratic", "nondegenerate-cubic", "degenerate-r1"}) {
        HamiltonianSpec spec = make_preset(name);
        auto lie = birkhoff_normal_form(spec, 6, BNFMethod::Lie);
        auto gen = birkhoff_normal_form(spec, 6, BNFMethod::Generating);
        double scale = std::max(1.0, lie.N.max_abs_coeff());
        method_dev =
            std::max(method_dev, max_coeff_diff(lie.N, gen.N) / scale);
        imag_dev = std::max(
            imag_dev, lie.N
                          .mapped([](MonoKey, Complex v) {
                              return Complex(0.0, v.imag());
                          })
                          .max_abs_coeff());
        for (unsigned seed : {12345u, 99999u}) {
            auto perm = birkhoff_normal_form(spec, 6, BNFMethod::Lie, seed);
            perm_dev =
                std::max(perm_dev, max_coeff_diff(perm.N, lie.N) / scale);
        }
    }
    bool ok = method_dev <= 1e-10 && imag_dev <= 1e-12 && perm_dev <= 1e-10;
    return {ok, "method dev " + fmt(method_dev) + ", imag " + fmt(imag_dev) +
                    ", permutation dev " + fmt(perm_dev)};
}

Verdict from_scenario(const std::string& name) {
    ExperimentReport rep = run_scenario(name);
    std::string detail = name + ":";
    for (const auto& p : rep.properties) {
        if (!p.pass) detail += " FAILED " + p.name + "=" + fmt(p.measured);
    }
    if (rep.all_pass()) {
        detail += " all " + std::to_string(rep.properties.size()) +
                  " properties hold";
    }
    return {rep.all_pass(), detail};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict criterion_13() {
#ifndef KAMTORI_TOOL_PATH
    return {false, "kamtool path not configured"};
#else
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / "kamtori-acceptance";
    std::vector<std::string> outputs;
    for (const char* sub : {"a", "b"}) {
        fs::path dir = base / sub;
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::string cmd = std::string(KAMTORI_TOOL_PATH) +
                          " scenario --name russmann-line --seed 3 --out " +
                          dir.string();
        if (std::system(cmd.c_str()) != 0)
            return {false, "kamtool run failed"};
        cmd = std::string(KAMTORI_TOOL_PATH) +
              " freq-map --preset degenerate-r1 --out " + dir.string();
        if (std::system(cmd.c_str()) != 0)
            return {false, "kamtool run failed"};
        outputs.push_back(slurp((dir / "scenario-russmann-line.csv").string()) +
                          slurp((dir / "freq-map.csv").string()));
    }
    if (outputs[0].empty()) return {false, "no CSV produced"};
    bool ok = outputs[0] == outputs[1];
    return {ok, ok ? "re-run CSV byte-identical" : "re-run CSV differs"};
#endif
}

const std::vector<std::function<Verdict()>>& criteria() {
    static const std::vector<std::function<Verdict()>> list = {
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        [] { return from_scenario("freq-jet-identity"); },
        [] { return from_scenario("kam-contraction"); },
        [] { return from_scenario("theorem-A-degenerate"); },
        [] { return from_scenario("russmann-line"); },
        [] { return from_scenario("torus-scaling"); },
        [] { return from_scenario("theorem-B-density"); },
        [] { return from_scenario("measure-lemma"); },
        criterion_13,
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (only < 0 || only > int(criteria().size())) {
        std::fprintf(stderr, "criterion out of range\n");
        return 2;
    }
    bool all_ok = true;
    for (int n = 1; n <= int(criteria().size()); ++n) {
        if (only != 0 && n != only) continue;
        Verdict v;
        try {
            v = criteria()[n - 1]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d: %s (%s)\n", n, v.pass ? "PASS" : "FAIL",
                    v.detail.c_str());
        all_ok = all_ok && v.pass;
    }
    return all_ok ? 0 : 1;
}
