// Batch front door: parses Hamiltonian files or presets, runs the bnf/kam
// pipelines and the scripted experiments, and writes plot-ready CSV plus a
// JSON-lines run manifest per invocation.
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kamtori/experiments.hpp"
#include "kamtori/io.hpp"
#include "kamtori/presets.hpp"

using namespace kamtori;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "kamtool 0.1.0";

// FNV-1a, stable across platforms; used for input digests in the manifest.
std::string digest(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

struct Output {
    std::string dir;
    json params = json::object();
    std::string csv_name;

    void write(const ExperimentReport& rep) {
        auto t0 = std::chrono::steady_clock::now();
        std::string path = dir + "/" + csv_name + ".csv";
        {
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot open " + path);
            out << rep.csv();
        }
        double wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        json entry = {{"command", csv_name},
                      {"params", params},
                      {"tool", kVersion},
                      {"csv", csv_name + ".csv"},
                      {"csv_digest", digest(rep.csv())},
                      {"rows", rep.rows.size()},
                      {"all_pass", rep.all_pass()},
                      {"wall_ms", wall_ms}};
        std::ofstream man(dir + "/manifest.jsonl", std::ios::app);
        man << entry.dump() << "\n";
    }
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

HamiltonianSpec load_spec(const std::string& source, Output& out) {
    if (source.rfind("preset:", 0) != 0) {
        std::ifstream in(source);
        std::stringstream buf;
        buf << in.rdbuf();
        out.params["input_digest"] = digest(buf.str());
    }
    return resolve_hamiltonian(source);
}

void info(ExperimentReport& rep, const std::string& name, double value) {
    rep.properties.push_back({name, true, value, value});
}

ExperimentReport run_bnf(const HamiltonianSpec& spec, int order,
                         const std::string& method) {
    BNFMethod m = method == "generating" ? BNFMethod::Generating : BNFMethod::Lie;
    BNFResult res = birkhoff_normal_form(spec, order, m);
    ExperimentReport rep;
    rep.name = "bnf";
    rep.columns = {"r1", "r2", "coeff"};
    for (const auto& [expo, v] : res.action_jet())
        rep.rows.push_back({double(expo[0]), double(expo[1]), v});
    DegeneracyReport deg = degeneracy_rank(res);
    info(rep, "residual_order", res.residual_order);
    info(rep, "degeneracy_j", deg.j);
    return rep;
}

ExperimentReport run_normal_form(const NormalFormState& st) {
    ExperimentReport rep;
    rep.name = "normal-form";
    rep.columns = {"step",       "delta",           "majorant_before",
                   "majorant_after", "m_residual",  "ledger_residual",
                   "lambda_increment"};
    for (const auto& d : st.diagnostics)
        rep.rows.push_back({double(d.step), d.delta, d.majorant_before,
                            d.majorant_after, d.m_residual, d.ledger_residual,
                            d.lambda_increment});
    info(rep, "bracket_majorant", st.bracket_majorant());
    info(rep, "ledger_residual", st.ledger_residual());
    return rep;
}

ExperimentReport run_freq_map(const std::string& source,
                              const NormalFormState& st, int grid_n,
                              double grid_radius) {
    FrequencyJet freq = frequency_map(st);
    std::vector<double> dir;
    if (source.rfind("preset:", 0) == 0)
        dir = preset_degenerate_direction(source.substr(7));
    if (dir.empty()) dir = {1.0, 1.0};
    double nd = std::hypot(dir[0], dir[1]);
    for (double& v : dir) v /= nd;

    ExperimentReport rep;
    rep.name = "freq-map";
    rep.columns = {"s", "omega1", "omega2", "dev_from_omega0"};
    double worst = 0.0;
    for (int k = -grid_n; k <= grid_n; ++k) {
        double s = grid_radius * double(k) / double(grid_n);
        std::vector<double> c = {s * dir[0], s * dir[1]};
        std::vector<double> om = freq.evaluate_real(c);
        double dev = std::max(std::abs(om[0] - st.omega.omega0[0]),
                              std::abs(om[1] - st.omega.omega0[1]));
        rep.rows.push_back({s, om[0], om[1], dev});
        worst = std::max(worst, dev);
    }
    info(rep, "max_dev_from_omega0", worst);
    info(rep, "fit_residual", freq.residual);
    return rep;
}

ExperimentReport run_torus(const NormalFormState& st,
                           const std::vector<double>& c, int theta_grid) {
    std::vector<Complex> c_star;
    for (std::size_t i = 0; i + 1 < c.size(); i += 2)
        c_star.push_back(Complex(c[i], c[i + 1]));
    TorusCandidate torus = build_torus(st, c_star, theta_grid);
    ExperimentReport rep;
    rep.name = "torus";
    rep.columns = {"node"};
    for (int i = 1; i <= int(c_star.size()); ++i) {
        rep.columns.push_back("re_z" + std::to_string(i));
        rep.columns.push_back("im_z" + std::to_string(i));
        rep.columns.push_back("re_w" + std::to_string(i));
        rep.columns.push_back("im_w" + std::to_string(i));
    }
    for (std::size_t t = 0; t < torus.points.size(); ++t) {
        std::vector<double> row = {double(t)};
        const auto& pt = torus.points[t];
        for (std::size_t i = 0; i < c_star.size(); ++i) {
            row.push_back(pt[i].real());
            row.push_back(pt[i].imag());
            row.push_back(pt[c_star.size() + i].real());
            row.push_back(pt[c_star.size() + i].imag());
        }
        rep.rows.push_back(row);
    }
    info(rep, "residual", torus.residual);
    info(rep, "real_torus", torus.real_torus ? 1.0 : 0.0);
    return rep;
}

ExperimentReport run_density(const HamiltonianSpec& spec,
                             const KamParams& params, DensityParams dp) {
    BNFResult bnf = birkhoff_normal_form(spec, 2 * params.q + 1);
    TransversalityReport trans = transversality_params(bnf, 2, 10);
    NormalFormState st = normal_form(spec, params);
    FrequencyJet freq = frequency_map(st);
    ExperimentReport rep = density_experiment(freq, trans, dp);
    rep.name = "density";
    return rep;
}

ExperimentReport run_compare_maps(const HamiltonianSpec& spec,
                                  const std::vector<double>& eps,
                                  double radius) {
    TruncatedSeries f = spec.H.filtered(
        [](MonoKey k) { return total_degree(k) >= 3; });
    MapComparison cmp = compare_gen_vs_lie(f, eps, radius);
    ExperimentReport rep;
    rep.name = "compare-maps";
    rep.columns = {"eps", "difference"};
    for (std::size_t i = 0; i < cmp.eps.size(); ++i)
        rep.rows.push_back({cmp.eps[i], cmp.difference[i]});
    info(rep, "slope", cmp.slope);
    info(rep, "exact_zero", cmp.exact_zero ? 1.0 : 0.0);
    return rep;
}

int classify(const std::exception& e) {
    std::string what = e.what();
    const char* cls = "precondition";
    int code = 3;
    if (dynamic_cast<const contraction_error*>(&e)) {
        cls = "contraction-failure";
        code = 5;
    } else if (what.find("divisor") != std::string::npos) {
        cls = "small-divisor";
        code = 4;
    } else if (dynamic_cast<const parse_error*>(&e)) {
        cls = "parse";
        code = 2;
    }
    std::cerr << json{{"error", cls}, {"message", what}}.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated KAM normal-form pipelines and experiments"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();

    const char* env_out = std::getenv("KAMTORI_OUT");
    std::string out_dir = env_out ? env_out : ".";
    app.add_option("--out", out_dir, "Output directory for CSV and manifest");

    std::string source = "preset:nondegenerate-cubic";
    KamParams kp;
    std::string omega_mode = "jet";
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd, bool with_kam) {
        cmd->add_option("--hamiltonian", source,
                        "Hamiltonian file path or preset:<name>");
        cmd->add_option("--preset", [&](const std::vector<std::string>& v) {
            source = "preset:" + v.front();
            return true;
        }, "Preset name (shorthand for --hamiltonian preset:<name>)");
        if (with_kam) {
            cmd->add_option("--q", kp.q, "Counterterm jet order");
            cmd->add_option("--kappa", kp.kappa, "Diophantine constant");
            cmd->add_option("--tau", kp.tau, "Diophantine exponent");
            cmd->add_option("--steps", kp.steps, "Scheme iterations");
            cmd->add_option("--omega-mode", omega_mode,
                            "jet (formal mu block) or numeric")
                ->check(CLI::IsMember({"jet", "numeric"}));
        }
    };

    auto* c_bnf = app.add_subcommand("bnf", "Birkhoff normal form");
    int order = 6;
    std::string method = "lie";
    add_common(c_bnf, false);
    c_bnf->add_option("--order", order, "Normalization order");
    c_bnf->add_option("--method", method, "lie or generating")
        ->check(CLI::IsMember({"lie", "generating"}));

    auto* c_nf = app.add_subcommand("normal-form", "Counterterm scheme");
    add_common(c_nf, true);

    auto* c_fm = app.add_subcommand("freq-map", "Frequency map on a c-grid");
    int grid_n = 40;
    double grid_radius = 0.05;
    add_common(c_fm, true);
    c_fm->add_option("--grid", grid_n, "Grid half-width in points");
    c_fm->add_option("--radius", grid_radius, "Grid radius in c");

    auto* c_torus = app.add_subcommand("torus", "Torus candidate at c*");
    std::string c_text = "0.01,0,0.01,0";
    int theta_grid = 16;
    add_common(c_torus, true);
    c_torus->add_option("--c", c_text, "c* as re,im pairs, comma separated");
    c_torus->add_option("--theta-grid", theta_grid, "Angle nodes per circle");

    auto* c_dens = app.add_subcommand("density", "Diophantine density MC");
    DensityParams dp;
    std::string kappas_text;
    add_common(c_dens, true);
    c_dens->add_option("--kappas", kappas_text, "kappa ladder, comma separated");
    c_dens->add_option("--k-range", dp.dc_k_range, "Mode range of the DC test");
    c_dens->add_option("--samples", dp.samples, "MC samples per kappa");
    c_dens->add_option("--seed", seed, "RNG seed");

    auto* c_mc = app.add_subcommand("measure-mc", "Polar-chart measure MC");
    std::string config_path;
    c_mc->add_option("--config", config_path, "JSON config file")->required();
    c_mc->add_option("--seed", seed, "RNG seed");

    auto* c_cmp = app.add_subcommand("compare-maps",
                                     "Generating function vs Lie series");
    std::string eps_text = "1e-1,1e-2,1e-3";
    double radius = 0.1;
    add_common(c_cmp, false);
    c_cmp->add_option("--series", source, "Series file or preset:<name>");
    c_cmp->add_option("--eps", eps_text, "epsilon ladder, comma separated");
    c_cmp->add_option("--radius", radius, "Majorant radius");

    auto* c_sc = app.add_subcommand("scenario", "Scripted scenario");
    std::string scenario_name;
    c_sc->add_option("--name", scenario_name, "Scenario name")->required();
    c_sc->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", "parse"}, {"message", e.what()}}.dump()
                  << "\n";
        return 2;
    }
    kp.mode = omega_mode == "numeric" ? OmegaMode::Numeric : OmegaMode::Jet;

    Output out;
    out.dir = out_dir;
    out.params["seed"] = seed;

    try {
        if (*c_bnf) {
            out.csv_name = "bnf";
            out.params.update({{"hamiltonian", source},
                               {"order", order},
                               {"method", method}});
            out.write(run_bnf(load_spec(source, out), order, method));
        } else if (*c_nf || *c_fm || *c_torus || *c_dens) {
            out.params.update({{"hamiltonian", source},
                               {"q", kp.q},
                               {"kappa", kp.kappa},
                               {"tau", kp.tau},
                               {"steps", kp.steps},
                               {"omega_mode", omega_mode}});
            HamiltonianSpec spec = load_spec(source, out);
            if (*c_dens) {
                out.csv_name = "density";
                if (!kappas_text.empty()) dp.kappas = parse_list(kappas_text);
                dp.seed = seed;
                out.params.update({{"kappas", dp.kappas},
                                   {"k_range", dp.dc_k_range},
                                   {"samples", dp.samples}});
                out.write(run_density(spec, kp, dp));
            } else {
                NormalFormState st = normal_form(spec, kp);
                if (*c_nf) {
                    out.csv_name = "normal-form";
                    out.write(run_normal_form(st));
                } else if (*c_fm) {
                    out.csv_name = "freq-map";
                    out.params.update(
                        {{"grid", grid_n}, {"radius", grid_radius}});
                    out.write(run_freq_map(source, st, grid_n, grid_radius));
                } else {
                    out.csv_name = "torus";
                    out.params.update(
                        {{"c", c_text}, {"theta_grid", theta_grid}});
                    out.write(run_torus(st, parse_list(c_text), theta_grid));
                }
            }
        } else if (*c_mc) {
            out.csv_name = "measure-mc";
            std::ifstream in(config_path);
            if (!in) throw std::invalid_argument("cannot open " + config_path);
            json cfg = json::parse(in);
            MeasureConfig mc;
            mc.d = cfg.value("d", mc.d);
            mc.eta = cfg.value("eta", mc.eta);
            mc.sigma_density = cfg.value("sigma_density", mc.sigma_density);
            mc.eps_scale = cfg.value("eps_scale", mc.eps_scale);
            mc.samples = cfg.value("samples", mc.samples);
            mc.nu = cfg.value("nu", mc.nu);
            mc.seed = cfg.value("seed", seed);
            out.params.update({{"config", config_path}, {"config_body", cfg}});
            out.write(measure_mc(mc));
        } else if (*c_cmp) {
            out.csv_name = "compare-maps";
            out.params.update({{"series", source},
                               {"eps", eps_text},
                               {"radius", radius}});
            out.write(run_compare_maps(load_spec(source, out),
                                       parse_list(eps_text), radius));
        } else if (*c_sc) {
            out.csv_name = "scenario-" + scenario_name;
            out.params.update({{"name", scenario_name}});
            ExperimentReport rep = run_scenario(scenario_name, seed);
            out.write(rep);
            if (!rep.all_pass()) {
                std::cerr << json{{"error", "property-failure"},
                                  {"message", "scenario properties failed"}}
                                 .dump()
                          << "\n";
                return 1;
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", "parse"}, {"message", e.what()}}.dump()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        return classify(e);
    }
    return 0;
}
