#include "kamtori/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kamtori/presets.hpp"
#include "kamtori/smalldiv.hpp"

namespace kamtori {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void add_property(ExperimentReport& rep, const std::string& name, bool pass,
                  double measured, double threshold) {
    rep.properties.push_back({name, pass, measured, threshold});
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Least-squares slope of log(y) against log(x); requires >= 2 points.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]);
        double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Uniform samples in {|c| < radius} intersected with the closed positive
// orthant, d = 2.
std::vector<std::vector<double>> sample_quarter_ball(double radius, int n,
                                                     std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<std::vector<double>> out;
    out.reserve(std::size_t(n));
    while (int(out.size()) < n) {
        double a = radius * uni(rng);
        double b = radius * uni(rng);
        if (a * a + b * b < radius * radius) out.push_back({a, b});
    }
    return out;
}

}  // namespace

bool ExperimentReport::all_pass() const {
    for (const auto& p : properties)
        if (!p.pass) return false;
    return true;
}

std::string ExperimentReport::csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt(row[i]);
        }
        out += '\n';
    }
    for (const auto& p : properties) {
        out += "# property,";
        out += p.name;
        out += p.pass ? ",pass," : ",fail,";
        out += fmt(p.measured);
        out += ',';
        out += fmt(p.threshold);
        out += '\n';
    }
    return out;
}

ExperimentReport density_experiment(const FrequencyJet& freq,
                                    const TransversalityReport& trans,
                                    const DensityParams& params) {
    ExperimentReport rep;
    rep.name = "density";
    rep.columns = {"kappa", "eta", "k1", "k2", "eps", "fraction"};

    const int p = std::max(1, trans.p);
    const double sigma = trans.sigma;
    if (!(sigma > 0.0))
        throw std::invalid_argument("density_experiment: sigma must be positive");
    const std::vector<double>& w0 = freq.omega0;

    std::vector<double> fractions;
    double eta_max = 0.0;
    for (std::size_t ik = 0; ik < params.kappas.size(); ++ik) {
        const double kappa = params.kappas[ik];
        const double eta =
            std::pow(kappa / sigma, 1.0 / (2.0 * p)) / params.eta_constant;
        eta_max = std::max(eta_max, eta);
        DiophantineParams dc{kappa, params.tau};
        dc.validate(int(w0.size()));

        std::mt19937_64 rng(params.seed + ik);
        auto cs = sample_quarter_ball(eta / 2.0, params.samples, rng);
        int good = 0;
        for (const auto& c : cs) {
            std::vector<double> om = freq.evaluate_real(c);
            if (dc_check(om, dc, params.dc_k_range).ok) ++good;
        }
        double frac = double(good) / double(params.samples);
        fractions.push_back(frac);
        rep.rows.push_back({kappa, eta, 0.0, 0.0, 0.0, frac});
    }

    double min_diff = 0.0;
    for (std::size_t i = 1; i < fractions.size(); ++i)
        min_diff = std::min(min_diff, fractions[i] - fractions[i - 1]);
    add_property(rep, "fraction-monotone-in-kappa", min_diff >= -0.005,
                 min_diff, -0.005);
    add_property(rep, "fraction-at-smallest-kappa", fractions.back() > 0.9,
                 fractions.back(), 0.9);

    // Near-resonant modes whose hyperplane crosses the sample ball: the
    // excluded fraction should scale like eps^{1/p}.
    std::vector<std::vector<int>> resonant;
    const int scan = 25;
    for (int k1 = -scan; k1 <= scan; ++k1) {
        for (int k2 = 0; k2 <= scan; ++k2) {
            if (k2 == 0 && k1 <= 0) continue;
            double nk = std::hypot(double(k1), double(k2));
            double off = std::abs(k1 * w0[0] + k2 * w0[1]) / nk;
            if (off > 0.0 && off < eta_max / 4.0) resonant.push_back({k1, k2});
        }
    }
    std::sort(resonant.begin(), resonant.end(),
              [](const auto& a, const auto& b) {
                  return std::hypot(double(a[0]), double(a[1])) <
                         std::hypot(double(b[0]), double(b[1]));
              });
    if (resonant.size() > 4) resonant.resize(4);

    std::mt19937_64 rng(params.seed + 1000);
    auto cs = sample_quarter_ball(eta_max / 2.0, params.samples, rng);
    std::vector<std::vector<double>> omegas;
    omegas.reserve(cs.size());
    for (const auto& c : cs) omegas.push_back(freq.evaluate_real(c));

    const double want = 1.0 / double(p);
    for (const auto& k : resonant) {
        double nk = std::hypot(double(k[0]), double(k[1]));
        std::vector<double> eps_used, frac_used;
        for (double eps : params.eps_ladder) {
            int hit = 0;
            for (const auto& om : omegas)
                if (std::abs(k[0] * om[0] + k[1] * om[1]) / nk < eps) ++hit;
            double frac = double(hit) / double(omegas.size());
            rep.rows.push_back(
                {params.kappas.front(), eta_max, double(k[0]), double(k[1]),
                 eps, frac});
            if (frac > 0.0) {
                eps_used.push_back(eps);
                frac_used.push_back(frac);
            }
        }
        std::string label = "exclusion-exponent-k=" + std::to_string(k[0]) +
                            "," + std::to_string(k[1]);
        if (eps_used.size() < 2) {
            add_property(rep, label, false, 0.0, want);
            continue;
        }
        double slope = log_log_slope(eps_used, frac_used);
        add_property(rep, label, std::abs(slope - want) <= 0.25 * want, slope,
                     want);
    }
    return rep;
}

namespace {

// Polar chart W(c, theta) for d = 2 and the perturbation eps sitting at (a
// fraction eps_scale of) the jacobian stability bound eta^{2d+1}.
struct PolarChart {
    double eta;
    double amp;  // eps amplitude

    void eps(const double c[2], const double th[2], double out[4]) const {
        double u = amp * (c[0] * c[1]) / (eta * eta);
        double s = 2.0 * std::numbers::pi;
        out[0] = u * std::sin(s * (th[0] + 2.0 * th[1]));
        out[1] = u * std::cos(s * (th[0] + 2.0 * th[1]));
        out[2] = u * std::sin(s * (2.0 * th[0] + th[1]));
        out[3] = u * std::cos(s * (2.0 * th[0] + th[1]));
    }

    void map(const double c[2], const double th[2], double out[4]) const {
        double s = 2.0 * std::numbers::pi;
        double e[4];
        eps(c, th, e);
        for (int i = 0; i < 2; ++i) {
            out[2 * i] = c[i] * std::sin(s * th[i]) + e[2 * i];
            out[2 * i + 1] = c[i] * std::cos(s * th[i]) + e[2 * i + 1];
        }
    }

    // Fixed-point inversion; converges because |grad eps| << 1.
    void invert(const double x[4], double c[2], double th[2]) const {
        double s = 2.0 * std::numbers::pi;
        for (int i = 0; i < 2; ++i) {
            c[i] = std::hypot(x[2 * i], x[2 * i + 1]);
            th[i] = std::atan2(x[2 * i], x[2 * i + 1]) / s;
            if (th[i] < 0.0) th[i] += 1.0;
        }
        for (int it = 0; it < 12; ++it) {
            double e[4];
            eps(c, th, e);
            for (int i = 0; i < 2; ++i) {
                double a = x[2 * i] - e[2 * i];
                double b = x[2 * i + 1] - e[2 * i + 1];
                c[i] = std::hypot(a, b);
                th[i] = std::atan2(a, b) / s;
                if (th[i] < 0.0) th[i] += 1.0;
            }
        }
    }
};

}  // namespace

ExperimentReport measure_mc(const MeasureConfig& config) {
    if (config.d != 2)
        throw std::invalid_argument("measure_mc: only d = 2 is implemented");
    ExperimentReport rep;
    rep.name = "measure-mc";
    rep.columns = {"eps_scale", "sigma_density", "samples", "ratio",
                   "half_width"};

    const double eta = config.eta;
    const double bound = std::pow(eta, 2.0 * config.d + 1.0);
    PolarChart chart{eta, config.eps_scale * bound / 40.0};

    // Numeric validation of |eps| + |grad eps| < eta^{2d+1} on a grid.
    double worst = 0.0;
    const double h = 1e-6;
    for (int a = 0; a <= 8; ++a) {
        for (int b = 0; b <= 8; ++b) {
            for (int t1 = 0; t1 < 8; ++t1) {
                for (int t2 = 0; t2 < 8; ++t2) {
                    double c[2] = {eta * a / 8.0, eta * b / 8.0};
                    double th[2] = {t1 / 8.0, t2 / 8.0};
                    double e0[4];
                    chart.eps(c, th, e0);
                    double norm = 0.0, grad = 0.0;
                    for (double v : e0) norm = std::max(norm, std::abs(v));
                    for (int v = 0; v < 4; ++v) {
                        double cp[2] = {c[0], c[1]};
                        double tp[2] = {th[0], th[1]};
                        (v < 2 ? cp[v] : tp[v - 2]) += h;
                        double e1[4];
                        chart.eps(cp, tp, e1);
                        for (int m = 0; m < 4; ++m)
                            grad = std::max(grad,
                                            std::abs(e1[m] - e0[m]) / h);
                    }
                    worst = std::max(worst, norm + grad);
                }
            }
        }
    }
    add_property(rep, "eps-within-jacobian-bound", worst < bound, worst, bound);

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int stripes = 20;
    long hits = 0;
    for (int n = 0; n < config.samples; ++n) {
        double x[4];
        for (int i = 0; i < 2; ++i) {
            double r = eta * std::sqrt(uni(rng));
            double phi = 2.0 * std::numbers::pi * uni(rng);
            x[2 * i] = r * std::sin(phi);
            x[2 * i + 1] = r * std::cos(phi);
        }
        double c[2], th[2];
        chart.invert(x, c, th);
        if (c[0] > eta || c[1] > eta) continue;
        double stripe = c[0] / eta * stripes;
        if (stripe - std::floor(stripe) < config.sigma_density) ++hits;
    }
    double ratio = double(hits) / double(config.samples);
    double half = 1.96 * std::sqrt(std::max(ratio * (1.0 - ratio), 0.0) /
                                   double(config.samples));
    rep.rows.push_back({config.eps_scale, config.sigma_density,
                        double(config.samples), ratio, half});
    add_property(rep, "ratio-above-density-minus-nu",
                 ratio >= config.sigma_density - config.nu, ratio,
                 config.sigma_density - config.nu);
    return rep;
}

namespace {

ExperimentReport scenario_freq_jet_identity(std::uint64_t) {
    ExperimentReport rep;
    rep.name = "freq-jet-identity";
    rep.columns = {"preset", "component", "rel_deviation"};
    const std::vector<std::string> names = {"integrable-quadratic",
                                            "nondegenerate-cubic",
                                            "degenerate-r1"};
    for (std::size_t n = 0; n < names.size(); ++n) {
        KamParams params;
        NormalFormState st = normal_form(make_preset(names[n]), params);
        FrequencyJet freq = frequency_map(st);
        const int cap = params.q - 1;
        auto jet_cap = [&](const TruncatedSeries& f) {
            return f.filtered(
                [&](MonoKey k) { return total_degree(k) <= cap; });
        };
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) {
            TruncatedSeries grad = jet_cap(st.grad_Nq[i]);
            double scale = std::max(1.0, grad.max_abs_coeff());
            double dev = max_coeff_diff(jet_cap(freq.jet[i]), grad) / scale;
            rep.rows.push_back({double(n), double(i), dev});
            worst = std::max(worst, dev);
        }
        add_property(rep, "jet-matches-gradient-" + names[n], worst <= 1e-8,
                     worst, 1e-8);
    }
    return rep;
}

ExperimentReport scenario_kam_contraction(std::uint64_t) {
    ExperimentReport rep;
    rep.name = "kam-contraction";
    rep.columns = {"step", "majorant", "m_residual"};
    HamiltonianSpec spec = make_preset("nondegenerate-cubic");
    const double eps = 0.4;
    spec.H = spec.H.mapped([&](MonoKey key, Complex v) {
        return total_degree(key) >= 3 ? eps * v : v;
    });
    KamParams params;
    params.steps = 2;
    params.skip_bnf = true;
    NormalFormState st = normal_form(spec, params);

    std::vector<double> m;
    m.push_back(st.diagnostics.front().majorant_before);
    rep.rows.push_back({0.0, m.back(), 0.0});
    double m_fit = 0.0;
    for (const auto& d : st.diagnostics) {
        m.push_back(d.majorant_after);
        m_fit = std::max(m_fit, d.m_residual);
        rep.rows.push_back({double(d.step), d.majorant_after, d.m_residual});
    }
    double slope = (std::log(m[2]) - std::log(m[1])) /
                   (std::log(m[1]) - std::log(m[0]));
    add_property(rep, "contraction-slope-min", slope >= 1.7, slope, 1.7);
    add_property(rep, "contraction-slope-max", slope <= 2.3, slope, 2.3);
    add_property(rep, "counterterm-fit-residual", m_fit <= 1e-11, m_fit, 1e-11);
    return rep;
}

ExperimentReport scenario_theorem_a_degenerate(std::uint64_t) {
    ExperimentReport rep;
    rep.name = "theorem-A-degenerate";
    rep.columns = {"s", "freq_deviation"};
    KamParams params;
    NormalFormState st = normal_form(make_preset("degenerate-r1"), params);
    FrequencyJet freq = frequency_map(st);
    std::vector<double> gamma = preset_degenerate_direction("degenerate-r1");
    double worst = 0.0;
    for (int k = -40; k <= 40; ++k) {
        double s = 0.05 * double(k) / 40.0;
        std::vector<double> c = {s * gamma[0], s * gamma[1]};
        std::vector<double> om = freq.evaluate_real(c);
        double dev = 0.0;
        for (int i = 0; i < 2; ++i)
            dev = std::max(dev, std::abs(om[i] - st.omega.omega0[i]));
        rep.rows.push_back({s, dev});
        worst = std::max(worst, dev);
    }
    add_property(rep, "frequency-pinned-on-line", worst <= 1e-10, worst, 1e-10);

    Complex s(0.0, 0.02);
    std::vector<Complex> c_star = {s * gamma[0], s * gamma[1]};
    TorusCandidate torus = build_torus(st, c_star, 12);
    add_property(rep, "complex-torus-residual", torus.residual <= 1e-8,
                 torus.residual, 1e-8);
    add_property(rep, "complex-torus-not-real", !torus.real_torus,
                 torus.real_torus ? 1.0 : 0.0, 0.0);
    return rep;
}

ExperimentReport scenario_russmann_line(std::uint64_t) {
    ExperimentReport rep;
    rep.name = "russmann-line";
    rep.columns = {"c1", "c2", "perp_component"};
    KamParams params;
    NormalFormState st = normal_form(make_preset("russmann-line"), params);
    FrequencyJet freq = frequency_map(st);
    const std::vector<double>& w0 = st.omega.omega0;
    const double norm2 = dot(w0, w0);
    double worst = 0.0;
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) {
            std::vector<double> c = {0.01 * a, 0.01 * b};
            std::vector<double> om = freq.evaluate_real(c);
            double pr = dot(om, w0) / norm2;
            double perp =
                std::hypot(om[0] - pr * w0[0], om[1] - pr * w0[1]);
            rep.rows.push_back({c[0], c[1], perp});
            worst = std::max(worst, perp);
        }
    }
    add_property(rep, "frequency-parallel-to-omega0", worst <= 1e-9, worst,
                 1e-9);
    return rep;
}

ExperimentReport scenario_torus_scaling(std::uint64_t) {
    ExperimentReport rep;
    rep.name = "torus-scaling";
    rep.columns = {"radius", "residual"};
    KamParams params;
    NormalFormState st = normal_form(make_preset("nondegenerate-cubic"), params);

    std::vector<double> radii = {0.05, 0.025, 0.0125};
    std::vector<double> residuals;
    for (double r : radii) {
        std::vector<Complex> c_star = {Complex(r, 0.0), Complex(r, 0.0)};
        TorusCandidate torus = build_torus(st, c_star, 16);
        residuals.push_back(std::max(torus.residual, 1e-300));
        rep.rows.push_back({r, torus.residual});
    }
    double slope = std::log(residuals.front() / residuals.back()) /
                   std::log(radii.front() / radii.back());
    add_property(rep, "residual-scaling-exponent", slope >= 2.7, slope, 2.7);

    const double r = radii.back();
    std::vector<Complex> c_star = {Complex(r, 0.0), Complex(r, 0.0)};
    TorusCandidate torus = build_torus(st, c_star, 8);
    std::vector<TruncatedSeries> actions = torus_action_functions(st, c_star);
    std::vector<double> start = {std::sqrt(2.0 * r), std::sqrt(2.0 * r), 0.0,
                                 0.0};
    FlowResult flow = integrate_flow(st.H_base, start, 200.0, 1e-11, actions);
    add_property(rep, "flow-energy-drift", flow.energy_drift <= 1e-8,
                 flow.energy_drift, 1e-8);
    double drift_cap = 10.0 * torus.residual + 1e-10;
    add_property(rep, "flow-action-drift", flow.max_invariant_drift <= drift_cap,
                 flow.max_invariant_drift, drift_cap);
    return rep;
}

ExperimentReport scenario_theorem_b_density(std::uint64_t seed) {
    HamiltonianSpec spec = make_preset("nondegenerate-cubic");
    KamParams params;
    BNFResult bnf = birkhoff_normal_form(spec, 2 * params.q + 1);
    TransversalityReport trans = transversality_params(bnf, 2, 10);
    NormalFormState st = normal_form(spec, params);
    FrequencyJet freq = frequency_map(st);
    DensityParams dp;
    dp.seed = seed;
    ExperimentReport rep = density_experiment(freq, trans, dp);
    rep.name = "theorem-B-density";
    return rep;
}

ExperimentReport scenario_measure_lemma(std::uint64_t seed) {
    MeasureConfig clean;
    clean.eps_scale = 0.0;
    clean.sigma_density = 1.0;
    clean.seed = seed;
    ExperimentReport a = measure_mc(clean);

    MeasureConfig perturbed;
    perturbed.eps_scale = 1.0;
    perturbed.sigma_density = 0.95;
    perturbed.seed = seed;
    ExperimentReport b = measure_mc(perturbed);

    ExperimentReport rep;
    rep.name = "measure-lemma";
    rep.columns = a.columns;
    rep.rows = a.rows;
    rep.rows.insert(rep.rows.end(), b.rows.begin(), b.rows.end());
    double clean_ratio = a.rows.front()[3];
    add_property(rep, "unperturbed-ratio-unit",
                 std::abs(clean_ratio - 1.0) <= 0.01, clean_ratio, 1.0);
    for (const auto& p : b.properties) rep.properties.push_back(p);
    return rep;
}

}  // namespace

const std::vector<Scenario>& scenarios() {
    static const std::vector<Scenario> list = {
        {"freq-jet-identity",
         "frequency map agrees with the Birkhoff invariant gradient",
         scenario_freq_jet_identity},
        {"kam-contraction",
         "quadratic contraction of the bracket majorant across steps",
         scenario_kam_contraction},
        {"theorem-A-degenerate",
         "frequency pinned to omega0 along the degenerate direction",
         scenario_theorem_a_degenerate},
        {"russmann-line",
         "frequency image confined to the line through omega0",
         scenario_russmann_line},
        {"torus-scaling",
         "torus defect scaling in the parameter radius and flow drift",
         scenario_torus_scaling},
        {"theorem-B-density",
         "Diophantine density of the frequency image near omega0",
         scenario_theorem_b_density},
        {"measure-lemma",
         "Monte-Carlo measure ratio for the perturbed polar chart",
         scenario_measure_lemma},
    };
    return list;
}

ExperimentReport run_scenario(const std::string& name, std::uint64_t seed) {
    for (const auto& s : scenarios())
        if (s.name == name) return s.run(seed);
    std::string msg = "unknown scenario '" + name + "'; available:";
    for (const auto& s : scenarios()) msg += " " + s.name;
    throw std::invalid_argument(msg);
}

}  // namespace kamtori
