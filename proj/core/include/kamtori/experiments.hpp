// Scripted end-to-end benchmark scenarios and Monte-Carlo experiments.
#ifndef KAMTORI_EXPERIMENTS_HPP
#define KAMTORI_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kamtori/bnf.hpp"
#include "kamtori/kam.hpp"

namespace kamtori {

struct PropertyResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct ExperimentReport {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<PropertyResult> properties;

    bool all_pass() const;
    /// Deterministic CSV: header, data rows, then "# property" trailer lines.
    std::string csv() const;
};

struct DensityParams {
    std::vector<double> kappas = {1e-2, 3e-3, 1e-3};
    double tau = 3.0;
    double eta_constant = 4.0;  // the 1/C'' prefactor divides by this
    int dc_k_range = 50;
    int samples = 100000;
    std::uint64_t seed = 0;
    std::vector<double> eps_ladder = {2e-3, 1e-3, 5e-4};
};

/// Fraction of sampled frequencies Omega(c) passing the finite-range
/// Diophantine test per kappa, plus per-resonance excluded-measure fits.
ExperimentReport density_experiment(const FrequencyJet& freq,
                                    const TransversalityReport& trans,
                                    const DensityParams& params);

struct MeasureConfig {
    int d = 2;
    double eta = 0.1;
    double sigma_density = 0.95;
    double eps_scale = 1.0;  // 1 = at the jacobian bound, 0 = unperturbed
    int samples = 1000000;
    std::uint64_t seed = 0;
    double nu = 0.05;
};

/// Monte-Carlo measure ratio of the perturbed polar image of a stripe set
/// inside the product of disks of radius eta.
ExperimentReport measure_mc(const MeasureConfig& config);

struct Scenario {
    std::string name;
    std::string description;
    std::function<ExperimentReport(std::uint64_t seed)> run;
};

const std::vector<Scenario>& scenarios();
ExperimentReport run_scenario(const std::string& name, std::uint64_t seed = 0);

}  // namespace kamtori

#endif
