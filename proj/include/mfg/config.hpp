#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mfg/equilibrium.hpp"
#include "mfg/simulator.hpp"

#include "json.hpp"

namespace mfg {

/// Invalid or malformed configuration; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed experiment description: model + profit + solver + simulation
/// blocks, with defaults filled in. The raw (post-override) JSON is kept for
/// provenance and for parameter re-dressing in sweeps.
struct ExperimentConfig {
    DiffusionModel diffusion = DiffusionModel::gbm(2.0, 1.0);
    ProfitModel profit = ProfitModel::isoelastic(0.6);
    Mode mode = Mode::ergodic;
    double r = 0.0;  // discount rate (discounted mode)
    SolverConfig solver;
    SimConfig sim;
    std::size_t n_players = 50;
    std::vector<std::size_t> n_list = {2, 5, 20, 50};
    std::vector<double> deviation_grid;  // empty => 21 points in [x*/3, 3x*]
    bool init_stationary = true;         // mu_0 = stationary law vs x_anchor
    std::string output_dir = ".";
    nlohmann::json raw;
};

/// Apply "dotted.path=json_value" overrides, then build the config.
/// Throws ConfigError on malformed input.
ExperimentConfig parse_config(nlohmann::json j,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

}  // namespace mfg
