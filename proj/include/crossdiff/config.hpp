#pragma once

#include <map>
#include <string>
#include <vector>

#include "crossdiff/grid.hpp"
#include "crossdiff/model.hpp"
#include "crossdiff/stationary.hpp"

namespace crossdiff {

// Raw sectioned key-value file: '[section]' headers, 'key = value' lines,
// '#' comments. Parsing keeps no defaults; validation happens in RunConfig.
struct ConfigFile {
    // section -> key -> value, plus the original line order for the echo.
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::vector<std::string> echo;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin);
};

struct EquilibriumConfig {
    double tol = 1e-8;
    int max_iter = 40;
    double eps_ref = 0.0;  // 0: default reference diameter
};

struct EvolveConfig {
    std::string stepper = "mol";  // mol | regularized
    std::string initial = "pointparticle";  // pointparticle | uniform
    double t_end = 1.0;
    double rtol = 1e-8;
    double atol = 1e-12;
    bool stop_at_stationary = false;
    double tau = 1e-2;   // regularized stepper
    int steps = 100;     // regularized stepper
    int snapshot_stride = 0;  // 0: final state only
};

struct SweepConfig {
    std::string axis = "epsilon";  // epsilon | theta_r
    std::vector<double> values;
    double newton_tol = 1e-8;
    int newton_max_iter = 40;
    double t_max = 1e5;
};

struct StabilityConfig {
    int k = 12;
    bool perturbed = false;
    std::vector<double> eps_values;  // optional leading-eigenvalue sweep
};

struct RunConfig {
    ModelParams model;
    Grid1D grid;
    EquilibriumConfig equilibrium;
    EvolveConfig evolve;
    SweepConfig sweep;
    StabilityConfig stability;
    std::vector<std::string> echo;

    // Validates types, ranges, and rejects unknown sections or keys.
    static RunConfig load(const ConfigFile& file);
    static RunConfig load_file(const std::string& path);
};

}  // namespace crossdiff
