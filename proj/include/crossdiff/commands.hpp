#pragma once

#include <string>

#include "crossdiff/config.hpp"

namespace crossdiff {

struct CommandOptions {
    std::string out_dir = "out";
    int jobs = 1;
    std::string stepper_override;  // evolve only
};

// Exit codes: 0 success, 1 solver failure, 2 configuration error.
int cmd_equilibrium(const RunConfig& cfg, const CommandOptions& opts);
int cmd_evolve(const RunConfig& cfg, const CommandOptions& opts);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opts);
int cmd_stability(const RunConfig& cfg, const CommandOptions& opts);

}  // namespace crossdiff
