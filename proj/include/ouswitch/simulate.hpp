#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ouswitch/piecewise.hpp"

// Monte Carlo validation of the solved policy: exact OU sampling, execution
// of the boundary-triggered switching strategy, and the discounted payoff.
namespace ouswitch {

struct SimConfig {
    double z0 = 0.0;
    Regime xi0 = 0;
    int n = 0;           // remaining switches
    double dt = 1e-3;
    double horizon = 80.0;
    long paths = 100000;
    std::uint64_t seed = 42;
};

struct SimulationRecord {
    std::vector<std::pair<double, Regime>> switches;  // (time, new regime)
    double reward_integral = 0.0;   // discounted running reward
    double switch_cost = 0.0;       // discounted transaction costs
    double total = 0.0;
};

// Exact one-step OU transition: z e^{-theta dt} + s N, s^2 = (1-e^{-2 theta dt})/2.
double ou_step(double z, double theta, double dt, double gaussian);

// One controlled path under the solved policy, with a per-path deterministic
// substream derived from (config.seed, path_index).
SimulationRecord run_policy(const SolutionStore& store, const SimConfig& config,
                            long path_index);

struct McResult {
    double mean = 0.0;
    double stderr_ = 0.0;
    double truncation_bound = 0.0;  // e^{-delta horizon} * sup grid |v|
};

McResult mc_value(const SolutionStore& store, const SimConfig& config);

}  // namespace ouswitch
