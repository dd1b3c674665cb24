#pragma once

#include <string>
#include <vector>

#include "ouswitch/piecewise.hpp"
#include "ouswitch/simulate.hpp"
#include "ouswitch/solver.hpp"
#include "ouswitch/verify.hpp"

// Configuration, persistence, plot/grid emission and command dispatch.
namespace ouswitch {

struct RunConfig {
    ModelParams params{1.0, 0.0, 1.0, 0.3, 0.1, 0.05};
    int n_max = 5;
    SolverSettings solver;
    GridSpec grid;
    SimConfig sim;
};

// Strict-schema JSON config: unknown keys are errors, parameters are
// validated (including the structural feasibility check) before returning.
RunConfig load_config(const std::string& path);

void save_store(const SolutionStore& store, const std::string& path);
SolutionStore load_store(const std::string& path);

// Canonical JSON serialization (shared by save_store and determinism tests).
std::string store_to_json(const SolutionStore& store);

std::string report_to_json(const VerifyReport& report);

// CSV with header z,xi,n,value,d1,region,piece_index,target; z-major order.
void emit_grid(const SolutionStore& store, const GridSpec& spec,
               const std::string& path);

// Three SVG figure analogs in out_dir: figure1.svg (n in {0,1} with switch
// arrows), figure2.svg (n in {0,1} curves), figure3.svg (all n).
void emit_plot(const SolutionStore& store, const std::string& out_dir);

// exit status: 0 success, 1 check failure, 2 usage/config error
int run_cli(const std::vector<std::string>& args);

}  // namespace ouswitch
