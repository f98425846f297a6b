#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsplit/analysis.hpp"
#include "spinsplit/eigensolve.hpp"
#include "spinsplit/models.hpp"
#include "spinsplit/trotter.hpp"

namespace spinsplit {

// Declarative run configuration; one file, one reproducible experiment.
// Unknown keys anywhere are rejected (typo safety) and every run emits a
// resolved echo of the effective values.
struct RunConfig {
    struct Model {
        std::string name = "ising";  // ising | toric | custom
        int L = 0;                   // toric linear size
        int nu = 1;
        std::vector<int> extents;
        std::vector<std::string> terms;  // custom classical terms
        int max_support = 4;
        std::string perturbation_axis = "X";
        std::vector<int> perturbation_seed_sites = {0};
        std::string perturbation_seed_term;  // optional explicit seed
        double epsilon = 0.0;
    } model;

    struct Solver {
        int k = 6;
        double tol = 1e-10;
        double cluster_tol = 1e-7;
        std::uint64_t seed = 0x5eed1e55u;
        int max_spins = 20;
        int max_basis = 96;
        int max_restarts = 400;
        int dense_cutoff = 12;
        std::string method = "auto";  // auto | dense | krylov
    } solver;

    struct Sweep {
        std::vector<std::vector<int>> sizes;
        std::vector<double> epsilons;
        int m = 2;
    } sweep;

    struct Trotter {
        double beta = 1.0;
        std::vector<int> steps = {16, 32, 64, 128};
        std::string mode = "exact";  // exact | stochastic
        int probes = 64;
    } trotter;

    struct Order {
        std::string observable_axis = "Z";
        int states = 2;
    } order;

    struct Peierls {
        int max_region = 4;
        std::uint64_t ground_config = 0;
    } peierls;

    struct Fit {
        std::string table;
        double epsilon = 0;
        double delta = 0;  // 0 = not requested
        bool has_epsilon = false;
    } fit;

    struct Output {
        std::string dir = "out";
        std::vector<std::string> formats = {"csv"};
    } output;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json resolved_config(const RunConfig& c);

SolverOptions solver_options(const RunConfig& c);
// Builds the configured model with its perturbation at config epsilon.
HamiltonianSpec build_config_model(const RunConfig& c);
SweepPlan sweep_plan(const RunConfig& c);

}  // namespace spinsplit
