#include "spinsplit/config.hpp"

#include <fstream>
#include <set>

#include "spinsplit/errors.hpp"

namespace spinsplit {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& section,
                    const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("section '" + section + "' must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        try {
            j.at(key).get_to(out);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

std::vector<std::vector<int>> parse_sizes(const json& arr) {
    std::vector<std::vector<int>> sizes;
    if (!arr.is_array()) throw ConfigError("sweep.sizes must be an array");
    for (const auto& e : arr) {
        if (e.is_number_integer())
            sizes.push_back({e.get<int>()});
        else if (e.is_array())
            sizes.push_back(e.get<std::vector<int>>());
        else
            throw ConfigError("sweep.sizes entries must be integers or integer arrays");
    }
    return sizes;
}

}  // namespace

RunConfig parse_config(const json& j) {
    reject_unknown(j, "", {"model", "solver", "sweep", "trotter", "order", "peierls", "fit",
                           "output"});
    RunConfig c;

    if (j.contains("model")) {
        const json& m = j.at("model");
        reject_unknown(m, "model",
                       {"name", "L", "nu", "extents", "terms", "max_support", "perturbation_axis",
                        "perturbation_seed_sites", "perturbation_seed_term", "epsilon"});
        get_to(m, "name", c.model.name);
        get_to(m, "L", c.model.L);
        get_to(m, "nu", c.model.nu);
        get_to(m, "extents", c.model.extents);
        get_to(m, "terms", c.model.terms);
        get_to(m, "max_support", c.model.max_support);
        get_to(m, "perturbation_axis", c.model.perturbation_axis);
        get_to(m, "perturbation_seed_sites", c.model.perturbation_seed_sites);
        get_to(m, "perturbation_seed_term", c.model.perturbation_seed_term);
        get_to(m, "epsilon", c.model.epsilon);
        if (c.model.name != "ising" && c.model.name != "toric" && c.model.name != "custom")
            throw ConfigError("model.name must be ising, toric or custom");
        if (c.model.perturbation_axis != "X" && c.model.perturbation_axis != "Z")
            throw ConfigError("model.perturbation_axis must be X or Z");
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        reject_unknown(s, "solver",
                       {"k", "tol", "cluster_tol", "seed", "max_spins", "max_basis",
                        "max_restarts", "dense_cutoff", "method"});
        get_to(s, "k", c.solver.k);
        get_to(s, "tol", c.solver.tol);
        get_to(s, "cluster_tol", c.solver.cluster_tol);
        get_to(s, "seed", c.solver.seed);
        get_to(s, "max_spins", c.solver.max_spins);
        get_to(s, "max_basis", c.solver.max_basis);
        get_to(s, "max_restarts", c.solver.max_restarts);
        get_to(s, "dense_cutoff", c.solver.dense_cutoff);
        get_to(s, "method", c.solver.method);
        if (c.solver.method != "auto" && c.solver.method != "dense" && c.solver.method != "krylov")
            throw ConfigError("solver.method must be auto, dense or krylov");
        if (c.solver.max_spins > kHardMaxSites)
            throw ConfigError("solver.max_spins exceeds the hard cap of " +
                              std::to_string(kHardMaxSites));
    }

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, "sweep", {"sizes", "epsilons", "m"});
        if (s.contains("sizes")) c.sweep.sizes = parse_sizes(s.at("sizes"));
        get_to(s, "epsilons", c.sweep.epsilons);
        get_to(s, "m", c.sweep.m);
    }

    if (j.contains("trotter")) {
        const json& t = j.at("trotter");
        reject_unknown(t, "trotter", {"beta", "steps", "mode", "probes"});
        get_to(t, "beta", c.trotter.beta);
        get_to(t, "steps", c.trotter.steps);
        get_to(t, "mode", c.trotter.mode);
        get_to(t, "probes", c.trotter.probes);
        if (c.trotter.mode != "exact" && c.trotter.mode != "stochastic")
            throw ConfigError("trotter.mode must be exact or stochastic");
    }

    if (j.contains("order")) {
        const json& o = j.at("order");
        reject_unknown(o, "order", {"observable_axis", "states"});
        get_to(o, "observable_axis", c.order.observable_axis);
        get_to(o, "states", c.order.states);
        if (c.order.observable_axis != "X" && c.order.observable_axis != "Z")
            throw ConfigError("order.observable_axis must be X or Z");
    }

    if (j.contains("peierls")) {
        const json& p = j.at("peierls");
        reject_unknown(p, "peierls", {"max_region", "ground_config"});
        get_to(p, "max_region", c.peierls.max_region);
        get_to(p, "ground_config", c.peierls.ground_config);
    }

    if (j.contains("fit")) {
        const json& f = j.at("fit");
        reject_unknown(f, "fit", {"table", "epsilon", "delta"});
        get_to(f, "table", c.fit.table);
        if (f.contains("epsilon")) {
            c.fit.has_epsilon = true;
            get_to(f, "epsilon", c.fit.epsilon);
        }
        get_to(f, "delta", c.fit.delta);
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, "output", {"dir", "formats"});
        get_to(o, "dir", c.output.dir);
        get_to(o, "formats", c.output.formats);
    }

    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

nlohmann::json resolved_config(const RunConfig& c) {
    json j;
    j["model"] = {{"name", c.model.name},
                  {"L", c.model.L},
                  {"nu", c.model.nu},
                  {"extents", c.model.extents},
                  {"terms", c.model.terms},
                  {"max_support", c.model.max_support},
                  {"perturbation_axis", c.model.perturbation_axis},
                  {"perturbation_seed_sites", c.model.perturbation_seed_sites},
                  {"perturbation_seed_term", c.model.perturbation_seed_term},
                  {"epsilon", c.model.epsilon}};
    j["solver"] = {{"k", c.solver.k},
                   {"tol", c.solver.tol},
                   {"cluster_tol", c.solver.cluster_tol},
                   {"seed", c.solver.seed},
                   {"max_spins", c.solver.max_spins},
                   {"max_basis", c.solver.max_basis},
                   {"max_restarts", c.solver.max_restarts},
                   {"dense_cutoff", c.solver.dense_cutoff},
                   {"method", c.solver.method}};
    j["sweep"] = {{"sizes", c.sweep.sizes}, {"epsilons", c.sweep.epsilons}, {"m", c.sweep.m}};
    j["trotter"] = {{"beta", c.trotter.beta},
                    {"steps", c.trotter.steps},
                    {"mode", c.trotter.mode},
                    {"probes", c.trotter.probes}};
    j["order"] = {{"observable_axis", c.order.observable_axis}, {"states", c.order.states}};
    j["peierls"] = {{"max_region", c.peierls.max_region},
                    {"ground_config", c.peierls.ground_config}};
    j["fit"] = {{"table", c.fit.table}, {"epsilon", c.fit.epsilon}, {"delta", c.fit.delta}};
    j["output"] = {{"dir", c.output.dir}, {"formats", c.output.formats}};
    return j;
}

SolverOptions solver_options(const RunConfig& c) {
    SolverOptions o;
    o.k = c.solver.k;
    o.tol = c.solver.tol;
    o.cluster_tol = c.solver.cluster_tol;
    o.seed = c.solver.seed;
    o.max_spins = c.solver.max_spins;
    o.max_basis = c.solver.max_basis;
    o.max_restarts = c.solver.max_restarts;
    o.dense_cutoff = c.solver.dense_cutoff;
    if (c.solver.method == "dense")
        o.method = SolverOptions::Method::dense;
    else if (c.solver.method == "krylov")
        o.method = SolverOptions::Method::krylov;
    else
        o.method = SolverOptions::Method::automatic;
    return o;
}

HamiltonianSpec build_config_model(const RunConfig& c) {
    HamiltonianSpec h;
    if (c.model.name == "toric") {
        if (c.model.L < 2) throw ConfigError("model.L must be >= 2 for the toric code");
        h = build_toric_code(c.model.L);
    } else {
        std::vector<int> extents = c.model.extents;
        if (extents.empty()) throw ConfigError("model.extents is required for " + c.model.name);
        int nu = c.model.nu > 0 ? c.model.nu : static_cast<int>(extents.size());
        TorusLattice lat = TorusLattice::build(nu, extents);
        if (c.model.name == "ising")
            h = build_ising(lat);
        else
            h = build_custom(lat, c.model.terms, c.model.max_support);
    }
    if (h.n_sites() > c.solver.max_spins)
        throw ConfigError("model has " + std::to_string(h.n_sites()) +
                          " spins, above solver.max_spins = " + std::to_string(c.solver.max_spins));
    if (!c.model.perturbation_seed_term.empty()) {
        PauliTerm seed = parse_pauli_term(c.model.perturbation_seed_term, h.n_sites());
        h.perturbation = build_seed_perturbation(h.lattice, seed);
    } else if (!c.model.perturbation_seed_sites.empty()) {
        h.perturbation = build_field_perturbation(h.lattice, c.model.perturbation_axis[0],
                                                  c.model.perturbation_seed_sites);
    }
    h.epsilon = c.model.epsilon;
    return h;
}

SweepPlan sweep_plan(const RunConfig& c) {
    SweepPlan plan;
    plan.model = c.model.name;
    plan.nu = c.model.nu;
    plan.sizes = c.sweep.sizes;
    plan.epsilons = c.sweep.epsilons;
    plan.m = c.sweep.m;
    plan.perturbation_axis = c.model.perturbation_axis[0];
    plan.seed_support = c.model.perturbation_seed_sites;
    plan.seed_term = c.model.perturbation_seed_term;
    return plan;
}

}  // namespace spinsplit
