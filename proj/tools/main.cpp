// spinsplit: build commuting-term spin Hamiltonians, perturb them, and
// measure ground-space splitting, scaling laws, Trotterized traces and the
// structural preconditions (commutativity, gap, Peierls, symmetry, order
// observable) from a declarative JSON config.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "spinsplit/analysis.hpp"
#include "spinsplit/config.hpp"
#include "spinsplit/errors.hpp"
#include "spinsplit/models.hpp"
#include "spinsplit/trotter.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace spinsplit;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir;
    bool deterministic = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
};

RunConfig load_and_resolve(const GlobalArgs& g) {
    if (g.config_path.empty()) throw ConfigError("--config PATH is required");
    RunConfig c = load_config(g.config_path);
    if (!g.out_dir.empty()) c.output.dir = g.out_dir;
    if (g.seed_set) c.solver.seed = g.seed;
    return c;
}

fs::path prepare_out_dir(const RunConfig& c) {
    fs::path dir(c.output.dir);
    fs::create_directories(dir);
    std::ofstream echo(dir / "resolved_config.json");
    echo << resolved_config(c).dump(2) << "\n";
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

json symmetry_json(const SymmetryReport& r) {
    json orbit = json::array();
    for (mask_t m : r.orbit) orbit.push_back(m);
    return {{"generators", r.generator_count},
            {"commutes_with_hamiltonian", r.commutes_with_hamiltonian},
            {"max_commutator_residual", r.max_commutator_residual},
            {"transitive_on_ground_basis", r.transitive_on_ground_basis},
            {"orbit", orbit}};
}

int cmd_build(const GlobalArgs& g) {
    RunConfig c = load_and_resolve(g);
    fs::path dir = prepare_out_dir(c);
    HamiltonianSpec h = build_config_model(c);
    SolverOptions opt = solver_options(c);

    ClassicalReport cls = verify_classical(h);
    if (!cls.ok()) {
        std::cerr << "classical verification failed:";
        for (auto [i, j] : cls.offending_pairs)
            std::cerr << " [" << to_string(h.classical_terms.terms[i]) << " vs "
                      << to_string(h.classical_terms.terms[j]) << "]";
        if (!cls.support_ok)
            std::cerr << " max support " << cls.max_support_seen << " exceeds C="
                      << cls.support_bound;
        std::cerr << "\n";
        throw VerificationError("model is not classical within the configured bounds");
    }

    double gap = spectral_gap(h, opt);
    SolverOptions gopt = opt;
    gopt.k = std::min<int>(std::max(opt.k, 6), 1 << h.n_sites());
    gopt.want_vectors = false;
    Spectrum low = solve_lowest(h.classical_terms, gopt);
    DegeneracyClusters clusters = cluster_degeneracies(low, opt.cluster_tol);
    size_t degeneracy = clusters.clusters.front().members.size();
    bool degeneracy_saturated = degeneracy == low.eigenvalues.size();
    double ground_energy = low.eigenvalues.front();

    auto gens = builtin_symmetry_generators(h);
    json report{{"model", h.model},
                {"n_spins", h.n_sites()},
                {"n_classical_terms", h.classical_terms.size()},
                {"classical", cls.all_commute},
                {"max_support_seen", cls.max_support_seen},
                {"support_bound", cls.support_bound},
                {"ground_energy", ground_energy},
                {"ground_degeneracy", degeneracy},
                {"ground_degeneracy_saturated_k", degeneracy_saturated},
                {"spectral_gap", gap},
                {"perturbation_terms", h.perturbation.terms.size()},
                {"perturbation_off_diagonal", h.perturbation.off_diagonal},
                {"epsilon", h.epsilon}};
    if (!gens.empty()) {
        SymmetryReport sym = check_symmetry(h, gens, builtin_ground_labels(h));
        report["symmetry"] = symmetry_json(sym);
    }
    write_json(dir / "build_report.json", report);

    std::cout << "model: " << h.model << "  spins: " << h.n_sites()
              << "  terms: " << h.classical_terms.size() << "\n"
              << "classical: " << (cls.all_commute ? "yes" : "no")
              << "  support <= " << cls.support_bound << ": " << (cls.support_ok ? "yes" : "no")
              << "\n"
              << "ground energy: " << ground_energy << "  m=" << degeneracy << "  gap=" << gap
              << "\n";
    if (!h.perturbation.empty())
        std::cout << "perturbation: " << h.perturbation.terms.size() << " translates, "
                  << (h.perturbation.off_diagonal ? "off-diagonal" : "not off-diagonal") << "\n";
    return 0;
}

int cmd_spectrum(const GlobalArgs& g) {
    RunConfig c = load_and_resolve(g);
    fs::path dir = prepare_out_dir(c);
    HamiltonianSpec h = build_config_model(c);
    SolverOptions opt = solver_options(c);
    Spectrum s = solve_lowest(h.full_operator(), opt);

    json rec{{"model", h.model},         {"n_spins", h.n_sites()}, {"epsilon", h.epsilon},
             {"k", opt.k},               {"method", s.method},     {"seed", opt.seed},
             {"eigenvalues", json::array()}, {"residuals", json::array()}};
    for (int i = 0; i < opt.k && i < static_cast<int>(s.eigenvalues.size()); ++i)
        rec["eigenvalues"].push_back(s.eigenvalues[i]);
    for (double r : s.residual_norms) rec["residuals"].push_back(r);
    write_json(dir / "spectrum.json", rec);

    std::cout << "lowest eigenvalues (" << s.method << "):";
    for (int i = 0; i < opt.k && i < static_cast<int>(s.eigenvalues.size()); ++i)
        std::cout << ' ' << s.eigenvalues[i];
    std::cout << "\n";
    return 0;
}

int cmd_sweep(const GlobalArgs& g) {
    RunConfig c = load_and_resolve(g);
    fs::path dir = prepare_out_dir(c);
    if (c.sweep.epsilons.empty()) throw ConfigError("sweep.epsilons must not be empty");
    if (c.sweep.sizes.empty()) throw ConfigError("sweep.sizes must not be empty");
    SweepPlan plan = sweep_plan(c);
    SolverOptions opt = solver_options(c);

    fs::path csv_path = dir / "splitting.csv";
    std::set<SweepKey> done;
    bool fresh = !fs::exists(csv_path);
    if (!fresh) {
        SplittingTable existing = read_splitting_csv(csv_path.string());
        for (const auto& r : existing.rows)
            if (r.model == c.model.name) done.insert({r.extents, r.epsilon});
        if (existing.rows.empty()) fresh = true;
    }
    std::ofstream csv(csv_path, fresh ? std::ios::trunc : std::ios::app);
    if (fresh) csv << splitting_csv_header() << "\n";

    size_t failures = 0, cells = 0;
    SplittingTable table =
        sweep_splitting(plan, opt, done, [&](const SplittingRecord& r) {
            ++cells;
            if (r.method == "failed") {
                ++failures;
                std::cerr << "cell (" << r.extents << ", eps=" << r.epsilon
                          << ") failed: " << r.error << "\n";
            }
            csv << to_csv_row(r) << "\n";
            csv.flush();
            std::cout << r.extents << "  eps=" << r.epsilon
                      << "  splitting=" << r.splitting_spectral << "  gap=" << r.gap_to_next
                      << (r.floor_flag ? "  [<= floor]" : "")
                      << (r.dissolved ? "  [cluster dissolved]" : "") << "\n";
        });

    std::cout << "sweep wrote " << cells << " new cells to " << csv_path.string() << "\n";
    if (cells > 0 && failures == cells) throw SolverError("all sweep cells failed");
    return 0;
}

int cmd_fit(const GlobalArgs& g, const std::string& table_flag, double eps_flag, bool eps_set,
            double delta_flag, bool delta_set) {
    RunConfig c;
    if (!g.config_path.empty()) c = load_config(g.config_path);
    if (!g.out_dir.empty()) c.output.dir = g.out_dir;
    std::string table = !table_flag.empty() ? table_flag : c.fit.table;
    if (table.empty()) throw ConfigError("fit needs a table path (--table or fit.table)");
    if (eps_set) {
        c.fit.epsilon = eps_flag;
        c.fit.has_epsilon = true;
    }
    if (delta_set) c.fit.delta = delta_flag;
    if (!c.fit.has_epsilon) throw ConfigError("fit needs an epsilon (--epsilon or fit.epsilon)");
    c.fit.table = table;
    prepare_out_dir(c);

    SplittingTable t = read_splitting_csv(table);
    std::vector<std::pair<double, double>> points;
    for (const auto& r : t.rows) {
        if (r.method == "failed" || r.floor_flag) continue;
        if (std::abs(r.epsilon - c.fit.epsilon) > 1e-12) continue;
        points.emplace_back(static_cast<double>(r.n_spins), r.splitting_spectral);
    }
    ScalingFit fit = fit_scaling(points);

    fs::path dir(c.output.dir);
    json rep{{"epsilon", c.fit.epsilon},
             {"points_used", fit.points_used},
             {"selected", to_string(fit.selected)},
             {"free_exponent", fit.free_exponent},
             {"free_exponent_rmse", fit.free_exponent_rmse}};
    for (const auto& [model, mf] : fit.fits)
        rep["models"][to_string(model)] = {
            {"c", mf.c}, {"intercept", mf.intercept}, {"rmse", mf.rmse}, {"valid", mf.valid}};
    std::cout << "selected model: " << to_string(fit.selected)
              << "  c=" << fit.fits.at(fit.selected).c
              << "  rmse=" << fit.fits.at(fit.selected).rmse << " (" << fit.points_used
              << " points)\n";
    if (c.fit.delta > 0) {
        double n0 = fit.smallest_volume_below(c.fit.delta);
        rep["delta"] = c.fit.delta;
        rep["n0"] = n0;
        std::cout << "smallest size with predicted splitting < " << c.fit.delta << ": " << n0
                  << "\n";
    }
    write_json(dir / "fit_report.json", rep);
    return 0;
}

int cmd_trotter(const GlobalArgs& g) {
    RunConfig c = load_and_resolve(g);
    fs::path dir = prepare_out_dir(c);
    HamiltonianSpec h = build_config_model(c);
    auto mode = c.trotter.mode == "exact" ? TrotterParams::Mode::exact
                                          : TrotterParams::Mode::stochastic;
    auto rows = trotter_convergence(h.classical_terms, h.perturbation_sum(), h.epsilon,
                                    c.trotter.beta, c.trotter.steps, mode, c.trotter.probes,
                                    c.solver.seed);
    std::ofstream csv(dir / "trotter.csv");
    csv << trotter_csv_header() << "\n";
    for (const auto& row : rows) {
        csv << to_csv_row(h.n_sites(), h.epsilon, c.trotter.beta, row, mode, c.trotter.probes)
            << "\n";
        std::cout << "steps=" << row.steps << "  value=" << row.value << "  exact=" << row.exact
                  << "  abs_error=" << row.abs_error << "  error*steps=" << row.error_times_steps
                  << "\n";
    }
    return 0;
}

int cmd_order(const GlobalArgs& g) {
    RunConfig c = load_and_resolve(g);
    fs::path dir = prepare_out_dir(c);
    HamiltonianSpec h = build_config_model(c);
    SolverOptions opt = solver_options(c);

    OperatorSum obs(h.n_sites());
    for (int s = 0; s < h.n_sites(); ++s)
        obs.add(PauliTerm::axis_string(h.n_sites(), c.order.observable_axis[0], {s}));

    SolverOptions sopt = opt;
    sopt.k = std::max(c.order.states + 1, opt.k);
    sopt.want_vectors = true;
    Spectrum s = solve_lowest(h.full_operator(), sopt);

    // States closer than the conditioning window are symmetry-resolved so
    // observable means are evaluated in sharp symmetry sectors.
    std::vector<StateVector> states(s.eigenvectors.begin(),
                                    s.eigenvectors.begin() +
                                        std::min<size_t>(c.order.states, s.eigenvectors.size()));
    auto gens = builtin_symmetry_generators(h);
    if (!gens.empty())
        states = resolve_states_by_symmetry(h.full_operator(), states, s.eigenvalues,
                                            gens.front());

    OrderReport rep = check_order_observable(h, obs, states);
    json jr{{"observable_axis", c.order.observable_axis},
            {"locality_ok", rep.locality_ok},
            {"mutual_commute_ok", rep.mutual_commute_ok},
            {"mean_values", rep.mean_values},
            {"second_moments", rep.second_moments},
            {"zeta", rep.zeta},
            {"n_spins", h.n_sites()},
            {"epsilon", h.epsilon}};
    write_json(dir / "order_report.json", jr);
    std::cout << "locality: " << (rep.locality_ok ? "ok" : "VIOLATED")
              << "  mutual commutation: " << (rep.mutual_commute_ok ? "ok" : "VIOLATED")
              << "  zeta=" << rep.zeta << "\n";
    for (size_t i = 0; i < rep.mean_values.size(); ++i)
        std::cout << "state " << i << ": <O>=" << rep.mean_values[i]
                  << "  <O^2>=" << rep.second_moments[i] << "\n";
    return 0;
}

int cmd_peierls(const GlobalArgs& g) {
    RunConfig c = load_and_resolve(g);
    fs::path dir = prepare_out_dir(c);
    HamiltonianSpec h = build_config_model(c);
    PeierlsReport rep = check_peierls(h, c.peierls.ground_config, c.peierls.max_region);
    const auto& min_sample = rep.samples.at(rep.min_index);
    json jr{{"rho", rep.rho},
            {"region_size_limit", rep.region_size_limit},
            {"samples", rep.samples.size()},
            {"min_sample",
             {{"deviation_mask", min_sample.deviation},
              {"energy", min_sample.energy},
              {"boundary", min_sample.boundary}}}};
    write_json(dir / "peierls_report.json", jr);
    std::cout << "rho=" << rep.rho << " over " << rep.samples.size()
              << " connected regions up to " << rep.region_size_limit << " sites\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"degeneracy splitting test bed for commuting-term spin Hamiltonians"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON run configuration")
        ->envname("SPINSPLIT_CONFIG");
    app.add_option("--out", g.out_dir, "output directory (overrides output.dir)")
        ->envname("SPINSPLIT_OUT");
    app.add_flag("--deterministic", g.deterministic,
                 "serial reductions and fixed seeds (bit-stable outputs)")
        ->envname("SPINSPLIT_DETERMINISTIC");
    auto* seed_opt =
        app.add_option("--seed", g.seed, "override solver.seed")->envname("SPINSPLIT_SEED");
    app.add_option("--threads", g.threads, "worker threads for the apply kernels")
        ->envname("SPINSPLIT_THREADS");

    auto* sub_build = app.add_subcommand("build", "build + verify the configured model");
    auto* sub_spectrum = app.add_subcommand("spectrum", "lowest eigenvalues of H(epsilon)");
    auto* sub_sweep = app.add_subcommand("sweep", "splitting over sizes x epsilons (resumable)");
    auto* sub_fit = app.add_subcommand("fit", "scaling-law fit of a splitting table");
    auto* sub_trotter = app.add_subcommand("trotter", "product-formula trace convergence");
    auto* sub_order = app.add_subcommand("order", "order-observable checks");
    auto* sub_peierls = app.add_subcommand("peierls", "Peierls constant by region enumeration");
    for (auto* sub : {sub_build, sub_spectrum, sub_sweep, sub_fit, sub_trotter, sub_order,
                      sub_peierls})
        sub->fallthrough();  // global flags may follow the verb

    std::string fit_table;
    double fit_eps = 0, fit_delta = 0;
    auto* fit_eps_opt = sub_fit->add_option("--epsilon", fit_eps, "epsilon column to fit");
    auto* fit_delta_opt = sub_fit->add_option("--delta", fit_delta, "accuracy target for N0");
    sub_fit->add_option("--table", fit_table, "splitting CSV path");

    CLI11_PARSE(app, argc, argv);

    g.seed_set = seed_opt->count() > 0;
    set_thread_count(g.deterministic ? 1 : g.threads);

    try {
        if (*sub_build) return cmd_build(g);
        if (*sub_spectrum) return cmd_spectrum(g);
        if (*sub_sweep) return cmd_sweep(g);
        if (*sub_fit)
            return cmd_fit(g, fit_table, fit_eps, fit_eps_opt->count() > 0, fit_delta,
                           fit_delta_opt->count() > 0);
        if (*sub_trotter) return cmd_trotter(g);
        if (*sub_order) return cmd_order(g);
        if (*sub_peierls) return cmd_peierls(g);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const VerificationError& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
