// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Heavier end-to-end runs than the unit suites; the toric
// L=3 cases solve a 2^18-dimensional space.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "spinsplit/analysis.hpp"
#include "spinsplit/errors.hpp"
#include "spinsplit/models.hpp"
#include "spinsplit/trotter.hpp"

namespace fs = std::filesystem;
using namespace spinsplit;

namespace {

struct Criterion {
    std::string name;
    std::function<std::string()> body;  // returns detail text; throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

HamiltonianSpec ising_ring_with_x_field(int L, double eps) {
    HamiltonianSpec h = build_ising(TorusLattice::build(1, {L}));
    h.perturbation = build_field_perturbation(h.lattice, 'X', {0});
    h.epsilon = eps;
    return h;
}

HamiltonianSpec toric_with_x_field(int L, double eps) {
    HamiltonianSpec h = build_toric_code(L);
    h.perturbation = build_field_perturbation(h.lattice, 'X', {0});
    h.epsilon = eps;
    return h;
}

// Exact toric ground frame by stabilizer projection (uniform superposition
// over the star-group orbit of each logical representative).
std::vector<StateVector> toric_stabilizer_ground_basis(const HamiltonianSpec& h) {
    std::vector<mask_t> star_masks;
    for (const auto& t : h.classical_terms.terms)
        if (t.x_mask != 0) star_masks.push_back(t.x_mask);
    star_masks.pop_back();
    std::vector<mask_t> group{0};
    for (mask_t m : star_masks) {
        size_t sz = group.size();
        for (size_t i = 0; i < sz; ++i) group.push_back(group[i] ^ m);
    }
    std::vector<StateVector> basis;
    const double amp = 1.0 / std::sqrt(static_cast<double>(group.size()));
    for (mask_t rep : builtin_ground_labels(h)) {
        StateVector v = StateVector::zero(h.n_sites());
        for (mask_t g : group) v.amp[rep ^ g] = complex_t{amp, 0};
        basis.push_back(std::move(v));
    }
    return basis;
}

// Random classical (mutually commuting) term set by rejection sampling, plus
// an arbitrary small perturbation.
OperatorSum random_commuting_plus_perturbation(int n, std::mt19937& rng) {
    std::uniform_int_distribution<int> axis(0, 3);
    std::uniform_real_distribution<double> cpos(0.3, 1.5), csmall(-0.15, 0.15);
    auto random_string = [&](double coeff) {
        PauliTerm t;
        t.n_sites = n;
        t.coeff = coeff;
        for (int s = 0; s < n; ++s) {
            switch (axis(rng)) {
                case 1: t.x_mask |= mask_t{1} << s; break;
                case 2: t.z_mask |= mask_t{1} << s; break;
                case 3: t.x_mask |= mask_t{1} << s; t.z_mask |= mask_t{1} << s; break;
                default: break;
            }
        }
        return t;
    };
    OperatorSum h(n);
    int wanted = n;
    for (int tries = 0; tries < 400 && static_cast<int>(h.size()) < wanted; ++tries) {
        PauliTerm t = random_string(cpos(rng));
        if (t.is_identity_string()) continue;
        bool ok = true;
        for (const auto& u : h.terms)
            if (!commutes(t, u)) ok = false;
        if (ok) h.add(t.as_shifted());
    }
    for (int i = 0; i < 3; ++i) {
        PauliTerm p = random_string(csmall(rng));
        if (!p.is_identity_string()) h.add(p);
    }
    return h;
}

int run_cli(const std::string& args, const fs::path& log) {
    std::string cmd = std::string(SPINSPLIT_BIN) + " " + args + " >> " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Shared heavy results, computed once and reused across criteria.
struct ToricL3Data {
    std::vector<StateVector> ground;  // unperturbed zero cluster
    std::vector<double> unperturbed;  // lowest 6 eigenvalues
    SplittingRecord perturbed;        // eps = 0.05, m = 4
};

ToricL3Data solve_toric_l3() {
    ToricL3Data data;
    SolverOptions opt;
    opt.method = SolverOptions::Method::krylov;

    HamiltonianSpec h0 = toric_with_x_field(3, 0.0);
    SolverOptions o6 = opt.with_k(6);
    Spectrum s = lowest_eigenpairs(h0.classical_terms, o6);
    data.unperturbed = s.eigenvalues;
    DegeneracyClusters cl = cluster_degeneracies(s, opt.cluster_tol);
    for (int idx : cl.clusters.front().members) data.ground.push_back(s.eigenvectors[idx]);

    data.perturbed = spectral_splitting(toric_with_x_field(3, 0.05), 4, opt, &data.ground);
    return data;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;
    ToricL3Data l3;  // filled by A1

    criteria.push_back({"A1 fourfold degeneracy at L=2 (dense) and L=3 (krylov, 2^18)", [&] {
        HamiltonianSpec h2 = build_toric_code(2);
        Spectrum d = dense_spectrum(h2.classical_terms, 0);
        for (int i = 0; i < 4; ++i) require(std::abs(d.eigenvalues[i]) <= 1e-9,
                                            "L=2 eigenvalue " + std::to_string(i) + " not zero");
        require(d.eigenvalues[4] - d.eigenvalues[3] >= 1.0, "L=2 fifth eigenvalue not >= 1 above");

        l3 = solve_toric_l3();
        for (int i = 0; i < 4; ++i)
            require(std::abs(l3.unperturbed[i]) <= 1e-9,
                    "L=3 eigenvalue " + std::to_string(i) + " not zero");
        require(l3.unperturbed[4] - l3.unperturbed[3] >= 1.0, "L=3 fifth eigenvalue not >= 1 above");
        require(l3.ground.size() == 4, "L=3 zero cluster is not fourfold");
        return "L=2 gap " + fmt(d.eigenvalues[4]) + ", L=3 gap " + fmt(l3.unperturbed[4]);
    }});

    criteria.push_back({"A2 splitting suppression with size (uniform X field, eps=0.05)", [&] {
        SolverOptions opt;
        HamiltonianSpec h2 = toric_with_x_field(2, 0.05);
        SplittingRecord r2 = spectral_splitting(h2, 4, opt);
        const SplittingRecord& r3 = l3.perturbed;
        require(r2.splitting_spectral > 0, "L=2 splitting is zero");
        double ratio = r3.splitting_spectral / r2.splitting_spectral;
        require(ratio < 0.5, "ratio " + fmt(ratio) + " not < 0.5");
        require(std::abs(r2.splitting_first_order) <= 1e-9,
                "L=2 first-order splitting " + fmt(r2.splitting_first_order));
        require(std::abs(r3.splitting_first_order) <= 1e-9,
                "L=3 first-order splitting " + fmt(r3.splitting_first_order));
        return "splitting " + fmt(r2.splitting_spectral) + " -> " + fmt(r3.splitting_spectral) +
               " (ratio " + fmt(ratio) + ")";
    }});

    criteria.push_back({"A3 scaling-law recovery (synthetic exact + ising ring sweep)", [&] {
        for (double c_true : {0.5, 2.0}) {
            std::vector<std::pair<double, double>> expv, sqv, inv;
            for (double v : {4.0, 6.0, 8.0, 10.0}) {
                expv.emplace_back(v, std::exp(-c_true * v));
                sqv.emplace_back(v, std::exp(-c_true * std::sqrt(v)));
                inv.emplace_back(v, c_true / v);
            }
            ScalingFit fe = fit_scaling(expv);
            require(fe.selected == ScalingModel::exp_volume &&
                        std::abs(fe.fits.at(fe.selected).c - c_true) <= 1e-10,
                    "exp_volume recovery failed at c=" + fmt(c_true));
            ScalingFit fs = fit_scaling(sqv);
            require(fs.selected == ScalingModel::exp_sqrt_volume &&
                        std::abs(fs.fits.at(fs.selected).c - c_true) <= 1e-10,
                    "exp_sqrt_volume recovery failed at c=" + fmt(c_true));
            ScalingFit fi = fit_scaling(inv);
            require(fi.selected == ScalingModel::inverse_volume &&
                        std::abs(fi.fits.at(fi.selected).c - c_true) <= 1e-10,
                    "inverse_volume recovery failed at c=" + fmt(c_true));
        }

        SweepPlan plan;
        plan.model = "ising";
        plan.sizes = {{6}, {8}, {10}, {12}};
        plan.epsilons = {0.2};
        plan.m = 2;
        SolverOptions opt;
        opt.method = SolverOptions::Method::dense;  // oracle-backed sweep
        opt.cluster_tol = 1e-12;  // measurement floor tracks dense precision
        SplittingTable t = sweep_splitting(plan, opt);
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : t.rows) {
            require(r.method == "dense", "sweep cell not dense");
            require(!r.floor_flag, "cell at the measurement floor");
            pts.emplace_back(r.n_spins, r.splitting_spectral);
        }
        ScalingFit f = fit_scaling(pts);
        require(f.selected == ScalingModel::exp_volume, "selected model is not exp_volume");
        double r_exp = f.fits.at(ScalingModel::exp_volume).rmse;
        double r_inv = f.fits.at(ScalingModel::inverse_volume).rmse;
        require(r_exp * 10.0 <= r_inv,
                "rmse separation too small: " + fmt(r_exp) + " vs " + fmt(r_inv));
        return "c = " + fmt(f.fits.at(f.selected).c) + ", rmse " + fmt(r_exp) + " vs inverse " +
               fmt(r_inv);
    }});

    criteria.push_back({"A4 literal diagonal splitting (off-diagonal zero, Z-field 0.6)", [&] {
        // X-type (off-diagonal) suite over configuration ground bases
        for (int L : {6, 8, 10}) {
            for (double eps : {0.05, 0.2}) {
                HamiltonianSpec h = ising_ring_with_x_field(L, eps);
                std::vector<StateVector> basis{
                    StateVector::basis_state(L, 0),
                    StateVector::basis_state(L, (mask_t{1} << L) - 1)};
                double d = diagonal_splitting(h, basis);
                require(std::abs(d) <= 1e-12, "ring L=" + std::to_string(L) + " diag " + fmt(d));
            }
        }
        {
            HamiltonianSpec h = build_ising(TorusLattice::build(2, {3, 3}));
            h.perturbation = build_field_perturbation(h.lattice, 'X', {0});
            h.epsilon = 0.1;
            std::vector<StateVector> basis{
                StateVector::basis_state(9, 0), StateVector::basis_state(9, (mask_t{1} << 9) - 1)};
            require(std::abs(diagonal_splitting(h, basis)) <= 1e-12, "3x3 torus diag nonzero");
        }
        {
            HamiltonianSpec h = toric_with_x_field(2, 0.05);
            auto basis = toric_stabilizer_ground_basis(h);
            double d = diagonal_splitting(h, basis);
            require(std::abs(d) <= 1e-12, "toric L=2 diag " + fmt(d));
        }
        // diagonal Z-field control on the L=6 ring
        HamiltonianSpec hz = build_ising(TorusLattice::build(1, {6}));
        hz.perturbation = build_field_perturbation(hz.lattice, 'Z', {0});
        hz.epsilon = 0.1;
        std::vector<StateVector> basis{StateVector::basis_state(6, 0),
                                       StateVector::basis_state(6, 0x3F)};
        double d = diagonal_splitting(hz, basis);
        require(std::abs(d - 0.6) <= 1e-12, "Z-field control: " + fmt(d));
        return "off-diagonal suite exact zero, control " + fmt(d);
    }});

    criteria.push_back({"A5 product-formula convergence (4-spin, beta=1, eps=0.3)", [&] {
        HamiltonianSpec h = ising_ring_with_x_field(4, 0.3);
        auto rows = trotter_convergence(h.classical_terms, h.perturbation_sum(), 0.3, 1.0,
                                        {64, 128});
        double ratio = rows[0].abs_error / rows[1].abs_error;
        require(ratio >= 1.5 && ratio <= 2.5, "error ratio " + fmt(ratio) + " outside [1.5, 2.5]");
        auto zero = trotter_convergence(h.classical_terms, h.perturbation_sum(), 0.0, 1.0,
                                        {1, 16, 64, 128});
        for (const auto& row : zero)
            require(row.abs_error <= 1e-12,
                    "eps=0 error " + fmt(row.abs_error) + " at steps " + std::to_string(row.steps));
        return "error 64->128 ratio " + fmt(ratio);
    }});

    criteria.push_back({"A6 Peierls constant on the 4x4 torus (regions up to 6 sites)", [&] {
        HamiltonianSpec h = build_ising(TorusLattice::build(2, {4, 4}));
        PeierlsReport r = check_peierls(h, 0, 6);
        require(r.rho == 2.0, "rho = " + fmt(r.rho) + " != 2 exactly");
        return fmt(static_cast<double>(r.samples.size())) + " regions, rho = 2 exactly";
    }});

    criteria.push_back({"A7 order observable (ring L=10, eps=0.2, O = sum Z)", [&] {
        HamiltonianSpec h = ising_ring_with_x_field(10, 0.2);
        OperatorSum obs(10);
        for (int s = 0; s < 10; ++s) obs.add(PauliTerm::axis_string(10, 'Z', {s}));

        SolverOptions opt;
        opt.k = 3;
        Spectrum sp = solve_lowest(h.full_operator(), opt);
        auto flip = builtin_symmetry_generators(h).front();
        std::vector<StateVector> states{sp.eigenvectors[0], sp.eigenvectors[1]};
        states = resolve_states_by_symmetry(h.full_operator(), states, sp.eigenvalues, flip);
        require(states.size() == 2, "did not assemble the two lowest eigenstates");

        OrderReport rep = check_order_observable(h, obs, states);
        require(rep.locality_ok, "locality check failed");
        require(rep.mutual_commute_ok, "mutual commutation failed");
        for (double m : rep.mean_values)
            require(std::abs(m) < 1e-8, "eigenstate mean " + fmt(m) + " not < 1e-8");
        require(rep.zeta > 0.1, "zeta " + fmt(rep.zeta) + " not > 0.1");
        return "means " + fmt(rep.mean_values[0]) + ", " + fmt(rep.mean_values[1]) + "; zeta " +
               fmt(rep.zeta);
    }});

    criteria.push_back({"A8 solver fidelity on 20 random commuting+perturbation instances", [&] {
        std::mt19937 rng(0xa8);
        double worst = 0;
        for (int inst = 0; inst < 20; ++inst) {
            int n = 6 + inst % 6;  // 6..11 spins
            OperatorSum h = random_commuting_plus_perturbation(n, rng);
            SolverOptions opt;
            opt.k = 6;
            Spectrum lz = lowest_eigenpairs(h, opt);
            Spectrum dn = dense_spectrum(h, 0);
            for (int i = 0; i < 6; ++i) {
                double diff = std::abs(lz.eigenvalues[i] - dn.eigenvalues[i]);
                worst = std::max(worst, diff);
                require(diff <= 1e-8, "instance " + std::to_string(inst) + " eigenvalue " +
                                          std::to_string(i) + " off by " + fmt(diff));
            }
            for (size_t i = 0; i < lz.eigenvectors.size(); ++i) {
                StateVector hv = apply_sum(h, lz.eigenvectors[i]);
                axpy(complex_t{-lz.eigenvalues[i], 0}, lz.eigenvectors[i], hv);
                require(norm(hv) <= opt.tol, "residual bound violated");
            }
        }
        return "worst eigenvalue deviation " + fmt(worst);
    }});

    criteria.push_back({"A9 byte-identical deterministic reruns across threads {1,4}", [&] {
        fs::path scratch = fs::path("acceptance_scratch");
        fs::remove_all(scratch);
        fs::create_directories(scratch);
        fs::path log = scratch / "log.txt";
        // krylov on a 2^12 space so the threaded apply kernel really engages
        nlohmann::json cfg = {
            {"model", {{"name", "ising"}, {"nu", 1}, {"extents", {6}}}},
            {"solver", {{"method", "krylov"}}},
            {"sweep", {{"sizes", {8, 12}}, {"epsilons", {0.0, 0.2}}, {"m", 2}}},
            {"output", {{"dir", (scratch / "run").string()}}}};
        fs::path cfg_path = scratch / "sweep.json";
        std::ofstream(cfg_path) << cfg.dump(2);

        auto run_once = [&](const std::string& extra) {
            fs::remove_all(scratch / "run");
            int code = run_cli("--config " + cfg_path.string() + " " + extra + " sweep", log);
            require(code == 0, "cli sweep exited with " + std::to_string(code));
            return std::pair<std::string, std::string>{
                slurp(scratch / "run" / "splitting.csv"),
                slurp(scratch / "run" / "resolved_config.json")};
        };
        auto first = run_once("--deterministic");
        auto second = run_once("--deterministic");
        auto threaded = run_once("--threads 4");
        require(!first.first.empty(), "sweep CSV is empty");
        require(first == second, "two deterministic runs differ");
        require(first == threaded, "thread counts 1 and 4 differ");
        return "3 runs, " + std::to_string(first.first.size()) + " CSV bytes each, identical";
    }});

    int failures = 0;
    for (auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        try {
            std::string detail = c.body();
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cout << "[PASS] " << c.name << " — " << detail << " (" << fmt(secs) << " s)\n";
        } catch (const std::exception& e) {
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cout << "[FAIL] " << c.name << " — " << e.what() << " (" << fmt(secs) << " s)\n";
            ++failures;
        }
        std::cout.flush();
    }
    if (failures == 0)
        std::cout << "all " << criteria.size() << " acceptance criteria passed\n";
    else
        std::cout << failures << " of " << criteria.size() << " acceptance criteria FAILED\n";
    return failures == 0 ? 0 : 1;
}
