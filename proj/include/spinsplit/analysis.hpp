#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spinsplit/eigensolve.hpp"
#include "spinsplit/models.hpp"

namespace spinsplit {

// One sweep cell. Three splitting estimators are recorded side by side:
//   spectral    : spread of the lowest m perturbed eigenvalues (primary)
//   diagonal    : max ground-basis diagonal element of the perturbed
//                 Hamiltonian (zero for purely off-diagonal perturbations)
//   first_order : spread of the perturbation projected onto the
//                 unperturbed ground space, times epsilon
struct SplittingRecord {
    std::string model;
    int nu = 0;
    std::string extents;
    int n_spins = 0;
    double epsilon = 0;
    int m = 0;
    double splitting_spectral = 0;
    double splitting_diagonal = 0;
    double splitting_first_order = 0;
    double gap_to_next = 0;
    std::string method;       // krylov | dense | failed
    bool floor_flag = false;  // below the measurement floor (10 x cluster_tol)
    bool dissolved = false;   // gap_to_next within cluster_tol: cluster lost
    std::string error;        // nonempty for failed cells
};

struct SplittingTable {
    std::vector<SplittingRecord> rows;
};

// CSV schema (one line per record):
// model,nu,extents,n_spins,epsilon,m,splitting_spectral,splitting_diagonal,
// splitting_first_order,gap_to_next,method,floor_flag
std::string splitting_csv_header();
std::string to_csv_row(const SplittingRecord& r);
SplittingRecord parse_csv_row(const std::string& line);
SplittingTable read_splitting_csv(const std::string& path);

// max over basis vectors of <v|H(eps)|v>. The basis must be orthonormal
// (Gram deviation above 1e-8 is an error).
double diagonal_splitting(const HamiltonianSpec& h_eps, const std::vector<StateVector>& ground_basis);

// eps * (max - min eigenvalue) of the m x m matrix <v_i|P|v_j>.
double first_order_splitting(const OperatorSum& perturbation,
                             const std::vector<StateVector>& ground_basis, double eps);

// Orthonormal basis of the zero-energy cluster of the unperturbed model:
// explicit configuration vectors for Z-diagonal models, solver eigenvectors
// otherwise.
std::vector<StateVector> ground_basis(const HamiltonianSpec& h, const SolverOptions& opt);

// Lowest m+1 perturbed eigenvalues plus all three splitting variants.
// A precomputed unperturbed ground basis can be supplied to avoid repeated
// solves during sweeps.
SplittingRecord spectral_splitting(const HamiltonianSpec& h_eps, int m, const SolverOptions& opt,
                                   const std::vector<StateVector>* basis = nullptr);

struct SweepPlan {
    std::string model = "ising";            // ising | toric
    int nu = 1;                             // ising lattice dimension
    std::vector<std::vector<int>> sizes;    // extents per point; toric: {L}
    std::vector<double> epsilons;
    int m = 2;
    char perturbation_axis = 'X';
    std::vector<int> seed_support = {0};
    std::string seed_term;                  // optional explicit seed text
};

HamiltonianSpec build_plan_model(const SweepPlan& plan, const std::vector<int>& size, double eps);

using RecordSink = std::function<void(const SplittingRecord&)>;
using SweepKey = std::pair<std::string, double>;  // (extents string, epsilon)

// Deterministic (size-major, epsilon-minor) sweep; cells in `done` are
// skipped, per-cell solver failures become rows with method="failed" and the
// sweep continues.
SplittingTable sweep_splitting(const SweepPlan& plan, const SolverOptions& opt,
                               const std::set<SweepKey>& done = {},
                               const RecordSink& sink = nullptr);

enum class ScalingModel { exp_volume, exp_sqrt_volume, inverse_volume };
std::string to_string(ScalingModel m);

struct ModelFit {
    double c = 0;          // decay constant (positive for a valid fit)
    double intercept = 0;  // fitted log-prefactor (constrained fits: log c)
    double rmse = 0;       // in transformed (log) coordinates
    bool valid = false;    // c > 0 and finite
};

struct ScalingFit {
    ScalingModel selected = ScalingModel::exp_volume;
    std::map<ScalingModel, ModelFit> fits;
    double free_exponent = 0;  // diagnostic power-law exponent (never selected)
    double free_exponent_rmse = 0;
    int points_used = 0;

    double predict(ScalingModel m, double volume) const;
    // Smallest volume with predicted splitting below delta (selected model).
    double smallest_volume_below(double delta) const;
};

// Least squares in transformed coordinates over (volume, splitting) points:
// log D vs V, log D vs sqrt(V), and log D + log V = const (slope pinned to
// -1). Requires >= 3 usable points with positive splittings.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& volume_splitting);

struct ThresholdEstimate {
    double epsilon_hat = 0;
    bool any_satisfied = false;
    std::string diagnostic;
    struct Point {
        double epsilon;
        double splitting;
        double gap;
        double ratio;  // gap / splitting (inf when splitting is zero)
        bool separated;
    };
    std::vector<Point> curve;
};

// Largest epsilon in the (ascending) grid whose record still has
// gap_to_next > ratio x splitting_spectral; ratio defaults to 10.
ThresholdEstimate estimate_threshold(const std::vector<SplittingRecord>& records_at_fixed_size,
                                     double separation_ratio = 10.0);

struct OrderReport {
    bool locality_ok = true;        // [term, O_l] = 0 whenever supports are disjoint
    bool mutual_commute_ok = true;  // [O_l, O_l'] = 0
    bool observable_hermitian = true;
    std::vector<double> mean_values;
    std::vector<double> second_moments;
    double zeta = 0;  // min second moment / |lattice|^2
};

// Symbolic commutation checks plus matrix-free first and second moments of
// the extensive observable in the supplied eigenstates.
OrderReport check_order_observable(const HamiltonianSpec& h_eps, const OperatorSum& observable,
                                   const std::vector<StateVector>& eigenstates);

// Rotates an orthonormal degenerate cluster basis into eigenvectors of a
// commuting Pauli symmetry (joint diagonalization); resolves the basis
// ambiguity inside near-degenerate clusters before observable evaluation.
std::vector<StateVector> resolve_cluster_by_symmetry(const std::vector<StateVector>& cluster,
                                                     const PauliTerm& symmetry);

// Eigenvectors of levels closer than `window` cannot be separated cleanly by
// a backward-stable solver (rotation error ~ eps*||H||/gap). Groups such
// consecutive states, diagonalizes the commuting symmetry inside each group,
// and rediagonalizes the projected Hamiltonian within symmetry sectors, so
// the returned states are simultaneously sharp in both. Order is preserved
// (ascending energy).
std::vector<StateVector> resolve_states_by_symmetry(const OperatorSum& hamiltonian,
                                                    const std::vector<StateVector>& states,
                                                    const std::vector<double>& energies,
                                                    const PauliTerm& symmetry,
                                                    double window = 1e-4);

}  // namespace spinsplit
