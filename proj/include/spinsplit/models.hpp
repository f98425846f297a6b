#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spinsplit/eigensolve.hpp"
#include "spinsplit/lattice.hpp"
#include "spinsplit/pauli.hpp"

namespace spinsplit {

// Translation orbit of a local seed operator. For unit-cell-1 lattices the
// seed is a single term whose support contains site 0 and the orbit has one
// term per site. For the bond lattice of a torus the seed is given per layer
// (one term per bond of the origin cell), so a uniform field is still a
// translation orbit and |terms| equals the spin count.
struct PerturbationSpec {
    std::vector<PauliTerm> seed_terms;
    std::vector<PauliTerm> terms;
    bool off_diagonal = true;  // every translate moves Z-basis configurations

    bool empty() const { return terms.empty(); }
    double coeff_l1() const;
};

struct HamiltonianSpec {
    std::string model;  // "toric", "ising", "custom"
    TorusLattice lattice;
    OperatorSum classical_terms;  // mutually commuting, (I - G) normal form for built-ins
    PerturbationSpec perturbation;
    double epsilon = 0.0;
    int max_support = 4;  // the support-size bound C

    int n_sites() const { return lattice.site_count(); }
    OperatorSum perturbation_sum() const;           // sum of the bare translates
    OperatorSum full_operator() const;              // classical + epsilon * perturbation
    HamiltonianSpec at_epsilon(double eps) const;
};

// Star terms (I - X X X X) and plaquette terms (I - Z Z Z Z) on the bonds of
// an L x L torus; 2 L^2 spins, 2 L^2 terms, fourfold-degenerate ground space
// at energy zero.
HamiltonianSpec build_toric_code(int L);

// Ferromagnetic terms (I - Z_i Z_j) over nearest-neighbor bonds; ground
// space spanned by the all-up and all-down configurations at energy zero.
HamiltonianSpec build_ising(const TorusLattice& lat);

HamiltonianSpec build_custom(const TorusLattice& lat, const std::vector<std::string>& term_texts,
                             int max_support = 4);

// Orbit of the single-term seed prod_{s in seed_support} axis_s under all
// lattice translations; on multi-layer lattices one seed per layer of the
// origin cell is generated, so axis='X', seed={0} yields the uniform field.
PerturbationSpec build_field_perturbation(const TorusLattice& lat, char axis,
                                          const std::vector<int>& seed_support);
PerturbationSpec build_seed_perturbation(const TorusLattice& lat, const PauliTerm& seed);

struct ClassicalReport {
    bool all_commute = true;
    std::vector<std::pair<int, int>> offending_pairs;  // term indices
    size_t pairs_checked = 0;
    int max_support_seen = 0;
    int support_bound = 0;
    bool support_ok = true;
    bool ok() const { return all_commute && support_ok; }
};

// Pairwise commutation table of the classical terms plus the support bound;
// failures are report content, not errors.
ClassicalReport verify_classical(const HamiltonianSpec& h);

// Smallest nonzero eigenvalue of the unperturbed Hamiltonian, separating
// "zero" from "nonzero" with the cluster tolerance. Throws DataError when no
// nonzero eigenvalue exists (empty Hamiltonian).
double spectral_gap(const HamiltonianSpec& h, const SolverOptions& opt);

struct PeierlsSample {
    mask_t deviation = 0;   // flipped sites
    double energy = 0;      // classical energy of the deviated configuration
    int boundary = 0;       // bonds cut by the deviation set
};

struct PeierlsReport {
    int region_size_limit = 0;
    std::vector<PeierlsSample> samples;
    double rho = 0;        // min energy / boundary over all samples
    size_t min_index = 0;  // sample attaining rho
};

// Enumerates every connected deviation set of up to max_region sites,
// evaluates the classical energy of the deviated configuration and the
// bond-cut boundary measure. Requires a Z-diagonal classical part.
PeierlsReport check_peierls(const HamiltonianSpec& h, mask_t ground_config, int max_region);

struct SymmetryReport {
    size_t generator_count = 0;
    bool commutes_with_hamiltonian = false;  // full H(eps), exact symplectic check
    double max_commutator_residual = 0;      // random-vector evidence
    bool transitive_on_ground_basis = false;
    std::vector<mask_t> orbit;               // orbit of the first label
};

// Generators must be Pauli strings with coefficient +-1 (unitary). Ground
// basis vectors are labeled by configuration bitstrings; generators act on
// labels through their X masks.
SymmetryReport check_symmetry(const HamiltonianSpec& h, const std::vector<PauliTerm>& generators,
                              const std::vector<mask_t>& ground_labels);

// Built-in symmetry data: the global spin flip for Ising models, the two
// noncontractible X-string logicals for the toric code.
std::vector<PauliTerm> builtin_symmetry_generators(const HamiltonianSpec& h);
std::vector<mask_t> builtin_ground_labels(const HamiltonianSpec& h);

// All configuration bitstrings with zero classical energy (Z-diagonal models
// only). Enumerates the full basis; intended for desk-scale sizes.
std::vector<mask_t> ground_configurations(const HamiltonianSpec& h, double tol = 1e-9);

}  // namespace spinsplit
