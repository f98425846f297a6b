#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinsplit/pauli.hpp"

namespace spinsplit {

struct SolverOptions {
    int k = 6;                      // number of lowest eigenpairs
    double tol = 1e-10;             // residual bound ||Hv - lambda v||
    double cluster_tol = 1e-7;      // degeneracy grouping tolerance
    std::uint64_t seed = 0x5eed1e55u;  // start-vector seed (deterministic)
    int max_basis = 96;             // Krylov dimension per restart
    int max_restarts = 400;
    int max_spins = 20;             // state-vector cap (memory formula in README)
    int dense_cutoff = 12;          // "auto" method switches to dense at or below
    enum class Method { automatic, dense, krylov };
    Method method = Method::automatic;
    bool want_vectors = true;

    SolverOptions with_k(int kk) const {
        SolverOptions o = *this;
        o.k = kk;
        return o;
    }
};

struct Spectrum {
    int n_sites = 0;
    std::vector<double> eigenvalues;        // ascending
    std::vector<StateVector> eigenvectors;  // may hold fewer than eigenvalues
    std::vector<double> residual_norms;     // one per stored eigenvector
    std::string method;                     // "krylov" or "dense"

    bool full() const { return eigenvalues.size() == (size_t{1} << n_sites); }
};

// Lanczos with full reorthogonalization and deflation restarts against the
// converged set; resolves degenerate multiplicities. Deterministic for a
// fixed seed. Throws SolverError on non-convergence (message carries the
// best residuals) and when k exceeds the space dimension.
Spectrum lowest_eigenpairs(const OperatorSum& h, const SolverOptions& opt);

// Dense Hermitian eigendecomposition, the ground-truth oracle for small
// systems (n_sites <= 12). Eigenvectors are stored for the lowest
// `keep_vectors` levels only; pass 0 to skip the (much more expensive)
// vector computation entirely.
Spectrum dense_spectrum(const OperatorSum& h, int keep_vectors = 0);

// Method dispatch: dense for small systems ("auto"), Lanczos otherwise.
Spectrum solve_lowest(const OperatorSum& h, const SolverOptions& opt);

struct DegeneracyClusters {
    struct Cluster {
        double mean_energy = 0;
        std::vector<int> members;  // indices into the spectrum
    };
    std::vector<Cluster> clusters;
    double cluster_tol = 0;
};

// Greedy chaining: a new cluster starts when the gap between adjacent
// eigenvalues exceeds cluster_tol.
DegeneracyClusters cluster_degeneracies(const Spectrum& s, double cluster_tol);

}  // namespace spinsplit
