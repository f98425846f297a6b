#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spinsplit/lattice.hpp"

namespace spinsplit {

using mask_t = std::uint64_t;
using complex_t = std::complex<double>;

// Hard memory-sanity ceiling; the configurable cap (default 20) is enforced
// at the solver/CLI boundary. One state vector costs 16 * 2^N bytes.
inline constexpr int kHardMaxSites = 26;

// A real multiple of a Hermitian Pauli string G = i^{|x&z|} X^x Z^z
// (each site carrying both an X and a Z bit acts as Y; the i per Y makes G
// Hermitian with G^2 = I). With `shifted` set the term acts as
// coeff * (I - G), the normal form used for classical Hamiltonians so the
// ground energy is zero by construction.
//
// Basis convention: basis index bit i corresponds to lattice site i; bit
// value 0 is spin up (Z eigenvalue +1).
struct PauliTerm {
    double coeff = 1.0;
    mask_t x_mask = 0;
    mask_t z_mask = 0;
    int n_sites = 0;
    bool shifted = false;

    static PauliTerm identity(int n_sites, double coeff = 1.0);
    // Product of the same single-site Pauli (axis in {X,Y,Z}) over `sites`.
    static PauliTerm axis_string(int n_sites, char axis, const std::vector<int>& sites,
                                 double coeff = 1.0);

    PauliTerm as_shifted() const;
    PauliTerm scaled(double factor) const;

    mask_t support_mask() const { return x_mask | z_mask; }
    int support_size() const;
    std::vector<int> support() const;
    bool is_identity_string() const { return support_mask() == 0; }
    bool is_diagonal() const { return x_mask == 0; }
    // i^{|x&z|}: +1, +i, -1 or -i depending on the number of Y sites.
    complex_t string_phase() const;
};

// True iff the underlying strings commute (even symplectic overlap parity).
bool commutes(const PauliTerm& a, const PauliTerm& b);

// Sum of PauliTerms acting on a common set of sites. Hermitian term by term.
struct OperatorSum {
    int n_sites = 0;
    std::vector<PauliTerm> terms;

    OperatorSum() = default;
    explicit OperatorSum(int n) : n_sites(n) {}

    void add(const PauliTerm& t);
    size_t size() const { return terms.size(); }
    bool empty() const { return terms.empty(); }
    double coeff_l1() const;
    bool all_diagonal() const;
    int max_support_size() const;

    // <bits|H|bits> for a purely diagonal sum; throws if any term has an
    // X component.
    double diagonal_energy(mask_t bits) const;
};

struct StateVector {
    int n_sites = 0;
    std::vector<complex_t> amp;

    static StateVector zero(int n_sites);
    static StateVector basis_state(int n_sites, mask_t bits);

    size_t dim() const { return amp.size(); }
};

// --- dense-free linear algebra on state vectors (serial reductions, so
// results are bit-stable across thread counts) ---
double norm(const StateVector& v);
complex_t dot(const StateVector& a, const StateVector& b);  // <a|b>
void axpy(complex_t alpha, const StateVector& x, StateVector& y);
void scale(StateVector& v, complex_t alpha);
void normalize(StateVector& v);

// out += t applied to in (matrix-free bit kernel).
void apply_term_add(const PauliTerm& t, const StateVector& in, StateVector& out);
StateVector apply_term(const PauliTerm& t, const StateVector& psi);
// Terms applied in stored order; the per-amplitude accumulation order is
// independent of the worker partition, so results are bit-stable across
// thread counts.
StateVector apply_sum(const OperatorSum& h, const StateVector& psi);

complex_t expectation(const OperatorSum& h, const StateVector& psi);  // <psi|H|psi>
complex_t matrix_element(const StateVector& bra, const OperatorSum& h, const StateVector& ket);

// exp(-tau * term) applied exactly (G^2 = I):
//   raw     : exp(-tau c G)       = cosh(tau c) I - sinh(tau c) G
//   shifted : exp(-tau c (I - G)) = e^{-tau c} (cosh(tau c) I + sinh(tau c) G)
StateVector apply_term_exponential(const PauliTerm& t, double tau, const StateVector& psi);

// Masks permuted by the lattice translation; coefficient unchanged.
PauliTerm translate_operator(const PauliTerm& t, const TorusLattice& lat,
                             const std::vector<int>& shift);

// Text form: "coeff * Z0 Z1", "coeff * I", or "coeff * (I - X0 X2)".
std::string to_string(const PauliTerm& t);
PauliTerm parse_pauli_term(std::string_view text, int n_sites);

// Worker count for the apply kernels (default 1).
void set_thread_count(int n);
int thread_count();

}  // namespace spinsplit
