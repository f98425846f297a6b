#include "spinsplit/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "spinsplit/errors.hpp"

namespace spinsplit {

double PerturbationSpec::coeff_l1() const {
    double s = 0;
    for (const auto& t : terms) s += std::abs(t.coeff);
    return s;
}

OperatorSum HamiltonianSpec::perturbation_sum() const {
    OperatorSum p(n_sites());
    for (const auto& t : perturbation.terms) p.add(t);
    return p;
}

OperatorSum HamiltonianSpec::full_operator() const {
    OperatorSum h = classical_terms;
    if (h.n_sites == 0) h.n_sites = n_sites();
    if (epsilon != 0.0)
        for (const auto& t : perturbation.terms) h.add(t.scaled(epsilon));
    return h;
}

HamiltonianSpec HamiltonianSpec::at_epsilon(double eps) const {
    HamiltonianSpec h = *this;
    h.epsilon = eps;
    return h;
}

HamiltonianSpec build_toric_code(int L) {
    if (L < 2) throw std::invalid_argument("toric code requires L >= 2");
    HamiltonianSpec h;
    h.model = "toric";
    h.lattice = TorusLattice::bonds_of_square_torus(L);
    h.classical_terms = OperatorSum(h.n_sites());
    for (const auto& star : h.lattice.cells("star"))
        h.classical_terms.add(PauliTerm::axis_string(h.n_sites(), 'X', star).as_shifted());
    for (const auto& plaq : h.lattice.cells("plaquette"))
        h.classical_terms.add(PauliTerm::axis_string(h.n_sites(), 'Z', plaq).as_shifted());
    h.max_support = 4;
    return h;
}

HamiltonianSpec build_ising(const TorusLattice& lat) {
    if (lat.nu() > 2) throw std::invalid_argument("ising model supports nu in {1, 2}");
    HamiltonianSpec h;
    h.model = "ising";
    h.lattice = lat;
    h.classical_terms = OperatorSum(h.n_sites());
    for (const auto& bond : lat.cells("bond"))
        h.classical_terms.add(PauliTerm::axis_string(h.n_sites(), 'Z', bond).as_shifted());
    h.max_support = 4;
    return h;
}

HamiltonianSpec build_custom(const TorusLattice& lat, const std::vector<std::string>& term_texts,
                             int max_support) {
    HamiltonianSpec h;
    h.model = "custom";
    h.lattice = lat;
    h.classical_terms = OperatorSum(h.n_sites());
    for (const auto& text : term_texts)
        h.classical_terms.add(parse_pauli_term(text, h.n_sites()));
    h.max_support = max_support;
    return h;
}

PerturbationSpec build_seed_perturbation(const TorusLattice& lat, const PauliTerm& seed) {
    if (seed.is_identity_string())
        throw std::invalid_argument("perturbation seed has empty support");
    if (!(seed.support_mask() & 1))
        throw std::invalid_argument("perturbation seed support must contain site 0");

    PerturbationSpec p;
    p.seed_terms.push_back(seed);
    // Single-site seeds on multi-layer lattices get one copy per layer of
    // the origin cell, so the orbit still covers every site (the uniform
    // field on the toric bond lattice has 2 L^2 terms, one per spin).
    if (lat.unit_cell() > 1 && seed.support_size() == 1 && (seed.support_mask() & 1)) {
        for (int layer = 1; layer < lat.unit_cell(); ++layer) {
            PauliTerm s = seed;
            s.x_mask <<= layer;
            s.z_mask <<= layer;
            p.seed_terms.push_back(s);
        }
    }

    const auto& extents = lat.extents();
    std::vector<int> counter(lat.nu(), 0);
    for (int cell = 0; cell < lat.cell_count(); ++cell) {
        for (const auto& s : p.seed_terms) p.terms.push_back(translate_operator(s, lat, counter));
        for (int d = lat.nu() - 1; d >= 0; --d) {
            if (++counter[d] < extents[d]) break;
            counter[d] = 0;
        }
    }
    p.off_diagonal = true;
    for (const auto& t : p.terms)
        if (t.is_diagonal()) p.off_diagonal = false;
    return p;
}

PerturbationSpec build_field_perturbation(const TorusLattice& lat, char axis,
                                          const std::vector<int>& seed_support) {
    if (seed_support.empty()) throw std::invalid_argument("perturbation seed has empty support");
    if (std::find(seed_support.begin(), seed_support.end(), 0) == seed_support.end())
        throw std::invalid_argument("perturbation seed support must contain site 0");
    PauliTerm seed = PauliTerm::axis_string(lat.site_count(), axis, seed_support);
    return build_seed_perturbation(lat, seed);
}

ClassicalReport verify_classical(const HamiltonianSpec& h) {
    ClassicalReport r;
    r.support_bound = h.max_support;
    const auto& terms = h.classical_terms.terms;
    for (size_t i = 0; i < terms.size(); ++i) {
        r.max_support_seen = std::max(r.max_support_seen, terms[i].support_size());
        for (size_t j = i + 1; j < terms.size(); ++j) {
            ++r.pairs_checked;
            if (!commutes(terms[i], terms[j])) {
                r.all_commute = false;
                r.offending_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    r.support_ok = r.max_support_seen <= h.max_support;
    return r;
}

double spectral_gap(const HamiltonianSpec& h, const SolverOptions& opt) {
    if (h.classical_terms.empty())
        throw DataError("spectral gap undefined: Hamiltonian has no terms");
    const size_t dim = size_t{1} << h.n_sites();
    const size_t k_cap = std::min<size_t>(dim, 256);
    SolverOptions o = opt;
    o.want_vectors = false;
    o.k = static_cast<int>(std::min<size_t>(std::max(opt.k, 8), dim));
    while (true) {
        Spectrum s = solve_lowest(h.classical_terms, o);
        for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
            if (s.eigenvalues[i] - s.eigenvalues[0] > opt.cluster_tol)
                return s.eigenvalues[i] - s.eigenvalues[0];
        }
        if (static_cast<size_t>(o.k) >= k_cap) break;
        o.k = static_cast<int>(std::min<size_t>(static_cast<size_t>(o.k) * 2, k_cap));
    }
    throw DataError("spectral gap undefined: no nonzero eigenvalue found");
}

namespace {

// Enumerates connected subsets (up to max_size sites) of the lattice graph
// exactly once per subset: grow from each root using only higher-indexed
// sites, branching on include/exclude of each frontier candidate.
void enumerate_connected(const std::vector<std::vector<int>>& adj, int max_size,
                         const std::function<void(mask_t, int)>& visit) {
    const int n = static_cast<int>(adj.size());
    struct Frame {
        mask_t set;
        int size;
        std::vector<int> frontier;
        mask_t forbidden;
    };
    for (int root = 0; root < n; ++root) {
        std::vector<Frame> stack;
        std::vector<int> frontier0;
        for (int nb : adj[root])
            if (nb > root) frontier0.push_back(nb);
        std::sort(frontier0.begin(), frontier0.end());
        frontier0.erase(std::unique(frontier0.begin(), frontier0.end()), frontier0.end());
        stack.push_back({mask_t{1} << root, 1, std::move(frontier0), 0});
        visit(mask_t{1} << root, 1);
        while (!stack.empty()) {
            Frame f = std::move(stack.back());
            stack.pop_back();
            if (f.size >= max_size || f.frontier.empty()) continue;
            // Branch on the first frontier candidate.
            int c = f.frontier.front();
            std::vector<int> rest(f.frontier.begin() + 1, f.frontier.end());

            // Exclude c from this branch entirely.
            Frame without{f.set, f.size, rest, f.forbidden | (mask_t{1} << c)};
            stack.push_back(std::move(without));

            // Include c: extend the frontier by its unseen higher-than-root
            // neighbors that are not forbidden.
            mask_t set2 = f.set | (mask_t{1} << c);
            std::vector<int> frontier2 = rest;
            for (int nb : adj[c]) {
                if (nb <= root) continue;
                mask_t bit = mask_t{1} << nb;
                if ((set2 & bit) || (f.forbidden & bit)) continue;
                if (std::find(frontier2.begin(), frontier2.end(), nb) == frontier2.end())
                    frontier2.push_back(nb);
            }
            visit(set2, f.size + 1);
            stack.push_back({set2, f.size + 1, std::move(frontier2), f.forbidden});
        }
    }
}

}  // namespace

PeierlsReport check_peierls(const HamiltonianSpec& h, mask_t ground_config, int max_region) {
    if (!h.classical_terms.all_diagonal())
        throw VerificationError(
            "Peierls enumeration requires a Z-diagonal classical Hamiltonian");
    if (max_region < 1 || max_region > 16)
        throw std::invalid_argument("max_region must be in [1, 16]");
    if (max_region >= h.n_sites())
        throw std::invalid_argument("max_region must be smaller than the lattice");
    double e0 = h.classical_terms.diagonal_energy(ground_config);
    if (std::abs(e0) > 1e-9)
        throw VerificationError("supplied configuration is not a ground configuration");

    const auto& lat = h.lattice;
    std::vector<std::vector<int>> adj(lat.site_count());
    for (const auto& [a, b] : lat.neighbor_bonds()) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }

    PeierlsReport report;
    report.region_size_limit = max_region;
    enumerate_connected(adj, max_region, [&](mask_t dev, int) {
        PeierlsSample s;
        s.deviation = dev;
        s.energy = h.classical_terms.diagonal_energy(ground_config ^ dev);
        for (const auto& [a, b] : lat.neighbor_bonds()) {
            bool ina = dev & (mask_t{1} << a), inb = dev & (mask_t{1} << b);
            if (ina != inb) ++s.boundary;
        }
        report.samples.push_back(s);
    });

    report.rho = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < report.samples.size(); ++i) {
        const auto& s = report.samples[i];
        double ratio = s.energy / static_cast<double>(s.boundary);
        if (ratio < report.rho) {
            report.rho = ratio;
            report.min_index = i;
        }
    }
    return report;
}

SymmetryReport check_symmetry(const HamiltonianSpec& h, const std::vector<PauliTerm>& generators,
                              const std::vector<mask_t>& ground_labels) {
    SymmetryReport r;
    r.generator_count = generators.size();
    for (const auto& g : generators)
        if (std::abs(std::abs(g.coeff) - 1.0) > 1e-12 || g.shifted)
            throw std::invalid_argument("symmetry generators must be unit-coefficient Pauli strings");

    OperatorSum full = h.full_operator();

    // Exact symplectic check: for distinct Pauli strings with real
    // coefficients, [g, H] = 0 iff g commutes with every term.
    r.commutes_with_hamiltonian = true;
    for (const auto& g : generators)
        for (const auto& t : full.terms)
            if (!commutes(g, t)) r.commutes_with_hamiltonian = false;

    // Random-vector commutator evidence: ||gH psi - Hg psi||.
    if (h.n_sites() <= 20) {
        std::mt19937_64 rng(0xc0117e57u);
        StateVector psi = StateVector::zero(h.n_sites());
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto& a : psi.amp) a = complex_t{gauss(rng), gauss(rng)};
        normalize(psi);
        for (const auto& g : generators) {
            StateVector gh = apply_term(g, apply_sum(full, psi));
            StateVector hg = apply_sum(full, apply_term(g, psi));
            axpy(complex_t{-1, 0}, hg, gh);
            r.max_commutator_residual = std::max(r.max_commutator_residual, norm(gh));
        }
    }

    // Orbit of the labels under the generator X masks.
    if (!ground_labels.empty()) {
        std::set<mask_t> labels(ground_labels.begin(), ground_labels.end());
        std::set<mask_t> orbit{ground_labels.front()};
        std::vector<mask_t> queue{ground_labels.front()};
        while (!queue.empty()) {
            mask_t cur = queue.back();
            queue.pop_back();
            for (const auto& g : generators) {
                mask_t next = cur ^ g.x_mask;
                if (labels.count(next) && !orbit.count(next)) {
                    orbit.insert(next);
                    queue.push_back(next);
                }
            }
        }
        r.orbit.assign(orbit.begin(), orbit.end());
        r.transitive_on_ground_basis = orbit.size() == labels.size();
    }
    return r;
}

std::vector<PauliTerm> builtin_symmetry_generators(const HamiltonianSpec& h) {
    std::vector<PauliTerm> gens;
    const int n = h.n_sites();
    if (h.model == "ising") {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        gens.push_back(PauliTerm::axis_string(n, 'X', all));
    } else if (h.model == "toric") {
        const int L = h.lattice.extents()[0];
        std::vector<int> col, row;
        for (int y = 0; y < L; ++y) col.push_back(h.lattice.site_at({0, y}, 0));
        for (int x = 0; x < L; ++x) row.push_back(h.lattice.site_at({x, 0}, 1));
        gens.push_back(PauliTerm::axis_string(n, 'X', col));
        gens.push_back(PauliTerm::axis_string(n, 'X', row));
    }
    return gens;
}

std::vector<mask_t> builtin_ground_labels(const HamiltonianSpec& h) {
    const int n = h.n_sites();
    if (h.model == "ising") return {0, (mask_t{1} << n) - 1};
    if (h.model == "toric") {
        auto gens = builtin_symmetry_generators(h);
        mask_t a = gens[0].x_mask, b = gens[1].x_mask;
        return {0, a, b, a ^ b};
    }
    return {};
}

std::vector<mask_t> ground_configurations(const HamiltonianSpec& h, double tol) {
    if (!h.classical_terms.all_diagonal())
        throw VerificationError("ground configurations require a Z-diagonal Hamiltonian");
    std::vector<mask_t> out;
    const size_t dim = size_t{1} << h.n_sites();
    for (mask_t b = 0; b < dim; ++b)
        if (std::abs(h.classical_terms.diagonal_energy(b)) <= tol) out.push_back(b);
    return out;
}

}  // namespace spinsplit
