#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace spinsplit {

// Finite hypercubic lattice with periodic boundary conditions and an
// optional multi-site unit cell.
//
// Site indexing is row-major over cell coordinates, last coordinate fastest,
// then the intra-cell layer:
//
//   site = (((c_0 * L_1 + c_1) * L_2 + ...) + c_{nu-1}) * unit_cell + layer
//
// This ordering fixes the state-vector basis order (site i <-> bit i of the
// basis index), so spectra and CSV outputs are reproducible across runs.
// Translations shift cell coordinates componentwise mod extents and preserve
// the layer.
//
// Immutable after construction; safe to share across threads.
class TorusLattice {
public:
    TorusLattice() = default;  // empty placeholder; build via the factories

    // Plain site lattice (unit cell = 1). Registers the "bond" cell family:
    // one nearest-neighbor pair per (site, direction), nu * sites in total.
    // Extents below 2 are rejected (the periodic wrap would duplicate
    // neighbor pairs).
    static TorusLattice build(int nu, const std::vector<int>& extents);

    // Spin lattice of the bonds of an L x L torus (unit cell = 2): layer 0
    // is the bond leaving a vertex in direction 0, layer 1 in direction 1.
    // Registers "star" (4 bonds incident to each vertex), "plaquette"
    // (4 bonds around each face) and "bond" (each spin as a singleton).
    static TorusLattice bonds_of_square_torus(int L);

    int nu() const { return nu_; }
    const std::vector<int>& extents() const { return extents_; }
    int unit_cell() const { return unit_cell_; }
    int cell_count() const { return cell_count_; }
    int site_count() const { return site_count_; }

    std::vector<int> cell_coords(int site) const;
    int layer_of(int site) const { return site % unit_cell_; }
    int site_at(const std::vector<int>& coords, int layer = 0) const;

    // Coordinates shifted componentwise mod extents; layer preserved.
    // shift must have nu entries.
    int translate_site(int site, const std::vector<int>& shift) const;

    bool has_cells(const std::string& kind) const;
    const std::vector<std::vector<int>>& cells(const std::string& kind) const;

    // Nearest-neighbor pairs; only defined for unit-cell-1 lattices.
    const std::vector<std::pair<int, int>>& neighbor_bonds() const;

    std::string extents_string() const;  // e.g. "8" or "3x3"

private:
    int nu_ = 0;
    std::vector<int> extents_;
    int unit_cell_ = 1;
    int cell_count_ = 0;
    int site_count_ = 0;
    std::vector<int> strides_;  // cell index strides, row-major
    std::map<std::string, std::vector<std::vector<int>>> cell_registry_;
    std::vector<std::pair<int, int>> neighbor_bonds_;
};

}  // namespace spinsplit
