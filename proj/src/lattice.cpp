#include "spinsplit/lattice.hpp"

#include <sstream>
#include <stdexcept>

namespace spinsplit {

namespace {

void check_geometry(int nu, const std::vector<int>& extents) {
    if (nu < 1) throw std::invalid_argument("lattice dimension must be >= 1");
    if (static_cast<int>(extents.size()) != nu)
        throw std::invalid_argument("extents list must have nu entries");
    for (int L : extents)
        if (L < 2)
            throw std::invalid_argument(
                "lattice extent < 2: periodic wrap would double-count neighbors");
}

std::vector<int> make_strides(const std::vector<int>& extents) {
    std::vector<int> strides(extents.size(), 1);
    for (int d = static_cast<int>(extents.size()) - 2; d >= 0; --d)
        strides[d] = strides[d + 1] * extents[d + 1];
    return strides;
}

}  // namespace

TorusLattice TorusLattice::build(int nu, const std::vector<int>& extents) {
    check_geometry(nu, extents);
    TorusLattice lat;
    lat.nu_ = nu;
    lat.extents_ = extents;
    lat.unit_cell_ = 1;
    lat.strides_ = make_strides(extents);
    lat.cell_count_ = lat.strides_[0] * extents[0];
    lat.site_count_ = lat.cell_count_;

    std::vector<std::vector<int>> bonds;
    bonds.reserve(static_cast<size_t>(nu) * lat.site_count_);
    for (int s = 0; s < lat.site_count_; ++s) {
        for (int d = 0; d < nu; ++d) {
            std::vector<int> shift(nu, 0);
            shift[d] = 1;
            int t = lat.translate_site(s, shift);
            bonds.push_back({s, t});
            lat.neighbor_bonds_.emplace_back(s, t);
        }
    }
    lat.cell_registry_["bond"] = std::move(bonds);
    return lat;
}

TorusLattice TorusLattice::bonds_of_square_torus(int L) {
    check_geometry(2, {L, L});
    TorusLattice lat;
    lat.nu_ = 2;
    lat.extents_ = {L, L};
    lat.unit_cell_ = 2;
    lat.strides_ = make_strides(lat.extents_);
    lat.cell_count_ = L * L;
    lat.site_count_ = 2 * L * L;

    auto vertex = [L](int x, int y) { return ((x % L + L) % L) * L + ((y % L + L) % L); };
    auto spin = [&](int x, int y, int layer) { return 2 * vertex(x, y) + layer; };

    std::vector<std::vector<int>> stars, plaquettes, bonds;
    stars.reserve(lat.cell_count_);
    plaquettes.reserve(lat.cell_count_);
    bonds.reserve(lat.site_count_);
    for (int x = 0; x < L; ++x) {
        for (int y = 0; y < L; ++y) {
            stars.push_back({spin(x, y, 0), spin(x - 1, y, 0), spin(x, y, 1), spin(x, y - 1, 1)});
            plaquettes.push_back({spin(x, y, 0), spin(x, y, 1), spin(x, y + 1, 0), spin(x + 1, y, 1)});
            bonds.push_back({spin(x, y, 0)});
            bonds.push_back({spin(x, y, 1)});
        }
    }
    lat.cell_registry_["star"] = std::move(stars);
    lat.cell_registry_["plaquette"] = std::move(plaquettes);
    lat.cell_registry_["bond"] = std::move(bonds);
    return lat;
}

std::vector<int> TorusLattice::cell_coords(int site) const {
    if (site < 0 || site >= site_count_) throw std::invalid_argument("site index out of range");
    int cell = site / unit_cell_;
    std::vector<int> coords(nu_);
    for (int d = 0; d < nu_; ++d) {
        coords[d] = cell / strides_[d];
        cell %= strides_[d];
    }
    return coords;
}

int TorusLattice::site_at(const std::vector<int>& coords, int layer) const {
    if (static_cast<int>(coords.size()) != nu_)
        throw std::invalid_argument("coordinate list must have nu entries");
    if (layer < 0 || layer >= unit_cell_) throw std::invalid_argument("layer out of range");
    int cell = 0;
    for (int d = 0; d < nu_; ++d) {
        int c = coords[d] % extents_[d];
        if (c < 0) c += extents_[d];
        cell += c * strides_[d];
    }
    return cell * unit_cell_ + layer;
}

int TorusLattice::translate_site(int site, const std::vector<int>& shift) const {
    if (static_cast<int>(shift.size()) != nu_)
        throw std::invalid_argument("translation vector must have nu entries");
    std::vector<int> coords = cell_coords(site);
    for (int d = 0; d < nu_; ++d) coords[d] += shift[d];
    return site_at(coords, layer_of(site));
}

bool TorusLattice::has_cells(const std::string& kind) const {
    return cell_registry_.count(kind) > 0;
}

const std::vector<std::vector<int>>& TorusLattice::cells(const std::string& kind) const {
    auto it = cell_registry_.find(kind);
    if (it == cell_registry_.end())
        throw std::invalid_argument("cell kind '" + kind + "' not available for this lattice");
    return it->second;
}

const std::vector<std::pair<int, int>>& TorusLattice::neighbor_bonds() const {
    if (unit_cell_ != 1)
        throw std::invalid_argument("neighbor bonds are only defined for unit-cell-1 lattices");
    return neighbor_bonds_;
}

std::string TorusLattice::extents_string() const {
    std::ostringstream os;
    for (size_t d = 0; d < extents_.size(); ++d) {
        if (d) os << 'x';
        os << extents_[d];
    }
    return os.str();
}

}  // namespace spinsplit
