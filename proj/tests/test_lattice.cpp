#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "spinsplit/lattice.hpp"

using namespace spinsplit;

TEST_CASE("build_torus site and bond counts") {
    TorusLattice sq = TorusLattice::build(2, {3, 3});
    CHECK(sq.site_count() == 9);
    CHECK(sq.cells("bond").size() == 18);  // 2 per site on a 2-torus

    TorusLattice ring = TorusLattice::build(1, {8});
    CHECK(ring.site_count() == 8);
    CHECK(ring.cells("bond").size() == 8);

    CHECK_THROWS_AS(TorusLattice::build(2, {2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(TorusLattice::build(0, {}), std::invalid_argument);
    CHECK_THROWS_AS(TorusLattice::build(2, {3}), std::invalid_argument);
}

TEST_CASE("coordinate <-> index maps are inverse bijections") {
    TorusLattice lat = TorusLattice::build(3, {2, 3, 4});
    std::set<int> seen;
    for (int s = 0; s < lat.site_count(); ++s) {
        auto c = lat.cell_coords(s);
        CHECK(lat.site_at(c, lat.layer_of(s)) == s);
        seen.insert(s);
    }
    CHECK(static_cast<int>(seen.size()) == lat.site_count());
}

TEST_CASE("translate_site basics and wrap") {
    TorusLattice lat = TorusLattice::build(2, {3, 3});
    int s00 = lat.site_at({0, 0});
    int s10 = lat.site_at({1, 0});
    CHECK(lat.translate_site(s00, {1, 0}) == s10);
    CHECK(lat.translate_site(lat.site_at({2, 2}), {1, 1}) == s00);
    for (int s = 0; s < lat.site_count(); ++s) CHECK(lat.translate_site(s, {0, 0}) == s);
    CHECK_THROWS_AS(lat.translate_site(0, {1}), std::invalid_argument);
}

TEST_CASE("translation group properties") {
    TorusLattice lat = TorusLattice::build(2, {3, 4});
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(-6, 6);
    for (int trial = 0; trial < 200; ++trial) {
        int s = trial % lat.site_count();
        std::vector<int> v{d(rng), d(rng)}, w{d(rng), d(rng)};
        std::vector<int> vw{v[0] + w[0], v[1] + w[1]};
        CHECK(lat.translate_site(s, vw) == lat.translate_site(lat.translate_site(s, v), w));
        std::vector<int> neg{-v[0], -v[1]};
        CHECK(lat.translate_site(lat.translate_site(s, v), neg) == s);
    }
}

TEST_CASE("transitivity: some translation maps any site to any other") {
    TorusLattice lat = TorusLattice::build(2, {3, 3});
    for (int s = 0; s < lat.site_count(); ++s) {
        for (int t = 0; t < lat.site_count(); ++t) {
            auto cs = lat.cell_coords(s), ct = lat.cell_coords(t);
            std::vector<int> v{ct[0] - cs[0], ct[1] - cs[1]};
            CHECK(lat.translate_site(s, v) == t);
        }
    }
}

TEST_CASE("toric bond lattice cell counts") {
    for (int L : {2, 3}) {
        TorusLattice lat = TorusLattice::bonds_of_square_torus(L);
        CHECK(lat.site_count() == 2 * L * L);
        CHECK(lat.cells("star").size() == static_cast<size_t>(L * L));
        CHECK(lat.cells("plaquette").size() == static_cast<size_t>(L * L));
        CHECK(lat.cells("bond").size() == static_cast<size_t>(2 * L * L));
    }
    TorusLattice ring = TorusLattice::build(1, {8});
    CHECK_FALSE(ring.has_cells("star"));
    CHECK_THROWS_AS(ring.cells("star"), std::invalid_argument);
}

TEST_CASE("every bond lies in exactly 2 stars and 2 plaquettes") {
    for (int L : {2, 3, 4}) {
        TorusLattice lat = TorusLattice::bonds_of_square_torus(L);
        const auto& stars = lat.cells("star");
        const auto& plaqs = lat.cells("plaquette");
        for (int spin = 0; spin < lat.site_count(); ++spin) {
            int in_stars = 0, in_plaqs = 0;
            for (const auto& cell : stars)
                for (int s : cell)
                    if (s == spin) ++in_stars;
            for (const auto& cell : plaqs)
                for (int s : cell)
                    if (s == spin) ++in_plaqs;
            CHECK(in_stars == 2);
            CHECK(in_plaqs == 2);
        }
        // cells hold valid distinct sites
        for (const auto& family : {stars, plaqs}) {
            for (const auto& cell : family) {
                std::set<int> uniq(cell.begin(), cell.end());
                CHECK(uniq.size() == cell.size());
                for (int s : cell) {
                    CHECK(s >= 0);
                    CHECK(s < lat.site_count());
                }
            }
        }
    }
}

TEST_CASE("bond-lattice translations preserve layers and wrap") {
    TorusLattice lat = TorusLattice::bonds_of_square_torus(3);
    for (int s = 0; s < lat.site_count(); ++s) {
        int t = lat.translate_site(s, {1, 2});
        CHECK(lat.layer_of(t) == lat.layer_of(s));
        CHECK(lat.translate_site(t, {-1, -2}) == s);
    }
}
