#include "doctest.h"

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "snslab/cascade.hpp"

using namespace snslab;

namespace {

using Mode = std::pair<int, int>;

// Deliberately independent closure: plain set-based saturation written in a
// different shape from the library (no generations, no early exit, repeated
// full sweeps until stable).
std::set<Mode> oracle_closure(std::vector<Mode> seeds, long long radius_sq) {
    std::set<Mode> cur;
    for (Mode s : seeds) {
        if (s.second < 0) s = {-s.first, -s.second};
        cur.insert(s);
    }
    for (;;) {
        std::set<Mode> next = cur;
        for (const Mode& a : cur)
            for (const Mode& b : cur) {
                const long long cross = static_cast<long long>(a.first) * b.second -
                                        static_cast<long long>(a.second) * b.first;
                const long long na = ksq(a.first, a.second), nb = ksq(b.first, b.second);
                if (cross == 0 || na == nb) continue;
                const Mode sum{a.first + b.first, a.second + b.second};
                const Mode dif{a.first - b.first, a.second - b.second};
                if (ksq(sum.first, sum.second) >= radius_sq) continue;
                if (ksq(dif.first, dif.second) >= radius_sq) continue;
                for (Mode c : {sum, dif, Mode{-dif.first, -dif.second}}) {
                    if (c.first == 0 && c.second == 0) continue;
                    if (c.second < 0) c = {-c.first, -c.second};
                    next.insert(c);
                }
            }
        if (next == cur) return cur;
        cur.swap(next);
    }
}

std::set<Mode> as_set(const WaveSet& s) {
    const auto v = s.members();
    return std::set<Mode>(v.begin(), v.end());
}

} // namespace

TEST_CASE("seed canonicalization") {
    const WaveSet s = seed_set({{1, -2}, {-3, 0}});
    CHECK(s.contains(-1, 2)); // reflected through the origin
    CHECK(!s.contains(1, -2));
    CHECK(s.contains(-3, 0)); // axis modes keep their sign
    CHECK(s.size() == 2);
    CHECK(s.max_generation() == 0);

    CHECK_THROWS_AS(seed_set({{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(seed_set({{1, -2}, {-1, 2}}), std::invalid_argument); // same mode twice
    CHECK_THROWS_AS(seed_set({}), std::invalid_argument);
    CHECK_THROWS_AS(grow_k(seed_set({{1, 0}}), 0), std::invalid_argument);
}

TEST_CASE("band-limited closure agrees with the independent oracle") {
    const std::vector<std::pair<std::vector<Mode>, int>> cases = {
        {{{1, 0}, {1, 1}}, 8},        // adjacent pair fills the band
        {{{1, 0}, {1, 1}}, 16},
        {{{4, 0}, {3, 0}, {0, 8}, {0, 7}}, 8},  // spread seed stalls at this radius
        {{{4, 0}, {3, 0}, {0, 8}, {0, 7}}, 16}, // but fills wider bands
        {{{1, 0}, {0, 1}}, 6},        // equal norms never interact
        {{{1, 0}, {2, 0}}, 8},        // collinear pair never interacts
    };
    for (const auto& [seeds, radius] : cases) {
        const WaveSet grown = grow_k(seed_set(seeds), radius);
        CHECK(as_set(grown) ==
              oracle_closure(seeds, static_cast<long long>(radius) * radius));
    }
}

TEST_CASE("known coverage facts") {
    CHECK(full_band(8).size() == 103);
    CHECK(full_band(16).size() == 411);
    CHECK(full_band(32).size() == 1633);

    // the adjacent seed covers
    const PrecheckResult adj = band_coverage(grow_k(seed_set({{1, 0}, {1, 1}}), 8), 8);
    CHECK(adj.covered);
    CHECK(adj.grown == 103);
    CHECK(adj.missing.empty());

    // the spread seed freezes after one new pair of modes
    const WaveSet stalled = grow_k(seed_set({{4, 0}, {3, 0}, {0, 8}, {0, 7}}), 8);
    CHECK(stalled.size() == 6);
    CHECK(stalled.contains(3, 7));
    CHECK(stalled.contains(-3, 7));
    CHECK(stalled.max_generation() == 1);
    const PrecheckResult sp = band_coverage(stalled, 8);
    CHECK(!sp.covered);
    // (0,8) sits on the boundary: grown but not part of the open band
    CHECK(sp.missing.size() == 103 - 5);

    // non-interacting fixtures stay put
    CHECK(grow_k(seed_set({{1, 0}, {0, 1}}), 6).size() == 2);
    CHECK(grow_k(seed_set({{1, 0}, {2, 0}}), 8).size() == 2);
}

TEST_CASE("generation indices record the first pass of appearance") {
    const WaveSet g = grow_k(seed_set({{1, 0}, {1, 1}}), 8);
    CHECK(g.generation.at({1, 0}) == 0);
    CHECK(g.generation.at({1, 1}) == 0);
    // (2,1) = (1,0)+(1,1) and (0,1) = (1,1)-(1,0) are first-pass products
    CHECK(g.generation.at({2, 1}) == 1);
    CHECK(g.generation.at({0, 1}) == 1);
    CHECK(g.max_generation() >= 2);
    for (const auto& [k, gen] : g.generation) {
        CHECK(gen >= 0);
        CHECK(gen <= g.max_generation());
    }
}

TEST_CASE("free growth composes like a semigroup") {
    const WaveSet seed = seed_set({{1, 0}, {1, 1}});
    const WaveSet once = grow_z(grow_z(seed, 2), 3);
    const WaveSet direct = grow_z(seed, 5);
    CHECK(once.generation == direct.generation); // members and pass indices
    CHECK(grow_z(seed, 0).generation == seed.generation);

    // each pass only adds: growth is monotone in the pass count
    const WaveSet g1 = grow_z(seed, 1);
    const WaveSet g2 = grow_z(seed, 2);
    for (const auto& [k, gen] : g1.generation) CHECK(g2.contains(k.first, k.second));
    CHECK(g2.size() > g1.size());
}

TEST_CASE("closures are monotone in the seed set") {
    const WaveSet small = grow_k(seed_set({{1, 0}, {1, 1}}), 8);
    const WaveSet big = grow_k(seed_set({{1, 0}, {1, 1}, {0, 3}}), 8);
    for (const auto& [k, gen] : small.generation) CHECK(big.contains(k.first, k.second));
}

TEST_CASE("precheck reads seeds off the forcing spec") {
    // four-mode forcing carries both quadratures on (1,0) and (0,1): an
    // equal-norm pair, so the closure cannot leave the seeds
    const PrecheckResult four = galerkin_ergodicity_precheck(four_mode_forcing(1.0), 8);
    CHECK(!four.covered);
    CHECK(four.grown == 2);

    ForcingSpec cos_only;
    cos_only.modes.push_back({1, 0, 1.0, 0.0});
    CHECK_THROWS_AS(galerkin_ergodicity_precheck(cos_only, 8), std::invalid_argument);

    // a power-law shell through |k| < 3 contains adjacent unequal-norm pairs
    const PrecheckResult shell = galerkin_ergodicity_precheck(power_law_forcing(1.0, 3.0, 1.0), 12);
    CHECK(shell.covered);
    CHECK(shell.grown >= shell.target);
}
