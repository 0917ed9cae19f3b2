#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "snslab/forcing.hpp"

namespace snslab {

// Sets of wavevector representatives in the closed upper half-plane without
// the origin: k2 > 0, or k2 = 0 with k1 != 0 (both signs kept on the axis).
// Interaction of a pair (l, j) requires the exact integer conditions
// l-perp . j != 0 and |l|^2 != |j|^2; it contributes candidates
// l + j, l - j, j - l, each reflected through the origin when its second
// coordinate is negative, the origin itself discarded. The generation index
// records the first pass at which a member appeared (seeds are generation 0).
struct WaveSet {
    std::map<std::pair<int, int>, int> generation;

    bool contains(int k1, int k2) const {
        return generation.find({k1, k2}) != generation.end();
    }
    std::size_t size() const { return generation.size(); }
    int max_generation() const;
    std::vector<std::pair<int, int>> members() const; // sorted
};

// Canonicalizes seeds into the half-plane (reflecting k2 < 0), rejects the
// origin and duplicates.
WaveSet seed_set(const std::vector<std::pair<int, int>>& seeds);

// Unbounded growth: j ranges over the generation-0 members only, l over the
// whole current set, so passes compose (growing a steps then b more equals
// growing a + b).
WaveSet grow_z(const WaveSet& seed, int passes);

// Band-limited growth: both l and j range over the current set and a pair
// only acts when |l + j|^2 < radius^2 and |l - j|^2 < radius^2 (so nothing
// new appears outside the open band). passes < 0 iterates to the fixed
// point.
WaveSet grow_k(const WaveSet& seed, int radius, int passes = -1);

// All representatives with |k| < radius.
std::vector<std::pair<int, int>> full_band(int radius);

// Fixed-point growth of the set of modes carrying both noise quadratures,
// compared against the full band: covered means every |k| < radius mode was
// reached. Members outside the open band (boundary seeds) are legal and
// reported separately.
struct PrecheckResult {
    bool covered = false;
    std::size_t grown = 0;
    std::size_t target = 0;
    std::vector<std::pair<int, int>> missing;
    int generations = 0;
};

PrecheckResult galerkin_ergodicity_precheck(const ForcingSpec& spec, int radius);
PrecheckResult band_coverage(const WaveSet& grown, int radius);

// "k1,k2,generation" rows, sorted by key.
void dump_waveset_csv(const WaveSet& s, const std::string& path);

} // namespace snslab
