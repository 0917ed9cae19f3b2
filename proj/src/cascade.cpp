#include "snslab/cascade.hpp"

#include <fstream>
#include <stdexcept>

namespace snslab {

namespace {

bool interacts(const std::pair<int, int>& l, const std::pair<int, int>& j) {
    const long long perp = -static_cast<long long>(l.second) * j.first +
                           static_cast<long long>(l.first) * j.second;
    if (perp == 0) return false;
    return ksq(l.first, l.second) != ksq(j.first, j.second);
}

// reflect into the half-plane; returns false for the origin
bool canonical(int& c1, int& c2) {
    if (c1 == 0 && c2 == 0) return false;
    if (c2 < 0) {
        c1 = -c1;
        c2 = -c2;
    }
    return true;
}

void offer(WaveSet& s, int c1, int c2, int gen, bool& changed) {
    if (!canonical(c1, c2)) return;
    if (s.generation.emplace(std::make_pair(c1, c2), gen).second) changed = true;
}

} // namespace

int WaveSet::max_generation() const {
    int g = 0;
    for (const auto& [k, gen] : generation) g = std::max(g, gen);
    return g;
}

std::vector<std::pair<int, int>> WaveSet::members() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(generation.size());
    for (const auto& [k, gen] : generation) out.push_back(k);
    return out;
}

WaveSet seed_set(const std::vector<std::pair<int, int>>& seeds) {
    WaveSet s;
    for (auto [k1, k2] : seeds) {
        if (!canonical(k1, k2)) throw std::invalid_argument("seed_set: origin is not a mode");
        if (!s.generation.emplace(std::make_pair(k1, k2), 0).second)
            throw std::invalid_argument("seed_set: duplicate seed");
    }
    if (s.generation.empty()) throw std::invalid_argument("seed_set: empty seed");
    return s;
}

WaveSet grow_z(const WaveSet& seed, int passes) {
    WaveSet s = seed;
    std::vector<std::pair<int, int>> gen0;
    for (const auto& [k, g] : seed.generation)
        if (g == 0) gen0.push_back(k);
    int base = s.max_generation();
    for (int pass = 1; pass <= passes; ++pass) {
        const auto snapshot = s.members();
        bool changed = false;
        for (const auto& l : snapshot)
            for (const auto& j : gen0) {
                if (!interacts(l, j)) continue;
                offer(s, l.first + j.first, l.second + j.second, base + pass, changed);
                offer(s, l.first - j.first, l.second - j.second, base + pass, changed);
                offer(s, j.first - l.first, j.second - l.second, base + pass, changed);
            }
        if (!changed) break;
    }
    return s;
}

WaveSet grow_k(const WaveSet& seed, int radius, int passes) {
    if (radius <= 0) throw std::invalid_argument("grow_k: radius must be positive");
    WaveSet s = seed;
    const long long r2 = static_cast<long long>(radius) * radius;
    int base = s.max_generation();
    for (int pass = 1; passes < 0 || pass <= passes; ++pass) {
        const auto snapshot = s.members();
        bool changed = false;
        for (const auto& l : snapshot)
            for (const auto& j : snapshot) {
                if (!interacts(l, j)) continue;
                const int p1 = l.first + j.first, p2 = l.second + j.second;
                const int m1 = l.first - j.first, m2 = l.second - j.second;
                if (ksq(p1, p2) >= r2 || ksq(m1, m2) >= r2) continue;
                offer(s, p1, p2, base + pass, changed);
                offer(s, m1, m2, base + pass, changed);
                offer(s, -m1, -m2, base + pass, changed);
            }
        if (!changed) break;
    }
    return s;
}

std::vector<std::pair<int, int>> full_band(int radius) {
    std::vector<std::pair<int, int>> out;
    const long long r2 = static_cast<long long>(radius) * radius;
    for (int k2 = 0; k2 < radius; ++k2)
        for (int k1 = -radius; k1 <= radius; ++k1) {
            if (k2 == 0 && k1 == 0) continue;
            if (ksq(k1, k2) < r2) out.push_back({k1, k2});
        }
    std::sort(out.begin(), out.end());
    return out;
}

PrecheckResult band_coverage(const WaveSet& grown, int radius) {
    PrecheckResult out;
    const auto target = full_band(radius);
    out.grown = grown.size();
    out.target = target.size();
    out.generations = grown.max_generation();
    for (const auto& k : target)
        if (!grown.contains(k.first, k.second)) out.missing.push_back(k);
    out.covered = out.missing.empty();
    return out;
}

PrecheckResult galerkin_ergodicity_precheck(const ForcingSpec& spec, int radius) {
    std::vector<std::pair<int, int>> seeds;
    for (const ForcedMode& m : spec.modes)
        if (m.amp_cos > 0.0 && m.amp_sin > 0.0) seeds.push_back({m.k1, m.k2});
    if (seeds.empty())
        throw std::invalid_argument("galerkin_ergodicity_precheck: no mode carries both quadratures");
    return band_coverage(grow_k(seed_set(seeds), radius), radius);
}

void dump_waveset_csv(const WaveSet& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_waveset_csv: cannot open " + path);
    out << "k1,k2,generation\n";
    for (const auto& [k, gen] : s.generation)
        out << k.first << ',' << k.second << ',' << gen << '\n';
}

} // namespace snslab
