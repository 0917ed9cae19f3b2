#pragma once

#include <cstdint>
#include <cmath>
#include <initializer_list>

namespace snslab {

// Counter-based Gaussian source. Every draw is a pure function of
// (key, step, slot), so ensembles are reproducible and order-independent:
// trajectories can be simulated in any order or in parallel and still see
// identical noise. Keys are derived from a user seed plus stream tags
// (trajectory index, experiment label hash, replica index, ...).

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct CounterRng {
    std::uint64_t key = 0;

    // Sub-stream derivation is itself a hash chain; derive(derive(k,a),b)
    // differs from derive(k,b) for a != 0 so tag order matters by design.
    CounterRng derive(std::uint64_t tag) const {
        return CounterRng{splitmix64(key ^ splitmix64(tag ^ 0xA5A5A5A55A5A5A5AULL))};
    }
    CounterRng derive(std::initializer_list<std::uint64_t> tags) const {
        CounterRng r = *this;
        for (auto t : tags) r = r.derive(t);
        return r;
    }
};

inline CounterRng make_rng(std::uint64_t seed) { return CounterRng{splitmix64(seed)}; }

// Tag helper for labeling sub-streams by short ASCII names.
inline std::uint64_t tag64(const char* s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (; *s; ++s) h = (h ^ static_cast<std::uint64_t>(*s)) * 0x100000001B3ULL;
    return h;
}

namespace detail {
inline std::uint64_t counter_hash(std::uint64_t key, std::uint64_t step, std::uint64_t slot) {
    std::uint64_t h = key;
    h = splitmix64(h ^ splitmix64(step + 0x632BE59BD9B4E019ULL));
    h = splitmix64(h ^ splitmix64(slot + 0xD1B54A32D192ED03ULL));
    return h;
}
// Map to (0,1) strictly; offset keeps log() finite.
inline double to_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1p-53;
}
} // namespace detail

inline double uniform01(const CounterRng& rng, std::uint64_t step, std::uint64_t slot) {
    return detail::to_unit(detail::counter_hash(rng.key, step, slot));
}

struct NormalPair {
    double z0, z1;
};

// Box-Muller on two counter-derived uniforms; one pair per (step, slot).
inline NormalPair normal_pair(const CounterRng& rng, std::uint64_t step, std::uint64_t slot) {
    const std::uint64_t h1 = detail::counter_hash(rng.key, step, slot);
    const std::uint64_t h2 = splitmix64(h1 ^ 0x9E6C63D0876A9A35ULL);
    const double u1 = detail::to_unit(h1);
    const double u2 = detail::to_unit(h2);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return NormalPair{r * std::cos(a), r * std::sin(a)};
}

inline double standard_normal(const CounterRng& rng, std::uint64_t step, std::uint64_t slot) {
    return normal_pair(rng, step, slot).z0;
}

} // namespace snslab
