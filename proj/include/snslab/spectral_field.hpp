#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "snslab/rng.hpp"

namespace snslab {

using cplx = std::complex<double>;

// Square of the Euclidean wavenumber; exact in integer arithmetic.
inline long long ksq(int k1, int k2) {
    return static_cast<long long>(k1) * k1 + static_cast<long long>(k2) * k2;
}

// Grid of retained wavevectors for resolution n: all k with |k_i| <= n/2.
// The nonlinear path zeroes modes with max(|k1|,|k2|) >= dealias_cutoff
// (default 2/3 rule: cutoff = n/3, so products of retained modes alias only
// onto discarded ones under a size-n transform).
struct WaveGrid {
    int n = 0;
    double dealias_cutoff = 0.0;

    WaveGrid() = default;
    explicit WaveGrid(int resolution, double cutoff = -1.0)
        : n(resolution), dealias_cutoff(cutoff < 0.0 ? resolution / 3.0 : cutoff) {
        if (n < 4 || n % 2 != 0) throw std::invalid_argument("WaveGrid: resolution must be even and >= 4");
        if (dealias_cutoff <= 1.0 || dealias_cutoff > n / 2.0 + 0.5)
            throw std::invalid_argument("WaveGrid: dealias cutoff out of range");
    }

    int kmax() const { return n / 2; }
    int side() const { return n + 1; }
    std::size_t size() const { return static_cast<std::size_t>(side()) * side(); }
    std::size_t index(int k1, int k2) const {
        return static_cast<std::size_t>(k1 + kmax()) + static_cast<std::size_t>(side()) * (k2 + kmax());
    }
    bool contains(int k1, int k2) const {
        return k1 >= -kmax() && k1 <= kmax() && k2 >= -kmax() && k2 <= kmax();
    }
    bool aliased(int k1, int k2) const {
        const int m = std::abs(k1) > std::abs(k2) ? std::abs(k1) : std::abs(k2);
        return static_cast<double>(m) >= dealias_cutoff;
    }
    bool operator==(const WaveGrid& o) const { return n == o.n && dealias_cutoff == o.dealias_cutoff; }
};

// Vorticity (or generic scalar) coefficients over the full symmetric grid.
// Real fields satisfy a(-k) = conj(a(k)); both members of each pair are
// stored and the mean mode is kept at zero.
struct SpectralField {
    WaveGrid grid;
    std::vector<cplx> a;

    SpectralField() = default;
    explicit SpectralField(const WaveGrid& g) : grid(g), a(g.size(), cplx(0.0, 0.0)) {}

    cplx& at(int k1, int k2) { return a[grid.index(k1, k2)]; }
    const cplx& at(int k1, int k2) const { return a[grid.index(k1, k2)]; }

    void clear() { std::fill(a.begin(), a.end(), cplx(0.0, 0.0)); }
};

// Iterates k over the stored square, skipping the origin.
template <typename F>
inline void for_each_mode(const WaveGrid& g, F&& f) {
    const int K = g.kmax();
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            if (k1 == 0 && k2 == 0) continue;
            f(k1, k2);
        }
}

// ||u||^2 = sum |w_k|^2 / |k|^2 (velocity L2 norm squared of u = curl^{-1} w).
inline double energy(const SpectralField& f) {
    double s = 0.0;
    for_each_mode(f.grid, [&](int k1, int k2) {
        s += std::norm(f.at(k1, k2)) / static_cast<double>(ksq(k1, k2));
    });
    return s;
}

// ||Lambda u||^2 = sum |w_k|^2.
inline double enstrophy(const SpectralField& f) {
    double s = 0.0;
    for_each_mode(f.grid, [&](int k1, int k2) { s += std::norm(f.at(k1, k2)); });
    return s;
}

// ||Lambda^2 u||^2 = sum |k|^2 |w_k|^2.
inline double palinstrophy(const SpectralField& f) {
    double s = 0.0;
    for_each_mode(f.grid, [&](int k1, int k2) {
        s += static_cast<double>(ksq(k1, k2)) * std::norm(f.at(k1, k2));
    });
    return s;
}

// <f, g> weighted by 1/|k|^2 (energy pairing; real part).
inline double energy_pairing(const SpectralField& f, const SpectralField& g) {
    double s = 0.0;
    for_each_mode(f.grid, [&](int k1, int k2) {
        s += (f.at(k1, k2) * std::conj(g.at(k1, k2))).real() / static_cast<double>(ksq(k1, k2));
    });
    return s;
}

// <f, g> unweighted (enstrophy pairing; real part).
inline double enstrophy_pairing(const SpectralField& f, const SpectralField& g) {
    double s = 0.0;
    for_each_mode(f.grid, [&](int k1, int k2) {
        s += (f.at(k1, k2) * std::conj(g.at(k1, k2))).real();
    });
    return s;
}

inline double energy_distance(const SpectralField& f, const SpectralField& g) {
    double s = 0.0;
    for_each_mode(f.grid, [&](int k1, int k2) {
        s += std::norm(f.at(k1, k2) - g.at(k1, k2)) / static_cast<double>(ksq(k1, k2));
    });
    return std::sqrt(s);
}

inline double enstrophy_distance(const SpectralField& f, const SpectralField& g) {
    double s = 0.0;
    for_each_mode(f.grid, [&](int k1, int k2) { s += std::norm(f.at(k1, k2) - g.at(k1, k2)); });
    return std::sqrt(s);
}

// Keep modes with |k| < nstar (Euclidean), zero the rest.
inline void project_low(SpectralField& f, double nstar) {
    const double c2 = nstar * nstar;
    for_each_mode(f.grid, [&](int k1, int k2) {
        if (static_cast<double>(ksq(k1, k2)) >= c2) f.at(k1, k2) = cplx(0.0, 0.0);
    });
    f.at(0, 0) = cplx(0.0, 0.0);
}

// Keep modes with |k| >= nstar, zero the rest (complementary projection).
inline void project_high(SpectralField& f, double nstar) {
    const double c2 = nstar * nstar;
    for_each_mode(f.grid, [&](int k1, int k2) {
        if (static_cast<double>(ksq(k1, k2)) < c2) f.at(k1, k2) = cplx(0.0, 0.0);
    });
    f.at(0, 0) = cplx(0.0, 0.0);
}

// Zero modes with max(|k1|,|k2|) >= grid cutoff (and the Nyquist ring, which
// the FFT layout cannot represent unambiguously).
inline void dealias(SpectralField& f) {
    for_each_mode(f.grid, [&](int k1, int k2) {
        if (f.grid.aliased(k1, k2)) f.at(k1, k2) = cplx(0.0, 0.0);
    });
    f.at(0, 0) = cplx(0.0, 0.0);
}

// Symmetrize so a(-k) = conj(a(k)) exactly.
inline void enforce_reality(SpectralField& f) {
    const int K = f.grid.kmax();
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            if (k2 < 0 || (k2 == 0 && k1 <= 0)) continue;
            const cplx v = 0.5 * (f.at(k1, k2) + std::conj(f.at(-k1, -k2)));
            f.at(k1, k2) = v;
            f.at(-k1, -k2) = std::conj(v);
        }
    f.at(0, 0) = cplx(f.at(0, 0).real(), 0.0);
}

inline double reality_defect(const SpectralField& f) {
    double worst = 0.0;
    for_each_mode(f.grid, [&](int k1, int k2) {
        const double d = std::abs(f.at(k1, k2) - std::conj(f.at(-k1, -k2)));
        if (d > worst) worst = d;
    });
    return worst;
}

// Random real field with isotropic profile amp(|k|), independent phases.
// Used by tests and constant-estimation sampling.
template <typename AmpFn>
inline SpectralField random_field(const WaveGrid& g, const CounterRng& rng, AmpFn&& amp) {
    SpectralField f(g);
    const int K = g.kmax();
    std::uint64_t slot = 0;
    for (int k2 = -K; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            ++slot;
            if (k2 < 0 || (k2 == 0 && k1 <= 0)) continue;
            if (g.aliased(k1, k2)) continue;
            const double r = std::sqrt(static_cast<double>(ksq(k1, k2)));
            const NormalPair z = normal_pair(rng, 0, slot);
            const cplx v = amp(r) * cplx(z.z0, z.z1) * 0.7071067811865475244;
            f.at(k1, k2) = v;
            f.at(-k1, -k2) = std::conj(v);
        }
    return f;
}

} // namespace snslab
