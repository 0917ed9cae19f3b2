#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "snslab/rng.hpp"
#include "snslab/spectral_field.hpp"

namespace snslab {

// White-in-time spectral forcing. Canonical internal form is the real one:
// velocity-level noise
//   W = sum_k amp_cos (k_perp/|k|) cos(k.x) b_k + amp_sin (k_perp/|k|) sin(k.x) B_k
// over upper-half-plane representatives k (k2 > 0, or k2 == 0 and k1 > 0),
// with b_k, B_k independent standard Brownian motions. At vorticity level one
// unit of b/B noise contributes the Hermitian coefficient pair
//   dw_k = (|k|/2) (amp_sin dB_k + i amp_cos db_k),   dw_{-k} = conj(dw_k).
// The complex form (sigma_k at k, conj(sigma_k) at -k, complex Brownian
// (b + iB)/sqrt(2)) is law-equivalent to amp_cos = amp_sin = sqrt(2)|sigma_k|;
// the rotation between the two Brownian pairs is orthogonal, so all induced
// statistics (and every bookkeeping constant below) agree.
//
// Bookkeeping at velocity level:
//   energy injection   E0      = (1/2) sum_k (amp_cos^2 + amp_sin^2)
//   enstrophy injection E1     = (1/2) sum_k |k|^2 (amp_cos^2 + amp_sin^2)
//   peak amplitude     sigma*^2 = max_k (amp_cos^2 + amp_sin^2)/4
// which reduce to sum |sigma_k|^2, sum |k|^2 |sigma_k|^2 and max |sigma_k|^2
// over the full symmetric mode set in the complex form.

struct ForcedMode {
    int k1 = 0, k2 = 0;
    double amp_cos = 0.0, amp_sin = 0.0;
};

struct ForcingSpec {
    std::vector<ForcedMode> modes;

    static ForcingSpec real_form(const std::vector<std::array<double, 4>>& entries);
    static ForcingSpec complex_form(const std::vector<std::array<double, 4>>& entries);

    // Equal-amplitude specs convert back to the complex form (phase 0);
    // throws otherwise, since cos-only/sin-only forcing has no complex twin.
    std::vector<std::array<double, 4>> as_complex_entries() const;

    double energy_rate() const {
        double s = 0.0;
        for (const auto& m : modes) s += 0.5 * (m.amp_cos * m.amp_cos + m.amp_sin * m.amp_sin);
        return s;
    }
    double enstrophy_rate() const {
        double s = 0.0;
        for (const auto& m : modes)
            s += 0.5 * static_cast<double>(ksq(m.k1, m.k2)) *
                 (m.amp_cos * m.amp_cos + m.amp_sin * m.amp_sin);
        return s;
    }
    double max_amplitude_sq() const {
        double s = 0.0;
        for (const auto& m : modes) {
            const double v = 0.25 * (m.amp_cos * m.amp_cos + m.amp_sin * m.amp_sin);
            if (v > s) s = v;
        }
        return s;
    }
    // All forced wavevectors strictly inside |k| < r.
    bool inside_radius(double r) const {
        for (const auto& m : modes)
            if (static_cast<double>(ksq(m.k1, m.k2)) >= r * r) return false;
        return true;
    }
    // Largest forced |k| (0 for empty spec).
    double max_radius() const {
        double s = 0.0;
        for (const auto& m : modes) s = std::max(s, std::sqrt(static_cast<double>(ksq(m.k1, m.k2))));
        return s;
    }
    void validate() const;
    void validate_for_grid(const WaveGrid& g) const;
};

// Raw Brownian increments for one step: standard normal pair per forced
// representative, to be scaled by the stepper's per-mode variance factor.
// A fixed (stream, step) always yields the same increments.
struct NoiseIncrement {
    double dt = 0.0;
    std::vector<NormalPair> xi; // z0 multiplies the cos channel, z1 the sin channel

    static NoiseIncrement zero(const ForcingSpec& spec, double dt) {
        NoiseIncrement n;
        n.dt = dt;
        n.xi.assign(spec.modes.size(), NormalPair{0.0, 0.0});
        return n;
    }
};

inline NoiseIncrement sample_increment(const ForcingSpec& spec, const CounterRng& stream,
                                       std::uint64_t step, double dt) {
    NoiseIncrement n;
    n.dt = dt;
    n.xi.resize(spec.modes.size());
    for (std::size_t i = 0; i < spec.modes.size(); ++i) n.xi[i] = normal_pair(stream, step, i);
    return n;
}

// Exact variance factor of the per-step OU stochastic integral
// int_0^dt e^{-lambda (dt-s)} dB(s); reduces to sqrt(dt) as lambda -> 0.
inline double ou_variance_factor(double lambda, double dt) {
    const double x = 2.0 * lambda * dt;
    if (x < 1e-12) return std::sqrt(dt * (1.0 - 0.5 * x));
    return std::sqrt((1.0 - std::exp(-x)) / (2.0 * lambda));
}

// Add the vorticity-level noise for one step to f. factor_of_k maps the
// forced wavevector to the variance factor standing in for sqrt(dt)
// (sqrt(dt) for plain increments, ou_variance_factor(nu |k|^2, dt) for the
// exactly integrated linear flow). Hermitian symmetry is enforced by
// construction.
template <typename FactorFn>
inline void add_noise(SpectralField& f, const ForcingSpec& spec, const NoiseIncrement& noise,
                      FactorFn&& factor_of_k) {
    for (std::size_t i = 0; i < spec.modes.size(); ++i) {
        const ForcedMode& m = spec.modes[i];
        const double r = std::sqrt(static_cast<double>(ksq(m.k1, m.k2)));
        const double fac = factor_of_k(m.k1, m.k2);
        const cplx dw = 0.5 * r * fac * cplx(m.amp_sin * noise.xi[i].z1, m.amp_cos * noise.xi[i].z0);
        f.at(m.k1, m.k2) += dw;
        f.at(-m.k1, -m.k2) += std::conj(dw);
    }
}

// Noise restricted to |k| >= nstar (high-mode share of a step's increment).
template <typename FactorFn>
inline void add_noise_high(SpectralField& f, const ForcingSpec& spec, const NoiseIncrement& noise,
                           double nstar, FactorFn&& factor_of_k) {
    for (std::size_t i = 0; i < spec.modes.size(); ++i) {
        const ForcedMode& m = spec.modes[i];
        const double r2 = static_cast<double>(ksq(m.k1, m.k2));
        if (r2 < nstar * nstar) continue;
        const double fac = factor_of_k(m.k1, m.k2);
        const cplx dw =
            0.5 * std::sqrt(r2) * fac * cplx(m.amp_sin * noise.xi[i].z1, m.amp_cos * noise.xi[i].z0);
        f.at(m.k1, m.k2) += dw;
        f.at(-m.k1, -m.k2) += std::conj(dw);
    }
}

// Convenience builders for common layouts.
ForcingSpec four_mode_forcing(double energy_rate); // +-(1,0), +-(0,1), equal amplitudes
// All representatives with 0 < |k| < radius, velocity amplitude |k|^{-alpha}
// scaled so the total energy rate is energy_rate.
ForcingSpec power_law_forcing(double alpha, double radius, double energy_rate);

} // namespace snslab
