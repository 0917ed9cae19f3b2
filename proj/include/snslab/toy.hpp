#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "snslab/rng.hpp"

namespace snslab {

// Two-component toy process
//   dh = (-nu1 h + F1(l, h)) dt + sigma1 dEta
//   dl = (-nu2 l + F2(l, h)) dt + sigma2 dXi
// with bounded drifts, F_i Lipschitz in h. Default family
//   F1 = a sin(h) + b cos(l),  F2 = c tanh(h) cos(l)
// has Lipschitz constants L1 = |a|, L2 = |c| and |F1| + |F2| <= |a|+|b|+|c|.
// Custom drifts may be supplied together with their constants; validation
// spot-checks the claimed bound by sampling.
struct ToyConfig {
    double nu1 = 2.0, nu2 = 1.0;
    double sigma1 = 0.8, sigma2 = 1.0;
    double a = 1.0, b = 0.5, c = 1.0;
    double dt = 1e-3;

    std::function<double(double, double)> F1; // (l, h)
    std::function<double(double, double)> F2;
    double custom_L1 = 0.0, custom_L2 = 0.0, custom_bound = 0.0;

    double f1(double l, double h) const { return F1 ? F1(l, h) : a * std::sin(h) + b * std::cos(l); }
    double f2(double l, double h) const { return F2 ? F2(l, h) : c * std::tanh(h) * std::cos(l); }
    double L1() const { return F1 ? custom_L1 : std::abs(a); }
    double L2() const { return F2 ? custom_L2 : std::abs(c); }
    double drift_bound() const {
        return (F1 || F2) ? custom_bound : std::abs(a) + std::abs(b) + std::abs(c);
    }
    double contraction_gap() const { return nu1 - L1(); } // must be positive for pathwise pairing

    void validate(const CounterRng& probe = make_rng(7)) const {
        if (!(nu1 > 0.0) || !(nu2 > 0.0)) throw std::invalid_argument("ToyConfig: decay rates must be positive");
        if (sigma1 < 0.0 || sigma2 < 0.0) throw std::invalid_argument("ToyConfig: noise amplitudes must be >= 0");
        if (!(dt > 0.0)) throw std::invalid_argument("ToyConfig: dt must be positive");
        // sampled check of |F1| + |F2| <= drift_bound
        const double B = drift_bound();
        for (std::uint64_t i = 0; i < 512; ++i) {
            const NormalPair z = normal_pair(probe, i, 0);
            const double l = 8.0 * z.z0, h = 8.0 * z.z1;
            if (std::abs(f1(l, h)) + std::abs(f2(l, h)) > B + 1e-9)
                throw std::invalid_argument("ToyConfig: sampled drift exceeds declared bound");
        }
    }
};

struct ToyState {
    double h = 0.0, l = 0.0;
};

// Exponential-Euler step, drift at the left point, exact OU noise variance.
inline double toy_variance_factor(double nu, double dt) {
    const double x = 2.0 * nu * dt;
    if (x < 1e-12) return std::sqrt(dt * (1.0 - 0.5 * x));
    return std::sqrt((1.0 - std::exp(-x)) / (2.0 * nu));
}

inline ToyState step_toy(const ToyConfig& c, const ToyState& s, double xi_eta, double xi_xi) {
    ToyState out;
    out.h = std::exp(-c.nu1 * c.dt) * (s.h + c.dt * c.f1(s.l, s.h)) +
            c.sigma1 * toy_variance_factor(c.nu1, c.dt) * xi_eta;
    out.l = std::exp(-c.nu2 * c.dt) * (s.l + c.dt * c.f2(s.l, s.h)) +
            c.sigma2 * toy_variance_factor(c.nu2, c.dt) * xi_xi;
    return out;
}

// h-flow driven by a FIXED low path and noise stream: the one-sided memory
// map taking (l on [s,t], eta, h(s)) to h(t). The low path carries values at
// step starts; eta normals come from the stream at (step0 + i, slot 0).
inline double toy_h_flow(const ToyConfig& c, const std::vector<double>& lpath, double h0,
                         const CounterRng& eta_stream, std::uint64_t step0,
                         std::vector<double>* h_trace = nullptr) {
    double h = h0;
    if (h_trace) {
        h_trace->clear();
        h_trace->push_back(h);
    }
    const double decay = std::exp(-c.nu1 * c.dt);
    const double amp = c.sigma1 * toy_variance_factor(c.nu1, c.dt);
    for (std::size_t i = 0; i < lpath.size(); ++i) {
        const double xi = normal_pair(eta_stream, step0 + i, 0).z0;
        h = decay * (h + c.dt * c.f1(lpath[i], h)) + amp * xi;
        if (h_trace) h_trace->push_back(h);
    }
    return h;
}

struct ContractionFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool degenerate = false; // initial gap below resolution; slope meaningless
};

// Runs two h-copies against one simulated (l, eta) environment and fits
// log |h - h~| against time. The environment's l is driven by the first copy.
ContractionFit toy_contraction_rate(const ToyConfig& c, double h0, double h0_alt, double horizon,
                                    const CounterRng& stream);

// Value of the memory functional started at time s < 0 from h(s) = h0, and
// the a-priori tail bound |h0 - h0_alt| e^{-(nu1 - L1)|s|} for the distance
// between restarts. truncation_tolerance picks |s| so the bound is below it.
struct MemoryFunctional {
    double value = 0.0;
    double start_time = 0.0;
    double tail_bound = 0.0;
};

MemoryFunctional toy_memory_functional(const ToyConfig& c, double truncation_tolerance,
                                       double spread, const CounterRng& stream);

} // namespace snslab
