#pragma once

#include <cmath>
#include <vector>

#include "snslab/stats.hpp"
#include "snslab/toy.hpp"

namespace snslab {

// Stochastic exponent of a drift change D(t) on the l-equation, accumulated
// as the exact one-step Gaussian likelihood ratio of the discrete scheme:
// step n contributes exp(c_n xi_n - c_n^2 / 2) with
//   c_n = e^{-nu2 dt} dt D_n / (sigma2 * variance factor),
// so E[exponent] = 1 holds exactly at any dt (martingale anchor), and c_n
// reduces to sqrt(dt) D_n / sigma2 as dt -> 0 (the textbook exponent).
struct ExponentAccumulator {
    double log_e = 0.0;
    double novikov = 0.0; // 1/2 sum c_n^2, the discrete 1/2 int (D/sigma)^2

    void push(double c_n, double xi_n) {
        log_e += c_n * xi_n - 0.5 * c_n * c_n;
        novikov += 0.5 * c_n * c_n;
    }
    double value() const { return std::exp(log_e); }
};

inline double exponent_step_scale(const ToyConfig& c) {
    return std::exp(-c.nu2 * c.dt) * c.dt / (c.sigma2 * toy_variance_factor(c.nu2, c.dt));
}

// Novikov-type a.s. bounds from the drift structure (velocity of the paper's
// two computations):
//   bounded drift:    exp(K^2 t / (2 sigma2^2))
//   pairing drift:    exp(L2 |h0 - h0~|^2 / (4 sigma2^2 (nu1 - L1)))
inline double novikov_bound_bounded(const ToyConfig& c, double horizon) {
    const double K = c.drift_bound();
    return std::exp(K * K * horizon / (2.0 * c.sigma2 * c.sigma2));
}

inline double novikov_bound_pairing(const ToyConfig& c, double h_gap) {
    const double gap = c.contraction_gap();
    if (!(gap > 0.0)) throw std::invalid_argument("novikov_bound_pairing: nu1 <= L1");
    return std::exp(c.L2() * h_gap * h_gap / (4.0 * c.sigma2 * c.sigma2 * gap));
}

struct GirsanovRun {
    MeanCi exponent_mean;       // target 1 (exact discrete martingale)
    MeanCi exponent_moment;     // E[exponent^p]
    double moment_bound = 0.0;  // D_*^{p(p-1)}
    double novikov_sup = 0.0;   // max over paths of exp(novikov sum)
    double novikov_bound = 0.0; // a.s. bound D_* from the pairing structure
    double p = 2.0;
};

// Simulates n_paths of the toy pairing (h from h0, h~ from h0_alt, shared l
// and eta; l driven by the h-copy), accumulates the exponent of the drift
// change D = F2(l, h) - F2(l, h~) along the realized l-noise, and estimates
// the martingale mean and the p-th moment against D_*^{p(p-1)}.
GirsanovRun girsanov_toy_pairing(const ToyConfig& c, double h0, double h0_alt, double horizon,
                                 std::size_t n_paths, double p, const CounterRng& stream);

} // namespace snslab
