#pragma once

#include <cstdint>
#include <vector>

#include "snslab/dynamics.hpp"
#include "snslab/lyapunov.hpp"
#include "snslab/stats.hpp"

namespace snslab {

// Statistical verifiers for the energy-balance identities and bounds. Every
// check returns the estimate, its CI, the bound it is held against, and a
// pass flag; nothing asserts internally.

struct BoundCheck {
    double t = 0.0;
    MeanCi estimate;
    double bound = 0.0;
    bool pass = false;
};

// E ||u(t)||^2 <= e^{-2 nu t} ||u0||^2 + (E0 / 2 nu)(1 - e^{-2 nu t}),
// checked at the given sample times over a fresh ensemble; the bound gets
// 3 SE statistical slack plus an additive discretization allowance
// slack_rate * dt * E0 (slack_rate calibrated once by step-halving; the
// explicit nonlinear term inflates energy at O(dt)).
struct EnergyBoundConfig {
    std::vector<double> sample_times;
    std::size_t ensemble = 128;
    double slack_rate = 6.0;
    int threads = 1;
};

std::vector<BoundCheck> energy_moment_bound_check(const SolverConfig& cfg, const SpectralField& u0,
                                                  const EnergyBoundConfig& opt, const CounterRng& rng);

// Time-and-ensemble average of 2 nu ||Lambda u||^2 against E0, and of
// 2 nu ||Lambda^2 u||^2 against E1, after burn-in.
struct StationaryBalance {
    double mean_dissipation = 0.0; // 2 nu <||Lambda u||^2>
    double e0 = 0.0;
    double rel_err_energy = 0.0;
    double mean_palinstrophy_rate = 0.0; // 2 nu <||Lambda^2 u||^2>
    double e1 = 0.0;
    double rel_err_enstrophy = 0.0;
    double se_dissipation = 0.0; // across-trajectory SE of the time averages
    std::size_t ensemble = 0;
};

StationaryBalance stationary_balance_check(const SolverConfig& cfg, double horizon, double burn_in,
                                           std::size_t ensemble, const CounterRng& rng,
                                           int threads = 1);

// Tail of the pathwise growth statistic: empirical P{stat > K} against
// exp(-2 C3 eps K), on an ensemble of SNS trajectories from u0 = 0.
struct EnvelopeTailPoint {
    double eps = 0.0, K = 0.0;
    MeanCi exceed; // empirical probability with SE
    double bound = 0.0;
    bool pass = false;     // mean <= bound + 3 SE
    bool admissible = true; // K > 1/(eps C3)
};

std::vector<EnvelopeTailPoint> sns_envelope_tail(const SolverConfig& cfg, double horizon,
                                                 std::size_t ensemble,
                                                 const std::vector<std::pair<double, double>>& eps_K,
                                                 const CounterRng& rng, int threads = 1);

std::vector<EnvelopeTailPoint> toy_envelope_tail(const ToyConfig& cfg, double horizon,
                                                 std::size_t ensemble,
                                                 const std::vector<std::pair<double, double>>& eps_K,
                                                 const CounterRng& rng);

// Exponential-envelope exit statistics: fraction of paths whose B(M) excess
// first crosses M after time t, fitted for an exponential tail.
struct ExitTail {
    std::vector<double> times;
    std::vector<double> survival; // P{exit time > t, path exits}
    LineFit fit;                  // log survival vs t (on positive entries)
    double exit_fraction = 0.0;
};

ExitTail exp_envelope_exit_tail(const SolverConfig& cfg, double M, double horizon,
                                std::size_t ensemble, const CounterRng& rng, int threads = 1);

// Spectral decay envelope fit: per integer shell s (|k| in [s-1/2, s+1/2)),
// takes the maximum of |u_k| = |w_k|/|k|, and fits log max against the true
// |k| of the argmax over shells [shell_lo, shell_hi]. Needs >= 6 nonempty
// shells. Returns tau_hat = -slope, D_hat = exp(intercept).
struct DecayFit {
    double tau = 0.0;
    double D = 0.0;
    double r2 = 0.0;
    std::size_t shells_used = 0;
};

DecayFit spectral_decay_fit(const SpectralField& w, int shell_lo, int shell_hi);

// Small-scale comparison: paired SNS/OU runs driven by identical increments,
// per-mode vorticity paths rescaled to w'_k = sqrt(2) w_k / |sigma_k| (so the
// OU copy is stationarity-normalized, E|z'_k|^2 = 1/nu for every k), compared
// through a fixed library of bounded uniformly continuous path functionals.
struct ShellDistance {
    double shell = 0.0;          // nominal |k| of the shell
    double mean_distance = 0.0;  // E |F(w') - F(z')| averaged over library and modes
    double se = 0.0;
    std::size_t modes = 0;
};

struct SmallScaleResult {
    std::vector<ShellDistance> shells;
    double kendall_p = 1.0; // one-sided p for decreasing trend
    bool monotone = false;
};

SmallScaleResult small_scale_ou_compare(const SolverConfig& cfg, const std::vector<double>& shellList,
                                        double horizon, std::size_t ensemble, const CounterRng& rng,
                                        int threads = 1);

// OU per-mode stationary variance against |sigma_k|^2 / (2 nu): long-run time
// average of |z_k|^2 per forced representative, SE from batch means.
struct OuVariancePoint {
    int k1 = 0, k2 = 0;
    MeanCi estimate;
    double target = 0.0;
    bool pass = false; // |mean - target| <= 3 SE
};

std::vector<OuVariancePoint> ou_stationary_variance_check(const SolverConfig& cfg, double horizon,
                                                          double burn_in, std::size_t ensemble,
                                                          const CounterRng& rng);

} // namespace snslab
