#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "snslab/dynamics.hpp"
#include "snslab/toy.hpp"

namespace snslab {

// Abstract energy-balance constants: V along trajectories satisfies
// dV <= (C1 - U) dt + dM with U >= C2 V and d[M,M] <= U/C3 dt.
// All three are recomputed from the model configuration; none is hand-entered.
struct LyapunovSpec {
    double C1 = 0.0, C2 = 0.0, C3 = 0.0;
    double eps_star = 0.5; // envelope parameter in (0,1)

    void validate() const {
        if (!(C1 > 0.0) || !(C2 > 0.0) || !(C3 > 0.0))
            throw std::invalid_argument("LyapunovSpec: constants must be positive");
        if (!(eps_star > 0.0) || !(eps_star < 1.0))
            throw std::invalid_argument("LyapunovSpec: eps_star must lie in (0,1)");
    }
};

// V = ||u||^2, U = 2 nu ||Lambda u||^2: C1 = E0, C2 = 2 nu, C3 = nu/(2 sigma*^2).
inline LyapunovSpec sns_lyapunov(const SolverConfig& cfg, double eps_star = 0.5) {
    LyapunovSpec s;
    s.C1 = cfg.forcing.energy_rate();
    s.C2 = 2.0 * cfg.nu;
    s.C3 = cfg.nu / (2.0 * cfg.forcing.max_amplitude_sq());
    s.eps_star = eps_star;
    s.validate();
    return s;
}

// V = h^2 + l^2, U = nu1 h^2 + nu2 l^2:
// C1 = sigma1^2 + sigma2^2 + K^2 (1/nu1 + 1/nu2), C2 = min(nu1, nu2),
// C3 = min(nu1, nu2) / (4 max(sigma1^2, sigma2^2)).
inline LyapunovSpec toy_lyapunov(const ToyConfig& cfg, double eps_star = 0.5) {
    LyapunovSpec s;
    const double K = cfg.drift_bound();
    s.C1 = cfg.sigma1 * cfg.sigma1 + cfg.sigma2 * cfg.sigma2 + K * K * (1.0 / cfg.nu1 + 1.0 / cfg.nu2);
    s.C2 = std::min(cfg.nu1, cfg.nu2);
    const double smax = std::max(cfg.sigma1 * cfg.sigma1, cfg.sigma2 * cfg.sigma2);
    s.C3 = s.C2 / (4.0 * smax);
    s.eps_star = eps_star;
    s.validate();
    return s;
}

// Scalar trace of a trajectory: V and U sampled at uniform steps from t = 0.
struct EnergyTrace {
    double dt = 0.0;
    std::vector<double> V; // V[0] at t=0
    std::vector<double> U; // aligned with V

    std::size_t steps() const { return V.empty() ? 0 : V.size() - 1; }
    // left-point Riemann integral of U over [0, i dt]
    double integral_U(std::size_t i) const {
        double s = 0.0;
        for (std::size_t j = 0; j < i; ++j) s += U[j] * dt;
        return s;
    }
};

// sup over sample times t > 0 of
//   [V(t) + (1-eps) int_0^t U - V(0) - C1 t] / (1 + log(1 + t)).
inline double growth_statistic(const EnergyTrace& tr, const LyapunovSpec& spec, double eps) {
    if (tr.V.size() < 2) throw std::invalid_argument("growth_statistic: empty trace");
    double sup = -1e300;
    double iu = 0.0;
    for (std::size_t i = 1; i < tr.V.size(); ++i) {
        iu += tr.U[i - 1] * tr.dt;
        const double t = static_cast<double>(i) * tr.dt;
        const double num = tr.V[i] + (1.0 - eps) * iu - tr.V[0] - spec.C1 * t;
        const double val = num / (1.0 + std::log1p(t));
        if (val > sup) sup = val;
    }
    return sup;
}

// Forward envelope membership (B_n): growth statistic at eps_star bounded by n.
struct EnvelopeResult {
    bool inside = true;
    double first_exit_time = -1.0; // -1 when never exited
    double statistic = 0.0;        // the sup actually attained
};

inline EnvelopeResult forward_envelope_membership(const EnergyTrace& tr, const LyapunovSpec& spec,
                                                  double n_level) {
    EnvelopeResult r;
    double iu = 0.0;
    double sup = -1e300;
    for (std::size_t i = 1; i < tr.V.size(); ++i) {
        iu += tr.U[i - 1] * tr.dt;
        const double t = static_cast<double>(i) * tr.dt;
        const double val =
            (tr.V[i] + (1.0 - spec.eps_star) * iu - tr.V[0] - spec.C1 * t) / (1.0 + std::log1p(t));
        if (val > sup) sup = val;
        if (val > n_level && r.inside) {
            r.inside = false;
            r.first_exit_time = t;
        }
    }
    r.statistic = sup;
    return r;
}

// Backward envelope membership (A_n) for traces indexed on t <= 0: the trace
// holds V(0), V(-dt), ..., V(-m dt) and U likewise (U[j] over [-(j+1)dt, -j dt]).
// Tests [V(t) + (1-eps)|int_t^0 U| - C1 |t|] / (1 + log(1+|t|)) <= n.
inline EnvelopeResult backward_envelope_membership(const EnergyTrace& tr, const LyapunovSpec& spec,
                                                   double n_level) {
    EnvelopeResult r;
    double iu = 0.0;
    double sup = -1e300;
    for (std::size_t i = 1; i < tr.V.size(); ++i) {
        iu += tr.U[i - 1] * tr.dt;
        const double t_abs = static_cast<double>(i) * tr.dt;
        const double val =
            (tr.V[i] + (1.0 - spec.eps_star) * iu - spec.C1 * t_abs) / (1.0 + std::log1p(t_abs));
        if (val > sup) sup = val;
        if (val > n_level && r.inside) {
            r.inside = false;
            r.first_exit_time = -t_abs;
        }
    }
    r.statistic = sup;
    return r;
}

// Exponential-envelope membership (B(M)):
//   V(t) + (1-eps*) int_0^t U - V(0) <= M + C1 (1+eps*) t for all sample times.
inline EnvelopeResult exp_envelope_membership(const EnergyTrace& tr, const LyapunovSpec& spec,
                                              double M) {
    EnvelopeResult r;
    double iu = 0.0;
    double sup = -1e300;
    for (std::size_t i = 1; i < tr.V.size(); ++i) {
        iu += tr.U[i - 1] * tr.dt;
        const double t = static_cast<double>(i) * tr.dt;
        const double excess =
            tr.V[i] + (1.0 - spec.eps_star) * iu - tr.V[0] - spec.C1 * (1.0 + spec.eps_star) * t;
        if (excess > sup) sup = excess;
        if (excess > M && r.inside) {
            r.inside = false;
            r.first_exit_time = t;
        }
    }
    r.statistic = sup;
    return r;
}

} // namespace snslab
