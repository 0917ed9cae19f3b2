#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snslab/forcing.hpp"
#include "snslab/nonlinear.hpp"
#include "snslab/spectral_field.hpp"

namespace snslab {

struct SimulationBlowup : std::runtime_error {
    std::uint64_t step;
    double enstrophy_value;
    SimulationBlowup(std::uint64_t s, double e)
        : std::runtime_error("simulation blow-up: enstrophy " + std::to_string(e) + " at step " +
                             std::to_string(s)),
          step(s), enstrophy_value(e) {}
};

struct SolverConfig {
    WaveGrid grid;
    double nu = 1.0;
    double dt = 1e-2;
    ForcingSpec forcing;
    double blowup_threshold = 1e12;

    void validate() const {
        if (!(nu > 0.0)) throw std::invalid_argument("SolverConfig: nu must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("SolverConfig: dt must be positive");
        forcing.validate_for_grid(grid);
    }
};

// One-step integrators sharing a single noise convention: the caller supplies
// raw Brownian normals (NoiseIncrement) and every scheme maps them through
// the exact per-mode OU variance factor, so the SNS step with the
// nonlinearity turned off reproduces step_ou bitwise.
class SnsStepper {
  public:
    explicit SnsStepper(const SolverConfig& cfg)
        : cfg_(cfg), ws_(cfg.grid), nbuf_(cfg.grid) {
        cfg_.validate();
    }

    const SolverConfig& config() const { return cfg_; }

    // w <- e^{-nu |k|^2 dt} (w + dt N(w)) + exact OU noise integral
    void step(SpectralField& w, const NoiseIncrement& noise, std::uint64_t step_index = 0);

    // linear + noise only; exact distributional OU update
    void step_ou(SpectralField& z, const NoiseIncrement& noise);

    // full step followed by Euclidean truncation |k| < ncut (applied to the
    // state both before and after, so truncated modes never feed back)
    void step_galerkin(SpectralField& w, const NoiseIncrement& noise, double ncut,
                       std::uint64_t step_index = 0);

    NonlinearWorkspace& workspace() { return ws_; }

  private:
    void check_blowup(const SpectralField& w, std::uint64_t step_index) const;

    SolverConfig cfg_;
    NonlinearWorkspace ws_;
    SpectralField nbuf_;
};

// Low-mode trace of a trajectory: values of all retained modes with
// |k| < nstar at each step start, stored compactly.
struct LowModePath {
    double nstar = 0.0;
    double dt = 0.0;
    std::vector<std::pair<int, int>> modes; // upper-half-plane representatives
    std::vector<std::vector<cplx>> values;  // per step, aligned with modes

    static LowModePath allocate(const WaveGrid& g, double nstar, double dt);
    void record(const SpectralField& w);
    void load_into(SpectralField& w, std::size_t step) const; // writes lows, leaves highs
    std::size_t steps() const { return values.size(); }
    std::uint64_t checksum() const;
};

// Inputs shared across high-mode re-solves: the low-mode trace and the noise
// stream (eta is the |k| >= nstar share of each increment). Checksums let
// callers assert that paired solves really consumed identical inputs.
struct SharedInputs {
    double nstar = 0.0;
    LowModePath low;
    CounterRng noise_stream;
    std::uint64_t step0 = 0;
    std::uint64_t checksum() const;
};

// Integrates h' + nu Lambda^2 h + P_h B(h + l) = P_h dEta with the same
// scheme as SnsStepper::step; on_step(i, h) fires after every step (i from 1)
// with P_l h identically zero.
SpectralField high_mode_flow(const SolverConfig& cfg, const SharedInputs& inputs, SpectralField h0,
                             const std::function<void(std::size_t, const SpectralField&)>& on_step = {});

// CSV spectral dump: header + one "k1,k2,re,im" row per retained mode.
void dump_csv(const SpectralField& f, const std::string& path);
SpectralField load_csv(const WaveGrid& g, const std::string& path);

} // namespace snslab
