#include "doctest.h"

#include <cmath>

#include "snslab/estimators.hpp"

using namespace snslab;

TEST_CASE("spectral decay fit recovers a planted exponential envelope") {
    const WaveGrid g(24);
    SpectralField w(g);
    const double tau = 0.85, D = 3.0;
    for_each_mode(g, [&](int k1, int k2) {
        if (g.aliased(k1, k2)) return;
        const double r = std::sqrt(static_cast<double>(ksq(k1, k2)));
        if (k2 > 0 || (k2 == 0 && k1 > 0)) {
            const cplx v(r * D * std::exp(-tau * r), 0.0); // |u_k| = D e^{-tau r}
            w.at(k1, k2) = v;
            w.at(-k1, -k2) = std::conj(v);
        }
    });
    const DecayFit fit = spectral_decay_fit(w, 2, 7);
    CHECK(fit.shells_used == 6);
    // every shell maximum sits exactly on the planted line
    CHECK(fit.tau == doctest::Approx(tau).epsilon(1e-10));
    CHECK(fit.D == doctest::Approx(D).epsilon(1e-8));
    CHECK(fit.r2 > 1.0 - 1e-12);
}

TEST_CASE("energy moment bound holds on a small ensemble and is thread-invariant") {
    SolverConfig cfg;
    cfg.grid = WaveGrid(8);
    cfg.nu = 1.0;
    cfg.dt = 0.01;
    cfg.forcing = four_mode_forcing(1.0);

    EnergyBoundConfig opt;
    opt.sample_times = {0.5, 1.0};
    opt.ensemble = 32;
    opt.slack_rate = 6.0;
    opt.threads = 1;

    const SpectralField u0(cfg.grid);
    const CounterRng rng = make_rng(2024);
    const auto checks = energy_moment_bound_check(cfg, u0, opt, rng);
    REQUIRE(checks.size() == 2);
    for (const auto& c : checks) {
        CHECK(c.pass);
        CHECK(c.estimate.mean > 0.0);
        CHECK(c.estimate.mean <= c.bound);
    }

    // per-index noise slots: the reduction is identical for any thread count
    opt.threads = 3;
    const auto checks3 = energy_moment_bound_check(cfg, u0, opt, rng);
    for (std::size_t i = 0; i < checks.size(); ++i) {
        CHECK(checks3[i].estimate.mean == checks[i].estimate.mean);
        CHECK(checks3[i].estimate.se == checks[i].estimate.se);
    }
}

TEST_CASE("ou stationary variance estimator tracks the closed-form target") {
    SolverConfig cfg;
    cfg.grid = WaveGrid(8);
    cfg.nu = 1.0;
    cfg.dt = 0.01;
    cfg.forcing = four_mode_forcing(1.0);

    const auto points = ou_stationary_variance_check(cfg, 40.0, 4.0, 8, make_rng(3));
    REQUIRE(points.size() == 2);
    for (const auto& p : points) {
        // E|z_k|^2 = (amp_cos^2 + amp_sin^2) / (8 nu) = E0/2 per four-mode rep / (2 nu)
        CHECK(p.target == doctest::Approx(0.125).epsilon(1e-14));
        CHECK(std::abs(p.estimate.mean - p.target) <= 5.0 * p.estimate.se);
    }
}

TEST_CASE("envelope tail points carry admissibility and bounds") {
    SolverConfig cfg;
    cfg.grid = WaveGrid(8);
    cfg.nu = 1.0;
    cfg.dt = 0.01;
    cfg.forcing = four_mode_forcing(1.0);
    // C3 = nu / (2 sigma*^2) = 2

    const std::vector<std::pair<double, double>> pts{{0.5, 4.0}, {0.5, 0.5}};
    const auto tail = sns_envelope_tail(cfg, 3.0, 32, pts, make_rng(6), 1);
    REQUIRE(tail.size() == 2);
    CHECK(tail[0].admissible); // K = 4 > 1/(eps C3) = 1
    CHECK(!tail[1].admissible);
    for (const auto& p : tail) {
        CHECK(p.bound == doctest::Approx(std::exp(-2.0 * 2.0 * p.eps * p.K)).epsilon(1e-12));
        CHECK(p.exceed.mean >= 0.0);
        CHECK(p.exceed.mean <= 1.0);
    }
    CHECK(tail[0].pass); // generous bound at K = 4

    const auto toy = toy_envelope_tail(ToyConfig{}, 2.0, 64, {{0.5, 40.0}}, make_rng(8));
    REQUIRE(toy.size() == 1);
    CHECK(toy[0].pass);
}

TEST_CASE("exponential-envelope exit statistics are well formed") {
    SolverConfig cfg;
    cfg.grid = WaveGrid(8);
    cfg.nu = 0.5;
    cfg.dt = 0.01;
    cfg.forcing = four_mode_forcing(2.0);

    const ExitTail tail = exp_envelope_exit_tail(cfg, 0.05, 3.0, 48, make_rng(10), 1);
    CHECK(tail.exit_fraction >= 0.0);
    CHECK(tail.exit_fraction <= 1.0);
    REQUIRE(!tail.survival.empty());
    for (std::size_t i = 1; i < tail.survival.size(); ++i)
        CHECK(tail.survival[i] <= tail.survival[i - 1]); // survival curves only fall
}
