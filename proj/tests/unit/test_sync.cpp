#include "doctest.h"

#include <cmath>

#include "snslab/sync.hpp"

using namespace snslab;

namespace {
SyncConfig quick_sync() {
    SyncConfig s;
    s.solver.grid = WaveGrid(16);
    s.solver.nu = 1.0;
    s.solver.dt = 0.01;
    s.solver.forcing = four_mode_forcing(2.0);
    s.nstar = 4.0;
    s.burn_in = 2.0;
    s.horizon = 6.0;
    s.perturbation = 1.0;
    s.max_points = 128;
    return s;
}
} // namespace

TEST_CASE("nonlinearity constant estimate is deterministic and batch-stable") {
    const WaveGrid g(16);
    const NonlinearityConstant a = estimate_nonlinearity_constant(g, 4.0, 80, make_rng(11));
    const NonlinearityConstant b = estimate_nonlinearity_constant(g, 4.0, 80, make_rng(11));
    CHECK(a.c_hat == b.c_hat);
    CHECK(a.c_hat > 0.0);
    CHECK(a.samples == 80);
    CHECK(a.stable);
    CHECK(a.c_hat == doctest::Approx(std::max(a.batch_a, a.batch_b)));
}

TEST_CASE("slaved copy collapses onto the reference") {
    const SyncConfig cfg = quick_sync();
    const NonlinearityConstant nc =
        estimate_nonlinearity_constant(cfg.solver.grid, cfg.nstar, 80, make_rng(1));
    const SyncResult r = run_sync(cfg, nc.c_hat, make_rng(2));

    REQUIRE(r.times.size() >= 8);
    CHECK(r.times.front() == 0.0);
    CHECK(r.dist_energy.front() == doctest::Approx(cfg.perturbation).epsilon(1e-12));
    CHECK(r.ratio_end < 1e-3);
    CHECK(r.logfit.slope < 0.0);
    CHECK(r.bound_margin <= 0.0); // pathwise conditional contraction held

    // grad statistics come from the reference trajectory
    CHECK(r.grad_sq_mean > 0.0);
    CHECK(r.grad_integral.front() == 0.0);
    for (std::size_t i = 1; i < r.grad_integral.size(); ++i)
        CHECK(r.grad_integral[i] >= r.grad_integral[i - 1]);
    CHECK(r.inputs_checksum != 0);
}

TEST_CASE("same seed reproduces the sync curves bitwise") {
    const SyncConfig cfg = quick_sync();
    const SyncResult a = run_sync(cfg, 0.0, make_rng(33));
    const SyncResult b = run_sync(cfg, 0.0, make_rng(33));
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        CHECK(a.dist_energy[i] == b.dist_energy[i]);
        CHECK(a.dist_enstrophy[i] == b.dist_enstrophy[i]);
    }
    CHECK(a.inputs_checksum == b.inputs_checksum);
}

TEST_CASE("sync config validation") {
    SyncConfig cfg = quick_sync();
    CHECK_NOTHROW(cfg.validate());
    cfg.nstar = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = quick_sync();
    cfg.horizon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("large viscosity collapses paired and pullback runs") {
    SolverConfig cfg;
    cfg.grid = WaveGrid(8);
    cfg.nu = 4.0;
    cfg.dt = 0.005;
    cfg.forcing = four_mode_forcing(2.0);

    const NonlinearityConstant nc = estimate_nonlinearity_constant(cfg.grid, 1.0, 60, make_rng(4));
    const LargeNuResult r = large_nu_contraction(cfg, nc.c_hat, 4.0, 6, make_rng(5));

    CHECK(r.criterion == doctest::Approx(nc.c_hat * 2.0 / 64.0));
    CHECK(r.criterion < 0.5);
    REQUIRE(r.paired_curve.size() == 5); // t = 0..4
    CHECK(r.paired_curve.front() > 0.0);
    CHECK(r.paired_distance_end < 1e-6);
    CHECK(r.paired_distance_end == doctest::Approx(r.paired_curve.back()));
    REQUIRE(r.pullback_sup.size() >= 3);
    CHECK(r.pullback_cauchy);
    CHECK(r.pullback_fit.slope < 0.0);
}
