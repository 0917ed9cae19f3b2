#include "doctest.h"

#include <cmath>

#include "snslab/coupling.hpp"

using namespace snslab;

TEST_CASE("toy segment matches a manual replay of the same arithmetic") {
    ToyCouplingModel model;
    const CounterRng stream = make_rng(17);
    ToyState s{0.8, -0.4};
    ToyCouplingModel::LowPath lp;
    ToyState run = s;
    const SegmentOutcome out = model.run_segment(run, stream, 0, &lp);
    REQUIRE(lp.size() == model.steps_per_unit());

    const LyapunovSpec ls = model.lyapunov();
    ToyState ms = s;
    double integ = 0.0, sup = 0.0, g = 0.0;
    const double v0 = ms.h * ms.h + ms.l * ms.l;
    for (std::uint64_t i = 0; i < model.steps_per_unit(); ++i) {
        CHECK(lp[i] == ms.l);
        integ += (model.cfg.nu1 * ms.h * ms.h + model.cfg.nu2 * ms.l * ms.l) * model.cfg.dt;
        const NormalPair z = normal_pair(stream, i, 0);
        ms = step_toy(model.cfg, ms, z.z0, z.z1);
        const double t = static_cast<double>(i + 1) * model.cfg.dt;
        g = ms.h * ms.h + ms.l * ms.l - v0 + (1.0 - model.eps_star) * integ -
            ls.C1 * (1.0 + model.eps_star) * t;
        sup = std::max(sup, g);
    }
    CHECK(run.h == ms.h);
    CHECK(run.l == ms.l);
    CHECK(out.growth_sup == sup);
    CHECK(out.growth_end == g);
}

TEST_CASE("toy reconstruction from the donor's own start is the identity") {
    ToyCouplingModel model;
    const CounterRng stream = make_rng(5);
    const ToyState start{1.2, 0.1};
    ToyState donor = start;
    ToyCouplingModel::LowPath lp;
    model.run_segment(donor, stream, 0, &lp);

    const ToyState rebuilt = model.reconstruct(donor, lp, start, stream, 0);
    CHECK(rebuilt.h == donor.h); // same lows, same noise: bitwise replay
    CHECK(rebuilt.l == donor.l);
}

TEST_CASE("segment outcomes chain across units") {
    ToyCouplingModel model;
    const CounterRng s1 = make_rng(21), s2 = make_rng(22);
    ToyState s{0.5, 0.5};

    ToyState chained = s;
    const SegmentOutcome a = model.run_segment(chained, s1, 0, nullptr);
    const SegmentOutcome b = model.run_segment(chained, s2, 0, nullptr);
    const double sup2 = std::max(a.growth_sup, a.growth_end + b.growth_sup);
    const double end2 = a.growth_end + b.growth_end;

    // manual two-unit pass with the statistic accumulated from t0 = 0
    const LyapunovSpec ls = model.lyapunov();
    ToyState ms = s;
    const double v0 = ms.h * ms.h + ms.l * ms.l;
    double integ = 0.0, sup = 0.0, g = 0.0;
    const auto spu = model.steps_per_unit();
    for (std::uint64_t i = 0; i < 2 * spu; ++i) {
        integ += (model.cfg.nu1 * ms.h * ms.h + model.cfg.nu2 * ms.l * ms.l) * model.cfg.dt;
        const NormalPair z = normal_pair(i < spu ? s1 : s2, i % spu, 0);
        ms = step_toy(model.cfg, ms, z.z0, z.z1);
        const double t = static_cast<double>(i + 1) * model.cfg.dt;
        g = ms.h * ms.h + ms.l * ms.l - v0 + (1.0 - model.eps_star) * integ -
            ls.C1 * (1.0 + model.eps_star) * t;
        sup = std::max(sup, g);
    }
    CHECK(chained.h == ms.h);
    CHECK(sup2 == doctest::Approx(sup).epsilon(1e-12));
    CHECK(end2 == doctest::Approx(g).epsilon(1e-12));
}

TEST_CASE("toy chain couples and then contracts the hidden coordinate") {
    ToyCouplingModel model;
    ChainConfig cfg;
    cfg.replicas = 32;
    cfg.bin_width = 0.2;
    cfg.max_units = 16;
    const ChainResult res =
        run_coupling_chain(model, ToyState{1.0, 0.5}, ToyState{-1.0, -0.5}, cfg, make_rng(1));

    // unit bookkeeping: steps partition the consumed time budget
    std::uint64_t units = 0;
    double last_t = 0.0;
    for (const ChainStep& st : res.steps) {
        CHECK(st.segment_len >= 1);
        units += st.segment_len;
        CHECK(st.t_end == doctest::Approx(static_cast<double>(units)));
        CHECK(st.t_end > last_t);
        last_t = st.t_end;
        CHECK(st.rho_hat >= 0.0);
        CHECK(st.rho_hat <= 1.0);
    }
    CHECK(units <= cfg.max_units);
    REQUIRE(res.unit_coords_u.size() == units);
    REQUIRE(res.unit_coords_v.size() == units);

    REQUIRE(res.coupled);
    CHECK(res.coupling_time >= 1.0);
    REQUIRE(res.post_distance.size() >= 3);

    // after the meet the observed coordinate is pinned: l agrees exactly
    const auto ct = static_cast<std::size_t>(res.coupling_time);
    for (std::size_t t = ct; t <= units; ++t) {
        CHECK(res.unit_coords_u[t - 1][1] == res.unit_coords_v[t - 1][1]);
    }
    // and the hidden coordinate contracts at least at rate nu1 - L1 = 1
    for (std::size_t i = 1; i < res.post_distance.size(); ++i)
        CHECK(res.post_distance[i] <= res.post_distance[i - 1] * std::exp(-0.9) + 1e-300);
    CHECK(res.growth_cap_used > 0.0);
    CHECK(res.inside_radius_used == doctest::Approx(4.0 * model.lyapunov().C1));
}

TEST_CASE("chain excursion steps bundle the outside stretch") {
    ToyCouplingModel model;
    ChainConfig cfg;
    cfg.replicas = 8;
    cfg.bin_width = 0.2;
    cfg.max_units = 12;
    cfg.inside_radius = 0.5; // tiny ball: start far outside
    const ChainResult res =
        run_coupling_chain(model, ToyState{3.0, 3.0}, ToyState{-3.0, 3.0}, cfg, make_rng(2));
    REQUIRE(!res.steps.empty());
    CHECK(!res.steps.front().inside);
    CHECK(res.steps.front().segment_len >= 1);
    // v_pair is recorded at the step end and decides the next step's regime
    for (std::size_t i = 0; i + 1 < res.steps.size(); ++i) {
        if (res.steps[i + 1].inside && !res.steps[i + 1].coupled)
            CHECK(res.steps[i].v_pair <= cfg.inside_radius);
    }
}

TEST_CASE("meet-mass curve is monotone within its error bars") {
    ToyCouplingModel model;
    const RhoHatCurve curve = rho_hat_curve(model, ToyState{1.0, 0.5}, ToyState{-1.0, -0.5}, 3,
                                            48, 0.2, 1e9, 4, make_rng(3));
    REQUIRE(curve.rho.size() == 3);
    for (double r : curve.rho) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
    CHECK(curve.rho[0] > 0.0);
    CHECK(curve.monotone_within_ci);
}

TEST_CASE("coupling time survival falls off and most runs couple") {
    ToyCouplingModel model;
    ChainConfig cfg;
    cfg.replicas = 24;
    cfg.bin_width = 0.2;
    cfg.max_units = 12;
    const CouplingTimeTail tail =
        coupling_time_tail(model, ToyState{0.5, 0.2}, ToyState{-0.5, -0.2}, cfg, 30, make_rng(4));
    CHECK(tail.coupled_fraction > 0.5);
    REQUIRE(tail.survival.size() >= 2);
    CHECK(tail.survival.front() == 1.0);
    for (std::size_t i = 1; i < tail.survival.size(); ++i)
        CHECK(tail.survival[i] <= tail.survival[i - 1]);
}

TEST_CASE("chain marginals match direct simulation") {
    ToyCouplingModel model;
    ChainConfig cfg;
    cfg.replicas = 48;
    cfg.bin_width = 0.1;
    cfg.max_units = 6;
    const MarginalCheck mc = chain_marginal_check(model, ToyState{0.8, 0.3}, ToyState{-0.8, -0.3},
                                                  cfg, 3, 120, make_rng(6));
    REQUIRE(mc.tests.size() == 4); // h, l on each side
    CHECK(mc.pass);
}

TEST_CASE("galerkin chain pins the observed modes after coupling") {
    // every observed mode must be forced: an unforced mode started at rest
    // stays exactly zero and straddles the lattice boundary against its
    // near-zero twin, so the histograms could never meet
    SolverConfig scfg;
    scfg.grid = WaveGrid(8);
    scfg.nu = 2.0;
    scfg.dt = 0.01;
    scfg.forcing = power_law_forcing(1.0, 2.0, 2.0);
    const GalerkinCouplingModel model(scfg, 2.0);
    CHECK(model.low_dim() == 8); // (1,0), (0,1), (1,1), (-1,1) representatives

    ChainConfig cfg;
    cfg.replicas = 24;
    cfg.bin_width = 0.25;
    cfg.max_units = 8;
    SpectralField v0 =
        random_field(scfg.grid, make_rng(70), [](double r) { return 0.25 * std::exp(-r); });
    const ChainResult res =
        run_coupling_chain(model, model.initial_state(), v0, cfg, make_rng(7));
    REQUIRE(res.coupled);
    const auto units = static_cast<std::size_t>(res.steps.back().t_end);
    for (auto t = static_cast<std::size_t>(res.coupling_time); t <= units; ++t) {
        const auto& cu = res.unit_coords_u[t - 1];
        const auto& cv = res.unit_coords_v[t - 1];
        for (std::size_t c = 0; c < model.low_dim(); ++c) CHECK(cu[c] == cv[c]);
    }
    for (std::size_t i = 0; i + 1 < res.post_distance.size(); ++i)
        CHECK(res.post_distance[i + 1] < res.post_distance[i] + 1e-12);
}

TEST_CASE("galerkin reconstruction from the donor's own start is the identity") {
    SolverConfig scfg;
    scfg.grid = WaveGrid(12);
    scfg.nu = 1.0;
    scfg.dt = 0.01;
    scfg.forcing = four_mode_forcing(2.0);
    const GalerkinCouplingModel model(scfg, 2.0);

    const CounterRng stream = make_rng(9);
    const SpectralField start =
        random_field(scfg.grid, make_rng(10), [](double r) { return std::exp(-0.5 * r); });
    SpectralField donor = start;
    GalerkinCouplingModel::LowPath lp;
    model.run_segment(donor, stream, 0, &lp);

    const SpectralField rebuilt = model.reconstruct(donor, lp, start, stream, 0);
    double worst = 0.0;
    for_each_mode(scfg.grid, [&](int k1, int k2) {
        worst = std::max(worst, std::abs(rebuilt.at(k1, k2) - donor.at(k1, k2)));
    });
    CHECK(worst == 0.0);
}
