#include "doctest.h"

#include <cmath>

#include "snslab/lyapunov.hpp"

using namespace snslab;

namespace {
SolverConfig sns_config() {
    SolverConfig cfg;
    cfg.grid = WaveGrid(16);
    cfg.nu = 1.0;
    cfg.dt = 0.01;
    cfg.forcing = four_mode_forcing(2.0);
    return cfg;
}
} // namespace

TEST_CASE("energy-balance constants are recomputed from the configs") {
    const LyapunovSpec s = sns_lyapunov(sns_config());
    CHECK(s.C1 == doctest::Approx(2.0).epsilon(1e-14));  // E0
    CHECK(s.C2 == doctest::Approx(2.0).epsilon(1e-14));  // 2 nu
    CHECK(s.C3 == doctest::Approx(1.0).epsilon(1e-14));  // nu / (2 sigma*^2), sigma*^2 = 1/2

    const LyapunovSpec t = toy_lyapunov(ToyConfig{});
    // sigma1^2 + sigma2^2 + K^2 (1/nu1 + 1/nu2) with K = 2.5
    CHECK(t.C1 == doctest::Approx(0.64 + 1.0 + 6.25 * 1.5).epsilon(1e-14));
    CHECK(t.C2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.C3 == doctest::Approx(0.25).epsilon(1e-14));

    LyapunovSpec bad = s;
    bad.eps_star = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.C2 = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("growth statistic matches a hand-evaluated trace") {
    LyapunovSpec spec;
    spec.C1 = 1.0;
    spec.C2 = 1.0;
    spec.C3 = 1.0;
    spec.eps_star = 0.5;

    EnergyTrace tr;
    tr.dt = 0.5;
    tr.V = {1.0, 2.0, 1.5};
    tr.U = {3.0, 1.0};

    // t = 0.5: iu = 1.5, num = 2 + 0.5*1.5 - 1 - 0.5 = 1.25
    // t = 1.0: iu = 2.0, num = 1.5 + 1.0 - 1 - 1.0 = 0.5
    const double v1 = 1.25 / (1.0 + std::log1p(0.5));
    const double v2 = 0.5 / (1.0 + std::log1p(1.0));
    CHECK(growth_statistic(tr, spec, 0.5) == doctest::Approx(std::max(v1, v2)).epsilon(1e-14));
    CHECK(tr.integral_U(2) == doctest::Approx(2.0).epsilon(1e-14));

    EnergyTrace empty;
    empty.dt = 0.5;
    empty.V = {1.0};
    CHECK_THROWS_AS(growth_statistic(empty, spec, 0.5), std::invalid_argument);
}

TEST_CASE("forward envelope membership flags the first crossing") {
    LyapunovSpec spec;
    spec.C1 = 1.0;
    spec.C2 = 1.0;
    spec.C3 = 1.0;
    spec.eps_star = 0.5;

    EnergyTrace tr;
    tr.dt = 1.0;
    tr.V = {0.0, 5.0, 0.0, 9.0};
    tr.U = {0.0, 0.0, 0.0};

    const EnvelopeResult in = forward_envelope_membership(tr, spec, 100.0);
    CHECK(in.inside);
    CHECK(in.first_exit_time == -1.0);

    const EnvelopeResult out = forward_envelope_membership(tr, spec, 2.0);
    CHECK(!out.inside);
    // val(1) = (5 - 1)/(1 + log 2) > 2 is the first crossing
    CHECK(out.first_exit_time == doctest::Approx(1.0));
    CHECK(out.statistic == doctest::Approx(std::max((5.0 - 1.0) / (1.0 + std::log1p(1.0)),
                                                    (9.0 - 3.0) / (1.0 + std::log1p(3.0))))
                               .epsilon(1e-14));
}

TEST_CASE("exponential envelope uses the linear growth allowance") {
    LyapunovSpec spec;
    spec.C1 = 2.0;
    spec.C2 = 1.0;
    spec.C3 = 1.0;
    spec.eps_star = 0.5;

    EnergyTrace tr;
    tr.dt = 1.0;
    tr.V = {1.0, 3.0};
    tr.U = {4.0};

    // excess(1) = 3 + 0.5*4 - 1 - 2*1.5*1 = 1
    const EnvelopeResult r = exp_envelope_membership(tr, spec, 0.5);
    CHECK(!r.inside);
    CHECK(r.statistic == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(exp_envelope_membership(tr, spec, 1.5).inside);
}

TEST_CASE("backward envelope keeps the start-value-free form") {
    LyapunovSpec spec;
    spec.C1 = 1.0;
    spec.C2 = 1.0;
    spec.C3 = 1.0;
    spec.eps_star = 0.5;

    EnergyTrace tr; // indexed on t <= 0: V(0), V(-1)
    tr.dt = 1.0;
    tr.V = {0.3, 2.0};
    tr.U = {1.0};

    // val(-1) = (2 + 0.5*1 - 1) / (1 + log 2)
    const EnvelopeResult r = backward_envelope_membership(tr, spec, 100.0);
    CHECK(r.inside);
    CHECK(r.statistic == doctest::Approx(1.5 / (1.0 + std::log1p(1.0))).epsilon(1e-14));
    const EnvelopeResult out = backward_envelope_membership(tr, spec, 0.5);
    CHECK(!out.inside);
    CHECK(out.first_exit_time == doctest::Approx(-1.0));
}
