#include "doctest.h"

#include <cmath>

#include "snslab/girsanov.hpp"

using namespace snslab;

TEST_CASE("exponent accumulator algebra") {
    ExponentAccumulator acc;
    acc.push(0.5, 2.0);
    acc.push(-1.0, 0.25);
    CHECK(acc.log_e == doctest::Approx(0.5 * 2.0 - 0.125 - 0.25 - 0.5).epsilon(1e-15));
    CHECK(acc.novikov == doctest::Approx(0.125 + 0.5).epsilon(1e-15));
    CHECK(acc.value() == doctest::Approx(std::exp(acc.log_e)).epsilon(1e-15));
}

TEST_CASE("step scale has the right dt -> 0 limit") {
    ToyConfig c;
    c.dt = 1e-6;
    // c_n / D_n -> sqrt(dt) / sigma2
    CHECK(exponent_step_scale(c) ==
          doctest::Approx(std::sqrt(c.dt) / c.sigma2).epsilon(1e-4));
    c.dt = 0.05;
    CHECK(exponent_step_scale(c) ==
          doctest::Approx(std::exp(-c.nu2 * c.dt) * c.dt /
                          (c.sigma2 * toy_variance_factor(c.nu2, c.dt)))
              .epsilon(1e-15));
}

TEST_CASE("novikov bounds match their closed forms") {
    ToyConfig c;
    CHECK(novikov_bound_bounded(c, 2.0) ==
          doctest::Approx(std::exp(2.5 * 2.5 * 2.0 / 2.0)).epsilon(1e-12));
    CHECK(novikov_bound_pairing(c, 2.0) ==
          doctest::Approx(std::exp(1.0 * 4.0 / (4.0 * 1.0 * 1.0))).epsilon(1e-12)); // e
    c.a = 3.0; // nu1 - L1 <= 0: the pairing bound is unavailable
    CHECK_THROWS_AS(novikov_bound_pairing(c, 1.0), std::invalid_argument);
}

TEST_CASE("discrete exponent is a martingale even at coarse dt") {
    ToyConfig c;
    c.dt = 0.05; // deliberately coarse: the per-step likelihood ratio is exact
    const GirsanovRun run = girsanov_toy_pairing(c, 1.0, -1.0, 1.0, 20000, 2.0, make_rng(77));
    CHECK(std::abs(run.exponent_mean.mean - 1.0) <= 4.0 * run.exponent_mean.se);
    CHECK(run.exponent_mean.se < 0.02);
}

TEST_CASE("realized novikov sup respects the pairing bound") {
    ToyConfig c;
    c.dt = 5e-3;
    const GirsanovRun run = girsanov_toy_pairing(c, 1.0, -1.0, 1.0, 4000, 2.0, make_rng(5));
    CHECK(run.novikov_bound == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    // the discrete sum tracks the integral to O(dt)
    CHECK(run.novikov_sup <= run.novikov_bound * (1.0 + 5.0 * c.dt));
    CHECK(run.novikov_sup > 1.0);
    CHECK(run.p == 2.0);
    CHECK(run.moment_bound == doctest::Approx(std::pow(run.novikov_bound, 2.0)).epsilon(1e-12));
    CHECK(run.exponent_moment.mean <= run.moment_bound + 3.0 * run.exponent_moment.se);
}
