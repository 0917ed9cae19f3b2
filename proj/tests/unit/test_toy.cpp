#include "doctest.h"

#include <cmath>
#include <vector>

#include "snslab/toy.hpp"

using namespace snslab;

TEST_CASE("one step matches the closed-form update") {
    ToyConfig c;
    const ToyState s{0.4, -1.1};
    const double xe = 0.9, xx = -0.2;
    const ToyState out = step_toy(c, s, xe, xx);

    const double f1 = c.a * std::sin(s.h) + c.b * std::cos(s.l);
    const double f2 = c.c * std::tanh(s.h) * std::cos(s.l);
    const double want_h =
        std::exp(-c.nu1 * c.dt) * (s.h + c.dt * f1) + c.sigma1 * toy_variance_factor(c.nu1, c.dt) * xe;
    const double want_l =
        std::exp(-c.nu2 * c.dt) * (s.l + c.dt * f2) + c.sigma2 * toy_variance_factor(c.nu2, c.dt) * xx;
    CHECK(out.h == want_h);
    CHECK(out.l == want_l);
}

TEST_CASE("config validation enforces the declared drift bound") {
    ToyConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.drift_bound() == doctest::Approx(2.5));
    CHECK(c.L1() == 1.0);
    CHECK(c.contraction_gap() == doctest::Approx(1.0));

    c.nu1 = -1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);

    ToyConfig lying;
    lying.F1 = [](double, double h) { return 10.0 * std::sin(h); };
    lying.custom_L1 = 10.0;
    lying.custom_bound = 1.0; // false claim: |F1| reaches 10
    CHECK_THROWS_AS(lying.validate(), std::invalid_argument);
}

TEST_CASE("pinned h-flow replays the same arithmetic as a manual loop") {
    ToyConfig c;
    const CounterRng stream = make_rng(44);
    std::vector<double> lpath;
    double l = 0.3;
    for (int i = 0; i < 200; ++i) {
        lpath.push_back(l);
        l = 0.99 * l + 0.01 * std::sin(0.1 * i);
    }

    std::vector<double> trace;
    const double end = toy_h_flow(c, lpath, 0.7, stream, 5, &trace);
    REQUIRE(trace.size() == lpath.size() + 1);
    CHECK(trace.front() == 0.7);
    CHECK(trace.back() == end);

    double h = 0.7;
    const double decay = std::exp(-c.nu1 * c.dt);
    const double amp = c.sigma1 * toy_variance_factor(c.nu1, c.dt);
    for (std::size_t i = 0; i < lpath.size(); ++i)
        h = decay * (h + c.dt * c.f1(lpath[i], h)) + amp * normal_pair(stream, 5 + i, 0).z0;
    CHECK(end == h);
}

TEST_CASE("contraction rate matches the decay rate exactly when F1 vanishes") {
    ToyConfig c;
    c.F1 = [](double, double) { return 0.0; };
    c.custom_L1 = 0.0;
    c.custom_bound = 1.0; // default F2 still runs, |F2| <= |c| = 1
    // with F1 = 0 the paired gap satisfies gap' = e^{-nu1 dt} gap, so the
    // log-gap slope is -nu1 with no statistical error at all
    const ContractionFit fit = toy_contraction_rate(c, 1.0, -1.0, 5.0, make_rng(3));
    REQUIRE(!fit.degenerate);
    CHECK(std::abs(fit.slope + c.nu1) < 1e-9);
    CHECK(fit.r2 > 0.999999);
}

TEST_CASE("default family contracts near the decay-minus-Lipschitz rate") {
    const ToyConfig c;
    const ContractionFit fit = toy_contraction_rate(c, 2.0, -2.0, 8.0, make_rng(9));
    REQUIRE(!fit.degenerate);
    CHECK(fit.slope < -0.9); // guaranteed envelope is nu1 - L1 = 1
    CHECK(fit.slope > -2.5);
    CHECK(fit.r2 > 0.9);
}

TEST_CASE("identical starts are reported as degenerate") {
    const ToyConfig c;
    const ContractionFit fit = toy_contraction_rate(c, 1.0, 1.0, 2.0, make_rng(5));
    CHECK(fit.degenerate);
}

TEST_CASE("memory functional truncation obeys its own tail bound") {
    const ToyConfig c;
    const CounterRng rng = make_rng(12);
    const MemoryFunctional coarse = toy_memory_functional(c, 1e-4, 2.0, rng);
    const MemoryFunctional fine = toy_memory_functional(c, 1e-8, 2.0, rng);
    CHECK(coarse.tail_bound <= 1e-4);
    CHECK(fine.tail_bound <= 1e-8);
    CHECK(fine.start_time < coarse.start_time); // tighter tolerance reaches further back
    CHECK(coarse.start_time < 0.0);
    CHECK(std::isfinite(coarse.value));
    // both runs share the driving path, so the values differ at most by the
    // sum of the two tail bounds
    CHECK(std::abs(coarse.value - fine.value) <= coarse.tail_bound + fine.tail_bound);
}
