#include "doctest.h"

#include <cmath>
#include <complex>

#include "snslab/spectral_field.hpp"

using namespace snslab;

TEST_CASE("grid construction rejects bad shapes") {
    CHECK_THROWS_AS(WaveGrid(3), std::invalid_argument);
    CHECK_THROWS_AS(WaveGrid(2), std::invalid_argument);
    CHECK_THROWS_AS(WaveGrid(7), std::invalid_argument);
    CHECK_THROWS_AS(WaveGrid(8, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(WaveGrid(8, 9.0), std::invalid_argument);
    CHECK_NOTHROW(WaveGrid(4));
}

TEST_CASE("indexing covers the square exactly once") {
    const WaveGrid g(12);
    CHECK(g.kmax() == 6);
    CHECK(g.size() == 13u * 13u);
    std::vector<int> hits(g.size(), 0);
    for (int k2 = -6; k2 <= 6; ++k2)
        for (int k1 = -6; k1 <= 6; ++k1) {
            CHECK(g.contains(k1, k2));
            ++hits[g.index(k1, k2)];
        }
    for (int h : hits) CHECK(h == 1);
    CHECK(!g.contains(7, 0));
    CHECK(!g.contains(0, -7));
}

TEST_CASE("dealias cutoff is the 2/3 rule on the max norm") {
    const WaveGrid g(12); // cutoff 4
    CHECK(g.dealias_cutoff == doctest::Approx(4.0));
    CHECK(!g.aliased(3, 3));
    CHECK(g.aliased(4, 0));
    CHECK(g.aliased(0, -4));
    CHECK(g.aliased(-5, 2));
    CHECK(!g.aliased(2, -3));
}

TEST_CASE("norms and pairings agree with hand values") {
    const WaveGrid g(8);
    SpectralField f(g);
    f.at(1, 0) = cplx(2.0, 0.0);
    f.at(-1, 0) = cplx(2.0, 0.0);
    f.at(2, 1) = cplx(0.0, 3.0);
    f.at(-2, -1) = cplx(0.0, -3.0);

    // energy: 2 * (4/1) + 2 * (9/5); enstrophy: 2*4 + 2*9; palinstrophy adds |k|^2
    CHECK(energy(f) == doctest::Approx(8.0 + 18.0 / 5.0).epsilon(1e-14));
    CHECK(enstrophy(f) == doctest::Approx(26.0).epsilon(1e-14));
    CHECK(palinstrophy(f) == doctest::Approx(2.0 * 4.0 + 2.0 * 45.0).epsilon(1e-14));

    CHECK(energy_pairing(f, f) == doctest::Approx(energy(f)).epsilon(1e-14));
    CHECK(enstrophy_pairing(f, f) == doctest::Approx(enstrophy(f)).epsilon(1e-14));
    CHECK(energy_distance(f, f) == 0.0);
    CHECK(enstrophy_distance(f, f) == 0.0);

    SpectralField z(g);
    CHECK(energy_distance(f, z) == doctest::Approx(std::sqrt(energy(f))).epsilon(1e-14));
}

TEST_CASE("low and high projections are complementary") {
    const WaveGrid g(16);
    const CounterRng rng = make_rng(5);
    const SpectralField f = random_field(g, rng, [](double r) { return std::exp(-0.3 * r); });

    SpectralField lo = f, hi = f;
    project_low(lo, 3.0);
    project_high(hi, 3.0);
    for_each_mode(g, [&](int k1, int k2) {
        const cplx sum = lo.at(k1, k2) + hi.at(k1, k2);
        CHECK(sum == f.at(k1, k2)); // exact: each mode lands in exactly one part
        if (ksq(k1, k2) < 9)
            CHECK(hi.at(k1, k2) == cplx(0.0, 0.0));
        else
            CHECK(lo.at(k1, k2) == cplx(0.0, 0.0));
    });
    CHECK(energy(lo) + energy(hi) == doctest::Approx(energy(f)).epsilon(1e-13));
}

TEST_CASE("random fields are Hermitian and dealiased") {
    const WaveGrid g(12);
    const SpectralField f = random_field(g, make_rng(11), [](double) { return 1.0; });
    CHECK(reality_defect(f) == 0.0);
    CHECK(f.at(0, 0) == cplx(0.0, 0.0));
    bool any = false;
    for_each_mode(g, [&](int k1, int k2) {
        if (g.aliased(k1, k2)) CHECK(f.at(k1, k2) == cplx(0.0, 0.0));
        if (std::abs(f.at(k1, k2)) > 0.0) any = true;
    });
    CHECK(any);
}

TEST_CASE("enforce_reality symmetrizes and dealias clears the ring") {
    const WaveGrid g(8);
    SpectralField f(g);
    f.at(1, 2) = cplx(1.0, 1.0);
    f.at(-1, -2) = cplx(5.0, 0.0); // deliberately broken pair
    f.at(3, 0) = cplx(1.0, 0.0);   // aliased at cutoff 8/3
    CHECK(reality_defect(f) > 1.0);
    enforce_reality(f);
    CHECK(reality_defect(f) == 0.0);
    CHECK(f.at(1, 2) == std::conj(f.at(-1, -2)));
    dealias(f);
    CHECK(f.at(3, 0) == cplx(0.0, 0.0));
    CHECK(f.at(1, 2) != cplx(0.0, 0.0));
}
