#include "doctest.h"

#include <cmath>
#include <limits>

#include "snslab/empirical_measure.hpp"

using namespace snslab;

namespace {
EmpiricalMeasure from_atoms(double cell, std::vector<std::pair<long long, double>> atoms) {
    EmpiricalMeasure m(cell);
    for (const auto& [c, w] : atoms) m.add_cell({c}, w);
    return m;
}
} // namespace

TEST_CASE("atoms land in width-sized cells") {
    EmpiricalMeasure m(0.5);
    m.add({0.74}, 1.0); // cell floor(0.74/0.5) = 1
    m.add({0.6}, 2.0);  // same cell
    m.add({-0.1}, 4.0); // cell -1
    CHECK(m.mass() == doctest::Approx(7.0));
    CHECK(m.locate({0.74}) == m.locate({0.6}));
    CHECK(m.locate({0.74}) != m.locate({-0.1}));
    CHECK(m.mass_at(m.locate({0.55})) == doctest::Approx(3.0));
    CHECK(m.mass_at({{99}}) == 0.0);

    m.scale(0.5);
    CHECK(m.mass() == doctest::Approx(3.5));
    m.normalize();
    CHECK(m.mass() == doctest::Approx(1.0));

    EmpiricalMeasure empty(1.0);
    CHECK_THROWS(empty.normalize());
}

TEST_CASE("lattice decomposition identities on hand-built measures") {
    // dyadic weights: every identity below is exact in floating point
    const EmpiricalMeasure a = from_atoms(1.0, {{0, 0.5}, {1, 0.25}});
    const EmpiricalMeasure b = from_atoms(1.0, {{0, 0.25}, {2, 0.5}});

    const EmpiricalMeasure m = meet(a, b);
    CHECK(m.mass() == 0.25);
    CHECK(m.mass_at({{0}}) == 0.25);
    CHECK(m.atoms.size() == 1);

    const EmpiricalMeasure ap = plus_part(a, b);
    const EmpiricalMeasure bp = plus_part(b, a);
    CHECK(ap.mass_at({{0}}) == 0.25);
    CHECK(ap.mass_at({{1}}) == 0.25);
    CHECK(bp.mass_at({{2}}) == 0.5);
    // disjoint supports by construction
    for (const auto& [cell, w] : ap.atoms) CHECK(bp.mass_at(cell) == 0.0);

    // a = meet + (a - b)^+ atom by atom, exactly
    for (const auto& [cell, w] : a.atoms) CHECK(m.mass_at(cell) + ap.mass_at(cell) == w);

    // TV = mass(a) + mass(b) - 2 meet
    CHECK(tv_distance(a, b) == a.mass() + b.mass() - 2.0 * m.mass());
    CHECK(tv_distance(a, a) == 0.0);
}

TEST_CASE("moment ratio and the coupling lower bound") {
    const EmpiricalMeasure b = from_atoms(1.0, {{0, 0.5}, {1, 0.5}});
    const EmpiricalMeasure a = from_atoms(1.0, {{0, 0.75}, {1, 0.25}});

    // int (da/db)^2 db = (1.5^2) 0.5 + (0.5^2) 0.5
    CHECK(moment_ratio(a, b, 2.0) == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(moment_ratio(b, b, 2.0) == doctest::Approx(1.0).epsilon(1e-15));

    const EmpiricalMeasure off = from_atoms(1.0, {{5, 1.0}});
    CHECK(moment_ratio(off, b, 2.0) == std::numeric_limits<double>::infinity());

    // p = 2: bound = (1 - 1/2) mass^2 / (2 c')
    CHECK(coupling_lower_bound(1.0, 2.0, 1.25) == doctest::Approx(0.5 / 2.5).epsilon(1e-12));
    // the bound is sharp enough to be nontrivial and never exceeds the mass
    CHECK(coupling_lower_bound(1.0, 2.0, 1.0) <= 1.0);
    CHECK(coupling_lower_bound(1.0, 2.0, 1e12) > 0.0);
}

TEST_CASE("meet mass certifies overlap against the moment bound") {
    const EmpiricalMeasure b = from_atoms(1.0, {{0, 0.5}, {1, 0.5}});
    const EmpiricalMeasure a = from_atoms(1.0, {{0, 0.75}, {1, 0.25}});
    const double cp = moment_ratio(a, b, 2.0);
    CHECK(meet(a, b).mass() >= coupling_lower_bound(a.mass(), 2.0, cp) - 1e-15);
}

TEST_CASE("randomized lattice self-test passes cleanly") {
    const LatticeCheck r = lattice_identity_check(200, make_rng(99));
    CHECK(r.fixtures == 200);
    CHECK(r.failures == 0);
    CHECK(r.pass);
    CHECK(r.worst_defect < 1e-12);
    CHECK(r.worst_bound_slack >= 0.0);
}
