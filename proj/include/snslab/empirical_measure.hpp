#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "snslab/rng.hpp"

namespace snslab {

// Finitely supported nonnegative measure on a quantization lattice in R^d.
// Atoms live on cells of width `cell` per coordinate; lattice operations
// (meet, positive part) act atomwise. Weights produced by the fixture
// generator are dyadic so the decomposition identities hold exactly in
// floating point, not merely to rounding.
struct EmpiricalMeasure {
    using Cell = std::vector<long long>;

    double cell = 1.0;
    std::map<Cell, double> atoms;

    EmpiricalMeasure() = default;
    explicit EmpiricalMeasure(double cell_width);

    Cell locate(const std::vector<double>& x) const;
    void add(const std::vector<double>& x, double weight = 1.0);
    void add_cell(const Cell& c, double weight);

    double mass() const;
    double mass_at(const Cell& c) const; // 0 for absent atoms
    void scale(double s);
    void normalize(); // throws on zero mass
};

// Atomwise min; support is the intersection of supports.
EmpiricalMeasure meet(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// (a - b)^+ atomwise; disjoint from (b - a)^+ by construction.
EmpiricalMeasure plus_part(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// Total variation of the signed measure a - b: sum over cells of |a - b|.
// For probabilities, half of this equals 1 - meet(a, b) mass.
double tv_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// int (da/db)^p db over the support of b; +inf if a puts mass where b has
// none. Equals int (da/db)^{p-1} da, the moment controlled by change-of-
// measure arguments.
double moment_ratio(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

// If moment_ratio(a, b, p) <= c_prime then
//   meet(a, b)(X) >= (1 - 1/p) (mass(a)^p / (p c_prime))^{1/(p-1)}.
double coupling_lower_bound(double mass_a, double p, double c_prime);

// Randomized lattice self-test: decomposition a = meet + plus_part (exact),
// positive parts disjoint, TV identity (exact unnormalized, 1e-12 for the
// normalized probability form), and the moment lower bound on every fixture.
struct LatticeCheck {
    std::size_t fixtures = 0;
    std::size_t failures = 0;
    double worst_defect = 0.0;      // largest normalized-identity defect seen
    double worst_bound_slack = 0.0; // min of meet mass minus bound (>= 0 expected)
    bool pass = false;
};

LatticeCheck lattice_identity_check(std::size_t fixtures, const CounterRng& rng);

} // namespace snslab
