#pragma once

#include <string>
#include <vector>

#include "snslab/report.hpp"

namespace snslab::experiments {

// Self-contained verification experiments with pinned configurations and
// tolerances. Each returns a console-ready outcome plus the JSONL records
// (with embedded configs) that reproduce it; given the same seed the numbers
// are bit-identical for any thread count.
struct Outcome {
    std::string name;
    bool pass = false;
    std::string detail;
    std::vector<CheckRecord> records;
};

// (name, solver) pairs exercised by the sweeps below.
std::vector<std::pair<std::string, SolverConfig>> default_solver_configs();

Outcome stationary_balance(std::uint64_t seed, int threads);
Outcome energy_moment(std::uint64_t seed, int threads);
Outcome ou_variance(std::uint64_t seed, int threads);
Outcome nonlinearity_identities(std::uint64_t seed, int threads);
Outcome toy_contraction(std::uint64_t seed, int threads);
Outcome girsanov_martingale(std::uint64_t seed, int threads);
Outcome envelope_tails(std::uint64_t seed, int threads);
Outcome synchronization(std::uint64_t seed, int threads);
Outcome large_viscosity(std::uint64_t seed, int threads);
Outcome cascade_coverage(std::uint64_t seed, int threads);
Outcome measure_lattice(std::uint64_t seed, int threads);
Outcome coupling_chain(std::uint64_t seed, int threads);
Outcome small_scales(std::uint64_t seed, int threads);

using Runner = Outcome (*)(std::uint64_t, int);
const std::vector<std::pair<std::string, Runner>>& registry();
Outcome run_by_name(const std::string& name, std::uint64_t seed, int threads);
std::vector<Outcome> run_all(std::uint64_t seed, int threads);

} // namespace snslab::experiments
