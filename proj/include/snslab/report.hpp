#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "snslab/config.hpp"
#include "snslab/coupling.hpp"

namespace snslab {

// Process exit conventions shared by the executables:
//   0 ran and every check passed; 1 ran but some check failed;
//   2 usage or configuration error; 3 runtime failure (blow-up, I/O).
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// One verifier outcome. The full config is embedded so a record replays from
// the line alone; config_hash keys the line to its inputs.
struct CheckRecord {
    std::string experiment;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double bound = 0.0;
    bool pass = false;
    json config; // replay inputs
    json extra;  // free-form diagnostics

    json to_json() const;
};

// JSONL sink; empty path discards (records still counted).
class ReportWriter {
  public:
    ReportWriter() = default;
    explicit ReportWriter(const std::string& path);

    void write(const CheckRecord& rec);
    void write_raw(const json& j);

    std::size_t written() const { return count_; }
    bool all_passed() const { return all_passed_; }

  private:
    std::ofstream out_;
    bool open_ = false;
    std::size_t count_ = 0;
    bool all_passed_ = true;
};

// Chain steps as JSONL-ready rows: step, segment_len, coupled, rho_hat, t_n,
// V_pair.
json chain_steps_json(const ChainResult& res);

} // namespace snslab
