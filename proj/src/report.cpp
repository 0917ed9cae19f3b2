#include "snslab/report.hpp"

namespace snslab {

json CheckRecord::to_json() const {
    json j{{"experiment", experiment}, {"config_hash", config_hash(config)},
           {"seed", seed},             {"estimate", estimate},
           {"ci_low", ci_low},         {"ci_high", ci_high},
           {"bound", bound},           {"pass", pass},
           {"config", config}};
    if (!extra.is_null()) j["extra"] = extra;
    return j;
}

ReportWriter::ReportWriter(const std::string& path) {
    if (path.empty()) return;
    out_.open(path, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open report sink " + path);
    open_ = true;
}

void ReportWriter::write(const CheckRecord& rec) {
    if (!rec.pass) all_passed_ = false;
    ++count_;
    if (open_) out_ << rec.to_json().dump() << '\n';
}

void ReportWriter::write_raw(const json& j) {
    ++count_;
    if (open_) out_ << j.dump() << '\n';
}

json chain_steps_json(const ChainResult& res) {
    json rows = json::array();
    for (const ChainStep& s : res.steps)
        rows.push_back(json{{"step", s.step},
                            {"segment_len", s.segment_len},
                            {"coupled", s.coupled},
                            {"rho_hat", s.rho_hat},
                            {"t_n", s.t_end},
                            {"V_pair", s.v_pair}});
    return rows;
}

} // namespace snslab
