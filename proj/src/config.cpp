#include "snslab/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace snslab {

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config ") + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != kSchemaVersion)
        throw ConfigError("config schema_version must be " + std::to_string(kSchemaVersion));
    static const std::set<std::string> known = {"schema_version", "seed", "solver", "toy", "notes"};
    for (const auto& [key, val] : j.items())
        if (known.find(key) == known.end())
            throw ConfigError("unknown config key: " + key);
    return j;
}

ForcingSpec forcing_from_json(const json& j) {
    const std::string form = j.at("form").get<std::string>();
    if (form == "four_mode") return four_mode_forcing(j.at("energy_rate").get<double>());
    if (form == "power_law")
        return power_law_forcing(j.at("alpha").get<double>(), j.at("radius").get<double>(),
                                 j.at("energy_rate").get<double>());
    if (form == "real" || form == "complex") {
        std::vector<std::array<double, 4>> entries;
        for (const auto& row : j.at("modes")) {
            if (!row.is_array() || row.size() != 4)
                throw ConfigError("forcing mode rows must be [k1,k2,x,y]");
            entries.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                               row[3].get<double>()});
        }
        return form == "real" ? ForcingSpec::real_form(entries) : ForcingSpec::complex_form(entries);
    }
    throw ConfigError("unknown forcing form: " + form);
}

json forcing_to_json(const ForcingSpec& spec) {
    json rows = json::array();
    for (const ForcedMode& m : spec.modes) rows.push_back({m.k1, m.k2, m.amp_cos, m.amp_sin});
    return json{{"form", "real"}, {"modes", rows}};
}

SolverConfig solver_from_json(const json& j) {
    SolverConfig cfg;
    const int n = j.at("resolution").get<int>();
    const double cutoff = j.value("dealias_cutoff", -1.0);
    cfg.grid = WaveGrid(n, cutoff);
    cfg.nu = j.at("nu").get<double>();
    cfg.dt = j.at("dt").get<double>();
    cfg.forcing = forcing_from_json(j.at("forcing"));
    cfg.blowup_threshold = j.value("blowup_threshold", 1e12);
    cfg.validate();
    return cfg;
}

json solver_to_json(const SolverConfig& cfg) {
    return json{{"resolution", cfg.grid.n},
                {"dealias_cutoff", cfg.grid.dealias_cutoff},
                {"nu", cfg.nu},
                {"dt", cfg.dt},
                {"forcing", forcing_to_json(cfg.forcing)},
                {"blowup_threshold", cfg.blowup_threshold}};
}

ToyConfig toy_from_json(const json& j) {
    ToyConfig c;
    c.nu1 = j.value("nu1", c.nu1);
    c.nu2 = j.value("nu2", c.nu2);
    c.sigma1 = j.value("sigma1", c.sigma1);
    c.sigma2 = j.value("sigma2", c.sigma2);
    c.a = j.value("a", c.a);
    c.b = j.value("b", c.b);
    c.c = j.value("c", c.c);
    c.dt = j.value("dt", c.dt);
    c.validate();
    return c;
}

json toy_to_json(const ToyConfig& cfg) {
    return json{{"nu1", cfg.nu1},       {"nu2", cfg.nu2}, {"sigma1", cfg.sigma1},
                {"sigma2", cfg.sigma2}, {"a", cfg.a},     {"b", cfg.b},
                {"c", cfg.c},           {"dt", cfg.dt}};
}

std::uint64_t config_hash(const json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char ch : s) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001B3ULL;
    return h;
}

} // namespace snslab
