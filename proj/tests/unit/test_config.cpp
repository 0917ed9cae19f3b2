#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "snslab/config.hpp"

using namespace snslab;

namespace {
struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& body) : path(name) {
        std::ofstream out(path);
        out << body;
    }
    ~TempFile() { std::remove(path.c_str()); }
};
} // namespace

TEST_CASE("solver config round trips through json") {
    SolverConfig cfg;
    cfg.grid = WaveGrid(24, 7.0);
    cfg.nu = 0.35;
    cfg.dt = 0.0025;
    cfg.forcing = power_law_forcing(1.5, 4.0, 2.0);
    cfg.blowup_threshold = 1e9;

    const SolverConfig back = solver_from_json(solver_to_json(cfg));
    CHECK(back.grid.n == 24);
    CHECK(back.grid.dealias_cutoff == 7.0);
    CHECK(back.nu == cfg.nu);
    CHECK(back.dt == cfg.dt);
    CHECK(back.blowup_threshold == cfg.blowup_threshold);
    REQUIRE(back.forcing.modes.size() == cfg.forcing.modes.size());
    for (std::size_t i = 0; i < cfg.forcing.modes.size(); ++i) {
        CHECK(back.forcing.modes[i].k1 == cfg.forcing.modes[i].k1);
        CHECK(back.forcing.modes[i].amp_cos == cfg.forcing.modes[i].amp_cos);
    }
}

TEST_CASE("toy config round trips through json") {
    ToyConfig cfg;
    cfg.nu1 = 3.0;
    cfg.sigma2 = 0.7;
    cfg.b = -0.25;
    cfg.dt = 5e-4;
    const ToyConfig back = toy_from_json(toy_to_json(cfg));
    CHECK(back.nu1 == 3.0);
    CHECK(back.nu2 == cfg.nu2);
    CHECK(back.sigma2 == 0.7);
    CHECK(back.b == -0.25);
    CHECK(back.dt == 5e-4);
}

TEST_CASE("forcing forms parse and reject junk") {
    const ForcingSpec fm = forcing_from_json(json{{"form", "four_mode"}, {"energy_rate", 2.0}});
    CHECK(fm.energy_rate() == doctest::Approx(2.0));

    const ForcingSpec pl = forcing_from_json(
        json{{"form", "power_law"}, {"alpha", 2.0}, {"radius", 4.0}, {"energy_rate", 1.0}});
    CHECK(pl.energy_rate() == doctest::Approx(1.0));

    const ForcingSpec re = forcing_from_json(
        json{{"form", "real"}, {"modes", json::array({json::array({1, 0, 0.5, 0.5})})}});
    CHECK(re.modes.size() == 1);

    const ForcingSpec cx = forcing_from_json(
        json{{"form", "complex"}, {"modes", json::array({json::array({1, 1, 0.5, 0.0})})}});
    CHECK(cx.modes[0].amp_cos == doctest::Approx(cx.modes[0].amp_sin));

    CHECK_THROWS(forcing_from_json(json{{"form", "banana"}}));
    CHECK_THROWS(forcing_from_json(json{{"form", "four_mode"}})); // missing rate

    // round trip lands on the real form
    const json j = forcing_to_json(fm);
    CHECK(j.at("form") == "real");
    const ForcingSpec back = forcing_from_json(j);
    CHECK(back.energy_rate() == doctest::Approx(2.0));
}

TEST_CASE("config files enforce the schema") {
    const TempFile good("cfg_good.json", R"({"schema_version": 1, "seed": 7,
        "solver": {"resolution": 8, "nu": 1.0, "dt": 0.01,
                   "forcing": {"form": "four_mode", "energy_rate": 1.0}}})");
    const json j = load_config_file(good.path);
    CHECK(j.at("seed") == 7);
    const SolverConfig cfg = solver_from_json(j.at("solver"));
    CHECK(cfg.grid.n == 8);
    CHECK_NOTHROW(cfg.validate());

    const TempFile stray("cfg_stray.json", R"({"schema_version": 1, "sovler": {}})");
    CHECK_THROWS(load_config_file(stray.path)); // typo cannot silently vanish

    const TempFile nover("cfg_nover.json", R"({"seed": 3})");
    CHECK_THROWS(load_config_file(nover.path));

    const TempFile badver("cfg_badver.json", R"({"schema_version": 2})");
    CHECK_THROWS(load_config_file(badver.path));

    CHECK_THROWS(load_config_file("does_not_exist.json"));
}

TEST_CASE("config hash keys content, not formatting") {
    json a, b;
    a["nu"] = 1.0;
    a["dt"] = 0.01;
    b["dt"] = 0.01;
    b["nu"] = 1.0;
    CHECK(config_hash(a) == config_hash(b));
    b["nu"] = 2.0;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a) != 0);
}
