#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "snslab/cascade.hpp"
#include "snslab/coupling.hpp"
#include "snslab/estimators.hpp"
#include "snslab/experiments.hpp"
#include "snslab/girsanov.hpp"
#include "snslab/report.hpp"
#include "snslab/sync.hpp"

namespace {

using namespace snslab;

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 1;
    bool seed_set = false;
    int threads = 1;
    std::string out_path;
};

// Precedence per option: command line, then SNSLAB_* environment variable,
// then the config file's "seed" entry (seed only), then the built-in default.
void add_common(CLI::App* cmd, CommonOpts& c, bool needs_config) {
    auto* opt = cmd->add_option("--config", c.config_path, "JSON config file")
                    ->envname("SNSLAB_CONFIG");
    if (needs_config) opt->required();
    cmd->add_option("--seed", c.seed, "RNG seed")
        ->envname("SNSLAB_SEED")
        ->each([&](const std::string&) { c.seed_set = true; });
    cmd->add_option("--threads", c.threads, "worker threads")
        ->envname("SNSLAB_THREADS")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out_path, "JSONL output path")->envname("SNSLAB_OUT");
}

// Config files carry an optional default seed; --seed wins.
json load_and_seed(CommonOpts& c) {
    if (c.config_path.empty()) return json::object();
    json j = load_config_file(c.config_path);
    if (!c.seed_set && j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    return j;
}

SolverConfig solver_from(const json& j) {
    if (!j.contains("solver")) throw ConfigError("config has no \"solver\" section");
    return solver_from_json(j["solver"]);
}

ToyConfig toy_from(const json& j) {
    return j.contains("toy") ? toy_from_json(j["toy"]) : ToyConfig{};
}

std::vector<std::pair<int, int>> parse_modes(const std::string& s) {
    std::vector<std::pair<int, int>> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t end = s.find(';', pos);
        const std::string tok = s.substr(pos, end == std::string::npos ? end : end - pos);
        int k1 = 0, k2 = 0;
        if (std::sscanf(tok.c_str(), "%d,%d", &k1, &k2) != 2)
            throw ConfigError("bad mode token \"" + tok + "\" (want k1,k2;k1,k2;...)");
        out.emplace_back(k1, k2);
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    if (out.empty()) throw ConfigError("no modes given");
    return out;
}

std::vector<std::pair<double, double>> parse_points(const std::string& s) {
    std::vector<std::pair<double, double>> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t end = s.find(',', pos);
        const std::string tok = s.substr(pos, end == std::string::npos ? end : end - pos);
        double eps = 0.0, K = 0.0;
        if (std::sscanf(tok.c_str(), "%lf:%lf", &eps, &K) != 2)
            throw ConfigError("bad point \"" + tok + "\" (want eps:K,eps:K,...)");
        out.emplace_back(eps, K);
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    if (out.empty()) throw ConfigError("no (eps, K) points given");
    return out;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t used = 0;
        out.push_back(std::stod(s.substr(pos), &used));
        pos += used;
        if (pos < s.size() && s[pos] == ',') ++pos;
    }
    if (out.empty()) throw ConfigError("no values given");
    return out;
}

int cmd_simulate(CommonOpts& c, double horizon, double ncut, const std::string& dump_path,
                 const std::string& trace_path) {
    const json j = load_and_seed(c);
    const SolverConfig cfg = solver_from(j);
    SnsStepper stepper(cfg);
    SpectralField w(cfg.grid);
    const CounterRng rng = make_rng(c.seed).derive(tag64("simulate"));
    const auto nsteps = static_cast<std::uint64_t>(std::llround(horizon / cfg.dt));

    std::ofstream trace;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw std::runtime_error("cannot open " + trace_path);
        trace << "t,energy,enstrophy,palinstrophy\n";
        trace.precision(12);
    }
    for (std::uint64_t s = 0; s < nsteps; ++s) {
        const NoiseIncrement noise = sample_increment(cfg.forcing, rng, s, cfg.dt);
        if (ncut > 0.0)
            stepper.step_galerkin(w, noise, ncut, s);
        else
            stepper.step(w, noise, s);
        if (trace.is_open())
            trace << static_cast<double>(s + 1) * cfg.dt << ',' << energy(w) << ','
                  << enstrophy(w) << ',' << palinstrophy(w) << '\n';
    }
    if (!dump_path.empty()) dump_csv(w, dump_path);
    std::cout << "t = " << horizon << ": energy " << energy(w) << ", enstrophy " << enstrophy(w)
              << ", palinstrophy " << palinstrophy(w) << "\n";
    if (!c.out_path.empty()) {
        ReportWriter wr(c.out_path);
        CheckRecord rec;
        rec.experiment = "simulate";
        rec.seed = c.seed;
        rec.estimate = energy(w);
        rec.pass = true;
        rec.config = {{"solver", solver_to_json(cfg)}, {"horizon", horizon}, {"ncut", ncut}};
        wr.write(rec);
    }
    return kExitOk;
}

int cmd_stationary(CommonOpts& c, double horizon, double burn_in, std::size_t ensemble) {
    const json j = load_and_seed(c);
    const SolverConfig cfg = solver_from(j);
    const StationaryBalance bal =
        stationary_balance_check(cfg, horizon, burn_in, ensemble, make_rng(c.seed), c.threads);
    std::cout << "2nu<|grad u|^2>  = " << bal.mean_dissipation << "  (E0 = " << bal.e0
              << ", rel err " << bal.rel_err_energy << ")\n"
              << "2nu<|grad w|^2>  = " << bal.mean_palinstrophy_rate << "  (E1 = " << bal.e1
              << ", rel err " << bal.rel_err_enstrophy << ")\n";
    const bool pass = bal.rel_err_energy <= 0.05;
    if (!c.out_path.empty()) {
        ReportWriter wr(c.out_path);
        CheckRecord rec;
        rec.experiment = "stationary";
        rec.seed = c.seed;
        rec.estimate = bal.mean_dissipation;
        rec.bound = bal.e0 * 1.05;
        rec.pass = pass;
        rec.config = {{"solver", solver_to_json(cfg)},
                      {"horizon", horizon},
                      {"burn_in", burn_in},
                      {"ensemble", ensemble}};
        wr.write(rec);
    }
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_ou_compare(CommonOpts& c, const std::string& shells_arg, double horizon,
                   std::size_t ensemble) {
    const json j = load_and_seed(c);
    const SolverConfig cfg = solver_from(j);
    const std::vector<double> shells = parse_doubles(shells_arg);
    const SmallScaleResult res =
        small_scale_ou_compare(cfg, shells, horizon, ensemble, make_rng(c.seed), c.threads);
    std::cout << "shell   modes   mean gap     se\n";
    for (const auto& s : res.shells)
        std::cout << s.shell << "\t" << s.modes << "\t" << s.mean_distance << "\t" << s.se << "\n";
    std::cout << (res.monotone ? "strictly decreasing" : "not decreasing") << ", one-sided p = "
              << res.kendall_p << "\n";
    const bool pass = res.monotone && res.kendall_p < 0.05;
    if (!c.out_path.empty()) {
        ReportWriter wr(c.out_path);
        CheckRecord rec;
        rec.experiment = "ou-compare";
        rec.seed = c.seed;
        rec.estimate = res.kendall_p;
        rec.bound = 0.05;
        rec.pass = pass;
        rec.config = {{"solver", solver_to_json(cfg)},
                      {"shells", shells},
                      {"horizon", horizon},
                      {"ensemble", ensemble}};
        wr.write(rec);
    }
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_envelope(CommonOpts& c, bool toy, const std::string& points_arg, double horizon,
                 std::size_t ensemble, double exit_level) {
    const json j = load_and_seed(c);
    const auto points = parse_points(points_arg);
    std::vector<EnvelopeTailPoint> pts;
    json cfg_json;
    if (toy) {
        const ToyConfig tc = toy_from(j);
        pts = toy_envelope_tail(tc, horizon, ensemble, points, make_rng(c.seed));
        cfg_json = {{"toy", toy_to_json(tc)}};
    } else {
        const SolverConfig cfg = solver_from(j);
        pts = sns_envelope_tail(cfg, horizon, ensemble, points, make_rng(c.seed), c.threads);
        cfg_json = {{"solver", solver_to_json(cfg)}};
        if (exit_level > 0.0) {
            const ExitTail et = exp_envelope_exit_tail(cfg, exit_level, horizon, ensemble,
                                                       make_rng(c.seed).derive(tag64("exit")),
                                                       c.threads);
            std::cout << "exit tail at M = " << exit_level << ": exit fraction "
                      << et.exit_fraction << ", log-survival slope " << et.fit.slope
                      << " (r2 " << et.fit.r2 << ")\n";
        }
    }
    bool pass = true;
    std::optional<ReportWriter> wr;
    if (!c.out_path.empty()) wr.emplace(c.out_path);
    for (const auto& pt : pts) {
        std::cout << "eps " << pt.eps << ", K " << pt.K << ": P{stat > K} = " << pt.exceed.mean
                  << " +- " << pt.exceed.se << " vs bound " << pt.bound
                  << (pt.admissible ? "" : "  [K below admissible range]")
                  << (pt.pass ? "  ok" : "  EXCEEDED") << "\n";
        if (!pt.pass) pass = false;
        if (wr) {
            CheckRecord rec;
            rec.experiment = "envelope";
            rec.seed = c.seed;
            rec.estimate = pt.exceed.mean;
            rec.ci_low = pt.exceed.mean - 1.96 * pt.exceed.se;
            rec.ci_high = pt.exceed.mean + 1.96 * pt.exceed.se;
            rec.bound = pt.bound;
            rec.pass = pt.pass;
            rec.config = cfg_json;
            rec.extra = {{"eps", pt.eps}, {"K", pt.K}, {"admissible", pt.admissible}};
            wr->write(rec);
        }
    }
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_sync(CommonOpts& c, double nstar, double burn_in, double horizon, double perturbation,
             std::size_t samples) {
    const json j = load_and_seed(c);
    SyncConfig sc;
    sc.solver = solver_from(j);
    sc.nstar = nstar;
    sc.burn_in = burn_in;
    sc.horizon = horizon;
    sc.perturbation = perturbation;
    const CounterRng rng = make_rng(c.seed);
    const NonlinearityConstant nc =
        estimate_nonlinearity_constant(sc.solver.grid, nstar, samples, rng.derive(tag64("chat")));
    const SyncResult res = run_sync(sc, nc.c_hat, rng.derive(tag64("sync")));
    std::cout << "c_hat = " << nc.c_hat << (nc.stable ? "" : "  [batches disagree]")
              << "\nfinal distance ratio = " << res.ratio_end << "\nlog-linear slope "
              << res.logfit.slope << " (r2 " << res.logfit.r2 << ")\npathwise bound margin "
              << res.bound_margin << (res.bound_margin <= 0.0 ? " (held)" : " (VIOLATED)")
              << "\n";
    if (!c.out_path.empty()) {
        ReportWriter wr(c.out_path);
        CheckRecord rec;
        rec.experiment = "sync";
        rec.seed = c.seed;
        rec.estimate = res.ratio_end;
        rec.pass = res.bound_margin <= 0.0;
        rec.config = {{"solver", solver_to_json(sc.solver)},
                      {"nstar", nstar},
                      {"burn_in", burn_in},
                      {"horizon", horizon},
                      {"perturbation", perturbation}};
        rec.extra = {{"c_hat", nc.c_hat},
                     {"slope", res.logfit.slope},
                     {"r2", res.logfit.r2},
                     {"bound_margin", res.bound_margin}};
        wr.write(rec);
    }
    return res.bound_margin <= 0.0 ? kExitOk : kExitCheckFailed;
}

int cmd_large_nu(CommonOpts& c, double horizon, int depth, std::size_t samples) {
    const json j = load_and_seed(c);
    const SolverConfig cfg = solver_from(j);
    const CounterRng rng = make_rng(c.seed);
    const NonlinearityConstant nc =
        estimate_nonlinearity_constant(cfg.grid, 1.0, samples, rng.derive(tag64("chat")));
    const LargeNuResult res = large_nu_contraction(cfg, nc.c_hat, horizon, depth,
                                                   rng.derive(tag64("pull")));
    std::cout << "criterion c_hat E0 / nu^3 = " << res.criterion
              << (res.criterion < 0.5 ? " (small)" : " (NOT small)") << "\npaired distance at t = "
              << horizon << ": " << res.paired_distance_end << "\npullback sups:";
    for (const double s : res.pullback_sup) std::cout << " " << s;
    std::cout << "\npullback slope " << res.pullback_fit.slope << ", "
              << (res.pullback_cauchy ? "geometrically Cauchy" : "NOT Cauchy") << "\n";
    const bool pass = res.criterion < 0.5 && res.pullback_cauchy;
    if (!c.out_path.empty()) {
        ReportWriter wr(c.out_path);
        CheckRecord rec;
        rec.experiment = "large-nu";
        rec.seed = c.seed;
        rec.estimate = res.criterion;
        rec.bound = 0.5;
        rec.pass = pass;
        rec.config = {{"solver", solver_to_json(cfg)}, {"horizon", horizon}, {"depth", depth}};
        rec.extra = {{"paired_distance_end", res.paired_distance_end},
                     {"pullback_sup", res.pullback_sup}};
        wr.write(rec);
    }
    return pass ? kExitOk : kExitCheckFailed;
}

int cmd_toy(CommonOpts& c, double horizon, double h0, double h0_alt) {
    const json j = load_and_seed(c);
    const ToyConfig cfg = toy_from(j);
    const CounterRng rng = make_rng(c.seed);
    const ContractionFit fit =
        toy_contraction_rate(cfg, h0, h0_alt, horizon, rng.derive(tag64("gap")));
    std::cout << "pathwise gap slope " << fit.slope << " (r2 " << fit.r2 << "), bound -"
              << cfg.contraction_gap() << "\n";
    const MemoryFunctional mf = toy_memory_functional(cfg, 1e-10, std::abs(h0 - h0_alt),
                                                      rng.derive(tag64("memory")));
    std::cout << "one-sided memory value " << mf.value << " from window start " << mf.start_time
              << " (tail bound " << mf.tail_bound << ")\n";
    return kExitOk;
}

int cmd_girsanov(CommonOpts& c, std::size_t paths, double horizon, double h0, double h0_alt,
                 double p) {
    const json j = load_and_seed(c);
    const ToyConfig cfg = toy_from(j);
    const GirsanovRun run =
        girsanov_toy_pairing(cfg, h0, h0_alt, horizon, paths, p, make_rng(c.seed));
    std::cout << "E[exponent]   = " << run.exponent_mean.mean << " +- " << run.exponent_mean.se
              << "  (target 1)\n"
              << "sup Novikov   = " << run.novikov_sup << "  (bound " << run.novikov_bound
              << ")\n"
              << "E[exponent^" << p << "] = " << run.exponent_moment.mean << " +- "
              << run.exponent_moment.se << "  (bound " << run.moment_bound << ")\n";
    const bool pass = std::abs(run.exponent_mean.mean - 1.0) <= 3.0 * run.exponent_mean.se;
    if (!c.out_path.empty()) {
        ReportWriter wr(c.out_path);
        CheckRecord rec;
        rec.experiment = "girsanov";
        rec.seed = c.seed;
        rec.estimate = run.exponent_mean.mean;
        rec.ci_low = run.exponent_mean.mean - 1.96 * run.exponent_mean.se;
        rec.ci_high = run.exponent_mean.mean + 1.96 * run.exponent_mean.se;
        rec.bound = 1.0;
        rec.pass = pass;
        rec.config = {{"toy", toy_to_json(cfg)}, {"paths", paths},     {"horizon", horizon},
                      {"h0", h0},             {"h0_alt", h0_alt},   {"p", p}};
        wr.write(rec);
    }
    return pass ? kExitOk : kExitCheckFailed;
}

template <typename Model>
int couple_with(const Model& model, const typename Model::State& u0,
                const typename Model::State& v0, const ChainConfig& cc, std::size_t tail_runs,
                std::size_t marginal_runs, std::size_t check_time, CommonOpts& c) {
    const CounterRng rng = make_rng(c.seed);
    std::optional<ReportWriter> wr;
    if (!c.out_path.empty()) wr.emplace(c.out_path);

    const ChainResult res = run_coupling_chain(model, u0, v0, cc, rng.derive(tag64("chain")));
    std::cout << "step  len  inside  rho_hat  coupled  t     V_pair\n";
    for (const auto& s : res.steps)
        std::cout << s.step << "\t" << s.segment_len << "\t" << (s.inside ? "y" : "n") << "\t"
                  << s.rho_hat << "\t" << (s.coupled ? "y" : "n") << "\t" << s.t_end << "\t"
                  << s.v_pair << "\n";
    if (res.coupled) {
        std::cout << "coupled at t = " << res.coupling_time << "; contracting distance after:";
        for (const double d : res.post_distance) std::cout << " " << d;
        std::cout << "\n";
    } else {
        std::cout << "no coupling within " << cc.max_units << " units\n";
    }
    if (wr) wr->write_raw(chain_steps_json(res));

    if (tail_runs > 0) {
        const CouplingTimeTail tail =
            coupling_time_tail(model, u0, v0, cc, tail_runs, rng.derive(tag64("tail")));
        std::cout << "coupled fraction " << tail.coupled_fraction << ", survival slope "
                  << tail.logfit.slope << " (r2 " << tail.logfit.r2 << ")\n";
    }
    if (marginal_runs > 0) {
        const MarginalCheck mc =
            chain_marginal_check(model, u0, v0, cc, check_time, marginal_runs,
                                 rng.derive(tag64("marginal")));
        double min_p = 1.0;
        for (const auto& t : mc.tests) min_p = std::min(min_p, t.p);
        std::cout << "marginal check at t = " << check_time << ": min p = " << min_p
                  << " over " << mc.tests.size() << " tests, threshold "
                  << mc.alpha / static_cast<double>(mc.tests.size())
                  << (mc.pass ? " (ok)" : " (FAILED)") << "\n";
        return mc.pass ? kExitOk : kExitCheckFailed;
    }
    return kExitOk;
}

int cmd_cascade(CommonOpts& c, const std::string& modes_arg, int radius, int passes,
                const std::string& dump_path) {
    const json j = load_and_seed(c);
    PrecheckResult pr;
    WaveSet grown;
    json cfg_json = {{"radius", radius}};
    if (!modes_arg.empty()) {
        const auto seeds = parse_modes(modes_arg);
        grown = grow_k(seed_set(seeds), radius, passes);
        pr = band_coverage(grown, radius);
        cfg_json["seeds"] = seeds;
    } else {
        const SolverConfig cfg = solver_from(j);
        pr = galerkin_ergodicity_precheck(cfg.forcing, radius);
        std::vector<std::pair<int, int>> seeds;
        for (const auto& m : cfg.forcing.modes)
            if (m.amp_cos > 0.0 && m.amp_sin > 0.0) seeds.emplace_back(m.k1, m.k2);
        grown = grow_k(seed_set(seeds), radius, passes);
        cfg_json["solver"] = solver_to_json(cfg);
    }
    std::cout << "grown " << pr.grown << " modes in " << pr.generations
              << " generations; band target " << pr.target << "; "
              << (pr.covered ? "covered" : "NOT covered") << "\n";
    if (!pr.missing.empty()) {
        std::cout << "missing:";
        for (const auto& [k1, k2] : pr.missing) std::cout << " (" << k1 << "," << k2 << ")";
        std::cout << "\n";
    }
    if (!dump_path.empty()) dump_waveset_csv(grown, dump_path);
    if (!c.out_path.empty()) {
        ReportWriter wr(c.out_path);
        CheckRecord rec;
        rec.experiment = "cascade";
        rec.seed = c.seed;
        rec.estimate = static_cast<double>(pr.grown);
        rec.bound = static_cast<double>(pr.target);
        rec.pass = pr.covered;
        rec.config = cfg_json;
        wr.write(rec);
    }
    return pr.covered ? kExitOk : kExitCheckFailed;
}

int cmd_report(CommonOpts& c, const std::vector<std::string>& only) {
    std::optional<ReportWriter> wr;
    if (!c.out_path.empty()) wr.emplace(c.out_path);
    bool all = true;
    std::size_t idx = 0;
    const auto& reg = experiments::registry();
    for (const auto& [name, fn] : reg) {
        ++idx;
        if (!only.empty() &&
            std::find(only.begin(), only.end(), name) == only.end())
            continue;
        const experiments::Outcome o = fn(c.seed, c.threads);
        std::printf("[%2zu/%zu] %-24s %s  %s\n", idx, reg.size(), o.name.c_str(),
                    o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) all = false;
        if (wr)
            for (const auto& r : o.records) wr->write(r);
    }
    return all ? kExitOk : kExitCheckFailed;
}

int cmd_replay(CommonOpts& c, const std::string& in_path) {
    std::ifstream in(in_path);
    if (!in) throw std::runtime_error("cannot open " + in_path);

    // experiment root and seed of every known record
    struct Key {
        std::string root;
        std::uint64_t seed;
        bool operator<(const Key& o) const {
            return root != o.root ? root < o.root : seed < o.seed;
        }
    };
    std::map<Key, std::map<std::string, double>> wanted;
    std::string line;
    std::size_t skipped = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        if (!j.contains("experiment") || !j.contains("seed")) {
            ++skipped;
            continue;
        }
        const std::string full = j["experiment"].get<std::string>();
        const std::string root = full.substr(0, full.find('/'));
        bool known = false;
        for (const auto& [n, fn] : experiments::registry())
            if (n == root) known = true;
        if (!known) {
            ++skipped;
            continue;
        }
        wanted[{root, j["seed"].get<std::uint64_t>()}][full] = j["estimate"].get<double>();
    }
    if (wanted.empty()) {
        std::cout << "no replayable records (" << skipped << " skipped)\n";
        return kExitUsage;
    }
    bool ok = true;
    for (const auto& [key, recs] : wanted) {
        const experiments::Outcome o = experiments::run_by_name(key.root, key.seed, c.threads);
        std::map<std::string, double> fresh;
        for (const auto& r : o.records) fresh[r.experiment] = r.estimate;
        for (const auto& [full, est] : recs) {
            const auto it = fresh.find(full);
            if (it == fresh.end()) {
                std::cout << full << ": no longer produced\n";
                ok = false;
                continue;
            }
            const double diff = std::abs(it->second - est);
            const double tol = 1e-12 * std::max(1.0, std::abs(est));
            if (diff > tol) {
                std::cout << full << ": estimate drifted, " << est << " -> " << it->second
                          << "\n";
                ok = false;
            }
        }
        std::cout << key.root << " (seed " << key.seed << "): " << recs.size()
                  << " records replayed\n";
    }
    std::cout << (ok ? "replay clean" : "replay MISMATCH") << "\n";
    return ok ? kExitOk : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic 2d vorticity laboratory"};
    app.require_subcommand(1);

    CommonOpts c;

    auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
    double sim_horizon = 10.0, sim_ncut = 0.0;
    std::string sim_dump, sim_trace;
    add_common(sim, c, true);
    sim->add_option("--horizon", sim_horizon, "integration time");
    sim->add_option("--ncut", sim_ncut, "Galerkin truncation radius (0: off)");
    sim->add_option("--dump", sim_dump, "final spectral state CSV");
    sim->add_option("--trace", sim_trace, "per-step energy trace CSV");

    auto* stat = app.add_subcommand("stationary", "dissipation vs injection balance");
    double st_horizon = 200.0, st_burn = 50.0;
    std::size_t st_ens = 8;
    add_common(stat, c, true);
    stat->add_option("--horizon", st_horizon, "per-trajectory time");
    stat->add_option("--burn-in", st_burn, "discarded initial time");
    stat->add_option("--ensemble", st_ens, "trajectories");

    auto* ouc = app.add_subcommand("ou-compare", "small-scale gap to the linear model");
    std::string ou_shells = "5,9,13,17";
    double ou_horizon = 1.0;
    std::size_t ou_ens = 64;
    add_common(ouc, c, true);
    ouc->add_option("--shells", ou_shells, "comma-separated |k| shells");
    ouc->add_option("--horizon", ou_horizon, "path length");
    ouc->add_option("--ensemble", ou_ens, "paired trajectories");

    auto* env = app.add_subcommand("envelope", "pathwise growth envelope tail");
    bool env_toy = false;
    std::string env_points = "0.5:5,0.5:8";
    double env_horizon = 20.0, env_exit = 0.0;
    std::size_t env_ens = 256;
    add_common(env, c, false);
    env->add_flag("--toy", env_toy, "use the two-mode model");
    env->add_option("--points", env_points, "eps:K list");
    env->add_option("--horizon", env_horizon, "per-trajectory time");
    env->add_option("--ensemble", env_ens, "trajectories");
    env->add_option("--exit-level", env_exit, "also fit the exit-time tail at this level");

    auto* syn = app.add_subcommand("sync", "slaved-copy collapse above a cutoff");
    double sy_nstar = 4.0, sy_burn = 10.0, sy_horizon = 20.0, sy_pert = 1.0;
    std::size_t sy_samples = 200;
    add_common(syn, c, true);
    syn->add_option("--nstar", sy_nstar, "observation cutoff");
    syn->add_option("--burn-in", sy_burn, "reference warm-up time");
    syn->add_option("--horizon", sy_horizon, "comparison window");
    syn->add_option("--perturbation", sy_pert, "initial distance");
    syn->add_option("--samples", sy_samples, "nonlinearity constant sample count");

    auto* lnu = app.add_subcommand("large-nu", "contraction at large viscosity");
    double ln_horizon = 10.0;
    int ln_depth = 6;
    std::size_t ln_samples = 200;
    add_common(lnu, c, true);
    lnu->add_option("--horizon", ln_horizon, "paired-run time");
    lnu->add_option("--depth", ln_depth, "pullback depth");
    lnu->add_option("--samples", ln_samples, "nonlinearity constant sample count");

    auto* toy = app.add_subcommand("toy", "two-mode pathwise contraction and memory");
    double ty_horizon = 8.0, ty_h0 = 1.0, ty_h0_alt = -1.0;
    add_common(toy, c, false);
    toy->add_option("--horizon", ty_horizon, "run time");
    toy->add_option("--h0", ty_h0, "first initial point");
    toy->add_option("--h0-alt", ty_h0_alt, "second initial point");

    auto* gir = app.add_subcommand("girsanov", "drift-change exponent statistics");
    std::size_t gi_paths = 100000;
    double gi_horizon = 1.0, gi_h0 = 1.0, gi_h0_alt = -1.0, gi_p = 2.0;
    add_common(gir, c, false);
    gir->add_option("--paths", gi_paths, "sampled paths");
    gir->add_option("--horizon", gi_horizon, "path length");
    gir->add_option("--h0", gi_h0, "first initial point");
    gir->add_option("--h0-alt", gi_h0_alt, "second initial point");
    gir->add_option("--p", gi_p, "moment order");

    auto* cpl = app.add_subcommand("couple", "meet coupling chain for a pair of copies");
    std::string cp_model = "toy";
    std::size_t cp_replicas = 128, cp_tail = 0, cp_marginal = 0, cp_check = 5;
    double cp_bin = 0.1, cp_nstar = 2.0, cp_h = 1.5, cp_l = 1.0;
    std::size_t cp_units = 16;
    add_common(cpl, c, false);
    cpl->add_option("--model", cp_model, "toy | galerkin")
        ->check(CLI::IsMember({"toy", "galerkin"}));
    cpl->add_option("--replicas", cp_replicas, "common-noise replicas per attempt");
    cpl->add_option("--bin", cp_bin, "histogram bin width");
    cpl->add_option("--units", cp_units, "chain budget in unit times");
    cpl->add_option("--nstar", cp_nstar, "observed-mode cutoff (galerkin)");
    cpl->add_option("--start", cp_h, "first copy starts at (h, l) = (start, start/2)");
    cpl->add_option("--start-l", cp_l, "override l start");
    cpl->add_option("--tail-runs", cp_tail, "also estimate the coupling-time tail");
    cpl->add_option("--marginal-runs", cp_marginal, "also run the marginal check");
    cpl->add_option("--check-time", cp_check, "marginal check time");

    auto* cas = app.add_subcommand("cascade", "interaction closure of a seed set");
    std::string ca_modes, ca_dump;
    int ca_radius = 8, ca_passes = -1;
    add_common(cas, c, false);
    cas->add_option("--seed-modes", ca_modes, "semicolon-separated k1,k2 seeds");
    cas->add_option("--radius", ca_radius, "band cutoff")->check(CLI::PositiveNumber);
    cas->add_option("--passes", ca_passes, "growth passes (-1: fixed point)");
    cas->add_option("--dump", ca_dump, "write the grown set as CSV");

    auto* rep = app.add_subcommand("report", "run the pinned verification battery");
    std::vector<std::string> rp_only;
    add_common(rep, c, false);
    rep->add_option("--only", rp_only, "restrict to named experiments");

    auto* rpl = app.add_subcommand("replay", "re-run recorded experiments and diff estimates");
    std::string rl_in;
    add_common(rpl, c, false);
    rpl->add_option("--in", rl_in, "JSONL report to replay")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? snslab::kExitOk : snslab::kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(c, sim_horizon, sim_ncut, sim_dump, sim_trace);
        if (stat->parsed()) return cmd_stationary(c, st_horizon, st_burn, st_ens);
        if (ouc->parsed()) return cmd_ou_compare(c, ou_shells, ou_horizon, ou_ens);
        if (env->parsed())
            return cmd_envelope(c, env_toy, env_points, env_horizon, env_ens, env_exit);
        if (syn->parsed()) return cmd_sync(c, sy_nstar, sy_burn, sy_horizon, sy_pert, sy_samples);
        if (lnu->parsed()) return cmd_large_nu(c, ln_horizon, ln_depth, ln_samples);
        if (toy->parsed()) return cmd_toy(c, ty_horizon, ty_h0, ty_h0_alt);
        if (gir->parsed())
            return cmd_girsanov(c, gi_paths, gi_horizon, gi_h0, gi_h0_alt, gi_p);
        if (cpl->parsed()) {
            ChainConfig cc;
            cc.replicas = cp_replicas;
            cc.bin_width = cp_bin;
            cc.max_units = cp_units;
            if (cp_model == "toy") {
                const json j = load_and_seed(c);
                const ToyCouplingModel model{toy_from(j), 0.5};
                const ToyState u0{cp_h, cp_l}, v0{-cp_h, -cp_l};
                return couple_with(model, u0, v0, cc, cp_tail, cp_marginal, cp_check, c);
            }
            const json j = load_and_seed(c);
            const GalerkinCouplingModel model(solver_from(j), cp_nstar);
            SpectralField u0 = model.initial_state(), v0 = model.initial_state();
            u0.at(1, 0) = cplx(cp_h, 0.0);
            v0.at(0, 1) = cplx(0.0, cp_h);
            enforce_reality(u0);
            enforce_reality(v0);
            return couple_with(model, u0, v0, cc, cp_tail, cp_marginal, cp_check, c);
        }
        if (cas->parsed()) return cmd_cascade(c, ca_modes, ca_radius, ca_passes, ca_dump);
        if (rep->parsed()) return cmd_report(c, rp_only);
        if (rpl->parsed()) return cmd_replay(c, rl_in);
    } catch (const SimulationBlowup& e) {
        std::cerr << e.what() << "\n";
        return snslab::kExitRuntime;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return snslab::kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return snslab::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return snslab::kExitRuntime;
    }
    return snslab::kExitUsage;
}
