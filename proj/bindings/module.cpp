#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snslab/cascade.hpp"
#include "snslab/coupling.hpp"
#include "snslab/empirical_measure.hpp"
#include "snslab/estimators.hpp"
#include "snslab/experiments.hpp"
#include "snslab/girsanov.hpp"
#include "snslab/report.hpp"
#include "snslab/sync.hpp"

namespace py = pybind11;
using namespace snslab;

namespace {

// One trajectory from rest; returns (final field, times, energy, enstrophy).
std::tuple<SpectralField, std::vector<double>, std::vector<double>, std::vector<double>>
integrate(const SolverConfig& cfg, std::uint64_t seed, double horizon, double ncut) {
    SnsStepper stepper(cfg);
    SpectralField w(cfg.grid);
    const CounterRng rng = make_rng(seed).derive(tag64("simulate"));
    const auto nsteps = static_cast<std::uint64_t>(std::llround(horizon / cfg.dt));
    std::vector<double> ts, es, zs;
    ts.reserve(nsteps);
    es.reserve(nsteps);
    zs.reserve(nsteps);
    for (std::uint64_t s = 0; s < nsteps; ++s) {
        const NoiseIncrement noise = sample_increment(cfg.forcing, rng, s, cfg.dt);
        if (ncut > 0.0)
            stepper.step_galerkin(w, noise, ncut, s);
        else
            stepper.step(w, noise, s);
        ts.push_back(static_cast<double>(s + 1) * cfg.dt);
        es.push_back(energy(w));
        zs.push_back(enstrophy(w));
    }
    return {std::move(w), std::move(ts), std::move(es), std::move(zs)};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "spectral vorticity laboratory core";

    py::register_exception<SimulationBlowup>(m, "SimulationBlowup");

    py::class_<CounterRng>(m, "CounterRng")
        .def(py::init<std::uint64_t>(), py::arg("key") = 0)
        .def_readonly("key", &CounterRng::key)
        .def("derive", py::overload_cast<std::uint64_t>(&CounterRng::derive, py::const_));
    m.def("make_rng", &make_rng);
    m.def("normal", [](const CounterRng& r, std::uint64_t step, std::uint64_t slot) {
        return standard_normal(r, step, slot);
    });

    py::class_<WaveGrid>(m, "WaveGrid")
        .def(py::init<int, double>(), py::arg("resolution"), py::arg("cutoff") = -1.0)
        .def_readonly("resolution", &WaveGrid::n)
        .def_readonly("dealias_cutoff", &WaveGrid::dealias_cutoff)
        .def("kmax", &WaveGrid::kmax)
        .def("contains", &WaveGrid::contains)
        .def("size", &WaveGrid::size);

    py::class_<SpectralField>(m, "SpectralField")
        .def(py::init<const WaveGrid&>())
        .def_readonly("grid", &SpectralField::grid)
        .def("get", [](const SpectralField& f, int k1, int k2) { return f.at(k1, k2); })
        .def("set",
             [](SpectralField& f, int k1, int k2, cplx v) {
                 f.at(k1, k2) = v;
                 f.at(-k1, -k2) = std::conj(v);
             })
        .def("energy", [](const SpectralField& f) { return energy(f); })
        .def("enstrophy", [](const SpectralField& f) { return enstrophy(f); })
        .def("palinstrophy", [](const SpectralField& f) { return palinstrophy(f); })
        .def("reality_defect", [](const SpectralField& f) { return reality_defect(f); })
        .def("modes", [](const SpectralField& f) {
            std::vector<std::tuple<int, int, cplx>> out;
            for_each_mode(f.grid, [&](int k1, int k2) { out.emplace_back(k1, k2, f.at(k1, k2)); });
            return out;
        });
    m.def(
        "random_field",
        [](const WaveGrid& g, std::uint64_t seed, double decay) {
            return random_field(g, make_rng(seed), [decay](double r) {
                return std::pow(1.0 + r, -decay);
            });
        },
        py::arg("grid"), py::arg("seed"), py::arg("decay") = 1.0);
    m.def("energy_distance", &energy_distance);
    m.def("enstrophy_distance", &enstrophy_distance);

    py::class_<ForcedMode>(m, "ForcedMode")
        .def_readonly("k1", &ForcedMode::k1)
        .def_readonly("k2", &ForcedMode::k2)
        .def_readonly("amp_cos", &ForcedMode::amp_cos)
        .def_readonly("amp_sin", &ForcedMode::amp_sin);
    py::class_<ForcingSpec>(m, "ForcingSpec")
        .def_readonly("modes", &ForcingSpec::modes)
        .def("energy_rate", &ForcingSpec::energy_rate)
        .def("enstrophy_rate", &ForcingSpec::enstrophy_rate)
        .def("max_amplitude_sq", &ForcingSpec::max_amplitude_sq);
    m.def("four_mode_forcing", &four_mode_forcing);
    m.def("power_law_forcing", &power_law_forcing);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init([](int resolution, double nu, double dt, const ForcingSpec& forcing) {
                 SolverConfig cfg;
                 cfg.grid = WaveGrid(resolution);
                 cfg.nu = nu;
                 cfg.dt = dt;
                 cfg.forcing = forcing;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("resolution"), py::arg("nu"), py::arg("dt"), py::arg("forcing"))
        .def_readonly("nu", &SolverConfig::nu)
        .def_readonly("dt", &SolverConfig::dt)
        .def_readonly("grid", &SolverConfig::grid)
        .def_readonly("forcing", &SolverConfig::forcing);

    py::class_<SnsStepper>(m, "SnsStepper")
        .def(py::init<const SolverConfig&>())
        .def("step",
             [](SnsStepper& st, SpectralField& w, const CounterRng& stream, std::uint64_t s) {
                 const NoiseIncrement n =
                     sample_increment(st.config().forcing, stream, s, st.config().dt);
                 st.step(w, n, s);
             })
        .def("step_ou",
             [](SnsStepper& st, SpectralField& z, const CounterRng& stream, std::uint64_t s) {
                 const NoiseIncrement n =
                     sample_increment(st.config().forcing, stream, s, st.config().dt);
                 st.step_ou(z, n);
             });
    m.def("integrate", &integrate, py::arg("config"), py::arg("seed"), py::arg("horizon"),
          py::arg("galerkin_ncut") = 0.0);
    m.def("nonlinear_term", [](const SpectralField& w) {
        NonlinearWorkspace ws(w.grid);
        SpectralField out(w.grid);
        ws.eval(w, out);
        return out;
    });
    m.def("nonlinear_term_direct", &nonlinear_term_direct);
    m.def("energy_pairing", &energy_pairing);
    m.def("enstrophy_pairing", &enstrophy_pairing);

    py::class_<MeanCi>(m, "MeanCi")
        .def_readonly("mean", &MeanCi::mean)
        .def_readonly("se", &MeanCi::se)
        .def_readonly("lo", &MeanCi::lo)
        .def_readonly("hi", &MeanCi::hi);
    py::class_<LineFit>(m, "LineFit")
        .def_readonly("slope", &LineFit::slope)
        .def_readonly("intercept", &LineFit::intercept)
        .def_readonly("r2", &LineFit::r2);

    py::class_<ToyConfig>(m, "ToyConfig")
        .def(py::init<>())
        .def_readwrite("nu1", &ToyConfig::nu1)
        .def_readwrite("nu2", &ToyConfig::nu2)
        .def_readwrite("sigma1", &ToyConfig::sigma1)
        .def_readwrite("sigma2", &ToyConfig::sigma2)
        .def_readwrite("a", &ToyConfig::a)
        .def_readwrite("b", &ToyConfig::b)
        .def_readwrite("c", &ToyConfig::c)
        .def_readwrite("dt", &ToyConfig::dt)
        .def("contraction_gap", &ToyConfig::contraction_gap);
    py::class_<ContractionFit>(m, "ContractionFit")
        .def_readonly("slope", &ContractionFit::slope)
        .def_readonly("r2", &ContractionFit::r2)
        .def_readonly("degenerate", &ContractionFit::degenerate);
    m.def("toy_contraction_rate",
          [](const ToyConfig& c, double h0, double h0_alt, double horizon, std::uint64_t seed) {
              return toy_contraction_rate(c, h0, h0_alt, horizon, make_rng(seed));
          });

    py::class_<GirsanovRun>(m, "GirsanovRun")
        .def_readonly("exponent_mean", &GirsanovRun::exponent_mean)
        .def_readonly("exponent_moment", &GirsanovRun::exponent_moment)
        .def_readonly("moment_bound", &GirsanovRun::moment_bound)
        .def_readonly("novikov_sup", &GirsanovRun::novikov_sup)
        .def_readonly("novikov_bound", &GirsanovRun::novikov_bound);
    m.def("girsanov_toy_pairing",
          [](const ToyConfig& c, double h0, double h0_alt, double horizon, std::size_t paths,
             double p, std::uint64_t seed) {
              return girsanov_toy_pairing(c, h0, h0_alt, horizon, paths, p, make_rng(seed));
          });

    py::class_<StationaryBalance>(m, "StationaryBalance")
        .def_readonly("mean_dissipation", &StationaryBalance::mean_dissipation)
        .def_readonly("e0", &StationaryBalance::e0)
        .def_readonly("rel_err_energy", &StationaryBalance::rel_err_energy)
        .def_readonly("mean_palinstrophy_rate", &StationaryBalance::mean_palinstrophy_rate)
        .def_readonly("e1", &StationaryBalance::e1)
        .def_readonly("rel_err_enstrophy", &StationaryBalance::rel_err_enstrophy);
    m.def("stationary_balance_check",
          [](const SolverConfig& cfg, double horizon, double burn_in, std::size_t ensemble,
             std::uint64_t seed, int threads) {
              return stationary_balance_check(cfg, horizon, burn_in, ensemble, make_rng(seed),
                                              threads);
          },
          py::arg("config"), py::arg("horizon"), py::arg("burn_in"), py::arg("ensemble"),
          py::arg("seed"), py::arg("threads") = 1);

    py::class_<SyncResult>(m, "SyncResult")
        .def_readonly("times", &SyncResult::times)
        .def_readonly("dist_energy", &SyncResult::dist_energy)
        .def_readonly("ratio_end", &SyncResult::ratio_end)
        .def_readonly("bound_margin", &SyncResult::bound_margin)
        .def_readonly("logfit", &SyncResult::logfit);
    m.def("run_sync",
          [](const SolverConfig& solver, double nstar, double burn_in, double horizon,
             double c_hat, std::uint64_t seed) {
              SyncConfig sc;
              sc.solver = solver;
              sc.nstar = nstar;
              sc.burn_in = burn_in;
              sc.horizon = horizon;
              return run_sync(sc, c_hat, make_rng(seed));
          });
    py::class_<NonlinearityConstant>(m, "NonlinearityConstant")
        .def_readonly("c_hat", &NonlinearityConstant::c_hat)
        .def_readonly("stable", &NonlinearityConstant::stable);
    m.def("estimate_nonlinearity_constant",
          [](const WaveGrid& g, double nstar, std::size_t samples, std::uint64_t seed) {
              return estimate_nonlinearity_constant(g, nstar, samples, make_rng(seed));
          });

    py::class_<PrecheckResult>(m, "PrecheckResult")
        .def_readonly("covered", &PrecheckResult::covered)
        .def_readonly("grown", &PrecheckResult::grown)
        .def_readonly("target", &PrecheckResult::target)
        .def_readonly("missing", &PrecheckResult::missing)
        .def_readonly("generations", &PrecheckResult::generations);
    m.def("cascade_coverage",
          [](const std::vector<std::pair<int, int>>& seeds, int radius) {
              return band_coverage(grow_k(seed_set(seeds), radius), radius);
          });
    m.def("galerkin_ergodicity_precheck", &galerkin_ergodicity_precheck);

    py::class_<LatticeCheck>(m, "LatticeCheck")
        .def_readonly("fixtures", &LatticeCheck::fixtures)
        .def_readonly("failures", &LatticeCheck::failures)
        .def_readonly("worst_defect", &LatticeCheck::worst_defect)
        .def_readonly("worst_bound_slack", &LatticeCheck::worst_bound_slack)
        .def_readonly("ok", &LatticeCheck::pass);
    m.def(
        "lattice_identity_check",
        [](std::size_t fixtures, std::uint64_t seed) {
            return lattice_identity_check(fixtures, make_rng(seed));
        },
        py::arg("fixtures"), py::arg("seed") = 1);

    py::class_<ChainResult>(m, "ChainResult")
        .def_readonly("coupled", &ChainResult::coupled)
        .def_readonly("coupling_time", &ChainResult::coupling_time)
        .def_readonly("post_distance", &ChainResult::post_distance)
        .def_readonly("growth_cap_used", &ChainResult::growth_cap_used)
        .def_readonly("inside_radius_used", &ChainResult::inside_radius_used);
    m.def("toy_coupling_chain",
          [](const ToyConfig& cfg, double h0, double l0, std::size_t replicas, double bin_width,
             std::size_t max_units, std::uint64_t seed) {
              const ToyCouplingModel model{cfg, 0.5};
              ChainConfig cc;
              cc.replicas = replicas;
              cc.bin_width = bin_width;
              cc.max_units = max_units;
              return run_coupling_chain(model, ToyState{h0, l0}, ToyState{-h0, -l0}, cc,
                                        make_rng(seed));
          });

    m.def("experiment_names", []() {
        std::vector<std::string> names;
        for (const auto& [n, fn] : experiments::registry()) names.push_back(n);
        return names;
    });
    m.def("run_experiment",
          [](const std::string& name, std::uint64_t seed, int threads) {
              const experiments::Outcome o = experiments::run_by_name(name, seed, threads);
              py::dict d;
              d["name"] = o.name;
              d["pass"] = o.pass;
              d["detail"] = o.detail;
              std::vector<std::string> recs;
              for (const auto& r : o.records) recs.push_back(r.to_json().dump());
              d["records_json"] = recs;
              return d;
          },
          py::arg("name"), py::arg("seed") = 1, py::arg("threads") = 1);
}
