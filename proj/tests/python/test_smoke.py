import json
import math

import snslab


def test_forcing_bookkeeping():
    f = snslab.four_mode_forcing(2.0)
    assert abs(f.energy_rate() - 2.0) < 1e-15
    assert abs(f.enstrophy_rate() - 2.0) < 1e-15
    assert abs(f.max_amplitude_sq() - 0.5) < 1e-15
    p = snslab.power_law_forcing(2.0, 5.0, 1.5)
    assert abs(p.energy_rate() - 1.5) < 1e-12


def test_integrate_small_grid():
    cfg = snslab.SolverConfig(16, 1.0, 1e-2, snslab.four_mode_forcing(2.0))
    field, times, energy, enstrophy = snslab.integrate(cfg, seed=3, horizon=1.0)
    assert len(times) == 100
    assert all(math.isfinite(e) for e in energy)
    assert energy[-1] > 0.0
    assert field.reality_defect() < 1e-12


def test_nonlinear_oracle_agreement():
    w = snslab.random_field(snslab.WaveGrid(12), seed=5, decay=2.0)
    fast = snslab.nonlinear_term(w)
    slow = snslab.nonlinear_term_direct(w)
    gap = max(abs(a - b) for (_, _, a), (_, _, b) in zip(fast.modes(), slow.modes()))
    assert gap < 1e-10
    assert abs(snslab.energy_pairing(fast, w)) < 1e-9
    assert abs(snslab.enstrophy_pairing(fast, w)) < 1e-9


def test_toy_contraction_and_girsanov():
    cfg = snslab.ToyConfig()
    fit = snslab.toy_contraction_rate(cfg, 1.0, -1.0, 8.0, 11)
    assert not fit.degenerate
    assert fit.slope < -0.9
    run = snslab.girsanov_toy_pairing(cfg, 1.0, -1.0, 0.5, 2000, 2.0, 13)
    assert abs(run.exponent_mean.mean - 1.0) <= 5.0 * run.exponent_mean.se
    assert run.novikov_sup <= run.novikov_bound * 1.01


def test_cascade_coverage():
    res = snslab.cascade_coverage([(1, 0), (1, 1)], 6)
    assert res.covered
    assert res.grown >= res.target
    assert not res.missing


def test_lattice_identities():
    chk = snslab.lattice_identity_check(50, seed=17)
    assert chk.ok
    assert chk.failures == 0
    assert chk.worst_defect <= 1e-12


def test_experiment_registry_runs():
    names = snslab.experiment_names()
    assert "cascade-coverage" in names and len(names) == 13
    out = snslab.run_experiment("cascade-coverage", seed=1)
    assert out["pass"]
    rec = json.loads(out["records_json"][0])
    assert rec["experiment"].startswith("cascade-coverage/")
    assert "config_hash" in rec
