#include "snslab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "snslab/parallel.hpp"

namespace snslab {

namespace {
constexpr std::uint64_t kTrajTag = 0x72616A31ULL; // per-trajectory stream label

// amplitude-squared of the velocity noise on a forced representative
double velocity_amp_sq(const ForcedMode& m) {
    return 0.25 * (m.amp_cos * m.amp_cos + m.amp_sin * m.amp_sin);
}
} // namespace

std::vector<BoundCheck> energy_moment_bound_check(const SolverConfig& cfg, const SpectralField& u0,
                                                  const EnergyBoundConfig& opt, const CounterRng& rng) {
    cfg.validate();
    std::vector<double> times = opt.sample_times;
    std::sort(times.begin(), times.end());
    const double e0 = cfg.forcing.energy_rate();
    const double u0e = energy(u0);
    std::vector<std::vector<double>> samples(times.size(), std::vector<double>(opt.ensemble));

    parallel_for(opt.ensemble, opt.threads, [&](std::size_t traj) {
        SnsStepper stepper(cfg);
        SpectralField w = u0;
        const CounterRng stream = rng.derive({kTrajTag, traj});
        std::size_t next = 0;
        const std::size_t nsteps =
            static_cast<std::size_t>(std::llround(times.back() / cfg.dt));
        for (std::size_t s = 0; s < nsteps && next < times.size(); ++s) {
            stepper.step(w, sample_increment(cfg.forcing, stream, s, cfg.dt), s);
            const double t = static_cast<double>(s + 1) * cfg.dt;
            while (next < times.size() && t >= times[next] - 0.5 * cfg.dt) {
                samples[next][traj] = energy(w);
                ++next;
            }
        }
        while (next < times.size()) samples[next++][traj] = energy(w);
    });

    std::vector<BoundCheck> out;
    for (std::size_t i = 0; i < times.size(); ++i) {
        BoundCheck b;
        b.t = times[i];
        b.estimate = mean_ci(samples[i], 3.0);
        const double decay = std::exp(-2.0 * cfg.nu * times[i]);
        b.bound = decay * u0e + e0 / (2.0 * cfg.nu) * (1.0 - decay) + opt.slack_rate * cfg.dt * e0;
        b.pass = b.estimate.mean <= b.bound + 3.0 * b.estimate.se;
        out.push_back(b);
    }
    return out;
}

StationaryBalance stationary_balance_check(const SolverConfig& cfg, double horizon, double burn_in,
                                           std::size_t ensemble, const CounterRng& rng, int threads) {
    cfg.validate();
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(horizon / cfg.dt));
    const std::size_t skip = static_cast<std::size_t>(std::llround(burn_in / cfg.dt));
    std::vector<double> diss(ensemble), palin(ensemble);

    parallel_for(ensemble, threads, [&](std::size_t traj) {
        SnsStepper stepper(cfg);
        SpectralField w(cfg.grid);
        const CounterRng stream = rng.derive({kTrajTag, traj});
        double sz = 0.0, sp = 0.0;
        std::size_t count = 0;
        for (std::size_t s = 0; s < nsteps; ++s) {
            stepper.step(w, sample_increment(cfg.forcing, stream, s, cfg.dt), s);
            if (s >= skip) {
                sz += enstrophy(w);
                sp += palinstrophy(w);
                ++count;
            }
        }
        diss[traj] = 2.0 * cfg.nu * sz / static_cast<double>(count);
        palin[traj] = 2.0 * cfg.nu * sp / static_cast<double>(count);
    });

    StationaryBalance r;
    r.ensemble = ensemble;
    const MeanCi md = mean_ci(diss);
    const MeanCi mp = mean_ci(palin);
    r.mean_dissipation = md.mean;
    r.se_dissipation = md.se;
    r.e0 = cfg.forcing.energy_rate();
    r.rel_err_energy = std::abs(md.mean - r.e0) / r.e0;
    r.mean_palinstrophy_rate = mp.mean;
    r.e1 = cfg.forcing.enstrophy_rate();
    r.rel_err_enstrophy = std::abs(mp.mean - r.e1) / r.e1;
    return r;
}

std::vector<EnvelopeTailPoint> sns_envelope_tail(const SolverConfig& cfg, double horizon,
                                                 std::size_t ensemble,
                                                 const std::vector<std::pair<double, double>>& eps_K,
                                                 const CounterRng& rng, int threads) {
    cfg.validate();
    const LyapunovSpec spec = sns_lyapunov(cfg);
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(horizon / cfg.dt));
    // one statistic per (trajectory, eps); K thresholds share the same sup
    std::vector<std::vector<double>> sups(eps_K.size(), std::vector<double>(ensemble));

    parallel_for(ensemble, threads, [&](std::size_t traj) {
        SnsStepper stepper(cfg);
        SpectralField w(cfg.grid);
        const CounterRng stream = rng.derive({kTrajTag, traj});
        EnergyTrace tr;
        tr.dt = cfg.dt;
        tr.V.reserve(nsteps + 1);
        tr.U.reserve(nsteps + 1);
        tr.V.push_back(energy(w));
        tr.U.push_back(2.0 * cfg.nu * enstrophy(w));
        for (std::size_t s = 0; s < nsteps; ++s) {
            stepper.step(w, sample_increment(cfg.forcing, stream, s, cfg.dt), s);
            tr.V.push_back(energy(w));
            tr.U.push_back(2.0 * cfg.nu * enstrophy(w));
        }
        for (std::size_t q = 0; q < eps_K.size(); ++q)
            sups[q][traj] = growth_statistic(tr, spec, eps_K[q].first);
    });

    std::vector<EnvelopeTailPoint> out;
    for (std::size_t q = 0; q < eps_K.size(); ++q) {
        EnvelopeTailPoint p;
        p.eps = eps_K[q].first;
        p.K = eps_K[q].second;
        std::size_t hits = 0;
        for (double s : sups[q])
            if (s > p.K) ++hits;
        p.exceed = proportion_ci(hits, ensemble, 3.0);
        p.bound = std::exp(-2.0 * spec.C3 * p.eps * p.K);
        p.admissible = p.K > 1.0 / (p.eps * spec.C3);
        p.pass = p.exceed.mean <= p.bound + 3.0 * p.exceed.se;
        out.push_back(p);
    }
    return out;
}

std::vector<EnvelopeTailPoint> toy_envelope_tail(const ToyConfig& cfg, double horizon,
                                                 std::size_t ensemble,
                                                 const std::vector<std::pair<double, double>>& eps_K,
                                                 const CounterRng& rng) {
    cfg.validate();
    const LyapunovSpec spec = toy_lyapunov(cfg);
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(horizon / cfg.dt));
    std::vector<std::vector<double>> sups(eps_K.size(), std::vector<double>(ensemble));
    for (std::size_t traj = 0; traj < ensemble; ++traj) {
        const CounterRng stream = rng.derive({kTrajTag, traj});
        EnergyTrace tr;
        tr.dt = cfg.dt;
        ToyState s;
        tr.V.push_back(s.h * s.h + s.l * s.l);
        tr.U.push_back(cfg.nu1 * s.h * s.h + cfg.nu2 * s.l * s.l);
        for (std::size_t i = 0; i < nsteps; ++i) {
            const NormalPair z = normal_pair(stream, i, 0);
            s = step_toy(cfg, s, z.z0, z.z1);
            tr.V.push_back(s.h * s.h + s.l * s.l);
            tr.U.push_back(cfg.nu1 * s.h * s.h + cfg.nu2 * s.l * s.l);
        }
        for (std::size_t q = 0; q < eps_K.size(); ++q)
            sups[q][traj] = growth_statistic(tr, spec, eps_K[q].first);
    }
    std::vector<EnvelopeTailPoint> out;
    for (std::size_t q = 0; q < eps_K.size(); ++q) {
        EnvelopeTailPoint p;
        p.eps = eps_K[q].first;
        p.K = eps_K[q].second;
        std::size_t hits = 0;
        for (double s : sups[q])
            if (s > p.K) ++hits;
        p.exceed = proportion_ci(hits, ensemble, 3.0);
        p.bound = std::exp(-2.0 * spec.C3 * p.eps * p.K);
        p.admissible = p.K > 1.0 / (p.eps * spec.C3);
        p.pass = p.exceed.mean <= p.bound + 3.0 * p.exceed.se;
        out.push_back(p);
    }
    return out;
}

ExitTail exp_envelope_exit_tail(const SolverConfig& cfg, double M, double horizon,
                                std::size_t ensemble, const CounterRng& rng, int threads) {
    cfg.validate();
    const LyapunovSpec spec = sns_lyapunov(cfg);
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(horizon / cfg.dt));
    std::vector<double> exit_time(ensemble, -1.0);

    parallel_for(ensemble, threads, [&](std::size_t traj) {
        SnsStepper stepper(cfg);
        SpectralField w(cfg.grid);
        const CounterRng stream = rng.derive({kTrajTag, traj});
        const double V0 = energy(w);
        double iu = 0.0;
        for (std::size_t s = 0; s < nsteps; ++s) {
            iu += 2.0 * cfg.nu * enstrophy(w) * cfg.dt;
            stepper.step(w, sample_increment(cfg.forcing, stream, s, cfg.dt), s);
            const double t = static_cast<double>(s + 1) * cfg.dt;
            const double excess =
                energy(w) + (1.0 - spec.eps_star) * iu - V0 - spec.C1 * (1.0 + spec.eps_star) * t;
            if (excess > M) {
                exit_time[traj] = t;
                break;
            }
        }
    });

    ExitTail r;
    std::size_t exits = 0;
    for (double t : exit_time)
        if (t >= 0.0) ++exits;
    r.exit_fraction = static_cast<double>(exits) / static_cast<double>(ensemble);
    std::vector<double> ts, logs;
    for (double t = 0.0; t < horizon; t += horizon / 20.0) {
        std::size_t later = 0;
        for (double e : exit_time)
            if (e > t) ++later;
        r.times.push_back(t);
        const double frac = static_cast<double>(later) / static_cast<double>(ensemble);
        r.survival.push_back(frac);
        if (later >= 3) {
            ts.push_back(t);
            logs.push_back(std::log(frac));
        }
    }
    if (ts.size() >= 3) r.fit = fit_line(ts, logs);
    return r;
}

DecayFit spectral_decay_fit(const SpectralField& w, int shell_lo, int shell_hi) {
    if (shell_lo < 1 || shell_hi <= shell_lo)
        throw std::invalid_argument("spectral_decay_fit: bad shell range");
    std::map<int, std::pair<double, double>> best; // shell -> (|k|, max |u_k|)
    for_each_mode(w.grid, [&](int k1, int k2) {
        const double r = std::sqrt(static_cast<double>(ksq(k1, k2)));
        const int shell = static_cast<int>(std::lround(r));
        if (shell < shell_lo || shell > shell_hi) return;
        const double uk = std::abs(w.at(k1, k2)) / r;
        auto it = best.find(shell);
        if (it == best.end() || uk > it->second.second) best[shell] = {r, uk};
    });
    std::vector<double> xs, ys;
    for (const auto& [shell, rv] : best) {
        if (rv.second <= 0.0) continue;
        xs.push_back(rv.first);
        ys.push_back(std::log(rv.second));
    }
    if (xs.size() < 6) throw std::invalid_argument("spectral_decay_fit: fewer than 6 usable shells");
    const LineFit lf = fit_line(xs, ys);
    DecayFit f;
    f.tau = -lf.slope;
    f.D = std::exp(lf.intercept);
    f.r2 = lf.r2;
    f.shells_used = xs.size();
    return f;
}

namespace {
// Bounded uniformly continuous functionals of one complex path (as 2 reals).
// All are clipped to fixed ranges; the library is deliberately small and
// fixed so distances are comparable across modes and shells.
double clip_unit(double x) { return x > 1.0 ? 1.0 : (x < -1.0 ? -1.0 : x); }

void path_functionals(const std::vector<cplx>& path, double out[4]) {
    double sup = 0.0, avg_re = 0.0, endr = path.back().real();
    double osc = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        sup = std::max(sup, std::abs(path[i]));
        avg_re += path[i].real();
        if (i > 0) osc += std::abs(path[i] - path[i - 1]);
    }
    avg_re /= static_cast<double>(path.size());
    out[0] = clip_unit(endr);                         // clipped endpoint
    out[1] = clip_unit(0.5 * sup);                    // clipped running max
    out[2] = clip_unit(avg_re);                       // clipped mean
    out[3] = std::tanh(0.1 * osc);                    // smooth bounded oscillation
}
} // namespace

SmallScaleResult small_scale_ou_compare(const SolverConfig& cfg, const std::vector<double>& shellList,
                                        double horizon, std::size_t ensemble, const CounterRng& rng,
                                        int threads) {
    cfg.validate();
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(horizon / cfg.dt));

    // per shell: forced representatives with |k| within 1/2 of the nominal radius
    std::vector<std::vector<std::size_t>> shell_members(shellList.size());
    std::vector<double> amp(cfg.forcing.modes.size());
    for (std::size_t i = 0; i < cfg.forcing.modes.size(); ++i) {
        const auto& m = cfg.forcing.modes[i];
        amp[i] = std::sqrt(velocity_amp_sq(m));
        const double r = std::sqrt(static_cast<double>(ksq(m.k1, m.k2)));
        for (std::size_t s = 0; s < shellList.size(); ++s)
            if (std::abs(r - shellList[s]) <= 0.5) shell_members[s].push_back(i);
    }
    for (std::size_t s = 0; s < shellList.size(); ++s)
        if (shell_members[s].empty())
            throw std::invalid_argument("small_scale_ou_compare: empty shell (outside forced core?)");
    for (double a : amp)
        if (a <= 0.0) throw std::invalid_argument("small_scale_ou_compare: unforced mode in shell");

    // only shell members need recorded paths
    std::vector<std::size_t> needed;
    for (const auto& sm : shell_members) needed.insert(needed.end(), sm.begin(), sm.end());
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
    std::vector<std::size_t> slot(cfg.forcing.modes.size(), SIZE_MAX);
    for (std::size_t s = 0; s < needed.size(); ++s) slot[needed[s]] = s;

    // distances per (trajectory, shell)
    std::vector<std::vector<double>> dist(shellList.size(), std::vector<double>(ensemble, 0.0));

    parallel_for(ensemble, threads, [&](std::size_t traj) {
        SnsStepper stepper(cfg);
        SpectralField w(cfg.grid), z(cfg.grid);
        const CounterRng stream = rng.derive({kTrajTag, traj});
        std::vector<std::vector<cplx>> wpath(needed.size()), zpath(needed.size());
        for (auto& p : wpath) p.reserve(nsteps + 1);
        for (auto& p : zpath) p.reserve(nsteps + 1);
        auto record = [&](const SpectralField& f, std::vector<std::vector<cplx>>& paths) {
            for (std::size_t s = 0; s < needed.size(); ++s) {
                const auto& m = cfg.forcing.modes[needed[s]];
                paths[s].push_back(f.at(m.k1, m.k2));
            }
        };
        record(w, wpath);
        record(z, zpath);
        for (std::size_t s = 0; s < nsteps; ++s) {
            const NoiseIncrement noise = sample_increment(cfg.forcing, stream, s, cfg.dt);
            stepper.step(w, noise, s);
            stepper.step_ou(z, noise);
            record(w, wpath);
            record(z, zpath);
        }
        const double sqrt2 = std::sqrt(2.0);
        for (std::size_t sh = 0; sh < shellList.size(); ++sh) {
            double acc = 0.0;
            std::size_t cnt = 0;
            for (std::size_t i : shell_members[sh]) {
                const double scale = sqrt2 / amp[i];
                std::vector<cplx> wp = wpath[slot[i]], zp = zpath[slot[i]];
                for (auto& v : wp) v *= scale;
                for (auto& v : zp) v *= scale;
                double fw[4], fz[4];
                path_functionals(wp, fw);
                path_functionals(zp, fz);
                for (int q = 0; q < 4; ++q) acc += std::abs(fw[q] - fz[q]);
                cnt += 4;
            }
            dist[sh][traj] = acc / static_cast<double>(cnt);
        }
    });

    SmallScaleResult res;
    std::vector<double> means;
    for (std::size_t sh = 0; sh < shellList.size(); ++sh) {
        const MeanCi ci = mean_ci(dist[sh]);
        ShellDistance d;
        d.shell = shellList[sh];
        d.mean_distance = ci.mean;
        d.se = ci.se;
        d.modes = shell_members[sh].size();
        res.shells.push_back(d);
        means.push_back(ci.mean);
    }
    res.kendall_p = kendall_decreasing_pvalue(means);
    res.monotone = std::is_sorted(means.rbegin(), means.rend());
    return res;
}

std::vector<OuVariancePoint> ou_stationary_variance_check(const SolverConfig& cfg, double horizon,
                                                          double burn_in, std::size_t ensemble,
                                                          const CounterRng& rng) {
    cfg.validate();
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(horizon / cfg.dt));
    const std::size_t skip = static_cast<std::size_t>(std::llround(burn_in / cfg.dt));
    const std::size_t nmodes = cfg.forcing.modes.size();
    // across-trajectory samples of per-trajectory time averages
    std::vector<std::vector<double>> avg(nmodes, std::vector<double>(ensemble, 0.0));

    // forced modes evolve independently: no grid work needed
    for (std::size_t traj = 0; traj < ensemble; ++traj) {
        const CounterRng stream = rng.derive({kTrajTag, traj});
        std::vector<cplx> z(nmodes, cplx(0.0, 0.0));
        std::vector<double> sum(nmodes, 0.0);
        std::size_t count = 0;
        for (std::size_t s = 0; s < nsteps; ++s) {
            for (std::size_t i = 0; i < nmodes; ++i) {
                const auto& m = cfg.forcing.modes[i];
                const double r2 = static_cast<double>(ksq(m.k1, m.k2));
                const double lam = cfg.nu * r2;
                const NormalPair xi = normal_pair(stream, s, i);
                const double fac = ou_variance_factor(lam, cfg.dt);
                const cplx dw =
                    0.5 * std::sqrt(r2) * fac * cplx(m.amp_sin * xi.z1, m.amp_cos * xi.z0);
                z[i] = std::exp(-lam * cfg.dt) * z[i] + dw;
            }
            if (s >= skip) {
                for (std::size_t i = 0; i < nmodes; ++i) sum[i] += std::norm(z[i]);
                ++count;
            }
        }
        for (std::size_t i = 0; i < nmodes; ++i)
            avg[i][traj] = sum[i] / static_cast<double>(count);
    }

    std::vector<OuVariancePoint> out;
    for (std::size_t i = 0; i < nmodes; ++i) {
        OuVariancePoint p;
        p.k1 = cfg.forcing.modes[i].k1;
        p.k2 = cfg.forcing.modes[i].k2;
        p.estimate = mean_ci(avg[i], 3.0);
        p.target = velocity_amp_sq(cfg.forcing.modes[i]) / (2.0 * cfg.nu);
        p.pass = std::abs(p.estimate.mean - p.target) <= 3.0 * p.estimate.se;
        out.push_back(p);
    }
    return out;
}

} // namespace snslab
