#include "snslab/sync.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snslab {

void SyncConfig::validate() const {
    solver.validate();
    if (!(nstar > 1.0)) throw std::invalid_argument("SyncConfig: nstar must exceed 1");
    if (!(burn_in >= 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("SyncConfig: bad time window");
    if (!(perturbation > 0.0)) throw std::invalid_argument("SyncConfig: perturbation must be positive");
    if (max_points < 8) throw std::invalid_argument("SyncConfig: max_points too small");
}

namespace {

SpectralField smooth_sample(const WaveGrid& g, const CounterRng& rng, double p, double width) {
    return random_field(g, rng, [p, width](double r) {
        return std::pow(1.0 + r, -p) * std::exp(-0.5 * r * r / (width * width));
    });
}

} // namespace

SyncResult run_sync(const SyncConfig& cfg, double c_hat, const CounterRng& rng) {
    cfg.validate();
    const double dt = cfg.solver.dt, nu = cfg.solver.nu;
    const auto nburn = static_cast<std::size_t>(std::llround(cfg.burn_in / dt));
    const auto nsteps = static_cast<std::size_t>(std::llround(cfg.horizon / dt));
    if (nsteps == 0) throw std::invalid_argument("run_sync: horizon shorter than dt");
    const std::size_t stride = std::max<std::size_t>(1, (nsteps + cfg.max_points - 1) / cfg.max_points);

    SnsStepper stepper(cfg.solver);
    const CounterRng noise_stream = rng.derive(tag64("noise"));

    SpectralField w = smooth_sample(cfg.solver.grid, rng.derive(tag64("init")), 2.0,
                                    cfg.solver.grid.kmax() / 2.0);
    for (std::size_t s = 0; s < nburn; ++s)
        stepper.step(w, sample_increment(cfg.solver.forcing, noise_stream, s, dt), s);

    // pass A: reference run through the window, recording shared inputs,
    // stride snapshots of the full state, and the dissipation integral
    SharedInputs inputs;
    inputs.nstar = cfg.nstar;
    inputs.low = LowModePath::allocate(cfg.solver.grid, cfg.nstar, dt);
    inputs.noise_stream = noise_stream;
    inputs.step0 = nburn;

    std::vector<SpectralField> snaps;
    std::vector<std::size_t> snap_steps;
    std::vector<double> snap_grad;
    snaps.reserve(nsteps / stride + 2);

    const SpectralField w0 = w;
    double grad = 0.0;
    for (std::size_t s = 0; s < nsteps; ++s) {
        inputs.low.record(w);
        grad += enstrophy(w) * dt;
        stepper.step(w, sample_increment(cfg.solver.forcing, noise_stream, nburn + s, dt), nburn + s);
        if ((s + 1) % stride == 0 || s + 1 == nsteps) {
            snaps.push_back(w);
            project_high(snaps.back(), cfg.nstar);
            snap_steps.push_back(s + 1);
            snap_grad.push_back(grad);
        }
    }

    // perturbed high start: P_h w0 plus a high-mode bump of prescribed norm
    SpectralField h0 = w0;
    project_high(h0, cfg.nstar);
    SpectralField bump = smooth_sample(cfg.solver.grid, rng.derive(tag64("bump")), 1.5,
                                       cfg.solver.grid.kmax() / 2.0);
    project_high(bump, cfg.nstar);
    const double bump_norm = std::sqrt(energy(bump));
    if (!(bump_norm > 0.0)) throw std::runtime_error("run_sync: empty high-mode band");
    for (auto& v : bump.a) v *= cfg.perturbation / bump_norm;
    for (std::size_t i = 0; i < h0.a.size(); ++i) h0.a[i] += bump.a[i];

    SyncResult res;
    res.inputs_checksum = inputs.checksum();
    res.times.push_back(0.0);
    res.dist_energy.push_back(cfg.perturbation);
    res.dist_enstrophy.push_back(std::sqrt(enstrophy(bump)));
    res.grad_integral.push_back(0.0);

    // pass B: slaved high-mode solve against the recorded inputs
    std::size_t next = 0;
    high_mode_flow(cfg.solver, inputs, h0, [&](std::size_t i, const SpectralField& h) {
        if (next < snap_steps.size() && i == snap_steps[next]) {
            res.times.push_back(static_cast<double>(i) * dt);
            res.dist_energy.push_back(energy_distance(h, snaps[next]));
            res.dist_enstrophy.push_back(enstrophy_distance(h, snaps[next]));
            res.grad_integral.push_back(snap_grad[next]);
            ++next;
        }
    });

    res.grad_sq_mean = grad / (static_cast<double>(nsteps) * dt);
    res.ratio_end = res.dist_energy.back() / cfg.perturbation;

    // fit before the round-off floor flattens the curve
    const double floor = 1e-12 * cfg.perturbation;
    std::vector<double> ft, fy;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        if (res.dist_energy[i] <= floor) break;
        ft.push_back(res.times[i]);
        fy.push_back(std::log(res.dist_energy[i]));
    }
    if (ft.size() >= 3) res.logfit = fit_line(ft, fy);

    double margin = -1e300;
    for (std::size_t i = 1; i < res.times.size(); ++i) {
        if (res.dist_energy[i] <= 0.0) continue;
        const double lhs = 2.0 * std::log(res.dist_energy[i] / cfg.perturbation);
        const double rhs = -nu * cfg.nstar * cfg.nstar * res.times[i] +
                           (c_hat / nu) * res.grad_integral[i];
        margin = std::max(margin, lhs - rhs);
    }
    res.bound_margin = margin;
    return res;
}

NonlinearityConstant estimate_nonlinearity_constant(const WaveGrid& grid, double nstar,
                                                    std::size_t samples, const CounterRng& rng) {
    if (samples == 0) throw std::invalid_argument("estimate_nonlinearity_constant: no samples");
    NonlinearityConstant out;
    out.samples = samples;
    NonlinearWorkspace ws(grid);
    SpectralField sum(grid), n_sum(grid), n_u(grid);
    const double decays[3] = {1.5, 2.0, 3.0};
    const double widths[3] = {grid.kmax() / 4.0, grid.kmax() / 2.0, static_cast<double>(grid.kmax())};

    for (int b = 0; b < 2; ++b) {
        double best = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            const CounterRng s = rng.derive({tag64("chat"), static_cast<std::uint64_t>(b), i});
            SpectralField u = smooth_sample(grid, s.derive(1), decays[i % 3], widths[(i / 3) % 3]);
            SpectralField rho = smooth_sample(grid, s.derive(2), decays[(i + 1) % 3], widths[(i / 2) % 3]);
            project_high(rho, nstar);
            const double den2 = enstrophy(rho) * enstrophy(u) * energy(rho);
            if (!(den2 > 1e-280)) continue;
            sum = u;
            for (std::size_t j = 0; j < sum.a.size(); ++j) sum.a[j] += rho.a[j];
            ws.eval(sum, n_sum);
            ws.eval(u, n_u);
            for (std::size_t j = 0; j < n_sum.a.size(); ++j) n_sum.a[j] -= n_u.a[j];
            const double pairing = energy_pairing(n_sum, rho);
            best = std::max(best, 2.0 * pairing * pairing / den2);
        }
        (b == 0 ? out.batch_a : out.batch_b) = best;
    }
    out.c_hat = std::max(out.batch_a, out.batch_b);
    const double lo = std::min(out.batch_a, out.batch_b);
    out.stable = lo > 0.0 && out.c_hat <= 2.0 * lo;
    return out;
}

LargeNuResult large_nu_contraction(const SolverConfig& cfg, double c_hat, double horizon,
                                   int pullback_depth, const CounterRng& rng) {
    cfg.validate();
    if (pullback_depth < 3) throw std::invalid_argument("large_nu_contraction: depth too small");
    const double dt = cfg.dt;
    const auto spu = static_cast<std::size_t>(std::llround(1.0 / dt));
    if (spu == 0) throw std::invalid_argument("large_nu_contraction: dt exceeds one time unit");

    LargeNuResult res;
    res.criterion = c_hat * cfg.forcing.energy_rate() / (cfg.nu * cfg.nu * cfg.nu);

    // paired solutions, shared noise, distinct starts
    {
        SnsStepper stepper(cfg);
        const CounterRng noise = rng.derive(tag64("pairnoise"));
        SpectralField wa = smooth_sample(cfg.grid, rng.derive(tag64("initA")), 2.0, cfg.grid.kmax() / 2.0);
        SpectralField wb = smooth_sample(cfg.grid, rng.derive(tag64("initB")), 2.5, cfg.grid.kmax() / 3.0);
        const auto nsteps = static_cast<std::size_t>(std::llround(horizon / dt));
        res.paired_curve.push_back(energy_distance(wa, wb));
        for (std::size_t s = 0; s < nsteps; ++s) {
            const NoiseIncrement inc = sample_increment(cfg.forcing, noise, s, dt);
            stepper.step(wa, inc, s);
            stepper.step(wb, inc, s);
            if ((s + 1) % spu == 0) res.paired_curve.push_back(energy_distance(wa, wb));
        }
        res.paired_distance_end = energy_distance(wa, wb);
    }

    // pullback: run n starts from rest at absolute step (depth - n) spu; all
    // runs read noise by absolute step index, so they share one realization
    {
        SnsStepper stepper(cfg);
        const CounterRng noise = rng.derive(tag64("pullback"));
        const auto depth = static_cast<std::size_t>(pullback_depth);
        const std::size_t total = depth * spu;
        const std::size_t window = (depth - 1) * spu;
        std::vector<SpectralField> prev, curr;
        for (std::size_t n = 1; n <= depth; ++n) {
            SpectralField w(cfg.grid);
            curr.clear();
            for (std::size_t s = (depth - n) * spu; s < total; ++s) {
                if (s >= window) curr.push_back(w);
                stepper.step(w, sample_increment(cfg.forcing, noise, s, dt), s);
            }
            curr.push_back(w);
            if (n > 1) {
                double sup = 0.0;
                for (std::size_t j = 0; j < curr.size(); ++j)
                    sup = std::max(sup, energy_distance(curr[j], prev[j]));
                res.pullback_sup.push_back(sup);
            }
            prev.swap(curr);
        }
    }

    const double floor = 1e-12;
    std::vector<double> fx, fy;
    bool decreasing = true;
    for (std::size_t i = 0; i < res.pullback_sup.size(); ++i) {
        if (i > 0 && res.pullback_sup[i - 1] > floor &&
            res.pullback_sup[i] >= res.pullback_sup[i - 1])
            decreasing = false;
        if (res.pullback_sup[i] > floor) {
            fx.push_back(static_cast<double>(i + 1));
            fy.push_back(std::log(res.pullback_sup[i]));
        }
    }
    if (fx.size() >= 3) res.pullback_fit = fit_line(fx, fy);
    res.pullback_cauchy = decreasing && res.pullback_sup.size() >= 2 &&
                          res.pullback_sup.back() < 1e-6;
    return res;
}

} // namespace snslab
