#include "snslab/toy.hpp"

#include "snslab/girsanov.hpp"
#include "snslab/stats.hpp"

namespace snslab {

ContractionFit toy_contraction_rate(const ToyConfig& c, double h0, double h0_alt, double horizon,
                                    const CounterRng& stream) {
    c.validate();
    const std::size_t n = static_cast<std::size_t>(std::llround(horizon / c.dt));
    ToyState s{h0, 0.0};
    double h_alt = h0_alt;
    std::vector<double> ts, logs;
    ContractionFit fit;
    if (std::abs(h0 - h0_alt) < 1e-300) {
        fit.degenerate = true;
        return fit;
    }
    const double decay = std::exp(-c.nu1 * c.dt);
    const double amp = c.sigma1 * toy_variance_factor(c.nu1, c.dt);
    for (std::size_t i = 0; i < n; ++i) {
        const NormalPair z = normal_pair(stream, i, 0);
        // shared (l, eta): the second copy sees the first copy's environment
        const double h_next = decay * (s.h + c.dt * c.f1(s.l, s.h)) + amp * z.z0;
        const double halt_next = decay * (h_alt + c.dt * c.f1(s.l, h_alt)) + amp * z.z0;
        s.l = std::exp(-c.nu2 * c.dt) * (s.l + c.dt * c.f2(s.l, s.h)) +
              c.sigma2 * toy_variance_factor(c.nu2, c.dt) * z.z1;
        s.h = h_next;
        h_alt = halt_next;
        const double gap = std::abs(s.h - h_alt);
        if (gap < 1e-280) break; // below resolution; stop before log underflow
        ts.push_back(static_cast<double>(i + 1) * c.dt);
        logs.push_back(std::log(gap));
    }
    if (ts.size() < 8) {
        fit.degenerate = true;
        return fit;
    }
    const LineFit lf = fit_line(ts, logs);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.r2 = lf.r2;
    return fit;
}

MemoryFunctional toy_memory_functional(const ToyConfig& c, double truncation_tolerance,
                                       double spread, const CounterRng& stream) {
    c.validate();
    const double gap = c.contraction_gap();
    if (!(gap > 0.0)) throw std::invalid_argument("toy_memory_functional: nu1 <= L1");
    if (!(truncation_tolerance > 0.0) || !(spread > 0.0))
        throw std::invalid_argument("toy_memory_functional: tolerance and spread must be positive");
    // |s| with spread * e^{-gap |s|} < tol
    const double s_abs = std::log(spread / truncation_tolerance) / gap;
    const std::size_t n = static_cast<std::size_t>(std::ceil(std::max(s_abs, c.dt) / c.dt));

    // environment on [-n dt, 0]: l driven independently of h (the functional
    // is evaluated against a fixed low path). Noise counters carry the
    // distance to time zero, so a deeper start extends the same environment
    // backwards instead of resampling it; the low path is warmed up well past
    // its mixing time so its own truncation start is invisible at the window.
    const std::size_t warmup =
        static_cast<std::size_t>(std::ceil(34.0 / (c.nu2 * c.dt)));
    std::vector<double> lpath(n);
    double l = 0.0;
    const CounterRng lstream = stream.derive(tag64("low"));
    const double decay2 = std::exp(-c.nu2 * c.dt);
    const double amp2 = c.sigma2 * toy_variance_factor(c.nu2, c.dt);
    for (std::size_t j = n + warmup; j-- > 0;) {
        if (j < n) lpath[n - 1 - j] = l;
        const double xi = normal_pair(lstream, j, 0).z1;
        l = decay2 * (l + c.dt * c.f2(l, 0.0)) + amp2 * xi;
    }
    MemoryFunctional mf;
    mf.start_time = -static_cast<double>(n) * c.dt;
    mf.tail_bound = spread * std::exp(-gap * static_cast<double>(n) * c.dt);
    const CounterRng etastream = stream.derive(tag64("eta"));
    const double decay1 = std::exp(-c.nu1 * c.dt);
    const double amp1 = c.sigma1 * toy_variance_factor(c.nu1, c.dt);
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = normal_pair(etastream, n - 1 - i, 0).z0;
        h = decay1 * (h + c.dt * c.f1(lpath[i], h)) + amp1 * xi;
    }
    mf.value = h;
    return mf;
}

GirsanovRun girsanov_toy_pairing(const ToyConfig& c, double h0, double h0_alt, double horizon,
                                 std::size_t n_paths, double p, const CounterRng& stream) {
    c.validate();
    const std::size_t n = static_cast<std::size_t>(std::llround(horizon / c.dt));
    const double scale = exponent_step_scale(c);
    std::vector<double> evals(n_paths), moments(n_paths);
    double nov_sup = 0.0;
    const double decay1 = std::exp(-c.nu1 * c.dt);
    const double amp1 = c.sigma1 * toy_variance_factor(c.nu1, c.dt);
    const double decay2 = std::exp(-c.nu2 * c.dt);
    const double amp2 = c.sigma2 * toy_variance_factor(c.nu2, c.dt);
    for (std::size_t path = 0; path < n_paths; ++path) {
        const CounterRng prng = stream.derive(path);
        ToyState s{h0, 0.0};
        double h_alt = h0_alt;
        ExponentAccumulator acc;
        for (std::size_t i = 0; i < n; ++i) {
            const NormalPair z = normal_pair(prng, i, 0);
            const double D = c.f2(s.l, s.h) - c.f2(s.l, h_alt);
            acc.push(scale * D, z.z1);
            const double h_next = decay1 * (s.h + c.dt * c.f1(s.l, s.h)) + amp1 * z.z0;
            const double halt_next = decay1 * (h_alt + c.dt * c.f1(s.l, h_alt)) + amp1 * z.z0;
            s.l = decay2 * (s.l + c.dt * c.f2(s.l, s.h)) + amp2 * z.z1;
            s.h = h_next;
            h_alt = halt_next;
        }
        evals[path] = acc.value();
        moments[path] = std::pow(acc.value(), p);
        nov_sup = std::max(nov_sup, std::exp(acc.novikov));
    }
    GirsanovRun run;
    run.p = p;
    run.exponent_mean = mean_ci(evals, 3.0);
    run.exponent_moment = mean_ci(moments, 3.0);
    run.novikov_sup = nov_sup;
    run.novikov_bound = novikov_bound_pairing(c, std::abs(h0 - h0_alt));
    run.moment_bound = std::pow(run.novikov_bound, p * (p - 1.0));
    return run;
}

} // namespace snslab
