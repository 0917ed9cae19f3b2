#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <vector>

#include "snslab/dynamics.hpp"
#include "snslab/empirical_measure.hpp"
#include "snslab/lyapunov.hpp"
#include "snslab/stats.hpp"
#include "snslab/toy.hpp"

namespace snslab {

// One unit time segment of a model run. growth_sup / growth_end are the sup
// and final value of the local statistic
//   V(t) - V(t0) + (1 - eps*) int_{t0}^t U - C1 (1 + eps*)(t - t0),
// left-Riemann in the integral; chaining segments adds growth_end offsets, so
// multi-segment membership checks compose from per-segment outcomes.
struct SegmentOutcome {
    double growth_sup = 0.0;
    double growth_end = 0.0;
};

// A coupling model exposes unit segments, a pinned reconstruction (observed
// coordinates copied from a donor, contracting coordinates re-solved against
// the donor's observed path with the shared noise stream), and the Lyapunov
// structure used by the chain. Replica i uses one stream for both copies, so
// nearby states produce nearby endpoints.
struct ToyCouplingModel {
    ToyConfig cfg;
    double eps_star = 0.5;

    using State = ToyState;
    using LowPath = std::vector<double>; // l at step starts over one segment

    std::uint64_t steps_per_unit() const {
        return static_cast<std::uint64_t>(std::llround(1.0 / cfg.dt));
    }
    LyapunovSpec lyapunov() const { return toy_lyapunov(cfg, eps_star); }
    double state_v(const State& s) const { return s.h * s.h + s.l * s.l; }
    std::size_t low_dim() const { return 1; }
    void low_coords(const State& s, double* out) const { out[0] = s.l; }
    std::vector<double> dictionary_coords(const State& s) const { return {s.h, s.l}; }
    double contracting_distance(const State& a, const State& b) const { return std::abs(a.h - b.h); }

    SegmentOutcome run_segment(State& s, const CounterRng& stream, std::uint64_t step0,
                               LowPath* lpath) const;
    State reconstruct(const State& donor_end, const LowPath& lp, const State& prev_own,
                      const CounterRng& stream, std::uint64_t step0) const;
};

// Galerkin counterpart: observed coordinates are the modes with |k| < nstar,
// the contracting part is everything above, re-solved by the pinned
// high-mode flow. The spectral stepper is shared across segments so
// transform plans are built once.
class GalerkinCouplingModel {
  public:
    using State = SpectralField;
    using LowPath = LowModePath;

    GalerkinCouplingModel(const SolverConfig& cfg, double nstar, double eps_star = 0.5);

    const SolverConfig& config() const { return cfg_; }
    double nstar() const { return nstar_; }
    std::uint64_t steps_per_unit() const {
        return static_cast<std::uint64_t>(std::llround(1.0 / cfg_.dt));
    }
    LyapunovSpec lyapunov() const { return sns_lyapunov(cfg_, eps_star_); }
    double state_v(const State& s) const { return energy(s); }
    std::size_t low_dim() const { return 2 * low_modes_.size(); }
    void low_coords(const State& s, double* out) const;
    std::vector<double> dictionary_coords(const State& s) const;
    double contracting_distance(const State& a, const State& b) const;
    State initial_state() const { return SpectralField(cfg_.grid); }

    SegmentOutcome run_segment(State& s, const CounterRng& stream, std::uint64_t step0,
                               LowPath* lpath) const;
    State reconstruct(const State& donor_end, const LowPath& lp, const State& prev_own,
                      const CounterRng& stream, std::uint64_t step0) const;

  private:
    SolverConfig cfg_;
    double nstar_;
    double eps_star_;
    std::vector<std::pair<int, int>> low_modes_;
    std::shared_ptr<SnsStepper> stepper_;
};

struct ChainConfig {
    std::size_t replicas = 128;    // m per side per attempt
    double bin_width = 0.1;        // per observed coordinate
    double inside_radius = 0.0;    // 0: 4 C1 / C2 from the model's Lyapunov structure
    double growth_cap = 0.0;       // 0: calibrated from sample segments
    std::size_t max_units = 64;    // total time budget
    double post_horizon = 0.0;     // stop this many units after coupling (0: run out the budget)
    std::size_t calibration_samples = 64;
    double cap_quantile = 0.995;
};

struct ChainStep {
    std::uint64_t step = 0;
    std::size_t segment_len = 1; // excursions consume several units in one step
    bool inside = false;
    double rho_hat = 0.0;        // meet mass of the attempt (0 when none)
    bool coupled = false;
    double t_end = 0.0;
    double v_pair = 0.0;
};

struct ChainResult {
    std::vector<ChainStep> steps;
    bool coupled = false;
    double coupling_time = std::numeric_limits<double>::infinity();
    std::vector<double> post_distance; // contracting distance at unit ends once coupled
    std::vector<std::vector<double>> unit_coords_u; // dictionary coords at t = 1, 2, ...
    std::vector<std::vector<double>> unit_coords_v;
    double growth_cap_used = 0.0;
    double inside_radius_used = 0.0;
};

struct RhoHatCurve {
    std::vector<double> rho; // mean over repetitions, n = 1..nmax
    std::vector<double> se;
    std::size_t repetitions = 0;
    bool monotone_within_ci = false; // rho[n+1] <= rho[n] + 2 (se[n] + se[n+1])
};

struct CouplingTimeTail {
    std::vector<double> survival; // P{coupling time > n}, n = 0, 1, ...
    LineFit logfit;
    double coupled_fraction = 0.0;
};

struct MixingCurve {
    std::vector<double> times;
    std::vector<double> distance; // sup over the dictionary of mean gaps
    std::vector<double> floor;    // same-start split ensembles, same statistic
};

struct MarginalCheck {
    std::vector<KsResult> tests; // u-side coords then v-side coords
    double alpha = 0.05;
    bool pass = false; // every p above alpha / tests
};

namespace coupling_detail {
inline constexpr std::uint64_t kSegTag = 0x7365676D656E7400ULL;
inline constexpr std::uint64_t kRepTag = 0x7265706C69636100ULL;
inline constexpr std::uint64_t kExcTag = 0x657863757273696FULL;
inline constexpr std::uint64_t kCoinTag = 0x636F696E00000000ULL;
inline constexpr std::uint64_t kCalTag = 0x63616C6962726174ULL;
inline constexpr std::uint64_t kRhoTag = 0x72686F6861740000ULL;
inline constexpr std::uint64_t kChainTag = 0x636861696E000000ULL;
inline constexpr std::uint64_t kDirTag = 0x6469726563740000ULL;

template <typename Model>
double calibrate_growth_cap(const Model& model, typename Model::State probe,
                            const ChainConfig& cfg, const CounterRng& rng) {
    std::vector<double> sups;
    sups.reserve(cfg.calibration_samples);
    for (std::size_t j = 0; j < cfg.calibration_samples; ++j) {
        const SegmentOutcome o = model.run_segment(probe, rng.derive({kCalTag, j}), 0, nullptr);
        sups.push_back(o.growth_sup);
    }
    std::sort(sups.begin(), sups.end());
    const double q = quantile_sorted(sups, cfg.cap_quantile);
    return q + 0.1 * std::abs(q) + 1e-6;
}
} // namespace coupling_detail

// Chain of unit steps for a pair of copies. Inside the Lyapunov ball a meet
// coupling over m common-noise replicas is attempted; the selected replica is
// uniform over {1..m} on each side by construction, so each side's endpoint
// keeps the exact one-segment law (growth-cap rejections included: they are
// routed to the residual with acceptance one). Outside the ball both copies
// take independent unit steps until they return, which counts as a single
// chain step of that length. After a successful meet the observed coordinates
// stay pinned to the first copy and the contracting part is re-solved with
// the shared stream each unit.
template <typename Model>
ChainResult run_coupling_chain(const Model& model, typename Model::State u,
                               typename Model::State v, const ChainConfig& cfg,
                               const CounterRng& rng) {
    using namespace coupling_detail;
    using State = typename Model::State;
    using LowPath = typename Model::LowPath;

    const LyapunovSpec ls = model.lyapunov();
    const double radius = cfg.inside_radius > 0.0 ? cfg.inside_radius : 4.0 * ls.C1 / ls.C2;
    const double cap = cfg.growth_cap > 0.0
                           ? cfg.growth_cap
                           : calibrate_growth_cap(model, u, cfg, rng.derive(kCalTag));
    const std::size_t m = cfg.replicas;

    ChainResult res;
    res.growth_cap_used = cap;
    res.inside_radius_used = radius;

    std::vector<State> ue(m, u), ve(m, v);
    std::vector<LowPath> ulp(m);
    std::vector<SegmentOutcome> uo(m), vo(m);
    std::vector<char> ugood(m), vgood(m);
    std::vector<EmpiricalMeasure::Cell> ucell(m), vcell(m);
    std::vector<double> coords(model.low_dim());

    bool coupled = false;
    std::uint64_t unit = 0, chain_step = 0;
    std::size_t post_units = 0;

    auto push_coords = [&]() {
        res.unit_coords_u.push_back(model.dictionary_coords(u));
        res.unit_coords_v.push_back(model.dictionary_coords(v));
    };

    while (unit < cfg.max_units) {
        ChainStep rec;
        rec.step = chain_step;

        if (coupled) {
            const CounterRng stream = rng.derive({kSegTag, unit, kRepTag, 0});
            LowPath lp;
            State uu = u;
            model.run_segment(uu, stream, 0, &lp);
            State vv = model.reconstruct(uu, lp, v, stream, 0);
            u = std::move(uu);
            v = std::move(vv);
            ++unit;
            ++post_units;
            push_coords();
            res.post_distance.push_back(model.contracting_distance(u, v));
            rec.segment_len = 1;
            rec.inside = true;
        } else if (model.state_v(u) + model.state_v(v) > radius) {
            std::size_t len = 0;
            while (unit < cfg.max_units) {
                model.run_segment(u, rng.derive({kExcTag, unit, 1}), 0, nullptr);
                model.run_segment(v, rng.derive({kExcTag, unit, 2}), 0, nullptr);
                ++unit;
                ++len;
                push_coords();
                if (model.state_v(u) + model.state_v(v) <= radius) break;
            }
            rec.segment_len = len;
            rec.inside = false;
        } else {
            const CounterRng base = rng.derive({kSegTag, unit});
            for (std::size_t i = 0; i < m; ++i) {
                const CounterRng si = base.derive({kRepTag, i});
                ue[i] = u;
                ve[i] = v;
                uo[i] = model.run_segment(ue[i], si, 0, &ulp[i]);
                vo[i] = model.run_segment(ve[i], si, 0, nullptr);
            }
            EmpiricalMeasure p(cfg.bin_width), q(cfg.bin_width);
            std::map<EmpiricalMeasure::Cell, std::vector<std::size_t>> ubins;
            const double wgt = 1.0 / static_cast<double>(m);
            for (std::size_t i = 0; i < m; ++i) {
                ugood[i] = uo[i].growth_sup <= cap;
                vgood[i] = vo[i].growth_sup <= cap;
                model.low_coords(ue[i], coords.data());
                ucell[i] = p.locate(coords);
                model.low_coords(ve[i], coords.data());
                vcell[i] = q.locate(coords);
                if (ugood[i]) {
                    p.add_cell(ucell[i], wgt);
                    ubins[ucell[i]].push_back(i);
                }
                if (vgood[i]) q.add_cell(vcell[i], wgt);
            }
            const EmpiricalMeasure mt = meet(p, q);
            const double rho = mt.mass();
            rec.rho_hat = rho;

            const CounterRng coin = rng.derive({kCoinTag, unit});
            if (uniform01(coin, 0, 0) < rho) {
                double target = uniform01(coin, 0, 1) * rho, acc = 0.0;
                const EmpiricalMeasure::Cell* chosen = &mt.atoms.begin()->first;
                for (const auto& [c, w] : mt.atoms) {
                    acc += w;
                    chosen = &c;
                    if (target < acc) break;
                }
                const auto& cand = ubins.at(*chosen);
                auto pick = static_cast<std::size_t>(uniform01(coin, 0, 2) * cand.size());
                if (pick >= cand.size()) pick = cand.size() - 1;
                const std::size_t won = cand[pick];
                const CounterRng sw = base.derive({kRepTag, won});
                State vv = model.reconstruct(ue[won], ulp[won], v, sw, 0);
                u = ue[won];
                v = std::move(vv);
                coupled = true;
                res.coupling_time = static_cast<double>(unit + 1);
            } else {
                auto residual_pick = [&](const EmpiricalMeasure& hist, const std::vector<char>& good,
                                         const std::vector<EmpiricalMeasure::Cell>& cell,
                                         std::uint64_t side) {
                    for (std::uint64_t it = 0; it < 64 * m; ++it) {
                        auto i = static_cast<std::size_t>(uniform01(coin, side, 2 * it) * m);
                        if (i >= m) i = m - 1;
                        if (!good[i]) return i;
                        const double pb = hist.mass_at(cell[i]);
                        const double reject = pb > 0.0 ? mt.mass_at(cell[i]) / pb : 0.0;
                        if (uniform01(coin, side, 2 * it + 1) >= reject) return i;
                    }
                    auto i = static_cast<std::size_t>(uniform01(coin, side, 128 * m) * m);
                    return i >= m ? m - 1 : i;
                };
                u = ue[residual_pick(p, ugood, ucell, 1)];
                v = ve[residual_pick(q, vgood, vcell, 2)];
            }
            ++unit;
            push_coords();
            rec.segment_len = 1;
            rec.inside = true;
        }

        rec.coupled = coupled;
        rec.t_end = static_cast<double>(unit);
        rec.v_pair = model.state_v(u) + model.state_v(v);
        res.steps.push_back(rec);
        ++chain_step;
        if (coupled && cfg.post_horizon > 0.0 &&
            static_cast<double>(post_units) >= cfg.post_horizon)
            break;
    }
    res.coupled = coupled;
    return res;
}

// Meet mass of the n-segment endpoint laws, n = 1..nmax: joint histograms of
// the observed coordinates at segment ends over common-noise replica pairs,
// with the cumulative growth statistic screened at the cap per side. Binned
// laws over n+1 segments refine those over n, and screening only removes
// mass, so the true sequence is nonincreasing; the estimate is checked up to
// twice its standard error.
template <typename Model>
RhoHatCurve rho_hat_curve(const Model& model, const typename Model::State& u0,
                          const typename Model::State& v0, std::size_t nmax,
                          std::size_t replicas, double bin_width, double growth_cap,
                          std::size_t repetitions, const CounterRng& rng) {
    using namespace coupling_detail;
    const auto spu = model.steps_per_unit();
    const std::size_t d = model.low_dim();
    std::vector<std::vector<double>> samples(nmax); // per n, one estimate per repetition

    std::vector<double> coords(d);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const CounterRng base = rng.derive({kRhoTag, r});
        std::vector<typename Model::State> us(replicas, u0), vs(replicas, v0);
        std::vector<double> usup(replicas, 0.0), ubase(replicas, 0.0);
        std::vector<double> vsup(replicas, 0.0), vbase(replicas, 0.0);
        std::vector<std::vector<double>> ux(replicas), vx(replicas);
        for (std::size_t n = 1; n <= nmax; ++n) {
            EmpiricalMeasure p(bin_width), q(bin_width);
            const double wgt = 1.0 / static_cast<double>(replicas);
            for (std::size_t i = 0; i < replicas; ++i) {
                const CounterRng si = base.derive({kRepTag, i});
                const SegmentOutcome ou = model.run_segment(us[i], si, (n - 1) * spu, nullptr);
                usup[i] = std::max(usup[i], ubase[i] + ou.growth_sup);
                ubase[i] += ou.growth_end;
                const SegmentOutcome ov = model.run_segment(vs[i], si, (n - 1) * spu, nullptr);
                vsup[i] = std::max(vsup[i], vbase[i] + ov.growth_sup);
                vbase[i] += ov.growth_end;
                model.low_coords(us[i], coords.data());
                ux[i].insert(ux[i].end(), coords.begin(), coords.end());
                model.low_coords(vs[i], coords.data());
                vx[i].insert(vx[i].end(), coords.begin(), coords.end());
                if (usup[i] <= growth_cap) p.add(ux[i], wgt);
                if (vsup[i] <= growth_cap) q.add(vx[i], wgt);
            }
            samples[n - 1].push_back(meet(p, q).mass());
        }
    }

    RhoHatCurve out;
    out.repetitions = repetitions;
    for (std::size_t n = 0; n < nmax; ++n) {
        const MeanCi ci = mean_ci(samples[n], 1.0);
        out.rho.push_back(ci.mean);
        out.se.push_back(ci.se);
    }
    out.monotone_within_ci = true;
    for (std::size_t n = 0; n + 1 < nmax; ++n)
        if (out.rho[n + 1] > out.rho[n] + 2.0 * (out.se[n] + out.se[n + 1]))
            out.monotone_within_ci = false;
    return out;
}

template <typename Model>
CouplingTimeTail coupling_time_tail(const Model& model, const typename Model::State& u0,
                                    const typename Model::State& v0, const ChainConfig& cfg,
                                    std::size_t runs, const CounterRng& rng) {
    using namespace coupling_detail;
    std::vector<double> times;
    times.reserve(runs);
    std::size_t coupled = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        ChainConfig one = cfg;
        one.post_horizon = 1.0; // stop right after success
        const ChainResult res = run_coupling_chain(model, u0, v0, one, rng.derive({kChainTag, r}));
        times.push_back(res.coupled ? res.coupling_time
                                    : std::numeric_limits<double>::infinity());
        if (res.coupled) ++coupled;
    }
    CouplingTimeTail out;
    out.coupled_fraction = static_cast<double>(coupled) / static_cast<double>(runs);
    std::vector<double> fx, fy;
    for (std::size_t n = 0; n <= cfg.max_units; ++n) {
        std::size_t alive = 0;
        for (const double t : times)
            if (t > static_cast<double>(n)) ++alive;
        const double s = static_cast<double>(alive) / static_cast<double>(runs);
        out.survival.push_back(s);
        if (s * static_cast<double>(runs) >= 5.0) {
            fx.push_back(static_cast<double>(n));
            fy.push_back(std::log(s));
        } else {
            break;
        }
    }
    if (fx.size() >= 3) out.logfit = fit_line(fx, fy);
    return out;
}

// sup over a dictionary of bounded Lipschitz observables tanh(<w, x> + b) of
// the gap between ensemble means, with a same-start split as the noise floor.
template <typename Model>
MixingCurve mixing_distance_curve(const Model& model, const typename Model::State& a0,
                                  const typename Model::State& b0, std::size_t units,
                                  std::size_t ensemble, std::size_t dict_size,
                                  const CounterRng& rng) {
    using namespace coupling_detail;
    const std::size_t d = model.dictionary_coords(a0).size();
    const CounterRng dict = rng.derive(tag64("dict"));
    std::vector<std::vector<double>> w(dict_size, std::vector<double>(d));
    std::vector<double> bias(dict_size);
    for (std::size_t j = 0; j < dict_size; ++j) {
        double norm2 = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            w[j][c] = standard_normal(dict, j, c);
            norm2 += w[j][c] * w[j][c];
        }
        const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
        for (std::size_t c = 0; c < d; ++c) w[j][c] *= inv;
        bias[j] = 2.0 * uniform01(dict, j, d) - 1.0;
    }

    // mean of each observable per ensemble per unit time
    auto run_group = [&](const typename Model::State& x0, std::uint64_t tag) {
        std::vector<std::vector<double>> acc(units, std::vector<double>(dict_size, 0.0));
        for (std::size_t i = 0; i < ensemble; ++i) {
            typename Model::State x = x0;
            const CounterRng s = rng.derive({tag, i});
            for (std::size_t t = 0; t < units; ++t) {
                model.run_segment(x, s, t * model.steps_per_unit(), nullptr);
                const std::vector<double> c = model.dictionary_coords(x);
                for (std::size_t j = 0; j < dict_size; ++j) {
                    double dot = bias[j];
                    for (std::size_t k = 0; k < d; ++k) dot += w[j][k] * c[k];
                    acc[t][j] += std::tanh(dot);
                }
            }
        }
        for (auto& row : acc)
            for (double& x : row) x /= static_cast<double>(ensemble);
        return acc;
    };

    const auto ma = run_group(a0, 1);
    const auto mb = run_group(b0, 2);
    const auto mc = run_group(a0, 3); // independent copy for the floor

    MixingCurve out;
    for (std::size_t t = 0; t < units; ++t) {
        double gap = 0.0, fl = 0.0;
        for (std::size_t j = 0; j < dict_size; ++j) {
            gap = std::max(gap, std::abs(ma[t][j] - mb[t][j]));
            fl = std::max(fl, std::abs(ma[t][j] - mc[t][j]));
        }
        out.times.push_back(static_cast<double>(t + 1));
        out.distance.push_back(gap);
        out.floor.push_back(fl);
    }
    return out;
}

// Both sides of the chain against direct simulation at a fixed integer time;
// two-sample tests per observable coordinate with a Bonferroni threshold.
template <typename Model>
MarginalCheck chain_marginal_check(const Model& model, const typename Model::State& u0,
                                   const typename Model::State& v0, const ChainConfig& cfg,
                                   std::size_t check_time, std::size_t runs,
                                   const CounterRng& rng) {
    using namespace coupling_detail;
    const std::size_t d = model.dictionary_coords(u0).size();
    std::vector<std::vector<double>> cu(d), cv(d), du(d), dv(d);
    ChainConfig run_cfg = cfg;
    run_cfg.max_units = std::max(cfg.max_units, check_time);
    run_cfg.post_horizon = 0.0;

    for (std::size_t r = 0; r < runs; ++r) {
        const ChainResult res =
            run_coupling_chain(model, u0, v0, run_cfg, rng.derive({kChainTag, r}));
        const auto& xu = res.unit_coords_u.at(check_time - 1);
        const auto& xv = res.unit_coords_v.at(check_time - 1);
        for (std::size_t c = 0; c < d; ++c) {
            cu[c].push_back(xu[c]);
            cv[c].push_back(xv[c]);
        }
    }
    auto direct = [&](const typename Model::State& x0, std::uint64_t side,
                      std::vector<std::vector<double>>& sink) {
        for (std::size_t r = 0; r < runs; ++r) {
            typename Model::State x = x0;
            const CounterRng s = rng.derive({kDirTag, side, r});
            for (std::size_t t = 0; t < check_time; ++t)
                model.run_segment(x, s, t * model.steps_per_unit(), nullptr);
            const std::vector<double> c = model.dictionary_coords(x);
            for (std::size_t k = 0; k < d; ++k) sink[k].push_back(c[k]);
        }
    };
    direct(u0, 1, du);
    direct(v0, 2, dv);

    MarginalCheck out;
    for (std::size_t c = 0; c < d; ++c) out.tests.push_back(ks_two_sample(cu[c], du[c]));
    for (std::size_t c = 0; c < d; ++c) out.tests.push_back(ks_two_sample(cv[c], dv[c]));
    const double threshold = out.alpha / static_cast<double>(out.tests.size());
    out.pass = true;
    for (const KsResult& t : out.tests)
        if (t.p <= threshold) out.pass = false;
    return out;
}

} // namespace snslab
