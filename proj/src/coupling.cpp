#include "snslab/coupling.hpp"

#include <stdexcept>

#include "snslab/forcing.hpp"

namespace snslab {

SegmentOutcome ToyCouplingModel::run_segment(State& s, const CounterRng& stream,
                                             std::uint64_t step0, LowPath* lpath) const {
    const std::uint64_t spu = steps_per_unit();
    const LyapunovSpec ls = lyapunov();
    if (lpath) {
        lpath->clear();
        lpath->reserve(spu);
    }
    SegmentOutcome out;
    const double v0 = state_v(s);
    double integ = 0.0;
    for (std::uint64_t i = 0; i < spu; ++i) {
        if (lpath) lpath->push_back(s.l);
        integ += (cfg.nu1 * s.h * s.h + cfg.nu2 * s.l * s.l) * cfg.dt;
        const NormalPair z = normal_pair(stream, step0 + i, 0);
        s = step_toy(cfg, s, z.z0, z.z1);
        const double t = static_cast<double>(i + 1) * cfg.dt;
        const double g =
            state_v(s) - v0 + (1.0 - eps_star) * integ - ls.C1 * (1.0 + eps_star) * t;
        out.growth_sup = std::max(out.growth_sup, g);
        out.growth_end = g;
    }
    return out;
}

ToyState ToyCouplingModel::reconstruct(const State& donor_end, const LowPath& lp,
                                       const State& prev_own, const CounterRng& stream,
                                       std::uint64_t step0) const {
    // same stream and step offsets as run_segment, so a copy started from the
    // donor's own previous state reproduces the donor bitwise
    ToyState out;
    out.h = toy_h_flow(cfg, lp, prev_own.h, stream, step0);
    out.l = donor_end.l;
    return out;
}

GalerkinCouplingModel::GalerkinCouplingModel(const SolverConfig& cfg, double nstar,
                                             double eps_star)
    : cfg_(cfg), nstar_(nstar), eps_star_(eps_star) {
    cfg_.validate();
    if (!(nstar > 1.0))
        throw std::invalid_argument("GalerkinCouplingModel: nstar must exceed 1");
    low_modes_ = LowModePath::allocate(cfg_.grid, nstar_, cfg_.dt).modes;
    if (low_modes_.empty())
        throw std::invalid_argument("GalerkinCouplingModel: no observed modes below nstar");
    stepper_ = std::make_shared<SnsStepper>(cfg_);
}

void GalerkinCouplingModel::low_coords(const State& s, double* out) const {
    std::size_t j = 0;
    for (const auto& [k1, k2] : low_modes_) {
        const cplx v = s.at(k1, k2);
        out[j++] = v.real();
        out[j++] = v.imag();
    }
}

std::vector<double> GalerkinCouplingModel::dictionary_coords(const State& s) const {
    std::vector<double> c(low_dim() + 1);
    low_coords(s, c.data());
    c.back() = std::sqrt(energy(s));
    return c;
}

double GalerkinCouplingModel::contracting_distance(const State& a, const State& b) const {
    const double n2 = nstar_ * nstar_;
    double acc = 0.0;
    for_each_mode(a.grid, [&](int k1, int k2) {
        const auto k2sq = static_cast<double>(ksq(k1, k2));
        if (k2sq < n2) return;
        acc += std::norm(a.at(k1, k2) - b.at(k1, k2)) / k2sq;
    });
    return std::sqrt(acc);
}

SegmentOutcome GalerkinCouplingModel::run_segment(State& s, const CounterRng& stream,
                                                  std::uint64_t step0, LowPath* lpath) const {
    const std::uint64_t spu = steps_per_unit();
    const LyapunovSpec ls = lyapunov();
    if (lpath) *lpath = LowModePath::allocate(cfg_.grid, nstar_, cfg_.dt);
    SegmentOutcome out;
    const double v0 = energy(s);
    double integ = 0.0;
    for (std::uint64_t i = 0; i < spu; ++i) {
        if (lpath) lpath->record(s);
        integ += 2.0 * cfg_.nu * enstrophy(s) * cfg_.dt;
        const NoiseIncrement noise = sample_increment(cfg_.forcing, stream, step0 + i, cfg_.dt);
        stepper_->step(s, noise, step0 + i);
        const double t = static_cast<double>(i + 1) * cfg_.dt;
        const double g =
            energy(s) - v0 + (1.0 - eps_star_) * integ - ls.C1 * (1.0 + eps_star_) * t;
        out.growth_sup = std::max(out.growth_sup, g);
        out.growth_end = g;
    }
    return out;
}

GalerkinCouplingModel::State GalerkinCouplingModel::reconstruct(const State& donor_end,
                                                                const LowPath& lp,
                                                                const State& prev_own,
                                                                const CounterRng& stream,
                                                                std::uint64_t step0) const {
    SharedInputs inputs;
    inputs.nstar = nstar_;
    inputs.low = lp;
    inputs.noise_stream = stream;
    inputs.step0 = step0;
    State h = prev_own;
    project_high(h, nstar_);
    State v = high_mode_flow(cfg_, inputs, std::move(h));
    const double n2 = nstar_ * nstar_;
    for_each_mode(v.grid, [&](int k1, int k2) {
        if (static_cast<double>(ksq(k1, k2)) < n2) v.at(k1, k2) = donor_end.at(k1, k2);
    });
    return v;
}

} // namespace snslab
