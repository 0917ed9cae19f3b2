#include "snslab/dynamics.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace snslab {

void SnsStepper::check_blowup(const SpectralField& w, std::uint64_t step_index) const {
    const double z = enstrophy(w);
    if (!std::isfinite(z) || z > cfg_.blowup_threshold) throw SimulationBlowup(step_index, z);
}

void SnsStepper::step(SpectralField& w, const NoiseIncrement& noise, std::uint64_t step_index) {
    ws_.eval(w, nbuf_);
    const double dt = cfg_.dt, nu = cfg_.nu;
    for_each_mode(w.grid, [&](int k1, int k2) {
        const double lam = nu * static_cast<double>(ksq(k1, k2));
        w.at(k1, k2) = std::exp(-lam * dt) * (w.at(k1, k2) + dt * nbuf_.at(k1, k2));
    });
    add_noise(w, cfg_.forcing, noise, [&](int k1, int k2) {
        return ou_variance_factor(nu * static_cast<double>(ksq(k1, k2)), dt);
    });
    check_blowup(w, step_index);
}

void SnsStepper::step_ou(SpectralField& z, const NoiseIncrement& noise) {
    const double dt = cfg_.dt, nu = cfg_.nu;
    for_each_mode(z.grid, [&](int k1, int k2) {
        const double lam = nu * static_cast<double>(ksq(k1, k2));
        z.at(k1, k2) *= std::exp(-lam * dt);
    });
    add_noise(z, cfg_.forcing, noise, [&](int k1, int k2) {
        return ou_variance_factor(nu * static_cast<double>(ksq(k1, k2)), dt);
    });
}

void SnsStepper::step_galerkin(SpectralField& w, const NoiseIncrement& noise, double ncut,
                               std::uint64_t step_index) {
    project_low(w, ncut);
    step(w, noise, step_index);
    project_low(w, ncut);
}

LowModePath LowModePath::allocate(const WaveGrid& g, double nstar, double dt) {
    LowModePath p;
    p.nstar = nstar;
    p.dt = dt;
    const int K = g.kmax();
    for (int k2 = 0; k2 <= K; ++k2)
        for (int k1 = -K; k1 <= K; ++k1) {
            if (k2 == 0 && k1 <= 0) continue;
            if (static_cast<double>(ksq(k1, k2)) >= nstar * nstar) continue;
            p.modes.push_back({k1, k2});
        }
    return p;
}

void LowModePath::record(const SpectralField& w) {
    std::vector<cplx> row(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) row[i] = w.at(modes[i].first, modes[i].second);
    values.push_back(std::move(row));
}

void LowModePath::load_into(SpectralField& w, std::size_t step) const {
    const auto& row = values.at(step);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        w.at(modes[i].first, modes[i].second) = row[i];
        w.at(-modes[i].first, -modes[i].second) = std::conj(row[i]);
    }
}

std::uint64_t LowModePath::checksum() const {
    std::uint64_t h = splitmix64(0x5CAB1EDFACADE001ULL ^ static_cast<std::uint64_t>(values.size()));
    auto mix_double = [&h](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = splitmix64(h ^ bits);
    };
    mix_double(nstar);
    mix_double(dt);
    for (const auto& row : values)
        for (const cplx& v : row) {
            mix_double(v.real());
            mix_double(v.imag());
        }
    return h;
}

std::uint64_t SharedInputs::checksum() const {
    std::uint64_t h = low.checksum();
    h = splitmix64(h ^ noise_stream.key);
    h = splitmix64(h ^ step0);
    std::uint64_t nb;
    std::memcpy(&nb, &nstar, sizeof(nb));
    return splitmix64(h ^ nb);
}

SpectralField high_mode_flow(const SolverConfig& cfg, const SharedInputs& inputs, SpectralField h0,
                             const std::function<void(std::size_t, const SpectralField&)>& on_step) {
    cfg.validate();
    if (inputs.low.dt != cfg.dt)
        throw std::invalid_argument("high_mode_flow: low-mode path recorded at a different dt");
    NonlinearWorkspace ws(cfg.grid);
    SpectralField h = std::move(h0);
    project_high(h, inputs.nstar);
    SpectralField total(cfg.grid), nl(cfg.grid);
    const double dt = cfg.dt, nu = cfg.nu;
    for (std::size_t s = 0; s < inputs.low.steps(); ++s) {
        total = h;
        inputs.low.load_into(total, s); // h + l at the step start
        ws.eval(total, nl);
        project_high(nl, inputs.nstar);
        for_each_mode(h.grid, [&](int k1, int k2) {
            const double lam = nu * static_cast<double>(ksq(k1, k2));
            h.at(k1, k2) = std::exp(-lam * dt) * (h.at(k1, k2) + dt * nl.at(k1, k2));
        });
        const NoiseIncrement noise =
            sample_increment(cfg.forcing, inputs.noise_stream, inputs.step0 + s, dt);
        add_noise_high(h, cfg.forcing, noise, inputs.nstar, [&](int k1, int k2) {
            return ou_variance_factor(nu * static_cast<double>(ksq(k1, k2)), dt);
        });
        project_high(h, inputs.nstar);
        const double z = enstrophy(h);
        if (!std::isfinite(z) || z > cfg.blowup_threshold) throw SimulationBlowup(s, z);
        if (on_step) on_step(s + 1, h);
    }
    return h;
}

void dump_csv(const SpectralField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_csv: cannot open " + path);
    out << "k1,k2,re,im\n";
    out.precision(17);
    for_each_mode(f.grid, [&](int k1, int k2) {
        const cplx v = f.at(k1, k2);
        out << k1 << ',' << k2 << ',' << v.real() << ',' << v.imag() << '\n';
    });
}

SpectralField load_csv(const WaveGrid& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    SpectralField f(g);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        double vals[4];
        for (double& v : vals) {
            if (!std::getline(ss, tok, ',')) throw std::runtime_error("load_csv: malformed row");
            v = std::stod(tok);
        }
        const int k1 = static_cast<int>(vals[0]), k2 = static_cast<int>(vals[1]);
        if (!g.contains(k1, k2)) throw std::runtime_error("load_csv: mode outside grid");
        f.at(k1, k2) = cplx(vals[2], vals[3]);
    }
    return f;
}

} // namespace snslab
