#include "snslab/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace snslab {

namespace {
bool upper_half(int k1, int k2) { return k2 > 0 || (k2 == 0 && k1 > 0); }
} // namespace

ForcingSpec ForcingSpec::real_form(const std::vector<std::array<double, 4>>& entries) {
    ForcingSpec s;
    for (const auto& e : entries) {
        ForcedMode m;
        m.k1 = static_cast<int>(std::lround(e[0]));
        m.k2 = static_cast<int>(std::lround(e[1]));
        m.amp_cos = e[2];
        m.amp_sin = e[3];
        s.modes.push_back(m);
    }
    s.validate();
    return s;
}

ForcingSpec ForcingSpec::complex_form(const std::vector<std::array<double, 4>>& entries) {
    ForcingSpec s;
    for (const auto& e : entries) {
        int k1 = static_cast<int>(std::lround(e[0]));
        int k2 = static_cast<int>(std::lround(e[1]));
        double re = e[2], im = e[3];
        if (!upper_half(k1, k2)) {
            // canonicalize to the representative; sigma_{-k} = conj(sigma_k)
            k1 = -k1;
            k2 = -k2;
            im = -im;
        }
        ForcedMode m;
        m.k1 = k1;
        m.k2 = k2;
        const double amp = std::sqrt(2.0 * (re * re + im * im));
        m.amp_cos = amp;
        m.amp_sin = amp;
        s.modes.push_back(m);
    }
    s.validate();
    return s;
}

std::vector<std::array<double, 4>> ForcingSpec::as_complex_entries() const {
    std::vector<std::array<double, 4>> out;
    for (const auto& m : modes) {
        if (std::abs(m.amp_cos - m.amp_sin) > 1e-12 * (std::abs(m.amp_cos) + std::abs(m.amp_sin)))
            throw std::invalid_argument(
                "ForcingSpec: unequal cos/sin amplitudes have no complex-form equivalent");
        out.push_back({static_cast<double>(m.k1), static_cast<double>(m.k2),
                       m.amp_cos / std::sqrt(2.0), 0.0});
    }
    return out;
}

void ForcingSpec::validate() const {
    if (modes.empty()) throw std::invalid_argument("ForcingSpec: no forced modes");
    std::set<std::pair<int, int>> seen;
    bool any = false;
    for (const auto& m : modes) {
        if (m.k1 == 0 && m.k2 == 0) throw std::invalid_argument("ForcingSpec: mean mode cannot be forced");
        if (!upper_half(m.k1, m.k2))
            throw std::invalid_argument("ForcingSpec: modes must be upper-half-plane representatives");
        if (!std::isfinite(m.amp_cos) || !std::isfinite(m.amp_sin) || m.amp_cos < 0.0 || m.amp_sin < 0.0)
            throw std::invalid_argument("ForcingSpec: amplitudes must be finite and nonnegative");
        if (!seen.insert({m.k1, m.k2}).second)
            throw std::invalid_argument("ForcingSpec: duplicate forced mode");
        any = any || (m.amp_cos > 0.0 || m.amp_sin > 0.0);
    }
    if (!any) throw std::invalid_argument("ForcingSpec: zero energy injection");
}

void ForcingSpec::validate_for_grid(const WaveGrid& g) const {
    validate();
    for (const auto& m : modes) {
        if (!g.contains(m.k1, m.k2) || g.aliased(m.k1, m.k2))
            throw std::invalid_argument("ForcingSpec: forced mode outside retained (dealiased) grid");
    }
}

ForcingSpec four_mode_forcing(double energy_rate) {
    // Two representatives (1,0), (0,1); full set {+-(1,0), +-(0,1)}.
    // Per representative E0 share = (amp^2 + amp^2)/2 = amp^2.
    const double amp = std::sqrt(energy_rate / 2.0);
    ForcingSpec s;
    s.modes.push_back({1, 0, amp, amp});
    s.modes.push_back({0, 1, amp, amp});
    s.validate();
    return s;
}

ForcingSpec power_law_forcing(double alpha, double radius, double energy_rate) {
    ForcingSpec s;
    const int R = static_cast<int>(std::ceil(radius));
    double raw = 0.0;
    for (int k2 = 0; k2 <= R; ++k2)
        for (int k1 = -R; k1 <= R; ++k1) {
            if (!upper_half(k1, k2)) continue;
            const double r2 = static_cast<double>(ksq(k1, k2));
            if (r2 >= radius * radius) continue;
            const double amp = std::pow(r2, -alpha / 2.0); // |k|^{-alpha}
            s.modes.push_back({k1, k2, amp, amp});
            raw += amp * amp; // E0 share per representative with amp_cos=amp_sin
        }
    if (s.modes.empty()) throw std::invalid_argument("power_law_forcing: empty shell");
    const double scale = std::sqrt(energy_rate / raw);
    for (auto& m : s.modes) {
        m.amp_cos *= scale;
        m.amp_sin *= scale;
    }
    s.validate();
    return s;
}

} // namespace snslab
