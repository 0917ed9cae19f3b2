#include "snslab/empirical_measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace snslab {

EmpiricalMeasure::EmpiricalMeasure(double cell_width) : cell(cell_width) {
    if (!(cell > 0.0)) throw std::invalid_argument("EmpiricalMeasure: cell width must be positive");
}

EmpiricalMeasure::Cell EmpiricalMeasure::locate(const std::vector<double>& x) const {
    Cell c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        c[i] = static_cast<long long>(std::floor(x[i] / cell));
    return c;
}

void EmpiricalMeasure::add(const std::vector<double>& x, double weight) {
    add_cell(locate(x), weight);
}

void EmpiricalMeasure::add_cell(const Cell& c, double weight) {
    if (!(weight >= 0.0)) throw std::invalid_argument("EmpiricalMeasure: negative weight");
    if (weight == 0.0) return;
    atoms[c] += weight;
}

double EmpiricalMeasure::mass() const {
    double s = 0.0;
    for (const auto& [c, w] : atoms) s += w;
    return s;
}

double EmpiricalMeasure::mass_at(const Cell& c) const {
    const auto it = atoms.find(c);
    return it == atoms.end() ? 0.0 : it->second;
}

void EmpiricalMeasure::scale(double s) {
    if (!(s >= 0.0)) throw std::invalid_argument("EmpiricalMeasure: negative scale");
    for (auto& [c, w] : atoms) w *= s;
}

void EmpiricalMeasure::normalize() {
    const double m = mass();
    if (!(m > 0.0)) throw std::runtime_error("EmpiricalMeasure: cannot normalize zero mass");
    scale(1.0 / m);
}

EmpiricalMeasure meet(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    EmpiricalMeasure out(a.cell);
    for (const auto& [c, w] : a.atoms) {
        const double v = b.mass_at(c);
        const double m = w < v ? w : v;
        if (m > 0.0) out.atoms[c] = m;
    }
    return out;
}

EmpiricalMeasure plus_part(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    EmpiricalMeasure out(a.cell);
    for (const auto& [c, w] : a.atoms) {
        const double d = w - b.mass_at(c);
        if (d > 0.0) out.atoms[c] = d;
    }
    return out;
}

double tv_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    double s = 0.0;
    for (const auto& [c, w] : a.atoms) s += std::abs(w - b.mass_at(c));
    for (const auto& [c, w] : b.atoms)
        if (a.atoms.find(c) == a.atoms.end()) s += w;
    return s;
}

double moment_ratio(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("moment_ratio: p must exceed 1");
    for (const auto& [c, w] : a.atoms)
        if (b.mass_at(c) == 0.0) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (const auto& [c, w] : b.atoms) {
        const double r = a.mass_at(c) / w;
        s += std::pow(r, p) * w;
    }
    return s;
}

double coupling_lower_bound(double mass_a, double p, double c_prime) {
    if (!(p > 1.0)) throw std::invalid_argument("coupling_lower_bound: p must exceed 1");
    if (!(c_prime > 0.0) || !std::isfinite(c_prime) || !(mass_a > 0.0)) return 0.0;
    return (1.0 - 1.0 / p) * std::pow(std::pow(mass_a, p) / (p * c_prime), 1.0 / (p - 1.0));
}

LatticeCheck lattice_identity_check(std::size_t fixtures, const CounterRng& rng) {
    LatticeCheck out;
    out.fixtures = fixtures;
    out.worst_bound_slack = std::numeric_limits<double>::infinity();
    constexpr double kDyadic = 1.0 / (1 << 20);

    for (std::size_t f = 0; f < fixtures; ++f) {
        const CounterRng s = rng.derive({tag64("lattice"), f});
        const auto dim = static_cast<std::size_t>(1 + (s.derive(1).key % 3));
        const auto box = static_cast<long long>(2 + (s.derive(2).key % 4));
        const std::size_t na = 1 + s.derive(3).key % 12;
        const std::size_t nb = 1 + s.derive(4).key % 12;

        // dyadic weights on a small integer box so supports collide often
        auto draw = [&](std::uint64_t tag, std::size_t count, bool subset_of,
                        const EmpiricalMeasure& base) {
            EmpiricalMeasure m(1.0);
            for (std::size_t i = 0; i < count; ++i) {
                EmpiricalMeasure::Cell c(dim);
                if (subset_of && !base.atoms.empty()) {
                    auto it = base.atoms.begin();
                    std::advance(it, static_cast<long long>(
                                         uniform01(s, tag, 100 + i) * base.atoms.size()));
                    c = it->first;
                } else {
                    for (std::size_t d = 0; d < dim; ++d)
                        c[d] = static_cast<long long>(uniform01(s, tag, 10 * i + d) * (2 * box)) - box;
                }
                const double w = kDyadic * (1.0 + std::floor(uniform01(s, tag, 1000 + i) * (1 << 20)));
                m.add_cell(c, w);
            }
            return m;
        };

        const EmpiricalMeasure mu2 = draw(1, nb, false, EmpiricalMeasure());
        const EmpiricalMeasure mu1 = draw(2, na, (f % 2) == 0, mu2);

        const EmpiricalMeasure mt = meet(mu1, mu2);
        const EmpiricalMeasure pp = plus_part(mu1, mu2);
        const EmpiricalMeasure pm = plus_part(mu2, mu1);

        bool ok = true;
        // decomposition mu1 = meet + (mu1 - mu2)^+, atom by atom, exactly
        for (const auto& [c, w] : mu1.atoms)
            if (mt.mass_at(c) + pp.mass_at(c) != w) ok = false;
        for (const auto& [c, w] : mt.atoms)
            if (mu1.atoms.find(c) == mu1.atoms.end()) ok = false;
        // positive parts have disjoint supports
        for (const auto& [c, w] : pp.atoms)
            if (pm.mass_at(c) != 0.0) ok = false;
        // unnormalized TV identity, exact for dyadic weights
        if (tv_distance(mu1, mu2) != mu1.mass() + mu2.mass() - 2.0 * mt.mass()) ok = false;

        // probability form within rounding of the normalizations
        EmpiricalMeasure p1 = mu1, p2 = mu2;
        p1.normalize();
        p2.normalize();
        const double defect =
            std::abs(0.5 * tv_distance(p1, p2) - (1.0 - meet(p1, p2).mass()));
        out.worst_defect = std::max(out.worst_defect, defect);
        if (defect > 1e-12) ok = false;

        // moment lower bound on the meet mass
        const double p = 1.5 + uniform01(s, 5, 0) * 1.5;
        const double cp = moment_ratio(p1, p2, p);
        const double bound = coupling_lower_bound(p1.mass(), p, cp);
        const double slack = meet(p1, p2).mass() - bound;
        out.worst_bound_slack = std::min(out.worst_bound_slack, slack);
        if (slack < -1e-12) ok = false;

        if (!ok) ++out.failures;
    }
    out.pass = out.failures == 0;
    return out;
}

} // namespace snslab
