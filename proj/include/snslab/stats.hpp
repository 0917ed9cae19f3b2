#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace snslab {

struct MeanCi {
    double mean = 0.0;
    double se = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;
};

// Sample mean with a z-based CI at the given number of standard errors.
inline MeanCi mean_ci(const std::vector<double>& x, double z = 1.96) {
    if (x.empty()) throw std::invalid_argument("mean_ci: empty sample");
    MeanCi r;
    r.n = x.size();
    double s = 0.0;
    for (double v : x) s += v;
    r.mean = s / static_cast<double>(r.n);
    double q = 0.0;
    for (double v : x) q += (v - r.mean) * (v - r.mean);
    const double var = r.n > 1 ? q / static_cast<double>(r.n - 1) : 0.0;
    r.se = std::sqrt(var / static_cast<double>(r.n));
    r.lo = r.mean - z * r.se;
    r.hi = r.mean + z * r.se;
    return r;
}

// Wilson-style normal SE for a proportion (SE of the empirical frequency).
inline MeanCi proportion_ci(std::size_t hits, std::size_t n, double z = 1.96) {
    if (n == 0) throw std::invalid_argument("proportion_ci: empty sample");
    MeanCi r;
    r.n = n;
    r.mean = static_cast<double>(hits) / static_cast<double>(n);
    r.se = std::sqrt(std::max(r.mean * (1.0 - r.mean), 1.0 / static_cast<double>(n)) /
                     static_cast<double>(n));
    r.lo = std::max(0.0, r.mean - z * r.se);
    r.hi = std::min(1.0, r.mean + z * r.se);
    return r;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vx = sxx - sx * sx / n;
    if (vx <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.n = x.size();
    f.slope = (sxy - sx * sy / n) / vx;
    f.intercept = (sy - f.slope * sx) / n;
    const double vy = syy - sy * sy / n;
    if (vy <= 0.0) {
        f.r2 = 1.0; // all-equal ordinates: the fit is exact
    } else {
        const double cov = sxy - sx * sy / n;
        f.r2 = (cov * cov) / (vx * vy);
    }
    return f;
}

// Two-sample Kolmogorov-Smirnov test; asymptotic p-value.
struct KsResult {
    double d = 0.0;
    double p = 1.0;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lam = (ne + 0.12 + 0.11 / ne) * d;
    double p = 0.0;
    double sign = 1.0;
    bool converged = false;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * 2.0 * std::exp(-2.0 * lam * lam * k * k);
        p += term;
        sign = -sign;
        if (std::abs(term) < 1e-12) {
            converged = true;
            break;
        }
    }
    // the alternating series stalls only for tiny lam, where p = 1
    if (!converged) p = 1.0;
    return KsResult{d, std::min(1.0, std::max(0.0, p))};
}

// One-sided Kendall trend test for a DECREASING sequence: p-value of
// observing at least as many discordant-with-increase pairs under the
// uniform-permutation null. Exact by enumeration for n <= 9.
inline double kendall_decreasing_pvalue(const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n < 3 || n > 9) throw std::invalid_argument("kendall_decreasing_pvalue: need 3 <= n <= 9");
    auto score = [](const std::vector<double>& v) {
        // S = #(i<j: v_i > v_j) - #(i<j: v_i < v_j); large S = decreasing trend
        int s = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) {
                if (v[i] > v[j]) ++s;
                else if (v[i] < v[j]) --s;
            }
        return s;
    };
    const int observed = score(y);
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n; ++i) ranks[i] = static_cast<double>(i);
    std::size_t total = 0, geq = 0;
    std::sort(ranks.begin(), ranks.end());
    do {
        ++total;
        if (score(ranks) >= observed) ++geq;
    } while (std::next_permutation(ranks.begin(), ranks.end()));
    return static_cast<double>(geq) / static_cast<double>(total);
}

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace snslab
