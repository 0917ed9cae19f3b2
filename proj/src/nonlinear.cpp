#include "snslab/nonlinear.hpp"

#include <fftw3.h>

#include <mutex>

namespace snslab {

namespace {
// FFTW plan creation/destruction is not thread safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct NonlinearWorkspace::Impl {
    WaveGrid grid;
    int n = 0;
    // physical-space work arrays: u1, u2, dw/dx, dw/dy share two product passes
    fftw_complex* buf[5] = {nullptr, nullptr, nullptr, nullptr, nullptr};
    fftw_plan back[4] = {nullptr, nullptr, nullptr, nullptr};
    fftw_plan fwd = nullptr;

    explicit Impl(const WaveGrid& g) : grid(g), n(g.n) {
        const std::size_t m = static_cast<std::size_t>(n) * n;
        std::lock_guard<std::mutex> lk(plan_mutex());
        for (auto& b : buf) b = fftw_alloc_complex(m);
        // BACKWARD: coefficients -> grid values of sum w_k exp(+i k.x).
        for (int i = 0; i < 4; ++i)
            back[i] = fftw_plan_dft_2d(n, n, buf[i], buf[i], FFTW_BACKWARD, FFTW_ESTIMATE);
        fwd = fftw_plan_dft_2d(n, n, buf[4], buf[4], FFTW_FORWARD, FFTW_ESTIMATE);
    }

    ~Impl() {
        std::lock_guard<std::mutex> lk(plan_mutex());
        for (auto& p : back)
            if (p) fftw_destroy_plan(p);
        if (fwd) fftw_destroy_plan(fwd);
        for (auto& b : buf)
            if (b) fftw_free(b);
    }

    // storage index of wavevector (k1,k2) in the n x n transform layout
    std::size_t fidx(int k1, int k2) const {
        const int i1 = k1 >= 0 ? k1 : k1 + n;
        const int i2 = k2 >= 0 ? k2 : k2 + n;
        return static_cast<std::size_t>(i2) * n + i1;
    }
};

NonlinearWorkspace::NonlinearWorkspace(const WaveGrid& grid) : impl_(new Impl(grid)) {}
NonlinearWorkspace::~NonlinearWorkspace() = default;
const WaveGrid& NonlinearWorkspace::grid() const { return impl_->grid; }

void NonlinearWorkspace::eval(const SpectralField& w, SpectralField& out) {
    Impl& im = *impl_;
    const int n = im.n;
    const std::size_t m = static_cast<std::size_t>(n) * n;
    if (out.grid.n != n) out = SpectralField(im.grid);

    for (int i = 0; i < 5; ++i)
        std::fill(reinterpret_cast<cplx*>(im.buf[i]), reinterpret_cast<cplx*>(im.buf[i]) + m,
                  cplx(0.0, 0.0));

    // Load velocity components and vorticity gradient, dealiased on input so
    // every retained product mode survives aliasing under the size-n transform.
    for_each_mode(im.grid, [&](int k1, int k2) {
        if (im.grid.aliased(k1, k2)) return;
        const cplx wk = w.at(k1, k2);
        if (wk == cplx(0.0, 0.0)) return;
        const double k2sq = static_cast<double>(ksq(k1, k2));
        const std::size_t id = im.fidx(k1, k2);
        const cplx iwk(-wk.imag(), wk.real()); // i * w_k
        // buf0/buf1 hold -(u1, u2) with u = -i k_perp w / |k|^2; the sign
        // cancels against the overall minus in N = -(u . grad w), so the
        // product pass below needs no final negation.
        reinterpret_cast<cplx*>(im.buf[0])[id] = iwk * (-static_cast<double>(k2) / k2sq);
        reinterpret_cast<cplx*>(im.buf[1])[id] = iwk * (static_cast<double>(k1) / k2sq);
        reinterpret_cast<cplx*>(im.buf[2])[id] = iwk * static_cast<double>(k1); // dw/dx
        reinterpret_cast<cplx*>(im.buf[3])[id] = iwk * static_cast<double>(k2); // dw/dy
    });

    for (int i = 0; i < 4; ++i) fftw_execute(im.back[i]);

    cplx* b0 = reinterpret_cast<cplx*>(im.buf[0]);
    cplx* b1 = reinterpret_cast<cplx*>(im.buf[1]);
    cplx* b2 = reinterpret_cast<cplx*>(im.buf[2]);
    cplx* b3 = reinterpret_cast<cplx*>(im.buf[3]);
    cplx* b4 = reinterpret_cast<cplx*>(im.buf[4]);
    for (std::size_t i = 0; i < m; ++i) b4[i] = b0[i] * b2[i] + b1[i] * b3[i];

    fftw_execute(im.fwd);

    const double norm = 1.0 / static_cast<double>(m);
    out.clear();
    for_each_mode(im.grid, [&](int k1, int k2) {
        if (im.grid.aliased(k1, k2)) return;
        out.at(k1, k2) = b4[im.fidx(k1, k2)] * norm;
    });
}

SpectralField nonlinear_term_direct(const SpectralField& w) {
    const WaveGrid& g = w.grid;
    SpectralField out(g);
    const int K = g.kmax();
    for (int l2 = -K; l2 <= K; ++l2)
        for (int l1 = -K; l1 <= K; ++l1) {
            if (l1 == 0 && l2 == 0) continue;
            if (g.aliased(l1, l2)) continue;
            const cplx wl = w.at(l1, l2);
            if (wl == cplx(0.0, 0.0)) continue;
            const double lsq = static_cast<double>(ksq(l1, l2));
            for (int j2 = -K; j2 <= K; ++j2)
                for (int j1 = -K; j1 <= K; ++j1) {
                    if (j1 == 0 && j2 == 0) continue;
                    if (g.aliased(j1, j2)) continue;
                    const cplx wj = w.at(j1, j2);
                    if (wj == cplx(0.0, 0.0)) continue;
                    const int k1 = l1 + j1, k2 = l2 + j2;
                    if (k1 == 0 && k2 == 0) continue;
                    if (!g.contains(k1, k2) || g.aliased(k1, k2)) continue;
                    // (k_perp . l) with k_perp = (-k2, k1)
                    const double cf = static_cast<double>(-static_cast<long long>(k2) * l1 +
                                                          static_cast<long long>(k1) * l2) /
                                      lsq;
                    out.at(k1, k2) += cf * wl * wj;
                }
        }
    return out;
}

} // namespace snslab
