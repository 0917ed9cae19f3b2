#pragma once

#include <memory>

#include "snslab/spectral_field.hpp"

namespace snslab {

// Spectral nonlinearity of the 2D vorticity equation,
//   N_k(w) = sum_{l+j=k} (k_perp . l) / |l|^2  w_l w_j,
// equal to -(u . grad w) with u recovered from w by Biot-Savart. The result
// is dealiased on the grid's cutoff. Both evaluation routes implement the
// same contract:
//   * NonlinearWorkspace::eval - pseudospectral, size-n transforms, O(n^2 log n),
//     buffers and plans reused across calls (no allocation after construction);
//   * nonlinear_term_direct - literal convolution over retained mode pairs,
//     O(n^4); reference route for cross-checks on small grids.

class NonlinearWorkspace {
  public:
    explicit NonlinearWorkspace(const WaveGrid& grid);
    ~NonlinearWorkspace();
    NonlinearWorkspace(const NonlinearWorkspace&) = delete;
    NonlinearWorkspace& operator=(const NonlinearWorkspace&) = delete;

    const WaveGrid& grid() const;

    // out = N(w); out may not alias w.
    void eval(const SpectralField& w, SpectralField& out);

    SpectralField eval(const SpectralField& w) {
        SpectralField out(grid());
        eval(w, out);
        return out;
    }

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SpectralField nonlinear_term_direct(const SpectralField& w);

} // namespace snslab
