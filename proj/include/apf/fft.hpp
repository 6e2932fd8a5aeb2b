#pragma once

#include <fftw3.h>

#include <complex>
#include <memory>
#include <stdexcept>

#include "apf/field.hpp"

namespace apf {

/// FFTW-backed transforms for one grid. Plans use FFTW_ESTIMATE so planning
/// is deterministic; data is staged through owned aligned buffers. One
/// Transformer is not safe for concurrent use; make one per thread.
class Transformer {
  public:
    explicit Transformer(const Grid& g) : grid_(g) {
        grid_.validate();
        rbuf_ = fftw_alloc_real(grid_.real_size());
        cbuf_ = fftw_alloc_complex(grid_.spec_size());
        if (!rbuf_ || !cbuf_) throw std::bad_alloc();
        int n[3] = {g.n[0], g.n[1], g.n[2]};
        fwd_ = fftw_plan_dft_r2c(g.dim, n, rbuf_, cbuf_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r(g.dim, n, cbuf_, rbuf_, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) throw std::runtime_error("Transformer: planning failed");
    }

    ~Transformer() {
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
        fftw_free(rbuf_);
        fftw_free(cbuf_);
    }

    Transformer(const Transformer&) = delete;
    Transformer& operator=(const Transformer&) = delete;

    const Grid& grid() const { return grid_; }

    /// Collocation values -> series amplitudes (divides by the point count).
    void forward(const RealField& in, SpectralField& out) const {
        check_same_grid(in.grid, grid_, "forward");
        if (out.grid != grid_) out = SpectralField(grid_);
        const std::size_t nr = grid_.real_size();
        const std::size_t ns = grid_.spec_size();
        const double inv = 1.0 / static_cast<double>(nr);
        for (int c = 0; c < grid_.dim; ++c) {
            for (std::size_t i = 0; i < nr; ++i) rbuf_[i] = in.comp[c][i];
            fftw_execute(fwd_);
            for (std::size_t i = 0; i < ns; ++i)
                out.comp[c][i] = Complex(cbuf_[i][0], cbuf_[i][1]) * inv;
        }
        out.solenoidal = false;
    }

    SpectralField forward(const RealField& in) const {
        SpectralField out(grid_);
        forward(in, out);
        return out;
    }

    /// Series amplitudes -> collocation values. Requires Hermitian symmetry;
    /// a defect beyond 1e-10 (relative to the coefficient norm) is an error.
    void inverse(const SpectralField& in, RealField& out) const {
        check_same_grid(in.grid, grid_, "inverse");
        const double ref = coeff_norm(in);
        if (hermitian_defect(in) > 1e-10 * std::max(ref, 1e-300))
            throw std::runtime_error("inverse: Hermitian symmetry violated");
        inverse_unchecked(in, out);
    }

    RealField inverse(const SpectralField& in) const {
        RealField out(grid_);
        inverse(in, out);
        return out;
    }

    /// Same but skips the defect scan; used on fields that are Hermitian by
    /// construction (hot paths). Pairs are still averaged exactly.
    void inverse_unchecked(const SpectralField& in, RealField& out) const {
        if (out.grid != grid_) out = RealField(grid_);
        const std::size_t nr = grid_.real_size();
        const std::size_t ns = grid_.spec_size();
        for (int c = 0; c < grid_.dim; ++c) {
            for (std::size_t i = 0; i < ns; ++i) {
                cbuf_[i][0] = in.comp[c][i].real();
                cbuf_[i][1] = in.comp[c][i].imag();
            }
            symmetrize_buffer();
            fftw_execute(bwd_);
            for (std::size_t i = 0; i < nr; ++i) out.comp[c][i] = rbuf_[i];
        }
    }

  private:
    void symmetrize_buffer() const {
        for_each_mode(grid_, [&](const Mode& md) {
            if (!md.conj_plane) return;
            const std::size_t j = conj_index(grid_, md);
            if (j <= md.idx) return;
            const double re = 0.5 * (cbuf_[md.idx][0] + cbuf_[j][0]);
            const double im = 0.5 * (cbuf_[md.idx][1] - cbuf_[j][1]);
            cbuf_[md.idx][0] = re;
            cbuf_[md.idx][1] = im;
            cbuf_[j][0] = re;
            cbuf_[j][1] = -im;
        });
        // modes that are their own partner must be real
        for_each_mode(grid_, [&](const Mode& md) {
            if (md.conj_plane && conj_index(grid_, md) == md.idx)
                cbuf_[md.idx][1] = 0.0;
        });
    }

    Grid grid_;
    double* rbuf_ = nullptr;
    fftw_complex* cbuf_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

/// Zero-pad coefficients onto a finer grid (same box). Nyquist modes of the
/// source are dropped: padded evaluation treats the band as centered.
inline void embed(const SpectralField& src, SpectralField& dst) {
    dst.zero();
    const Grid& gs = src.grid;
    const Grid& gd = dst.grid;
    for_each_mode(gs, [&](const Mode& md) {
        if (md.nyquist) return;
        const std::size_t j = mode_index(gd, md.m);
        for (int c = 0; c < gs.dim; ++c) dst.comp[c][j] = src.comp[c][md.idx];
    });
    dst.solenoidal = src.solenoidal;
}

/// Restrict coefficients from a finer grid; modes with any |m_j| >= N_j/2 of
/// the target are discarded (the target Nyquist stays zero).
inline void truncate(const SpectralField& src, SpectralField& dst) {
    dst.zero();
    const Grid& gd = dst.grid;
    for_each_mode(gd, [&](const Mode& md) {
        if (md.nyquist) return;
        const std::size_t j = mode_index(src.grid, md.m);
        for (int c = 0; c < gd.dim; ++c) dst.comp[c][md.idx] = src.comp[c][j];
    });
    dst.solenoidal = false;
}

}  // namespace apf
