#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "apf/fft.hpp"

namespace apf {

// ---- projection and diagonal operators --------------------------------

/// Leray projection P(k) = I - k k^T/|k|^2 per mode; the k=0 mode passes
/// through unchanged. Annihilates gradients, fixes solenoidal fields.
inline void leray_project_inplace(SpectralField& f) {
    const int d = f.grid.dim;
    for_each_mode(f.grid, [&](const Mode& md) {
        if (md.k2 == 0.0) return;
        Complex dot{};
        for (int c = 0; c < d; ++c) dot += md.k[c] * f.comp[c][md.idx];
        const Complex s = dot / md.k2;
        for (int c = 0; c < d; ++c) f.comp[c][md.idx] -= md.k[c] * s;
    });
    f.solenoidal = true;
}

inline SpectralField leray_project(const SpectralField& f) {
    SpectralField r = f;
    leray_project_inplace(r);
    return r;
}

/// Multiply mode k by (-|k|^2)^order; order 1 is the Laplacian, 2 the
/// bilaplacian.
inline SpectralField apply_laplacian(const SpectralField& f, int order) {
    if (order != 1 && order != 2) throw std::invalid_argument("apply_laplacian: order must be 1 or 2");
    SpectralField r = f;
    for_each_mode(f.grid, [&](const Mode& md) {
        const double s = order == 1 ? -md.k2 : md.k2 * md.k2;
        for (int c = 0; c < f.grid.dim; ++c) r.comp[c][md.idx] *= s;
    });
    return r;
}

// ---- inner products and spectral norms ---------------------------------

/// L^2 inner product (f, g) = integral of f.g via Parseval.
inline double inner_l2(const SpectralField& f, const SpectralField& g) {
    check_same_grid(f.grid, g.grid, "inner_l2");
    std::vector<double> terms(f.grid.spec_size(), 0.0);
    for_each_mode(f.grid, [&](const Mode& md) {
        double s = 0.0;
        for (int c = 0; c < f.grid.dim; ++c)
            s += (f.comp[c][md.idx] * std::conj(g.comp[c][md.idx])).real();
        terms[md.idx] = md.weight * s;
    });
    return f.grid.volume() * pairwise_sum(terms);
}

namespace detail {
inline double weighted_l2sq(const SpectralField& f, double (*w)(double)) {
    std::vector<double> terms(f.grid.spec_size(), 0.0);
    for_each_mode(f.grid, [&](const Mode& md) {
        double s = 0.0;
        for (int c = 0; c < f.grid.dim; ++c) s += std::norm(f.comp[c][md.idx]);
        terms[md.idx] = md.weight * w(md.k2) * s;
    });
    return f.grid.volume() * pairwise_sum(terms);
}
}

inline double norm_l2_sq(const SpectralField& f) {
    return detail::weighted_l2sq(f, [](double) { return 1.0; });
}
inline double norm_l2(const SpectralField& f) { return std::sqrt(norm_l2_sq(f)); }

inline double norm_grad_sq(const SpectralField& f) {
    return detail::weighted_l2sq(f, [](double k2) { return k2; });
}
inline double norm_grad(const SpectralField& f) { return std::sqrt(norm_grad_sq(f)); }

inline double norm_laplacian_sq(const SpectralField& f) {
    return detail::weighted_l2sq(f, [](double k2) { return k2 * k2; });
}
inline double norm_laplacian(const SpectralField& f) { return std::sqrt(norm_laplacian_sq(f)); }

// ---- padded evaluation workspace ---------------------------------------

/// Transform bundle for one base grid plus its 3/2 (quadratic) and 2x
/// (cubic) dealiasing pads. Owns the plans; reuse across a run.
class Workspace {
  public:
    explicit Workspace(const Grid& g)
        : base_(g),
          pad32_(padded_grid(g, 3, 2)),
          pad2_(padded_grid(g, 2, 1)) {}

    const Grid& grid() const { return base_.grid(); }
    const Transformer& base() const { return base_; }
    const Transformer& pad32() const { return pad32_; }
    const Transformer& pad2() const { return pad2_; }

    /// Physical samples of f on the chosen pad.
    RealField to_padded(const SpectralField& f, const Transformer& t) const {
        SpectralField big(t.grid());
        embed(f, big);
        RealField out(t.grid());
        t.inverse_unchecked(big, out);
        return out;
    }

    /// Physical samples of the gradient, grad[i*d+j] = d f_i / d x_j.
    std::vector<std::vector<double>> gradient_padded(const SpectralField& f,
                                                     const Transformer& t) const {
        const int d = f.grid.dim;
        SpectralField big(t.grid());
        embed(f, big);
        SpectralField gcomp(t.grid());
        RealField tmp(t.grid());
        std::vector<std::vector<double>> out(static_cast<std::size_t>(d) * d);
        for (int j = 0; j < d; ++j) {
            for_each_mode(t.grid(), [&](const Mode& md) {
                const Complex ik(0.0, md.k[j]);
                for (int c = 0; c < d; ++c) gcomp.comp[c][md.idx] = ik * big.comp[c][md.idx];
            });
            t.inverse_unchecked(gcomp, tmp);
            for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i) * d + j] = tmp.comp[i];
        }
        return out;
    }

    /// Forward-transform padded physical samples and restrict to the base
    /// grid (alias-free for band-limited integrands of matching degree).
    SpectralField from_padded(const RealField& f, const Transformer& t) const {
        SpectralField big = t.forward(f);
        SpectralField out(grid());
        truncate(big, out);
        return out;
    }

  private:
    Transformer base_;
    Transformer pad32_;
    Transformer pad2_;
};

// ---- dealiased pointwise products --------------------------------------

/// Componentwise product a_i b_i, evaluated on the 3/2 pad (exact for
/// band-limited factors).
inline SpectralField dealiased_product(const Workspace& ws, const SpectralField& a,
                                       const SpectralField& b) {
    check_same_grid(a.grid, b.grid, "dealiased_product");
    const RealField ar = ws.to_padded(a, ws.pad32());
    const RealField br = ws.to_padded(b, ws.pad32());
    RealField pr(ws.pad32().grid());
    const std::size_t n = pr.grid.real_size();
    for (int c = 0; c < a.grid.dim; ++c)
        for (std::size_t i = 0; i < n; ++i)
            pr.comp[c][i] = ar.comp[c][i] * br.comp[c][i];
    return ws.from_padded(pr, ws.pad32());
}

/// Componentwise triple product a_i b_i c_i on the 2x pad.
inline SpectralField dealiased_product(const Workspace& ws, const SpectralField& a,
                                       const SpectralField& b, const SpectralField& c) {
    check_same_grid(a.grid, b.grid, "dealiased_product");
    check_same_grid(a.grid, c.grid, "dealiased_product");
    const RealField ar = ws.to_padded(a, ws.pad2());
    const RealField br = ws.to_padded(b, ws.pad2());
    const RealField cr = ws.to_padded(c, ws.pad2());
    RealField pr(ws.pad2().grid());
    const std::size_t n = pr.grid.real_size();
    for (int cc = 0; cc < a.grid.dim; ++cc)
        for (std::size_t i = 0; i < n; ++i)
            pr.comp[cc][i] = ar.comp[cc][i] * br.comp[cc][i] * cr.comp[cc][i];
    return ws.from_padded(pr, ws.pad2());
}

// ---- collocation norms --------------------------------------------------

/// ||f||_L4 via quadrature on the 2x pad, where |f|^4 is resolved exactly
/// for any field band-limited to the base grid.
inline double norm_l4(const Workspace& ws, const SpectralField& f) {
    const RealField fr = ws.to_padded(f, ws.pad2());
    const Grid& g = fr.grid;
    const std::size_t n = g.real_size();
    std::vector<double> terms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < f.grid.dim; ++c) s += fr.comp[c][i] * fr.comp[c][i];
        terms[i] = s * s;
    }
    return std::pow(g.cell_volume() * pairwise_sum(terms), 0.25);
}

inline double norm_l4_pow4(const Workspace& ws, const SpectralField& f) {
    const double v = norm_l4(ws, f);
    return v * v * v * v;
}

/// ||f||_{L^{6/5}} by quadrature on the 2x pad (not exact; the integrand is
/// not a trigonometric polynomial).
inline double norm_l65(const Workspace& ws, const SpectralField& f) {
    const RealField fr = ws.to_padded(f, ws.pad2());
    const Grid& g = fr.grid;
    const std::size_t n = g.real_size();
    std::vector<double> terms(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c = 0; c < f.grid.dim; ++c) s += fr.comp[c][i] * fr.comp[c][i];
        terms[i] = std::pow(s, 0.6);  // |f|^{6/5}
    }
    return std::pow(g.cell_volume() * pairwise_sum(terms), 5.0 / 6.0);
}

/// Collocation max of |f| on the 3/2 pad.
inline double norm_linf(const Workspace& ws, const SpectralField& f) {
    return max_abs(ws.to_padded(f, ws.pad32()));
}

/// Collocation max of the Frobenius norm of grad f on the 3/2 pad.
inline double norm_grad_linf(const Workspace& ws, const SpectralField& f) {
    const auto gr = ws.gradient_padded(f, ws.pad32());
    const std::size_t n = ws.pad32().grid().real_size();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& comp : gr) s += comp[i] * comp[i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

// ---- deterministic random fields ----------------------------------------

namespace rng {

/// SplitMix64 evaluated at an arbitrary counter; the fixed generator for
/// initial data so independent implementations reproduce runs bit-exactly.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

/// Standard complex Gaussian (unit variance per complex value) via
/// Box-Muller on two counter draws.
inline Complex gaussian(std::uint64_t seed, std::uint64_t counter) {
    const double u1 = to_unit(splitmix64_at(seed, 2 * counter));
    const double u2 = to_unit(splitmix64_at(seed, 2 * counter + 1));
    const double r = std::sqrt(-std::log1p(-u1));  // Rayleigh with E r^2 = 1
    return Complex(r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2));
}

}  // namespace rng

/// Isotropic spectral envelope: amplitude * (1+|k|^2)^(-decay/2) up to the
/// mode-magnitude cutoff m_cut, zero beyond. decay > d/2 + 2 keeps the
/// bilaplacian seminorm of samples finite under refinement.
struct SpectrumDesc {
    double amplitude = 0.1;
    double decay = 5.0;
    double m_cut = 0.0;  // 0 = no cutoff beyond the grid band

    double envelope(double k2, double m2) const {
        if (m_cut > 0.0 && m2 > m_cut * m_cut) return 0.0;
        return amplitude * std::pow(1.0 + k2, -0.5 * decay);
    }
};

/// Solenoidal Gaussian field, deterministic in (seed, grid, spectrum):
/// each stored non-Nyquist mode k != 0 gets d independent complex Gaussians
/// with per-mode power envelope^2, Leray-projected; Hermitian partners on
/// the self-conjugate planes are filled by conjugation of the
/// lexicographically smaller index. Zero mean.
inline SpectralField random_solenoidal_field(const Grid& grid, std::uint64_t seed,
                                             const SpectrumDesc& spectrum) {
    SpectralField f(grid);
    const int d = grid.dim;
    for_each_mode(grid, [&](const Mode& md) {
        if (md.zero() || md.nyquist) return;
        if (md.conj_plane && conj_index(grid, md) < md.idx) return;
        double m2 = 0.0;
        for (int a = 0; a < d; ++a) m2 += static_cast<double>(md.m[a]) * md.m[a];
        const double amp = spectrum.envelope(md.k2, m2);
        for (int c = 0; c < d; ++c) {
            const std::uint64_t counter = md.idx * static_cast<std::uint64_t>(d) + c;
            f.comp[c][md.idx] = amp * rng::gaussian(seed, counter);
        }
    });
    for_each_mode(grid, [&](const Mode& md) {
        if (!md.conj_plane) return;
        const std::size_t j = conj_index(grid, md);
        if (j < md.idx)
            for (int c = 0; c < d; ++c) f.comp[c][md.idx] = std::conj(f.comp[c][j]);
    });
    leray_project_inplace(f);
    return f;
}

}  // namespace apf
