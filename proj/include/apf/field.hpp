#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "apf/grid.hpp"

namespace apf {

using Complex = std::complex<double>;

/// Deterministic pairwise reduction; fixed association independent of data.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

/// d-component vector field as half-complex Fourier coefficients.
/// Coefficients are Fourier-series amplitudes: f(x) = sum_k c(k) e^{i k.x}.
struct SpectralField {
    Grid grid;
    std::vector<std::vector<Complex>> comp;
    bool solenoidal = false;

    SpectralField() = default;
    explicit SpectralField(const Grid& g)
        : grid(g), comp(g.dim, std::vector<Complex>(g.spec_size(), Complex{})) {}

    Complex& at(int c, std::size_t i) { return comp[c][i]; }
    const Complex& at(int c, std::size_t i) const { return comp[c][i]; }

    void zero() {
        for (auto& v : comp) std::fill(v.begin(), v.end(), Complex{});
    }
};

/// d-component vector field on collocation points, row-major per component.
struct RealField {
    Grid grid;
    std::vector<std::vector<double>> comp;

    RealField() = default;
    explicit RealField(const Grid& g)
        : grid(g), comp(g.dim, std::vector<double>(g.real_size(), 0.0)) {}
};

inline void check_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

// ---- algebra ----------------------------------------------------------

inline void scale(SpectralField& f, double s) {
    for (auto& v : f.comp)
        for (auto& c : v) c *= s;
}

/// y += a*x
inline void axpy(SpectralField& y, double a, const SpectralField& x) {
    check_same_grid(y.grid, x.grid, "axpy");
    for (int c = 0; c < y.grid.dim; ++c)
        for (std::size_t i = 0; i < y.comp[c].size(); ++i)
            y.comp[c][i] += a * x.comp[c][i];
    y.solenoidal = y.solenoidal && x.solenoidal;
}

inline SpectralField sub(const SpectralField& a, const SpectralField& b) {
    check_same_grid(a.grid, b.grid, "sub");
    SpectralField r = a;
    for (int c = 0; c < a.grid.dim; ++c)
        for (std::size_t i = 0; i < r.comp[c].size(); ++i)
            r.comp[c][i] -= b.comp[c][i];
    r.solenoidal = a.solenoidal && b.solenoidal;
    return r;
}

inline bool all_finite(const SpectralField& f) {
    double s = 0.0;
    for (const auto& v : f.comp)
        for (const auto& c : v) s += c.real() + c.imag();
    return std::isfinite(s);
}

inline bool all_finite(const RealField& f) {
    double s = 0.0;
    for (const auto& v : f.comp)
        for (double x : v) s += x;
    return std::isfinite(s);
}

/// 2-norm of the stored coefficients with Parseval multiplicities (no volume
/// factor); the reference scale for symmetry/solenoidality defects.
inline double coeff_norm(const SpectralField& f) {
    std::vector<double> terms(f.grid.spec_size(), 0.0);
    for_each_mode(f.grid, [&](const Mode& md) {
        double s = 0.0;
        for (int c = 0; c < f.grid.dim; ++c) s += std::norm(f.comp[c][md.idx]);
        terms[md.idx] = md.weight * s;
    });
    return std::sqrt(pairwise_sum(terms));
}

/// Largest |c(m) - conj(c(-m))| over the self-conjugate planes.
inline double hermitian_defect(const SpectralField& f) {
    double worst = 0.0;
    for_each_mode(f.grid, [&](const Mode& md) {
        if (!md.conj_plane) return;
        const std::size_t j = conj_index(f.grid, md);
        for (int c = 0; c < f.grid.dim; ++c) {
            const Complex d = f.comp[c][md.idx] - std::conj(f.comp[c][j]);
            worst = std::max(worst, std::abs(d));
        }
    });
    return worst;
}

/// Replace self-conjugate-plane pairs by their Hermitian average.
inline void symmetrize_hermitian(SpectralField& f) {
    for_each_mode(f.grid, [&](const Mode& md) {
        if (!md.conj_plane) return;
        const std::size_t j = conj_index(f.grid, md);
        if (j < md.idx) return;  // each pair once
        for (int c = 0; c < f.grid.dim; ++c) {
            const Complex a = f.comp[c][md.idx];
            const Complex b = f.comp[c][j];
            const Complex avg = 0.5 * (a + std::conj(b));
            f.comp[c][md.idx] = avg;
            f.comp[c][j] = std::conj(avg);
        }
    });
}

/// Add the Hermitian pair c e^{i k.x} + conj(c) e^{-i k.x} to one component
/// (a real wave of amplitude 2|c|). Writes the mirror entry when the storage
/// holds both halves of the plane.
inline void add_mode_pair(SpectralField& f, int comp, std::array<int, 3> m, Complex c) {
    const Grid& g = f.grid;
    if (m[g.dim - 1] < 0) {
        for (int a = 0; a < g.dim; ++a) m[a] = -m[a];
        c = std::conj(c);
    }
    const std::size_t idx = mode_index(g, m);
    f.comp[comp][idx] += c;
    if (m[g.dim - 1] == 0 || m[g.dim - 1] == g.n[g.dim - 1] / 2) {
        Mode md;
        md.m = m;
        const std::size_t j = conj_index(g, md);
        if (j != idx) f.comp[comp][j] += std::conj(c);
    }
}

/// max_k |k . c(k)|, the divergence content of the coefficients.
inline double solenoid_defect(const SpectralField& f) {
    double worst = 0.0;
    for_each_mode(f.grid, [&](const Mode& md) {
        Complex dot{};
        for (int c = 0; c < f.grid.dim; ++c) dot += md.k[c] * f.comp[c][md.idx];
        worst = std::max(worst, std::abs(dot));
    });
    return worst;
}

inline double max_abs(const RealField& f) {
    double m = 0.0;
    const std::size_t npts = f.grid.real_size();
    for (std::size_t i = 0; i < npts; ++i) {
        double s = 0.0;
        for (int c = 0; c < f.grid.dim; ++c) s += f.comp[c][i] * f.comp[c][i];
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

}  // namespace apf
