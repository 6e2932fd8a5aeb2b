#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace apf {

inline constexpr double kTwoPi = 6.28318530717958647692528676656;

/// Periodic collocation grid on a d-torus (d = 2 or 3).
///
/// Axis i carries n[i] collocation points (even, >= 4) on a box of length
/// box[i]; wavenumbers are k_j = 2*pi*m_j / box[j] with m_j in the centered
/// range. Spectral data is stored half-complex on the last axis
/// (indices 0..n/2), the other half being implied by Hermitian symmetry.
struct Grid {
    int dim = 3;
    std::array<int, 3> n{0, 0, 0};
    std::array<double, 3> box{kTwoPi, kTwoPi, kTwoPi};

    void validate() const {
        if (dim != 2 && dim != 3)
            throw std::invalid_argument("Grid: dim must be 2 or 3");
        for (int a = 0; a < dim; ++a) {
            if (n[a] < 4 || n[a] % 2 != 0)
                throw std::invalid_argument("Grid: n[" + std::to_string(a) +
                                            "] must be even and >= 4");
            if (!(box[a] > 0.0))
                throw std::invalid_argument("Grid: box[" + std::to_string(a) +
                                            "] must be positive");
        }
    }

    int half() const { return n[dim - 1] / 2 + 1; }

    std::size_t real_size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n[a]);
        return s;
    }

    std::size_t spec_size() const {
        std::size_t s = static_cast<std::size_t>(half());
        for (int a = 0; a + 1 < dim; ++a) s *= static_cast<std::size_t>(n[a]);
        return s;
    }

    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= box[a];
        return v;
    }

    double cell_volume() const { return volume() / static_cast<double>(real_size()); }

    double wavenumber(int axis, int m) const { return kTwoPi * m / box[axis]; }

    /// Largest retained |k| (Nyquist excluded on every axis).
    double k_max() const {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) {
            double ka = wavenumber(a, n[a] / 2 - 1);
            s += ka * ka;
        }
        return std::sqrt(s);
    }

    bool operator==(const Grid& o) const {
        if (dim != o.dim) return false;
        for (int a = 0; a < dim; ++a)
            if (n[a] != o.n[a] || box[a] != o.box[a]) return false;
        return true;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

/// One stored spectral mode. `weight` is the Parseval multiplicity of the
/// stored coefficient (2 off the self-conjugate planes of the half layout).
struct Mode {
    std::array<int, 3> m{0, 0, 0};
    std::array<double, 3> k{0.0, 0.0, 0.0};
    double k2 = 0.0;
    std::size_t idx = 0;
    double weight = 1.0;
    bool conj_plane = false;  // partner mode lives in the stored half too
    bool nyquist = false;     // some |m_j| == n_j/2

    bool zero() const { return m[0] == 0 && m[1] == 0 && m[2] == 0; }
};

namespace detail {
inline int signed_mode(int i, int nn) { return i <= nn / 2 ? i : i - nn; }
}

template <class F>
inline void for_each_mode(const Grid& g, F&& f) {
    Mode md;
    if (g.dim == 3) {
        const int n0 = g.n[0], n1 = g.n[1], n2 = g.n[2];
        const int h = n2 / 2 + 1;
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n0; ++i0) {
            const int m0 = detail::signed_mode(i0, n0);
            const double k0 = g.wavenumber(0, m0);
            for (int i1 = 0; i1 < n1; ++i1) {
                const int m1 = detail::signed_mode(i1, n1);
                const double k1 = g.wavenumber(1, m1);
                for (int i2 = 0; i2 < h; ++i2, ++idx) {
                    md.m = {m0, m1, i2};
                    md.k = {k0, k1, g.wavenumber(2, i2)};
                    md.k2 = k0 * k0 + k1 * k1 + md.k[2] * md.k[2];
                    md.idx = idx;
                    md.conj_plane = (i2 == 0 || i2 == n2 / 2);
                    md.weight = md.conj_plane ? 1.0 : 2.0;
                    md.nyquist = (i0 == n0 / 2 || i1 == n1 / 2 || i2 == n2 / 2);
                    f(md);
                }
            }
        }
    } else {
        const int n0 = g.n[0], n1 = g.n[1];
        const int h = n1 / 2 + 1;
        std::size_t idx = 0;
        for (int i0 = 0; i0 < n0; ++i0) {
            const int m0 = detail::signed_mode(i0, n0);
            const double k0 = g.wavenumber(0, m0);
            for (int i1 = 0; i1 < h; ++i1, ++idx) {
                md.m = {m0, i1, 0};
                md.k = {k0, g.wavenumber(1, i1), 0.0};
                md.k2 = k0 * k0 + md.k[1] * md.k[1];
                md.idx = idx;
                md.conj_plane = (i1 == 0 || i1 == n1 / 2);
                md.weight = md.conj_plane ? 1.0 : 2.0;
                md.nyquist = (i0 == n0 / 2 || i1 == n1 / 2);
                f(md);
            }
        }
    }
}

/// Storage index of signed mode numbers m[] (must be representable; the last
/// axis takes m >= 0 only).
inline std::size_t mode_index(const Grid& g, const std::array<int, 3>& m) {
    auto wrap = [](int mm, int nn) { return mm >= 0 ? mm : mm + nn; };
    if (g.dim == 3) {
        const std::size_t h = static_cast<std::size_t>(g.n[2] / 2 + 1);
        return (static_cast<std::size_t>(wrap(m[0], g.n[0])) * g.n[1] +
                wrap(m[1], g.n[1])) * h + static_cast<std::size_t>(m[2]);
    }
    const std::size_t h = static_cast<std::size_t>(g.n[1] / 2 + 1);
    return static_cast<std::size_t>(wrap(m[0], g.n[0])) * h +
           static_cast<std::size_t>(m[1]);
}

/// Index of the Hermitian partner of a mode on a self-conjugate plane.
inline std::size_t conj_index(const Grid& g, const Mode& md) {
    auto neg = [](int m, int nn) { return m == 0 ? 0 : (m > 0 ? nn - m : -m); };
    if (g.dim == 3) {
        const std::size_t h = static_cast<std::size_t>(g.n[2] / 2 + 1);
        const int i0 = neg(md.m[0], g.n[0]);
        const int i1 = neg(md.m[1], g.n[1]);
        return (static_cast<std::size_t>(i0) * g.n[1] + i1) * h +
               static_cast<std::size_t>(md.m[2]);
    }
    const std::size_t h = static_cast<std::size_t>(g.n[1] / 2 + 1);
    return static_cast<std::size_t>(neg(md.m[0], g.n[0])) * h +
           static_cast<std::size_t>(md.m[1]);
}

/// Grid scaled by num/den per axis (box unchanged); used for dealiasing pads.
inline Grid padded_grid(const Grid& g, int num, int den) {
    Grid p = g;
    for (int a = 0; a < g.dim; ++a) {
        p.n[a] = g.n[a] * num / den;
        if (p.n[a] % 2 != 0) ++p.n[a];
    }
    return p;
}

}  // namespace apf
