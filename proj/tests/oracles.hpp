// Test-only reference implementations, independent of the library's FFT and
// padded-product code paths: direct O(N^2) discrete transforms, sparse
// convolution sums and refined-grid quadrature.
#pragma once

#include <complex>
#include <map>
#include <vector>

#include "apf/field.hpp"

namespace oracle {

using apf::Complex;
using apf::Grid;
using apf::RealField;
using apf::SpectralField;

struct Entry {
    std::array<int, 3> m{0, 0, 0};
    std::array<Complex, 3> v{};
};

inline std::array<double, 3> wavevector(const Grid& g, const std::array<int, 3>& m) {
    std::array<double, 3> k{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) k[a] = apf::kTwoPi * m[a] / g.box[a];
    return k;
}

// Stored coefficient at signed mode m (conjugate lookup for m_last < 0).
inline std::array<Complex, 3> coeff_at(const SpectralField& f, std::array<int, 3> m) {
    const Grid& g = f.grid;
    bool conj = m[g.dim - 1] < 0;
    if (conj)
        for (int a = 0; a < g.dim; ++a) m[a] = -m[a];
    const std::size_t idx = apf::mode_index(g, m);
    std::array<Complex, 3> out{};
    for (int c = 0; c < g.dim; ++c)
        out[c] = conj ? std::conj(f.comp[c][idx]) : f.comp[c][idx];
    return out;
}

// All nonzero non-Nyquist modes of both half-spaces.
inline std::vector<Entry> sparse_entries(const SpectralField& f) {
    std::vector<Entry> out;
    apf::for_each_mode(f.grid, [&](const apf::Mode& md) {
        if (md.nyquist) return;
        bool nz = false;
        for (int c = 0; c < f.grid.dim; ++c)
            if (f.comp[c][md.idx] != Complex{}) nz = true;
        if (!nz) return;
        Entry e;
        e.m = md.m;
        for (int c = 0; c < f.grid.dim; ++c) e.v[c] = f.comp[c][md.idx];
        out.push_back(e);
        if (md.conj_plane) return;  // mirror of interior modes is implicit...
        Entry em;                   // ...so add it explicitly for the sums
        for (int a = 0; a < 3; ++a) em.m[a] = -md.m[a];
        for (int c = 0; c < f.grid.dim; ++c) em.v[c] = std::conj(e.v[c]);
        out.push_back(em);
    });
    // conj-plane modes store both halves already except the implicit mirror
    // of the half axis; nothing else to add: on those planes m_last == 0 or
    // Nyquist (excluded), and m_last == 0 mirrors live in the plane itself.
    return out;
}

using ModeMap = std::map<std::array<int, 3>, std::array<Complex, 3>>;

inline void accumulate(ModeMap& map, const std::array<int, 3>& m,
                       const std::array<Complex, 3>& v) {
    auto& slot = map[m];
    for (int c = 0; c < 3; ++c) slot[c] += v[c];
}

/// Direct convolution of (a . grad) b.
inline ModeMap conv_advect(const Grid& g, const std::vector<Entry>& a,
                           const std::vector<Entry>& b) {
    ModeMap out;
    for (const Entry& ea : a)
        for (const Entry& eb : b) {
            const auto kb = wavevector(g, eb.m);
            Complex adotk{};
            for (int j = 0; j < g.dim; ++j) adotk += ea.v[j] * kb[j];
            const Complex w = Complex(0, 1) * adotk;
            std::array<int, 3> m{ea.m[0] + eb.m[0], ea.m[1] + eb.m[1], ea.m[2] + eb.m[2]};
            std::array<Complex, 3> val{};
            for (int c = 0; c < g.dim; ++c) val[c] = w * eb.v[c];
            accumulate(out, m, val);
        }
    return out;
}

/// Componentwise product a_i b_i.
inline ModeMap conv_hadamard(const Grid& g, const std::vector<Entry>& a,
                             const std::vector<Entry>& b) {
    ModeMap out;
    for (const Entry& ea : a)
        for (const Entry& eb : b) {
            std::array<int, 3> m{ea.m[0] + eb.m[0], ea.m[1] + eb.m[1], ea.m[2] + eb.m[2]};
            std::array<Complex, 3> val{};
            for (int c = 0; c < g.dim; ++c) val[c] = ea.v[c] * eb.v[c];
            accumulate(out, m, val);
        }
    return out;
}

inline ModeMap conv_hadamard3(const Grid& g, const std::vector<Entry>& a,
                              const std::vector<Entry>& b, const std::vector<Entry>& c) {
    ModeMap out;
    for (const Entry& ea : a)
        for (const Entry& eb : b)
            for (const Entry& ec : c) {
                std::array<int, 3> m{ea.m[0] + eb.m[0] + ec.m[0], ea.m[1] + eb.m[1] + ec.m[1],
                                     ea.m[2] + eb.m[2] + ec.m[2]};
                std::array<Complex, 3> val{};
                for (int cc = 0; cc < g.dim; ++cc) val[cc] = ea.v[cc] * eb.v[cc] * ec.v[cc];
                accumulate(out, m, val);
            }
    return out;
}

/// |p|^2 p by a literal triple sum.
inline ModeMap conv_cubic(const Grid& g, const std::vector<Entry>& p) {
    ModeMap out;
    for (const Entry& ea : p)
        for (const Entry& eb : p) {
            Complex dot{};
            for (int j = 0; j < g.dim; ++j) dot += ea.v[j] * eb.v[j];
            for (const Entry& ec : p) {
                std::array<int, 3> m{ea.m[0] + eb.m[0] + ec.m[0], ea.m[1] + eb.m[1] + ec.m[1],
                                     ea.m[2] + eb.m[2] + ec.m[2]};
                std::array<Complex, 3> val{};
                for (int cc = 0; cc < g.dim; ++cc) val[cc] = dot * ec.v[cc];
                accumulate(out, m, val);
            }
        }
    return out;
}

/// (grad u)_skw p (sign -1) or (grad u)_sym p (sign +1).
inline ModeMap conv_gradu(const Grid& g, const std::vector<Entry>& u,
                          const std::vector<Entry>& p, double sign) {
    ModeMap out;
    for (const Entry& eu : u) {
        const auto k1 = wavevector(g, eu.m);
        for (const Entry& ep : p) {
            Complex k1dotp{}, udotp{};
            for (int j = 0; j < g.dim; ++j) {
                k1dotp += k1[j] * ep.v[j];
                udotp += eu.v[j] * ep.v[j];
            }
            std::array<int, 3> m{eu.m[0] + ep.m[0], eu.m[1] + ep.m[1], eu.m[2] + ep.m[2]};
            std::array<Complex, 3> val{};
            const Complex ihalf(0, 0.5);
            for (int c = 0; c < g.dim; ++c)
                val[c] = ihalf * (k1dotp * eu.v[c] + sign * udotp * k1[c]);
            accumulate(out, m, val);
        }
    }
    return out;
}

/// Largest |library(m) - oracle(m)| over the base band (Nyquist excluded),
/// including oracle modes that fall outside the band only if the band ought
/// to contain them.
inline double max_band_diff(const SpectralField& lib, const ModeMap& ref) {
    const Grid& g = lib.grid;
    double worst = 0.0;
    apf::for_each_mode(g, [&](const apf::Mode& md) {
        if (md.nyquist) return;
        std::array<Complex, 3> want{};
        auto it = ref.find(md.m);
        if (it != ref.end()) want = it->second;
        for (int c = 0; c < g.dim; ++c)
            worst = std::max(worst, std::abs(lib.comp[c][md.idx] - want[c]));
    });
    return worst;
}

/// Direct evaluation of the field at point x from sparse entries.
inline std::array<double, 3> eval_at(const Grid& g, const std::vector<Entry>& entries,
                                     const std::array<double, 3>& x) {
    std::array<Complex, 3> acc{};
    for (const Entry& e : entries) {
        const auto k = wavevector(g, e.m);
        double phase = 0.0;
        for (int a = 0; a < g.dim; ++a) phase += k[a] * x[a];
        const Complex ph(std::cos(phase), std::sin(phase));
        for (int c = 0; c < g.dim; ++c) acc[c] += e.v[c] * ph;
    }
    return {acc[0].real(), acc[1].real(), acc[2].real()};
}

/// Riemann quadrature of f.g over the torus on an independent refined grid.
inline double quadrature_inner(const SpectralField& f, const SpectralField& h, int refine) {
    const Grid& g = f.grid;
    const auto ef = sparse_entries(f);
    const auto eh = sparse_entries(h);
    std::array<int, 3> pts{1, 1, 1};
    for (int a = 0; a < g.dim; ++a) pts[a] = refine * g.n[a] / 2;
    double sum = 0.0;
    std::array<double, 3> x{0, 0, 0};
    for (int i0 = 0; i0 < pts[0]; ++i0) {
        x[0] = g.box[0] * i0 / pts[0];
        for (int i1 = 0; i1 < pts[1]; ++i1) {
            x[1] = g.box[1] * i1 / pts[1];
            for (int i2 = 0; i2 < pts[2]; ++i2) {
                x[2] = g.dim == 3 ? g.box[2] * i2 / pts[2] : 0.0;
                const auto fv = eval_at(g, ef, x);
                const auto hv = eval_at(g, eh, x);
                double dot = 0.0;
                for (int c = 0; c < g.dim; ++c) dot += fv[c] * hv[c];
                sum += dot;
            }
        }
    }
    double cell = 1.0;
    for (int a = 0; a < g.dim; ++a) cell *= g.box[a] / pts[a];
    return sum * cell;
}

/// Direct O(N^2) DFT of collocation values: coefficient at signed mode m.
inline Complex direct_dft(const RealField& f, int comp, const std::array<int, 3>& m) {
    const Grid& g = f.grid;
    const auto k = wavevector(g, m);
    Complex acc{};
    std::size_t idx = 0;
    std::array<int, 3> pts{g.n[0], g.n[1], g.dim == 3 ? g.n[2] : 1};
    for (int i0 = 0; i0 < pts[0]; ++i0)
        for (int i1 = 0; i1 < pts[1]; ++i1)
            for (int i2 = 0; i2 < pts[2]; ++i2, ++idx) {
                const double x0 = g.box[0] * i0 / g.n[0];
                const double x1 = g.box[1] * i1 / g.n[1];
                const double x2 = g.dim == 3 ? g.box[2] * i2 / g.n[2] : 0.0;
                const double phase = k[0] * x0 + k[1] * x1 + k[2] * x2;
                acc += f.comp[comp][idx] * Complex(std::cos(phase), -std::sin(phase));
            }
    return acc / static_cast<double>(g.real_size());
}

}  // namespace oracle
