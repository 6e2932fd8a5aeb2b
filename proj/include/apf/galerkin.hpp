#pragma once

#include "apf/integrate.hpp"

namespace apf {

/// Dense full-spectrum truncation: every mode with |m_j| <= K, both
/// half-spaces stored explicitly. Used by the brute-force reference stepper,
/// which assembles the nonlinear terms by literal convolution sums
/// (no FFT, no padding).
struct BoxField {
    int dim = 3;
    int K = 0;
    std::array<double, 3> box{kTwoPi, kTwoPi, kTwoPi};
    std::vector<std::vector<Complex>> comp;

    BoxField() = default;
    BoxField(int d, int k, const std::array<double, 3>& b)
        : dim(d), K(k), box(b), comp(d, std::vector<Complex>(count(), Complex{})) {}

    int side() const { return 2 * K + 1; }
    std::size_t count() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(side());
        return s;
    }
    std::size_t index(const std::array<int, 3>& m) const {
        std::size_t i = static_cast<std::size_t>(m[0] + K);
        for (int a = 1; a < dim; ++a) i = i * side() + static_cast<std::size_t>(m[a] + K);
        return i;
    }
    double kcomp(int axis, int m) const { return kTwoPi * m / box[axis]; }
    void zero() {
        for (auto& v : comp) std::fill(v.begin(), v.end(), Complex{});
    }
};

template <class F>
inline void for_each_box_mode(const BoxField& b, F&& f) {
    std::array<int, 3> m{0, 0, 0};
    if (b.dim == 3) {
        std::size_t idx = 0;
        for (m[0] = -b.K; m[0] <= b.K; ++m[0])
            for (m[1] = -b.K; m[1] <= b.K; ++m[1])
                for (m[2] = -b.K; m[2] <= b.K; ++m[2], ++idx) f(m, idx);
    } else {
        std::size_t idx = 0;
        for (m[0] = -b.K; m[0] <= b.K; ++m[0])
            for (m[1] = -b.K; m[1] <= b.K; ++m[1], ++idx) f(m, idx);
    }
}

inline BoxField box_from_spectral(const SpectralField& f, int K) {
    const Grid& g = f.grid;
    for (int a = 0; a < g.dim; ++a)
        if (K > g.n[a] / 2 - 1)
            throw std::invalid_argument("box_from_spectral: cutoff exceeds grid band");
    BoxField b(g.dim, K, g.box);
    for_each_box_mode(b, [&](const std::array<int, 3>& m, std::size_t idx) {
        std::array<int, 3> mm = m;
        bool conj = mm[g.dim - 1] < 0;
        if (conj)
            for (int a = 0; a < g.dim; ++a) mm[a] = -mm[a];
        const std::size_t src = mode_index(g, mm);
        for (int c = 0; c < g.dim; ++c)
            b.comp[c][idx] = conj ? std::conj(f.comp[c][src]) : f.comp[c][src];
    });
    return b;
}

inline SpectralField box_to_spectral(const BoxField& b, const Grid& g) {
    SpectralField f(g);
    for_each_mode(g, [&](const Mode& md) {
        if (md.nyquist) return;
        bool in = true;
        for (int a = 0; a < g.dim; ++a)
            if (md.m[a] < -b.K || md.m[a] > b.K) in = false;
        if (!in) return;
        const std::size_t src = b.index(md.m);
        for (int c = 0; c < g.dim; ++c) f.comp[c][md.idx] = b.comp[c][src];
    });
    return f;
}

namespace galerkin_detail {

inline bool in_box(const std::array<int, 3>& m, int dim, int K) {
    for (int a = 0; a < dim; ++a)
        if (m[a] < -K || m[a] > K) return false;
    return true;
}

/// out_i(k) += sum_{k1+k2=k} i (a(k1) . kappa(k2)) b_i(k2)  == (a.grad)b
inline void conv_transport(const BoxField& a, const BoxField& b, BoxField& out) {
    const int d = a.dim;
    for_each_box_mode(a, [&](const std::array<int, 3>& m1, std::size_t i1) {
        for_each_box_mode(b, [&](const std::array<int, 3>& m2, std::size_t i2) {
            std::array<int, 3> m{m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]};
            if (!in_box(m, d, out.K)) return;
            Complex adotk{};
            for (int j = 0; j < d; ++j) adotk += a.comp[j][i1] * b.kcomp(j, m2[j]);
            const Complex w = Complex(0.0, 1.0) * adotk;
            const std::size_t io = out.index(m);
            for (int i = 0; i < d; ++i) out.comp[i][io] += w * b.comp[i][i2];
        });
    });
}

/// scalar s(k) = sum_{k1+k2=k} a(k1) . b(k2) over the (Ka+Kb) box
inline std::vector<Complex> conv_dot(const BoxField& a, const BoxField& b, int Kout) {
    const int d = a.dim;
    BoxField shape(d, Kout, a.box);  // index helper only
    std::vector<Complex> s(shape.count(), Complex{});
    for_each_box_mode(a, [&](const std::array<int, 3>& m1, std::size_t i1) {
        for_each_box_mode(b, [&](const std::array<int, 3>& m2, std::size_t i2) {
            std::array<int, 3> m{m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]};
            if (!in_box(m, d, Kout)) return;
            Complex dot{};
            for (int j = 0; j < d; ++j) dot += a.comp[j][i1] * b.comp[j][i2];
            s[shape.index(m)] += dot;
        });
    });
    return s;
}

/// out_i(k) += sum s(k1) p_i(k2), s given on the Ks box
inline void conv_scalar_vec(const std::vector<Complex>& s, int Ks, const BoxField& p,
                            BoxField& out) {
    const int d = p.dim;
    BoxField shape(d, Ks, p.box);
    for_each_box_mode(shape, [&](const std::array<int, 3>& m1, std::size_t i1) {
        const Complex sv = s[i1];
        if (sv == Complex{}) return;
        for_each_box_mode(p, [&](const std::array<int, 3>& m2, std::size_t i2) {
            std::array<int, 3> m{m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]};
            if (!in_box(m, d, out.K)) return;
            const std::size_t io = out.index(m);
            for (int i = 0; i < d; ++i) out.comp[i][io] += sv * p.comp[i][i2];
        });
    });
}

/// out_i(k) += 1/2 i sum [ (k1.p(k2)) u_i(k1) + sign (u(k1).p(k2)) k1_i ]
/// sign -1: (grad u)_skw p ; sign +1: (grad u)_sym p
inline void conv_gradu(const BoxField& u, const BoxField& p, double sign, BoxField& out) {
    const int d = u.dim;
    for_each_box_mode(u, [&](const std::array<int, 3>& m1, std::size_t i1) {
        for_each_box_mode(p, [&](const std::array<int, 3>& m2, std::size_t i2) {
            std::array<int, 3> m{m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]};
            if (!in_box(m, d, out.K)) return;
            Complex k1dotp{};
            Complex udotp{};
            for (int j = 0; j < d; ++j) {
                k1dotp += u.kcomp(j, m1[j]) * p.comp[j][i2];
                udotp += u.comp[j][i1] * p.comp[j][i2];
            }
            const Complex ihalf(0.0, 0.5);
            const std::size_t io = out.index(m);
            for (int i = 0; i < d; ++i)
                out.comp[i][io] +=
                    ihalf * (k1dotp * u.comp[i][i1] + sign * udotp * u.kcomp(i, m1[i]));
        });
    });
}

inline void project_modes(BoxField& f) {
    const int d = f.dim;
    for_each_box_mode(f, [&](const std::array<int, 3>& m, std::size_t idx) {
        double k[3] = {0, 0, 0};
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) {
            k[a] = f.kcomp(a, m[a]);
            k2 += k[a] * k[a];
        }
        if (k2 == 0.0) return;
        Complex dot{};
        for (int c = 0; c < d; ++c) dot += k[c] * f.comp[c][idx];
        const Complex s = dot / k2;
        for (int c = 0; c < d; ++c) f.comp[c][idx] -= k[c] * s;
    });
}

}  // namespace galerkin_detail

/// Velocity and tendency of the truncated system assembled by direct
/// convolution sums; the Stokes balance is the same per-mode diagonal solve
/// as in the spectral path.
inline void galerkin_rhs(const BoxField& p, const ModelParams& prm, BoxField& u,
                         BoxField& dpdt) {
    using namespace galerkin_detail;
    const int d = p.dim;

    BoxField adv_pp(d, p.K, p.box);
    conv_transport(p, p, adv_pp);

    u = BoxField(d, p.K, p.box);
    if (prm.coupled()) {
        for_each_box_mode(p, [&](const std::array<int, 3>& m, std::size_t idx) {
            double k[3] = {0, 0, 0};
            double k2 = 0.0;
            for (int a = 0; a < d; ++a) {
                k[a] = p.kcomp(a, m[a]);
                k2 += k[a] * k[a];
            }
            if (k2 == 0.0) return;
            for (int c = 0; c < d; ++c)
                u.comp[c][idx] = -(prm.mu1 * k2 * k2 + prm.gamma1 * k2) * p.comp[c][idx] / k2 -
                                 prm.lambda1 * adv_pp.comp[c][idx] / k2;
        });
        project_modes(u);
    }

    dpdt = BoxField(d, p.K, p.box);
    for_each_box_mode(p, [&](const std::array<int, 3>& m, std::size_t idx) {
        double k2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double ka = p.kcomp(a, m[a]);
            k2 += ka * ka;
        }
        const double lin = prm.base.mu2 * k2 * k2 + prm.base.gamma2 * k2 + prm.base.beta;
        for (int c = 0; c < d; ++c) dpdt.comp[c][idx] = lin * p.comp[c][idx];
    });
    if (prm.base.lambda2 != 0.0)
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < adv_pp.comp[c].size(); ++i)
                dpdt.comp[c][i] += prm.base.lambda2 * adv_pp.comp[c][i];
    if (prm.base.alpha != 0.0) {
        const auto s = conv_dot(p, p, 2 * p.K);
        BoxField cub(d, p.K, p.box);
        conv_scalar_vec(s, 2 * p.K, p, cub);
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < cub.comp[c].size(); ++i)
                dpdt.comp[c][i] += prm.base.alpha * cub.comp[c][i];
    }
    if (prm.coupled()) {
        BoxField t(d, p.K, p.box);
        conv_transport(u, p, t);  // +(u.grad)p
        BoxField skw(d, p.K, p.box);
        conv_gradu(u, p, -1.0, skw);  // (grad u)_skw p, enters with a minus
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < t.comp[c].size(); ++i)
                dpdt.comp[c][i] += t.comp[c][i] - skw.comp[c][i];
        if (prm.base.kappa != 0.0) {
            BoxField sym(d, p.K, p.box);
            conv_gradu(u, p, +1.0, sym);
            for (int c = 0; c < d; ++c)
                for (std::size_t i = 0; i < sym.comp[c].size(); ++i)
                    dpdt.comp[c][i] += prm.base.kappa * sym.comp[c][i];
        }
    }
    for (int c = 0; c < d; ++c)
        for (std::size_t i = 0; i < dpdt.comp[c].size(); ++i) dpdt.comp[c][i] = -dpdt.comp[c][i];
    project_modes(dpdt);
}

/// One classical RK4 step of the truncated convolution system.
inline BoxField galerkin_step_box(const BoxField& p, double dt, const ModelParams& prm) {
    const int d = p.dim;
    BoxField u, k1, k2, k3, k4;
    auto advanced = [&](const BoxField& base, double h, const BoxField& slope) {
        BoxField r = base;
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < r.comp[c].size(); ++i)
                r.comp[c][i] += h * slope.comp[c][i];
        return r;
    };
    galerkin_rhs(p, prm, u, k1);
    galerkin_rhs(advanced(p, 0.5 * dt, k1), prm, u, k2);
    galerkin_rhs(advanced(p, 0.5 * dt, k2), prm, u, k3);
    galerkin_rhs(advanced(p, dt, k3), prm, u, k4);
    BoxField out = p;
    for (int c = 0; c < d; ++c)
        for (std::size_t i = 0; i < out.comp[c].size(); ++i)
            out.comp[c][i] += (dt / 6.0) * (k1.comp[c][i] + 2.0 * k2.comp[c][i] +
                                            2.0 * k3.comp[c][i] + k4.comp[c][i]);
    return out;
}

/// Reference step on the spectral representation: restrict to the cutoff,
/// take one literal RK4 step of the truncated system, lift back.
inline State galerkin_reference_step(const State& s, double dt, const ModelParams& prm,
                                     int basis_cutoff) {
    BoxField b = box_from_spectral(s.p, basis_cutoff);
    if (b.count() > 40000)
        throw std::invalid_argument("galerkin_reference_step: cutoff too large for the dense oracle");
    b = galerkin_step_box(b, dt, prm);
    State out;
    out.t = s.t + dt;
    out.p = box_to_spectral(b, s.p.grid);
    out.p.solenoidal = true;
    return out;
}

/// Run the oracle for n_steps, sampling like integrate().
inline Trajectory galerkin_integrate(const Grid& grid, const ModelParams& prm,
                                     const SpectralField& p0, double dt, long n_steps,
                                     int sample_every, int basis_cutoff) {
    BoxField b = box_from_spectral(p0, basis_cutoff);
    Trajectory traj;
    traj.params = prm;
    traj.grid = grid;
    traj.dt = dt;
    traj.sample_every = sample_every;
    State s;
    s.t = 0.0;
    s.p = box_to_spectral(b, grid);
    s.p.solenoidal = true;
    traj.states.push_back(s);
    for (long n = 1; n <= n_steps; ++n) {
        b = galerkin_step_box(b, dt, prm);
        if (n % sample_every == 0) {
            State sn;
            sn.t = dt * static_cast<double>(n);
            sn.p = box_to_spectral(b, grid);
            sn.p.solenoidal = true;
            traj.states.push_back(std::move(sn));
        }
    }
    return traj;
}

}  // namespace apf
