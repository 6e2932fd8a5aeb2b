#pragma once

#include "apf/params.hpp"
#include "apf/spectral.hpp"

namespace apf {

/// Leray-projected right-hand side of the order-parameter equation.
struct Tendency {
    SpectralField dpdt;
};

/// Strong-form defect of a candidate pair (u~, p~); both parts projected,
/// so pressure gradients never appear.
struct Residual {
    SpectralField r1;
    SpectralField r2;
};

/// (a . grad) b, dealiased on the 3/2 pad. Not projected; callers decide.
inline SpectralField advect(const Workspace& ws, const SpectralField& a,
                            const SpectralField& b) {
    check_same_grid(a.grid, b.grid, "advect");
    check_same_grid(a.grid, ws.grid(), "advect");
    const int d = a.grid.dim;
    const RealField ar = ws.to_padded(a, ws.pad32());
    const auto db = ws.gradient_padded(b, ws.pad32());
    RealField w(ws.pad32().grid());
    const std::size_t n = w.grid.real_size();
    for (int i = 0; i < d; ++i)
        for (std::size_t x = 0; x < n; ++x) {
            double s = 0.0;
            for (int j = 0; j < d; ++j)
                s += ar.comp[j][x] * db[static_cast<std::size_t>(i) * d + j][x];
            w.comp[i][x] = s;
        }
    return ws.from_padded(w, ws.pad32());
}

/// |p|^2 p, dealiased on the 2x pad.
inline SpectralField cubic(const Workspace& ws, const SpectralField& p) {
    check_same_grid(p.grid, ws.grid(), "cubic");
    const int d = p.grid.dim;
    const RealField pr = ws.to_padded(p, ws.pad2());
    RealField w(ws.pad2().grid());
    const std::size_t n = w.grid.real_size();
    for (std::size_t x = 0; x < n; ++x) {
        double p2 = 0.0;
        for (int j = 0; j < d; ++j) p2 += pr.comp[j][x] * pr.comp[j][x];
        for (int i = 0; i < d; ++i) w.comp[i][x] = p2 * pr.comp[i][x];
    }
    return ws.from_padded(w, ws.pad2());
}

namespace detail {
/// (grad u)_skw p (sign = -1) or (grad u)_sym p (sign = +1), with the
/// gradient convention (grad u)_ij = du_i/dx_j.
inline SpectralField gradu_coupling(const Workspace& ws, const SpectralField& u,
                                    const SpectralField& p, double sign) {
    check_same_grid(u.grid, p.grid, "gradu_coupling");
    const int d = u.grid.dim;
    const auto du = ws.gradient_padded(u, ws.pad32());
    const RealField pr = ws.to_padded(p, ws.pad32());
    RealField w(ws.pad32().grid());
    const std::size_t n = w.grid.real_size();
    for (int i = 0; i < d; ++i)
        for (std::size_t x = 0; x < n; ++x) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                const double dij = du[static_cast<std::size_t>(i) * d + j][x];
                const double dji = du[static_cast<std::size_t>(j) * d + i][x];
                s += 0.5 * (dij + sign * dji) * pr.comp[j][x];
            }
            w.comp[i][x] = s;
        }
    return ws.from_padded(w, ws.pad32());
}
}  // namespace detail

inline SpectralField vorticity_coupling(const Workspace& ws, const SpectralField& u,
                                        const SpectralField& p) {
    return detail::gradu_coupling(ws, u, p, -1.0);
}

inline SpectralField strain_coupling(const Workspace& ws, const SpectralField& u,
                                     const SpectralField& p) {
    return detail::gradu_coupling(ws, u, p, +1.0);
}

/// Inverse Stokes operator: per mode k != 0, P(k) f(k) / |k|^2; the k = 0
/// mode is pinned to zero (no mean flow).
inline SpectralField stokes_inverse(const SpectralField& f) {
    SpectralField r = f;
    const int d = f.grid.dim;
    for_each_mode(f.grid, [&](const Mode& md) {
        if (md.k2 == 0.0) {
            for (int c = 0; c < d; ++c) r.comp[c][md.idx] = Complex{};
            return;
        }
        Complex dot{};
        for (int c = 0; c < d; ++c) dot += md.k[c] * f.comp[c][md.idx];
        const Complex s = dot / md.k2;
        for (int c = 0; c < d; ++c)
            r.comp[c][md.idx] = (f.comp[c][md.idx] - md.k[c] * s) / md.k2;
    });
    r.solenoidal = true;
    return r;
}

namespace detail {
/// u from the Stokes balance given the (already dealiased) advection term.
inline SpectralField velocity_from(const SpectralField& p, const SpectralField* adv_pp,
                                   const ModelParams& prm) {
    SpectralField forcing(p.grid);
    const int d = p.grid.dim;
    for_each_mode(p.grid, [&](const Mode& md) {
        const double diag = -(prm.mu1 * md.k2 * md.k2 + prm.gamma1 * md.k2);
        for (int c = 0; c < d; ++c) {
            Complex v = diag * p.comp[c][md.idx];
            if (adv_pp) v -= prm.lambda1 * adv_pp->comp[c][md.idx];
            forcing.comp[c][md.idx] = v;
        }
    });
    return stokes_inverse(forcing);
}
}  // namespace detail

/// Instantaneous velocity u(p) from the Stokes balance; identically zero in
/// the decoupled case.
inline SpectralField solve_u(const Workspace& ws, const SpectralField& p,
                             const ModelParams& prm) {
    if (!prm.coupled()) {
        SpectralField u(p.grid);
        u.solenoidal = true;
        return u;
    }
    SpectralField adv_pp;
    const SpectralField* advp = nullptr;
    if (prm.lambda1 != 0.0) {
        adv_pp = advect(ws, p, p);
        advp = &adv_pp;
    }
    return detail::velocity_from(p, advp, prm);
}

/// Projected tendency of p given p and u.
inline Tendency rhs_p(const Workspace& ws, const SpectralField& p, const SpectralField& u,
                      const ModelParams& prm) {
    const int d = p.grid.dim;
    SpectralField sum(p.grid);
    for_each_mode(p.grid, [&](const Mode& md) {
        const double lin = prm.base.mu2 * md.k2 * md.k2 + prm.base.gamma2 * md.k2 + prm.base.beta;
        for (int c = 0; c < d; ++c) sum.comp[c][md.idx] = lin * p.comp[c][md.idx];
    });
    if (prm.base.lambda2 != 0.0) axpy(sum, prm.base.lambda2, advect(ws, p, p));
    if (prm.base.alpha != 0.0) axpy(sum, prm.base.alpha, cubic(ws, p));
    if (coeff_norm(u) > 0.0) {
        axpy(sum, 1.0, advect(ws, u, p));
        axpy(sum, -1.0, vorticity_coupling(ws, u, p));
        if (prm.base.kappa != 0.0) axpy(sum, prm.base.kappa, strain_coupling(ws, u, p));
    }
    scale(sum, -1.0);
    leray_project_inplace(sum);
    return Tendency{std::move(sum)};
}

/// Strong-form residual of (u_t, p_t) with the supplied time derivative.
inline Residual residual(const Workspace& ws, const SpectralField& u_t,
                         const SpectralField& p_t, const SpectralField& dpdt_t,
                         const ModelParams& prm) {
    check_same_grid(u_t.grid, p_t.grid, "residual");
    check_same_grid(p_t.grid, dpdt_t.grid, "residual");
    const int d = p_t.grid.dim;

    SpectralField adv_pp = advect(ws, p_t, p_t);

    SpectralField r1(p_t.grid);
    for_each_mode(p_t.grid, [&](const Mode& md) {
        const double lin_u = md.k2;                                       // -Lap u
        const double lin_p = prm.mu1 * md.k2 * md.k2 + prm.gamma1 * md.k2;  // mu1 Lap^2 p - gamma1 Lap p
        for (int c = 0; c < d; ++c)
            r1.comp[c][md.idx] = lin_u * u_t.comp[c][md.idx] + lin_p * p_t.comp[c][md.idx] +
                                 prm.lambda1 * adv_pp.comp[c][md.idx];
    });
    leray_project_inplace(r1);

    SpectralField r2 = dpdt_t;
    for_each_mode(p_t.grid, [&](const Mode& md) {
        const double lin = prm.base.mu2 * md.k2 * md.k2 + prm.base.gamma2 * md.k2 + prm.base.beta;
        for (int c = 0; c < d; ++c) r2.comp[c][md.idx] += lin * p_t.comp[c][md.idx];
    });
    axpy(r2, prm.base.lambda2, adv_pp);
    axpy(r2, prm.base.alpha, cubic(ws, p_t));
    axpy(r2, 1.0, advect(ws, u_t, p_t));
    axpy(r2, -1.0, vorticity_coupling(ws, u_t, p_t));
    leray_project_inplace(r2);

    return Residual{std::move(r1), std::move(r2)};
}

/// Fused per-stage evaluation of u(p) and the projected tendency; shares
/// padded physical factors between the advection, transport and coupling
/// terms. Matches solve_u + rhs_p exactly (same dealiased products).
class RhsEvaluator {
  public:
    RhsEvaluator(const Workspace& ws, const ModelParams& prm)
        : ws_(ws),
          prm_(prm),
          big32_(ws.pad32().grid()),
          gcomp_(ws.pad32().grid()),
          pphys_(ws.pad32().grid()),
          uphys_(ws.pad32().grid()),
          gphys_(ws.pad32().grid()),
          work_(ws.pad32().grid()),
          big2_(ws.pad2().grid()),
          p2phys_(ws.pad2().grid()),
          w2_(ws.pad2().grid()),
          dp_(static_cast<std::size_t>(ws.grid().dim) * ws.grid().dim),
          du_(static_cast<std::size_t>(ws.grid().dim) * ws.grid().dim) {}

    /// p -> (u, dpdt). p must be solenoidal and band-limited. With
    /// include_linear = false only the nonlinear/coupling part is returned
    /// (the integrating-factor stepper handles the diagonal part exactly).
    void eval(const SpectralField& p, SpectralField& u, SpectralField& dpdt,
              bool include_linear = true) {
        const int d = ws_.grid().dim;
        const bool need_adv = prm_.base.lambda2 != 0.0 || prm_.coupled();

        SpectralField adv_pp;
        if (need_adv) {
            to_pad32(p, pphys_);
            gradient_pad32(dp_);
            product_advect(pphys_, dp_, work_);
            adv_pp = ws_.from_padded(work_, ws_.pad32());
        }

        u = prm_.coupled()
                ? detail::velocity_from(p, prm_.lambda1 != 0.0 ? &adv_pp : nullptr, prm_)
                : SpectralField(p.grid);
        u.solenoidal = true;

        // linear part of -dpdt
        if (dpdt.grid != p.grid) dpdt = SpectralField(p.grid);
        for_each_mode(p.grid, [&](const Mode& md) {
            const double lin =
                include_linear
                    ? prm_.base.mu2 * md.k2 * md.k2 + prm_.base.gamma2 * md.k2 + prm_.base.beta
                    : 0.0;
            for (int c = 0; c < d; ++c) dpdt.comp[c][md.idx] = lin * p.comp[c][md.idx];
        });

        if (need_adv) axpy(dpdt, prm_.base.lambda2, adv_pp);

        if (prm_.coupled()) {
            // transport + rotation (+ strain when kappa != 0), one pass
            to_pad32(u, uphys_);
            gradient_pad32(du_);  // consumes big32_ holding u
            const std::size_t n = ws_.pad32().grid().real_size();
            const double kp = prm_.base.kappa;
            for (int i = 0; i < d; ++i)
                for (std::size_t x = 0; x < n; ++x) {
                    double s = 0.0;
                    for (int j = 0; j < d; ++j) {
                        const double dij = du_[static_cast<std::size_t>(i) * d + j][x];
                        const double dji = du_[static_cast<std::size_t>(j) * d + i][x];
                        s += uphys_.comp[j][x] * dp_[static_cast<std::size_t>(i) * d + j][x];
                        s -= 0.5 * (dij - dji) * pphys_.comp[j][x];
                        if (kp != 0.0) s += kp * 0.5 * (dij + dji) * pphys_.comp[j][x];
                    }
                    work_.comp[i][x] = s;
                }
            axpy(dpdt, 1.0, ws_.from_padded(work_, ws_.pad32()));
        }

        if (prm_.base.alpha != 0.0) {
            embed(p, big2_);
            ws_.pad2().inverse_unchecked(big2_, p2phys_);
            const std::size_t n = ws_.pad2().grid().real_size();
            for (std::size_t x = 0; x < n; ++x) {
                double p2 = 0.0;
                for (int j = 0; j < d; ++j) p2 += p2phys_.comp[j][x] * p2phys_.comp[j][x];
                for (int i = 0; i < d; ++i) w2_.comp[i][x] = p2 * p2phys_.comp[i][x];
            }
            axpy(dpdt, prm_.base.alpha, ws_.from_padded(w2_, ws_.pad2()));
        }

        scale(dpdt, -1.0);
        leray_project_inplace(dpdt);
    }

    const ModelParams& params() const { return prm_; }

  private:
    void to_pad32(const SpectralField& f, RealField& out) {
        embed(f, big32_);
        ws_.pad32().inverse_unchecked(big32_, out);
    }

    // gradient of whatever big32_ currently holds
    void gradient_pad32(std::vector<std::vector<double>>& out) {
        const int d = ws_.grid().dim;
        const Grid& pg = ws_.pad32().grid();
        for (int j = 0; j < d; ++j) {
            for_each_mode(pg, [&](const Mode& md) {
                const Complex ik(0.0, md.k[j]);
                for (int c = 0; c < d; ++c) gcomp_.comp[c][md.idx] = ik * big32_.comp[c][md.idx];
            });
            ws_.pad32().inverse_unchecked(gcomp_, gphys_);
            for (int i = 0; i < d; ++i) out[static_cast<std::size_t>(i) * d + j] = gphys_.comp[i];
        }
    }

    static void product_advect(const RealField& a, const std::vector<std::vector<double>>& db,
                               RealField& out) {
        const int d = a.grid.dim;
        const std::size_t n = a.grid.real_size();
        for (int i = 0; i < d; ++i)
            for (std::size_t x = 0; x < n; ++x) {
                double s = 0.0;
                for (int j = 0; j < d; ++j)
                    s += a.comp[j][x] * db[static_cast<std::size_t>(i) * d + j][x];
                out.comp[i][x] = s;
            }
    }

    const Workspace& ws_;
    ModelParams prm_;
    SpectralField big32_, gcomp_;
    RealField pphys_, uphys_, gphys_, work_;
    SpectralField big2_;
    RealField p2phys_, w2_;
    std::vector<std::vector<double>> dp_, du_;
};

}  // namespace apf
