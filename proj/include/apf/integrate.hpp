#pragma once

#include <functional>
#include <utility>

#include "apf/operators.hpp"

namespace apf {

/// A coefficient went NaN/Inf during time stepping.
struct NonFinite : std::runtime_error {
    long step;
    double time;
    NonFinite(long s, double t)
        : std::runtime_error("non-finite state at step " + std::to_string(s) +
                             ", t = " + std::to_string(t)),
          step(s), time(t) {}
};

struct State {
    double t = 0.0;
    SpectralField p;
};

struct Trajectory {
    std::vector<State> states;
    ModelParams params;
    Grid grid;
    double dt = 0.0;
    int sample_every = 1;
};

/// Per-mode decay rate of the linearized equation,
/// L(k) = -(mu2 |k|^4 + gamma2 |k|^2 + beta).
inline double linear_symbol(double k2, const ModelParams& prm) {
    return -(prm.base.mu2 * k2 * k2 + prm.base.gamma2 * k2 + prm.base.beta);
}

/// Integrating-factor RK4 stepper. The stiff diagonal part is removed
/// exactly by per-mode exponentials; the nonlinear remainder is advanced by
/// classical RK4 with u re-solved at every stage.
class Stepper {
  public:
    Stepper(const Workspace& ws, const ModelParams& prm, double dt)
        : eval_(ws, prm), dt_(dt), ehalf_(ws.grid().spec_size()), efull_(ws.grid().spec_size()) {
        if (!(dt >= 0.0)) throw std::invalid_argument("Stepper: dt must be >= 0");
        for_each_mode(ws.grid(), [&](const Mode& md) {
            const double L = linear_symbol(md.k2, prm);
            ehalf_[md.idx] = std::exp(0.5 * L * dt);
            efull_[md.idx] = ehalf_[md.idx] * ehalf_[md.idx];
        });
    }

    double dt() const { return dt_; }

    /// One step; the result is projected and keeps Hermitian symmetry.
    State step(const State& s) {
        const SpectralField& p = s.p;
        const int d = p.grid.dim;

        eval_.eval(p, u_, n_, false);  // N1
        // acc = E^2 p + dt/6 E^2 N1 ; a = E (p + dt/2 N1)
        prepare(p, n_);

        eval_.eval(stage_, u_, n_, false);  // N2
        // acc += dt/3 E N2 ; a = E p + dt/2 N2
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < p.comp[c].size(); ++i) {
                const Complex n2 = n_.comp[c][i];
                acc_.comp[c][i] += (dt_ / 3.0) * ehalf_[i] * n2;
                stage_.comp[c][i] = ehalf_[i] * p.comp[c][i] + 0.5 * dt_ * n2;
            }
        stage_.solenoidal = true;

        eval_.eval(stage_, u_, n_, false);  // N3
        // acc += dt/3 E N3 ; a = E^2 p + dt E N3
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < p.comp[c].size(); ++i) {
                const Complex n3 = n_.comp[c][i];
                acc_.comp[c][i] += (dt_ / 3.0) * ehalf_[i] * n3;
                stage_.comp[c][i] = efull_[i] * p.comp[c][i] + dt_ * ehalf_[i] * n3;
            }
        stage_.solenoidal = true;

        eval_.eval(stage_, u_, n_, false);  // N4
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < p.comp[c].size(); ++i)
                acc_.comp[c][i] += (dt_ / 6.0) * n_.comp[c][i];

        leray_project_inplace(acc_);
        State out;
        out.t = s.t + dt_;
        out.p = acc_;
        return out;
    }

    /// Velocity of the last evaluated stage (diagnostic use only).
    const SpectralField& last_u() const { return u_; }

  private:
    void prepare(const SpectralField& p, const SpectralField& n1) {
        const int d = p.grid.dim;
        if (acc_.grid != p.grid) acc_ = SpectralField(p.grid);
        if (stage_.grid != p.grid) stage_ = SpectralField(p.grid);
        for (int c = 0; c < d; ++c)
            for (std::size_t i = 0; i < p.comp[c].size(); ++i) {
                const Complex pi = p.comp[c][i];
                const Complex n1i = n1.comp[c][i];
                acc_.comp[c][i] = efull_[i] * (pi + (dt_ / 6.0) * n1i);
                stage_.comp[c][i] = ehalf_[i] * (pi + 0.5 * dt_ * n1i);
            }
        stage_.solenoidal = true;
    }

    RhsEvaluator eval_;
    double dt_;
    std::vector<double> ehalf_, efull_;
    SpectralField u_, n_, acc_, stage_;
};

/// One integrating-factor RK4 step (convenience; builds a Stepper).
inline State if_rk4_step(const Workspace& ws, const State& s, double dt,
                         const ModelParams& prm) {
    Stepper st(ws, prm, dt);
    return st.step(s);
}

struct RunSpec {
    double dt = 0.0;
    long n_steps = 0;
    int sample_every = 1;
};

/// Advance p0 for n_steps; the sink sees the initial state and every
/// sample_every-th step after it (including the final one when it lands on
/// the sampling comb). Deterministic in all inputs.
inline void integrate(const Workspace& ws, const ModelParams& prm, const SpectralField& p0,
                      const RunSpec& spec,
                      const std::function<void(long, const State&)>& sink) {
    if (!(spec.dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    if (spec.sample_every < 1) throw std::invalid_argument("integrate: sample_every >= 1");
    Stepper st(ws, prm, spec.dt);
    State s;
    s.t = 0.0;
    s.p = p0;
    leray_project_inplace(s.p);
    if (sink) sink(0, s);
    for (long n = 1; n <= spec.n_steps; ++n) {
        s = st.step(s);
        s.t = spec.dt * static_cast<double>(n);  // avoid accumulated-sum drift
        if (!all_finite(s.p)) throw NonFinite(n, s.t);
        if (sink && n % spec.sample_every == 0) sink(n, s);
    }
}

inline Trajectory integrate_collect(const Workspace& ws, const ModelParams& prm,
                                    const SpectralField& p0, const RunSpec& spec) {
    Trajectory traj;
    traj.params = prm;
    traj.grid = ws.grid();
    traj.dt = spec.dt;
    traj.sample_every = spec.sample_every;
    integrate(ws, prm, p0, spec,
              [&](long, const State& s) { traj.states.push_back(s); });
    return traj;
}

struct StableDtOpts {
    double dt_max = 1e-2;
    double c_advect = 0.3;
    double c_cubic = 0.3;
};

/// Advective/cubic step-size bound. The stiff linear part is handled
/// exactly by the integrating factor and imposes no constraint. p_scale and
/// u_scale are collocation maxima of |p0| and |u(p0)|.
inline double stable_dt(const Grid& grid, const ModelParams& prm, double p_scale,
                        double u_scale, const StableDtOpts& opts = {}) {
    double dt = opts.dt_max;
    const double speed = prm.base.lambda2 * p_scale + u_scale;
    if (speed > 0.0) dt = std::min(dt, opts.c_advect / (grid.k_max() * speed));
    const double cub = prm.base.alpha * p_scale * p_scale;
    if (cub > 0.0) dt = std::min(dt, opts.c_cubic / cub);
    return dt;
}

/// stable_dt with the scales measured from the actual initial field.
inline double stable_dt_for(const Workspace& ws, const ModelParams& prm,
                            const SpectralField& p0, const StableDtOpts& opts = {}) {
    const double p_scale = norm_linf(ws, p0);
    const double u_scale = norm_linf(ws, solve_u(ws, p0, prm));
    return stable_dt(ws.grid(), prm, p_scale, u_scale, opts);
}

}  // namespace apf
