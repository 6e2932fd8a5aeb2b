#pragma once

#include "apf/config.hpp"
#include "apf/diagnostics.hpp"

namespace apf {

/// The computable shadow of global existence: the a priori bound failed by
/// more than 1%, so the run is not trustworthy and is aborted.
struct AprioriViolation : std::runtime_error {
    double time;
    explicit AprioriViolation(double t)
        : std::runtime_error("a priori bound violated at t = " + std::to_string(t)), time(t) {}
};

inline SpectralField initial_field(const RunConfig& rc) {
    return random_solenoidal_field(rc.grid, rc.seed, rc.spectrum);
}

/// Materialize dt: keep a configured value, otherwise take the advective /
/// cubic stability estimate measured on the actual initial field.
inline double resolve_dt(const Workspace& ws, const RunConfig& rc, const ModelParams& prm) {
    if (rc.dt > 0.0) return rc.dt;
    StableDtOpts opts;
    opts.dt_max = rc.dt_max;
    opts.c_advect = rc.cfl_advect;
    opts.c_cubic = rc.cfl_cubic;
    return stable_dt_for(ws, prm, initial_field(rc), opts);
}

inline RunSpec make_run_spec(const RunConfig& rc, double dt) {
    RunSpec spec;
    spec.dt = dt;
    spec.sample_every = rc.sample_every;
    long steps = static_cast<long>(std::ceil(rc.t_end / dt - 1e-9));
    const long q = (steps + rc.sample_every - 1) / rc.sample_every;
    spec.n_steps = q * rc.sample_every;  // uniform sampling through the end
    return spec;
}

struct RunResult {
    Trajectory traj;  // states kept only when requested
    EnergyLedger ledger;
    double dt = 0.0;
};

struct RunOptions {
    bool collect_states = false;
    bool with_ledger = true;
    bool with_velocity = true;
    bool enforce_apriori = true;
    std::function<void(long, const State&)> on_sample;  // extra observer
};

/// Generate p0, integrate, stream the energy ledger and (optionally) guard
/// the a priori bound at every sample.
inline RunResult run_simulation(const Workspace& ws, const ModelParams& prm,
                                const RunConfig& rc, const RunOptions& opt = {}) {
    RunResult out;
    out.dt = resolve_dt(ws, rc, prm);
    const RunSpec spec = make_run_spec(rc, out.dt);
    const SpectralField p0 = initial_field(rc);
    const double t_total = spec.dt * static_cast<double>(spec.n_steps);

    EnergyLedgerBuilder builder(ws, prm, opt.with_velocity);
    const double g = neg_part(prm.base.gamma2);
    const double defect = g * g / (2.0 * prm.base.mu2) + neg_part(prm.base.beta);
    const double apriori_extra = t_total * ws.grid().volume() / prm.base.alpha * defect * defect;

    out.traj.params = prm;
    out.traj.grid = ws.grid();
    out.traj.dt = spec.dt;
    out.traj.sample_every = spec.sample_every;

    double e0 = 0.0;
    integrate(ws, prm, p0, spec, [&](long step, const State& s) {
        if (opt.collect_states) out.traj.states.push_back(s);
        if (opt.with_ledger) {
            const EnergyRow& row = builder.add(s);
            if (step == 0) e0 = row.E;
            if (opt.enforce_apriori) {
                const double lhs = 2.0 * row.E + row.cum_visc + row.cum_quart;
                const double rhs = 2.0 * e0 + apriori_extra;
                if (lhs > rhs + 0.01 * std::abs(rhs)) throw AprioriViolation(s.t);
            }
        }
        if (opt.on_sample) opt.on_sample(step, s);
    });
    if (opt.with_ledger) out.ledger = builder.take();
    return out;
}

}  // namespace apf
