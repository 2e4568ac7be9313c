#include "hyrelax/solver.hpp"

#include <cmath>

namespace hyrelax {

double Trajectory::energy_rhs(double m_bound, const ReactionSups& sups) const {
    const double C1 = m_bound * (sups.h_inf * sups.h_inf + sups.g_inf * sups.g_inf) *
                      grid.domain_measure();
    return grad_v0_sq + grad_w0_sq + dt * n_steps * C1;
}

double dt_stability(const ModelSpec& model, const ControlSet& controls) {
    return 1.0 / (4.0 * model.L * (1.0 + controls.m_bound));
}

Field realize_control(const ControlInput& control, const ControlSet& set, int step,
                      const State& state) {
    const GridSpec& g = state.sigma.grid;
    Field u(g);
    const int n = g.cells();
    if (std::holds_alternative<const ControlField*>(control)) {
        const ControlField* cf = std::get<const ControlField*>(control);
        for (int c = 0; c < n; ++c) {
            const auto p = g.cell_center(c);
            const int j = cf->at(step, c);
            u.values[c] =
                set.generators[j](state.t, p[0], p[1], state.sigma[c], state.v[c], state.w[c]);
        }
    } else {
        const RelaxedControl* rc = std::get<const RelaxedControl*>(control);
        for (int c = 0; c < n; ++c) {
            const auto p = g.cell_center(c);
            const double* lam = rc->at(step, c);
            double val = 0.0;
            for (int j = 0; j < set.count(); ++j)
                val += lam[j] * set.generators[j](state.t, p[0], p[1], state.sigma[c],
                                                  state.v[c], state.w[c]);
            u.values[c] = val;
        }
    }
    for (int c = 0; c < n; ++c)
        if (std::abs(u.values[c]) > set.m_bound + 1e-12)
            throw std::runtime_error("realized control exceeds m_bound at cell " +
                                     std::to_string(c));
    return u;
}

namespace {

// Undershoot policy: clip roundoff-level negatives, hard-error beyond.
void clip_nonnegative(Field& f, const char* name, double& preclip_min) {
    preclip_min = field_min(f);
    if (preclip_min < -1e-12)
        throw std::runtime_error(std::string("stability error: ") + name +
                                 " undershoots to " + std::to_string(preclip_min));
    if (preclip_min < 0.0)
        for (double& x : f.values) x = std::max(x, 0.0);
}

void check_box_bound(const Field& f, double cap, const char* name) {
    const int n = f.size();
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(f[i]))
            throw std::runtime_error(std::string("stability error: ") + name +
                                     " not finite at cell " + std::to_string(i));
        if (f[i] > cap)
            throw std::runtime_error(std::string("stability error: ") + name + " = " +
                                     std::to_string(f[i]) + " exceeds R0_cap at cell " +
                                     std::to_string(i));
    }
}

}  // namespace

State step(const State& state, const Field& u, const ModelSpec& model, const SolverConfig& cfg,
           StepDiagnostics* diag) {
    const GridSpec& g = state.sigma.grid;
    const double dt = cfg.dt;
    const int n = g.cells();

    // Explicit reaction, then exact implicit diffusion.
    Field rhs_v(g), rhs_w(g);
    for (int c = 0; c < n; ++c) {
        const double s = state.sigma[c], v = state.v[c], w = state.w[c];
        rhs_v.values[c] = v + dt * model.h_rate(s, v, w) * u[c];
        rhs_w.values[c] = w + dt * model.g_rate(s, v, w);
    }
    State out;
    out.t = state.t + dt;
    out.v = solve_helmholtz(rhs_v, dt, 1.0);
    out.w = solve_helmholtz(rhs_w, dt, 1.0);

    double preclip_v = 0.0, preclip_w = 0.0;
    clip_nonnegative(out.v, "v", preclip_v);
    clip_nonnegative(out.w, "w", preclip_w);
    if (diag != nullptr) {
        diag->v_preclip_min = preclip_v;
        diag->w_preclip_min = preclip_w;
    }

    // Backward difference quotients feed the stop dynamics.
    Field vdot(g), wdot(g), F_field(g);
    for (int c = 0; c < n; ++c) {
        vdot.values[c] = (out.v[c] - state.v[c]) / dt;
        wdot.values[c] = (out.w[c] - state.w[c]) / dt;
        F_field.values[c] = model.F_rate(state.sigma[c], state.v[c], state.w[c]);
    }
    const ConstraintBand band_old = eval_bounds(model, state.v, state.w);
    const ConstraintBand band_new = eval_bounds(model, out.v, out.w);
    out.sigma = sigma_step(state.sigma, band_old, band_new, F_field, model.a, vdot, wdot, dt);

    check_box_bound(out.sigma, model.R0_cap, "sigma");
    check_box_bound(out.v, model.R0_cap, "v");
    check_box_bound(out.w, model.R0_cap, "w");
    return out;
}

Trajectory simulate(const ModelSpec& model, const InitialData& init, const ControlSet& set,
                    const ControlInput& control, const SolverConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
    const double dt_max = dt_stability(model, set);
    if (cfg.dt > dt_max && !cfg.override_stability)
        throw std::invalid_argument("simulate: dt exceeds the stability bound " +
                                    std::to_string(dt_max) +
                                    " (set override_stability to force)");

    const GridSpec& g = init.sigma0.grid;
    const int n_steps = cfg.steps();
    {
        int control_steps = 0, control_cells = 0;
        if (std::holds_alternative<const ControlField*>(control)) {
            const ControlField* cf = std::get<const ControlField*>(control);
            control_steps = cf->n_steps;
            control_cells = cf->n_cells;
        } else {
            const RelaxedControl* rc = std::get<const RelaxedControl*>(control);
            control_steps = rc->n_steps;
            control_cells = rc->n_cells;
        }
        if (control_steps < n_steps)
            throw std::invalid_argument("simulate: control has fewer steps than the run");
        if (control_cells != g.cells())
            throw std::invalid_argument("simulate: control cell count does not match the grid");
    }

    Trajectory traj;
    traj.grid = g;
    traj.dt = cfg.dt;
    traj.n_steps = n_steps;
    traj.realized.grid = g;
    traj.realized.dt = cfg.dt;
    traj.realized.n_steps = n_steps;
    traj.realized.values.reserve(static_cast<std::size_t>(n_steps) * g.cells());
    traj.diag.reserve(n_steps);

    State cur{clamp_M(init.sigma0, eval_bounds(model, init.v0, init.w0)), init.v0, init.w0, 0.0};
    traj.grad_v0_sq = grad_norm_sq(cur.v);
    traj.grad_w0_sq = grad_norm_sq(cur.w);
    traj.states.push_back(cur);

    for (int k = 0; k < n_steps; ++k) {
        const Field u = realize_control(control, set, k, cur);
        traj.realized.values.insert(traj.realized.values.end(), u.values.begin(),
                                    u.values.end());
        StepDiagnostics d;
        State next = step(cur, u, model, cfg, &d);
        d.t = next.t;
        Field ds(g), dv(g), dw(g);
        for (int c = 0; c < g.cells(); ++c) {
            ds.values[c] = (next.sigma[c] - cur.sigma[c]) / cfg.dt;
            dv.values[c] = (next.v[c] - cur.v[c]) / cfg.dt;
            dw.values[c] = (next.w[c] - cur.w[c]) / cfg.dt;
        }
        d.sigma_dot_H = l2_norm(ds);
        d.v_dot_H = l2_norm(dv);
        d.w_dot_H = l2_norm(dw);
        d.grad_v_H = std::sqrt(grad_norm_sq(next.v));
        d.grad_w_H = std::sqrt(grad_norm_sq(next.w));
        d.lap_v_H = l2_norm(neumann_laplacian(next.v));
        d.lap_w_H = l2_norm(neumann_laplacian(next.w));
        d.sigma_min = field_min(next.sigma);
        d.sigma_max = field_max(next.sigma);
        d.v_min = field_min(next.v);
        d.v_max = field_max(next.v);
        d.w_min = field_min(next.w);
        d.w_max = field_max(next.w);
        traj.diag.push_back(d);
        traj.sum_dt_vdot_sq += cfg.dt * (d.v_dot_H * d.v_dot_H + d.w_dot_H * d.w_dot_H);

        cur = std::move(next);
        if ((k + 1) % cfg.snapshot_stride == 0 || k + 1 == n_steps) traj.states.push_back(cur);
    }
    traj.grad_vT_sq = grad_norm_sq(cur.v);
    traj.grad_wT_sq = grad_norm_sq(cur.w);
    return traj;
}

namespace {

// Average fine cells down to the coarse grid (factor must divide evenly).
Field restrict_field(const Field& fine, const GridSpec& coarse, int factor) {
    Field out(coarse);
    if (coarse.dim == 1) {
        for (int i = 0; i < coarse.n_cells[0]; ++i) {
            double s = 0.0;
            for (int r = 0; r < factor; ++r) s += fine[i * factor + r];
            out.values[i] = s / factor;
        }
        return out;
    }
    for (int j = 0; j < coarse.n_cells[1]; ++j)
        for (int i = 0; i < coarse.n_cells[0]; ++i) {
            double s = 0.0;
            for (int rj = 0; rj < factor; ++rj)
                for (int ri = 0; ri < factor; ++ri)
                    s += fine[fine.grid.flat(i * factor + ri, j * factor + rj)];
            out.values[coarse.flat(i, j)] = s / (factor * factor);
        }
    return out;
}

double state_diff_norm(const State& a, const State& b) {
    Field ds(a.sigma.grid), dv(a.sigma.grid), dw(a.sigma.grid);
    for (int c = 0; c < a.sigma.size(); ++c) {
        ds.values[c] = a.sigma[c] - b.sigma[c];
        dv.values[c] = a.v[c] - b.v[c];
        dw.values[c] = a.w[c] - b.w[c];
    }
    return l2_norm(ds) + l2_norm(dv) + l2_norm(dw);
}

State run_final_state(const ModelSpec& model, const InitBuilder& init_builder,
                      const ControlSet& set, int generator_index, const GridSpec& g, double dt,
                      double t_end) {
    InitialData init = init_builder(g);
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.snapshot_stride = 1 << 30;  // only endpoints needed
    ControlField cf;
    cf.dt = dt;
    cf.n_steps = cfg.steps();
    cf.n_cells = g.cells();
    cf.idx.assign(static_cast<std::size_t>(cf.n_steps) * cf.n_cells,
                  static_cast<std::uint16_t>(generator_index));
    Trajectory traj = simulate(model, init, set, &cf, cfg);
    return traj.states.back();
}

}  // namespace

RefinementReport grid_refinement_report(const ModelSpec& model, const InitBuilder& init_builder,
                                        const ControlSet& set, int generator_index,
                                        RefineMode mode, int base_n, double base_dt,
                                        double t_end, int levels, int refine_factor) {
    if (levels < 2) throw std::invalid_argument("grid_refinement_report: levels >= 2");
    if (refine_factor < 1)
        throw std::invalid_argument("grid_refinement_report: refine_factor >= 1");

    RefinementReport report;
    report.mode = mode;

    std::vector<State> finals;
    std::vector<int> ns;
    std::vector<double> dts;
    for (int l = 0; l < levels; ++l) {
        int n = base_n;
        double dt = base_dt;
        if (mode == RefineMode::spatial) {
            for (int r = 0; r < l; ++r) n *= refine_factor;
        } else {
            for (int r = 0; r < l; ++r) dt /= refine_factor;
        }
        finals.push_back(
            run_final_state(model, init_builder, set, generator_index, GridSpec::line(n), dt,
                            t_end));
        ns.push_back(n);
        dts.push_back(dt);
    }

    std::vector<double> diffs;
    for (int l = 0; l < levels; ++l) {
        RefinementRow row;
        row.level = l;
        row.n = ns[l];
        row.dt = dts[l];
        if (l > 0) {
            State cmp = finals[l];
            if (mode == RefineMode::spatial && refine_factor > 1) {
                const GridSpec coarse = finals[l - 1].sigma.grid;
                cmp = State{restrict_field(finals[l].sigma, coarse, refine_factor),
                            restrict_field(finals[l].v, coarse, refine_factor),
                            restrict_field(finals[l].w, coarse, refine_factor), finals[l].t};
            }
            row.diff_norm = state_diff_norm(finals[l - 1], cmp);
            diffs.push_back(row.diff_norm);
            if (diffs.size() >= 2 && diffs.back() > 0.0 && refine_factor > 1) {
                const double ratio = diffs[diffs.size() - 2] / diffs.back();
                row.order = std::log(ratio) / std::log(static_cast<double>(refine_factor));
                report.observed_order = row.order;
            }
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace hyrelax
