// Time integration of the coupled system: implicit diffusion and explicit
// reaction for v and w, then the per-cell stop dynamics for sigma against
// the band evaluated at the just-updated state.
#pragma once

#include <variant>

#include "hyrelax/controls.hpp"
#include "hyrelax/geometry.hpp"
#include "hyrelax/hysteresis.hpp"
#include "hyrelax/model.hpp"

namespace hyrelax {

struct State {
    Field sigma, v, w;
    double t = 0.0;
};

struct StepDiagnostics {
    double t = 0.0;
    double sigma_dot_H = 0.0, v_dot_H = 0.0, w_dot_H = 0.0;
    double grad_v_H = 0.0, grad_w_H = 0.0;
    double lap_v_H = 0.0, lap_w_H = 0.0;
    double sigma_min = 0.0, sigma_max = 0.0;
    double v_min = 0.0, v_max = 0.0, w_min = 0.0, w_max = 0.0;
    double v_preclip_min = 0.0, w_preclip_min = 0.0;
};

struct Trajectory {
    std::vector<State> states;           // every snapshot_stride steps, plus t = 0 and t = T
    std::vector<StepDiagnostics> diag;   // one row per step
    RealizedControl realized;            // control values actually applied
    GridSpec grid;
    double dt = 0.0;
    int n_steps = 0;

    // Running accumulators for the summed energy inequality.
    double sum_dt_vdot_sq = 0.0;  // sum dt * (|v'|_H^2 + |w'|_H^2)
    double grad_v0_sq = 0.0, grad_w0_sq = 0.0;
    double grad_vT_sq = 0.0, grad_wT_sq = 0.0;

    // Left- and right-hand side of the discrete energy bound with
    // C1 = m (|h|^2_inf + |g|^2_inf) |domain|.
    double energy_lhs() const { return sum_dt_vdot_sq + grad_vT_sq + grad_wT_sq; }
    double energy_rhs(double m_bound, const ReactionSups& sups) const;
};

struct SolverConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int snapshot_stride = 1;
    bool override_stability = false;  // allow dt above the conservative bound

    int steps() const { return static_cast<int>(std::ceil(t_end / dt - 1e-9)); }
};

// Conservative sufficient stability bound from the declared constants.
double dt_stability(const ModelSpec& model, const ControlSet& controls);

// Either problem form drives the same solver: generator indices (original)
// or convex weights (relaxed).
using ControlInput = std::variant<const ControlField*, const RelaxedControl*>;

// Realized per-cell control value for one step, evaluated at the given state.
Field realize_control(const ControlInput& control, const ControlSet& set, int step,
                      const State& state);

// One IMEX step under realized control values u. Throws on invariant breach
// beyond tolerance (negative undershoot past 1e-12, box bound exceeded).
// When diag is given, the pre-clip minima of v and w are recorded there.
State step(const State& state, const Field& u, const ModelSpec& model, const SolverConfig& cfg,
           StepDiagnostics* diag = nullptr);

Trajectory simulate(const ModelSpec& model, const InitialData& init, const ControlSet& set,
                    const ControlInput& control, const SolverConfig& cfg);

// Refinement study: successive-difference norms of final states across
// factor-`refine_factor` refinements in space or time.
enum class RefineMode { spatial, temporal };

struct RefinementRow {
    int level = 0;
    int n = 0;
    double dt = 0.0;
    double diff_norm = -1.0;  // vs previous level; -1 on the first row
    double order = 0.0;       // log_factor of consecutive diff ratios
};

struct RefinementReport {
    RefineMode mode = RefineMode::spatial;
    std::vector<RefinementRow> rows;
    double observed_order = 0.0;  // from the last two differences
};

using InitBuilder = std::function<InitialData(const GridSpec&)>;

RefinementReport grid_refinement_report(const ModelSpec& model, const InitBuilder& init_builder,
                                        const ControlSet& set, int generator_index,
                                        RefineMode mode, int base_n, double base_dt,
                                        double t_end, int levels, int refine_factor = 2);

}  // namespace hyrelax
