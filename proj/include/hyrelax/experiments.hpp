// Experiment harnesses: the empirical control-to-state Lipschitz estimate,
// relaxation via chattering, scalar stop recovery, and the single-cell
// high-order reference integrator with event detection.
#pragma once

#include <random>

#include "hyrelax/solver.hpp"

namespace hyrelax {

// ---------------------------------------------------------------- Lipschitz

struct LipschitzPairResult {
    int pair_id = 0;
    bool calibration = true;
    bool degenerate = false;  // u1 == u2 realized; excluded from ratios
    double t_star = 0.0;      // time maximizing the squared state distance
    double state_dist_sq = 0.0;
    double control_int_sq = 0.0;  // integral_0^{t_star} |u1 - u2|_H^2
    double ratio = 0.0;
};

struct LipschitzReport {
    std::vector<LipschitzPairResult> pairs;
    double C_emp = 0.0;       // max calibration ratio
    bool held_out_pass = true;  // every held-out ratio <= 2 * C_emp
    int held_out_checked = 0;
};

// Simulates both members of each control pair from the same initial data,
// calibrates C_emp on the first half (by pair id) and verifies the factor-2
// inequality on the rest. Pairs run concurrently; the report order is by id.
LipschitzReport lipschitz_check(const ModelSpec& model, const InitialData& init,
                                const ControlSet& set,
                                const std::vector<std::pair<ControlField, ControlField>>& pairs,
                                const SolverConfig& cfg);

// Random global-in-space bang-bang schedule with 3..12 switches.
ControlField random_bang_bang(const ControlSet& set, int n_steps, int n_cells, double dt,
                              std::mt19937_64& rng);

// -------------------------------------------------------------- relaxation

struct RelaxationRow {
    int windows = 0;
    double weak_defect = 0.0;
    double defect_bound = 0.0;  // 2 m T / N
    double distance = 0.0;      // sup_t (|ds|_H + |dv|_H + |dw|_H)
};

struct RelaxationReport {
    std::vector<RelaxationRow> rows;  // ordered by windows
    double reference_size = 0.0;      // sup_t (|s|_H + |v|_H + |w|_H) of the reference
    double tol_relax = 0.0;
    bool monotone_ok = true;   // non-increasing within 10% slack
    bool terminal_ok = true;   // largest-N distance < tol_relax
    bool defect_bound_ok = true;
    double spearman = 0.0;     // rank correlation of defect vs distance
    double final_ratio = 0.0;  // distance(N_max) / distance(N_min)
};

RelaxationReport relaxation_run(const ModelSpec& model, const InitialData& init,
                                const ControlSet& set, const RelaxedControl& rc,
                                const std::vector<int>& n_list, const SolverConfig& cfg,
                                double tol_relax_fraction = 0.05);

// Spatially uniform relaxed control with the given constant weights.
RelaxedControl constant_relaxed(const std::vector<double>& weights, int n_steps, int n_cells,
                                double dt);

// ------------------------------------------------------------ stop recovery

struct StopRecoveryReport {
    double sup_error = 0.0;       // sim vs semi-analytic reference over the run
    double loop_area_sim = 0.0;   // contour integral of sigma dv over the last period
    double loop_area_ref = 0.0;
    double area_rel_err = 0.0;
    double closure_error = 0.0;   // |sigma(2T_p) - sigma(T_p)| in the simulation
    bool attached = false;        // whether the run touched a bound at all
};

struct StopRecoveryConfig {
    double dt = 1e-4;
    double amplitude = 0.8;  // forcing amplitude; must be <= the preset m_bound
    int periods = 2;
    double period = 4.0;
};

StopRecoveryReport stop_recovery(const StopRecoveryConfig& cfg);

// ---------------------------------------------------------------- 0-D oracle

// Dense single-cell reference trace: classical 4th-order integration at
// dt_fine with bisection event detection for band attachment/detachment.
// The control is the same feedback schedule the solver consumes, evaluated
// at the oracle's own state.
struct OracleTrace {
    double dt = 0.0;
    std::vector<double> sigma, v, w;  // values at k * dt, k = 0..steps
};

OracleTrace ode_oracle(const ModelSpec& model, const ControlSet& set, const InitialData& init,
                       const ControlField& schedule, double t_end, double dt_fine);

// Sup distance between a single-cell trajectory and the oracle trace at the
// trajectory's snapshot times.
double oracle_sup_error(const Trajectory& traj, const OracleTrace& trace);

struct OracleAgreementRow {
    std::string preset_name;
    int control_id = 0;
    double err_dt = 0.0;       // sup error at the base dt
    double err_dt_half = 0.0;  // sup error at dt / 2
};

struct OracleAgreementReport {
    double dt = 1e-3;
    std::vector<OracleAgreementRow> rows;
    bool bound_ok = true;    // every error <= 5 dt (and <= 2.5 dt at dt/2)
    bool halving_ok = true;  // per-preset max error halves within +-20%
};

OracleAgreementReport oracle_agreement(const std::vector<std::string>& presets, int n_controls,
                                       double dt, double t_end, double dt_fine, std::uint64_t seed);

}  // namespace hyrelax
