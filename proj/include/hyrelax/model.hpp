// Problem data: the band functions f_* <= f^* with their analytic partials,
// the reaction terms F, h, g, the hysteresis constant a, declared Lipschitz
// bounds, plus named presets and sampled hypothesis validators.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hyrelax/grid.hpp"

namespace hyrelax {

using BoundFn = std::function<double(double v, double w)>;
using RateFn = std::function<double(double s, double v, double w)>;

// Pointwise feedback generator; x, y are cell-center coordinates (y = 0 in 1-D).
using Generator = std::function<double(double t, double x, double y, double s, double v, double w)>;

// Finitely many Lipschitz feedback generators standing in for the abstract
// compact-valued constraint set; convex weights over them realize the hull.
struct ControlSet {
    std::vector<Generator> generators;
    double m_bound = 1.0;  // pointwise bound on every generator value
    double k_lip = 1.0;    // state-Lipschitz constant of the generator set

    int count() const { return static_cast<int>(generators.size()); }
};

struct ModelSpec {
    std::string name;

    BoundFn f_lower, f_upper;
    BoundFn df_lower_dv, df_lower_dw;  // analytic partials (bounds are C^2)
    BoundFn df_upper_dv, df_upper_dw;

    RateFn F_rate, h_rate, g_rate;

    double a = 0.0;       // coefficient of v' in the sigma equation
    double L = 1.001;     // declared common Lipschitz constant of F, h, g (> 1)
    double L0 = 0.1;      // declared Lipschitz constant of the band functions
    double R0_cap = 2.0;  // working box bound for sigma, v, w
};

struct InitialData {
    Field sigma0, v0, w0;
};

// Per-cell lower/upper band evaluated at a (v, w) pair of fields.
struct ConstraintBand {
    Field lower, upper;

    void check_valid() const;
};

ConstraintBand eval_bounds(const ModelSpec& model, const Field& v, const Field& w);
ConstraintBand eval_bounds_serial(const ModelSpec& model, const Field& v, const Field& w);

struct ClauseResult {
    std::string clause;       // e.g. "H1: 0 <= f_* <= f^* <= 1"
    bool pass = true;
    double worst = 0.0;       // most violating sampled value (signed margin)
    std::string witness;      // sample point where the worst value occurred
};

struct ValidationReport {
    std::vector<ClauseResult> clauses;

    bool all_pass() const {
        for (const auto& c : clauses)
            if (!c.pass) return false;
        return true;
    }
    std::string summary() const;
};

// Dense spot-checks of (H1)-(H3) and, when a control set is given, (U2)-(U3),
// with box_samples points per axis on [0, R0_cap].
ValidationReport validate_hypotheses(const ModelSpec& model, const InitialData& init,
                                     const ControlSet* controls, int box_samples);

// Sampled sup of |F|, |h|, |g| over the working box.
struct ReactionSups {
    double F_inf = 0.0, h_inf = 0.0, g_inf = 0.0;
};
ReactionSups reaction_sups(const ModelSpec& model, int box_samples = 64);

struct Preset {
    ModelSpec model;
    InitialData init;
    ControlSet controls;
};

// Named presets: "budworm", "stop-test", "decoupled".
Preset preset(const std::string& name, const GridSpec& grid);

std::vector<std::string> preset_names();

}  // namespace hyrelax
