// Control representations for the original (generator-index) and relaxed
// (convex-weight) problems, nearest-point selection, the constructive
// time-chattering approximation, and the weak norm that metrizes weak L2
// convergence on the bounded control set.
#pragma once

#include <cstdint>
#include <vector>

#include "hyrelax/model.hpp"

namespace hyrelax {

// Piecewise-constant-in-time control for the original problem: one generator
// index per (step, cell). Indices are 0-based internally.
struct ControlField {
    double dt = 0.0;
    int n_steps = 0;
    int n_cells = 0;
    std::vector<std::uint16_t> idx;  // step-major, size n_steps * n_cells

    std::uint16_t at(int step, int cell) const { return idx[step * n_cells + cell]; }
    double t_end() const { return dt * n_steps; }
};

// Convex weights over the generators per (step, cell) for the relaxed problem.
struct RelaxedControl {
    double dt = 0.0;
    int n_steps = 0;
    int n_cells = 0;
    int n_gen = 0;
    std::vector<double> weights;  // [(step * n_cells + cell) * n_gen + j]

    const double* at(int step, int cell) const {
        return &weights[(static_cast<std::size_t>(step) * n_cells + cell) * n_gen];
    }
    double t_end() const { return dt * n_steps; }
    void check_valid() const;
};

// Realized control values (one per step per cell) on a concrete grid;
// piecewise constant on [t_k, t_{k+1}).
struct RealizedControl {
    GridSpec grid;
    double dt = 0.0;
    int n_steps = 0;
    std::vector<double> values;  // step-major, size n_steps * cells

    double at(int step, int cell) const { return values[step * grid.cells() + cell]; }
};

// Values {phi_j(t,x,y,s,v,w)} of all generators; duplicates retained.
std::vector<double> feasible_values(const ControlSet& set, double t, double x, double y,
                                    double s, double v, double w);

// Convex combination sum_j lambda_j phi_j at one (step, cell).
double hull_value(const RelaxedControl& rc, const ControlSet& set, int step, int cell, double t,
                  double x, double y, double s, double v, double w);

// Index minimizing |target - phi_j|, ties toward the smaller index.
int nearest_selection(double target, const ControlSet& set, double t, double x, double y,
                      double s, double v, double w);

// Time-chattering replacement: split [0, T] into N windows; inside each
// window allocate the steps per cell to the generators in fixed order 1..K
// with largest-remainder proportions of the window-averaged weights. The
// weak-norm defect against the relaxed control obeys 2 * m * T / N on
// unit-measure domains.
ControlField chatter(const RelaxedControl& rc, int windows);
ControlField chatter_serial(const RelaxedControl& rc, int windows);

// sup over step-aligned s <= t of |integral_s^t (u1 - u2)|_H, exact on the
// step grid via prefix sums (O(steps^2 * cells)).
double weak_norm_defect(const RealizedControl& u1, const RealizedControl& u2);
double weak_norm_defect_serial(const RealizedControl& u1, const RealizedControl& u2);

}  // namespace hyrelax
