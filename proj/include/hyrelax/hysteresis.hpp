// Generalized stop operator realized per cell: interior dynamics
// sigma' = F + a v' until the state attaches to a moving band boundary,
// boundary riding while attached, projection onto the band after each step.
#pragma once

#include <vector>

#include "hyrelax/model.hpp"

namespace hyrelax {

enum class BranchTag { interior, on_lower, on_upper };

struct BranchState {
    BranchTag tag = BranchTag::interior;
    double margin = 1e-12;  // attachment detection tolerance
};

// A cell counts as attached when it sits within margin of a bound; the clamp
// places attached cells on the bound exactly, so the margin only absorbs the
// case of a boundary reached from inside within one step.
inline constexpr double kAttachMargin = 1e-12;

// Scalar projection onto [lo, up]: sigma - [sigma - up]^+ + [lo - sigma]^+,
// evaluated branchwise so attached values equal the bound bitwise.
inline double clamp_scalar(double sigma, double lo, double up) {
    if (sigma > up) return up;
    if (sigma < lo) return lo;
    return sigma;
}

// Pointwise projection of a field onto the band.
Field clamp_M(const Field& sigma, const ConstraintBand& band);

// Branch value of sigma' per Definition/branch dynamics: interior cells run
// F + a v', attached cells follow the bound's chain rule with analytic
// partials from the model. Throws if the tag contradicts (sigma, band).
double branch_rate(int cell, double sigma, double v, double w, double vdot, double wdot,
                   const ModelSpec& model, const BranchState& tag);

// One explicit step of the stop dynamics followed by projection:
// detach-first (interior rate wins whenever it points into the new band's
// interior), boundary riding via the band's own increment otherwise, then
// clamp against band_new. Result lies inside band_new exactly.
// Precondition: sigma inside band_old.
Field sigma_step(const Field& sigma, const ConstraintBand& band_old,
                 const ConstraintBand& band_new, const Field& F_field, double a,
                 const Field& vdot, const Field& wdot, double dt);
Field sigma_step_serial(const Field& sigma, const ConstraintBand& band_old,
                        const ConstraintBand& band_new, const Field& F_field, double a,
                        const Field& vdot, const Field& wdot, double dt);

// Classical scalar stop (a = 1, F == 0, w frozen) evaluated semi-analytically
// on a piecewise-linear input: exact interior propagation sigma' = v',
// bisection-located attachment events, exact boundary riding.
struct ScalarBand {
    std::function<double(double v)> lower, upper;
    std::function<double(double v)> dlower, dupper;
};

struct StopSample {
    double t = 0.0;
    double v = 0.0;
};

std::vector<double> scalar_stop_reference(const std::vector<StopSample>& input,
                                          const ScalarBand& band, double sigma0);

}  // namespace hyrelax
