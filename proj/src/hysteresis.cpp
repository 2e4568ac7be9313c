#include "hyrelax/hysteresis.hpp"

#include <cmath>

namespace hyrelax {

Field clamp_M(const Field& sigma, const ConstraintBand& band) {
    require_same_grid(sigma, band.lower, "clamp_M");
    Field out(sigma.grid);
    const int n = sigma.size();
#pragma omp parallel for if (n > 4096)
    for (int i = 0; i < n; ++i)
        out.values[i] = clamp_scalar(sigma[i], band.lower[i], band.upper[i]);
    return out;
}

double branch_rate(int cell, double sigma, double v, double w, double vdot, double wdot,
                   const ModelSpec& model, const BranchState& tag) {
    const double lo = model.f_lower(v, w);
    const double up = model.f_upper(v, w);
    switch (tag.tag) {
        case BranchTag::interior:
            if (sigma < lo - tag.margin || sigma > up + tag.margin)
                throw std::logic_error("branch_rate: interior tag outside band at cell " +
                                       std::to_string(cell));
            return model.F_rate(sigma, v, w) + model.a * vdot;
        case BranchTag::on_lower:
            if (std::abs(sigma - lo) > tag.margin)
                throw std::logic_error("branch_rate: on_lower tag off the bound at cell " +
                                       std::to_string(cell));
            return model.df_lower_dv(v, w) * vdot + model.df_lower_dw(v, w) * wdot;
        case BranchTag::on_upper:
            if (std::abs(sigma - up) > tag.margin)
                throw std::logic_error("branch_rate: on_upper tag off the bound at cell " +
                                       std::to_string(cell));
            return model.df_upper_dv(v, w) * vdot + model.df_upper_dw(v, w) * wdot;
    }
    throw std::logic_error("branch_rate: bad tag");
}

namespace {

// Per-cell step shared by the serial and parallel entry points. Boundary
// riding uses the band's own increment over the step, the exact discrete
// form of the chain-rule branch lines under difference-quotient rates.
inline double sigma_step_cell(double s, double lo_old, double up_old, double lo_new,
                              double up_new, double F, double a, double vdot, double dt) {
    const double r_int = F + a * vdot;
    const double interior_target = s + dt * r_int;

    const bool on_lower = (s - lo_old) <= kAttachMargin;
    const bool on_upper = (up_old - s) <= kAttachMargin;

    double target;
    if (on_lower && !on_upper && !(interior_target > lo_new)) {
        target = s + (lo_new - lo_old);  // ride the lower boundary
    } else if (on_upper && !on_lower && !(interior_target < up_new)) {
        target = s + (up_new - up_old);  // ride the upper boundary
    } else {
        target = interior_target;  // interior dynamics, or a detaching cell
    }
    return clamp_scalar(target, lo_new, up_new);
}

}  // namespace

Field sigma_step_serial(const Field& sigma, const ConstraintBand& band_old,
                        const ConstraintBand& band_new, const Field& F_field, double a,
                        const Field& vdot, const Field& wdot, double dt) {
    require_same_grid(sigma, band_old.lower, "sigma_step");
    require_same_grid(sigma, band_new.lower, "sigma_step");
    if (!(dt > 0.0)) throw std::invalid_argument("sigma_step: dt must be > 0");
    (void)wdot;  // boundary riding consumes the band increment, not wdot itself
    Field out(sigma.grid);
    const int n = sigma.size();
    for (int i = 0; i < n; ++i)
        out.values[i] = sigma_step_cell(sigma[i], band_old.lower[i], band_old.upper[i],
                                        band_new.lower[i], band_new.upper[i], F_field[i], a,
                                        vdot[i], dt);
    return out;
}

Field sigma_step(const Field& sigma, const ConstraintBand& band_old,
                 const ConstraintBand& band_new, const Field& F_field, double a,
                 const Field& vdot, const Field& wdot, double dt) {
    require_same_grid(sigma, band_old.lower, "sigma_step");
    require_same_grid(sigma, band_new.lower, "sigma_step");
    if (!(dt > 0.0)) throw std::invalid_argument("sigma_step: dt must be > 0");
    (void)wdot;
    Field out(sigma.grid);
    const int n = sigma.size();
#pragma omp parallel for if (n > 4096)
    for (int i = 0; i < n; ++i)
        out.values[i] = sigma_step_cell(sigma[i], band_old.lower[i], band_old.upper[i],
                                        band_new.lower[i], band_new.upper[i], F_field[i], a,
                                        vdot[i], dt);
    return out;
}

namespace {

enum class StopPhase { interior, riding_lower, riding_upper };

// Root of fn on [ta, tb] given fn(ta), fn(tb) of opposite sign.
template <class Fn>
double bisect(Fn fn, double ta, double tb) {
    double fa = fn(ta);
    for (int it = 0; it < 200 && tb - ta > 1e-15 * std::max(1.0, std::abs(tb)); ++it) {
        const double tm = 0.5 * (ta + tb);
        const double fm = fn(tm);
        if ((fa <= 0.0) == (fm <= 0.0)) {
            ta = tm;
            fa = fm;
        } else {
            tb = tm;
        }
    }
    return 0.5 * (ta + tb);
}

}  // namespace

std::vector<double> scalar_stop_reference(const std::vector<StopSample>& input,
                                          const ScalarBand& band, double sigma0) {
    if (input.size() < 1) throw std::invalid_argument("scalar_stop_reference: empty input");
    {
        const double v = input.front().v;
        if (sigma0 < band.lower(v) - 1e-12 || sigma0 > band.upper(v) + 1e-12)
            throw std::invalid_argument("scalar_stop_reference: sigma0 outside initial band");
    }

    std::vector<double> out;
    out.reserve(input.size());
    double sigma = clamp_scalar(sigma0, band.lower(input.front().v), band.upper(input.front().v));
    out.push_back(sigma);

    StopPhase phase = StopPhase::interior;
    if (sigma == band.lower(input.front().v)) phase = StopPhase::riding_lower;
    if (sigma == band.upper(input.front().v)) phase = StopPhase::riding_upper;

    for (std::size_t k = 0; k + 1 < input.size(); ++k) {
        const double t0 = input[k].t, t1 = input[k + 1].t;
        const double v0 = input[k].v, v1 = input[k + 1].v;
        if (!(t1 > t0)) throw std::invalid_argument("scalar_stop_reference: times not increasing");
        const double vdot = (v1 - v0) / (t1 - t0);
        auto v_at = [&](double t) { return v0 + vdot * (t - t0); };

        double t = t0;
        double sigma_ref = sigma;  // interior anchor: sigma(t) = sigma_ref + (v(t) - v_ref)
        double v_ref = v0;
        // Process the segment, switching phase at bisection-located events.
        for (int guard = 0; guard < 64 && t < t1; ++guard) {
            if (phase == StopPhase::interior) {
                auto gap_up = [&](double s) { return sigma_ref + (v_at(s) - v_ref) - band.upper(v_at(s)); };
                auto gap_lo = [&](double s) { return band.lower(v_at(s)) - (sigma_ref + (v_at(s) - v_ref)); };
                double t_evt = t1;
                StopPhase next = StopPhase::interior;
                if (gap_up(t) <= 0.0 && gap_up(t1) > 0.0) {
                    t_evt = bisect(gap_up, t, t1);
                    next = StopPhase::riding_upper;
                }
                if (gap_lo(t) <= 0.0 && gap_lo(t1) > 0.0) {
                    const double t_lo = bisect(gap_lo, t, t1);
                    if (t_lo < t_evt) {
                        t_evt = t_lo;
                        next = StopPhase::riding_lower;
                    }
                }
                if (next == StopPhase::interior) {
                    sigma = sigma_ref + (v_at(t1) - v_ref);
                    t = t1;
                } else {
                    t = t_evt;
                    sigma = (next == StopPhase::riding_upper) ? band.upper(v_at(t))
                                                              : band.lower(v_at(t));
                    phase = next;
                }
            } else {
                const bool upper = (phase == StopPhase::riding_upper);
                // Detach when the interior rate points inward relative to the
                // moving bound: r_int < r_bound on the upper bound, > on lower.
                auto stay = [&](double s) {
                    const double db = upper ? band.dupper(v_at(s)) : band.dlower(v_at(s));
                    const double rel = vdot - db * vdot;  // r_int - r_bound
                    return upper ? rel : -rel;            // >= 0 means keep riding
                };
                if (stay(t) < 0.0) {
                    phase = StopPhase::interior;
                    sigma_ref = sigma;
                    v_ref = v_at(t);
                    continue;
                }
                double t_detach = t1;
                if (stay(t1) < 0.0) t_detach = bisect([&](double s) { return stay(s); }, t, t1);
                sigma = upper ? band.upper(v_at(t_detach)) : band.lower(v_at(t_detach));
                if (t_detach < t1) {
                    phase = StopPhase::interior;
                    sigma_ref = sigma;
                    v_ref = v_at(t_detach);
                }
                t = t_detach;
            }
        }
        out.push_back(sigma);
    }
    return out;
}

}  // namespace hyrelax
