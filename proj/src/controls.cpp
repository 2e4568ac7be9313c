#include "hyrelax/controls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hyrelax {

void RelaxedControl::check_valid() const {
    const std::size_t expect =
        static_cast<std::size_t>(n_steps) * n_cells * n_gen;
    if (weights.size() != expect)
        throw std::invalid_argument("RelaxedControl: weight array size mismatch");
    for (int s = 0; s < n_steps; ++s)
        for (int c = 0; c < n_cells; ++c) {
            const double* lam = at(s, c);
            double sum = 0.0;
            for (int j = 0; j < n_gen; ++j) {
                if (lam[j] < 0.0)
                    throw std::invalid_argument("RelaxedControl: negative weight");
                sum += lam[j];
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw std::invalid_argument("RelaxedControl: weights do not sum to 1");
        }
}

std::vector<double> feasible_values(const ControlSet& set, double t, double x, double y,
                                    double s, double v, double w) {
    std::vector<double> vals(set.count());
    for (int j = 0; j < set.count(); ++j) vals[j] = set.generators[j](t, x, y, s, v, w);
    return vals;
}

double hull_value(const RelaxedControl& rc, const ControlSet& set, int step, int cell, double t,
                  double x, double y, double s, double v, double w) {
    const double* lam = rc.at(step, cell);
    double out = 0.0;
    for (int j = 0; j < set.count(); ++j) out += lam[j] * set.generators[j](t, x, y, s, v, w);
    return out;
}

int nearest_selection(double target, const ControlSet& set, double t, double x, double y,
                      double s, double v, double w) {
    int best = 0;
    double best_d = std::abs(target - set.generators[0](t, x, y, s, v, w));
    for (int j = 1; j < set.count(); ++j) {
        const double d = std::abs(target - set.generators[j](t, x, y, s, v, w));
        if (d < best_d) {  // strict: ties stay with the smaller index
            best_d = d;
            best = j;
        }
    }
    return best;
}

namespace {

// Integer step counts per generator with sum n_window by largest-remainder
// rounding of the target shares; ties go to the smaller index. The fractional
// remainder of each generator is carried into the next window, so the
// cumulative allocation never drifts more than one step per generator from
// the cumulative target (this keeps the weak-norm defect inside 2mT/N).
void largest_remainder_counts(const std::vector<double>& share, int n_window,
                              std::vector<int>& counts) {
    const int K = static_cast<int>(share.size());
    counts.assign(K, 0);
    std::vector<double> frac(K);
    int assigned = 0;
    for (int j = 0; j < K; ++j) {
        counts[j] = std::max(0, static_cast<int>(std::floor(share[j])));
        frac[j] = share[j] - counts[j];
        assigned += counts[j];
    }
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return frac[a] > frac[b]; });
    for (int r = 0; assigned < n_window; ++r) {
        counts[order[r % K]] += 1;
        ++assigned;
    }
    for (int j = K - 1; assigned > n_window && j >= 0; --j) {
        const int drop = std::min(counts[j], assigned - n_window);
        counts[j] -= drop;
        assigned -= drop;
    }
}

void chatter_window_cell(const RelaxedControl& rc, int cell, int step_begin, int step_end,
                         ControlField& out, std::vector<double>& share,
                         std::vector<int>& counts, std::vector<double>& carry) {
    const int K = rc.n_gen;
    const int n_window = step_end - step_begin;
    share.assign(K, 0.0);
    for (int s = step_begin; s < step_end; ++s) {
        const double* lam = rc.at(s, cell);
        for (int j = 0; j < K; ++j) share[j] += lam[j];
    }
    for (int j = 0; j < K; ++j) share[j] += carry[j];
    largest_remainder_counts(share, n_window, counts);
    for (int j = 0; j < K; ++j) carry[j] = share[j] - counts[j];
    int s = step_begin;
    for (int j = 0; j < K; ++j)
        for (int r = 0; r < counts[j]; ++r) out.idx[s++ * rc.n_cells + cell] =
            static_cast<std::uint16_t>(j);
}

}  // namespace

// Windows are sequential per cell (the rounding carry flows forward); cells
// are independent.
void chatter_cell(const RelaxedControl& rc, int windows, int cell, ControlField& out,
                  std::vector<double>& share, std::vector<int>& counts,
                  std::vector<double>& carry) {
    carry.assign(rc.n_gen, 0.0);
    for (int w = 0; w < windows; ++w) {
        const int b = static_cast<int>(std::llround(static_cast<double>(w) * rc.n_steps / windows));
        const int e =
            static_cast<int>(std::llround(static_cast<double>(w + 1) * rc.n_steps / windows));
        chatter_window_cell(rc, cell, b, e, out, share, counts, carry);
    }
}

ControlField chatter_serial(const RelaxedControl& rc, int windows) {
    if (windows < 1) throw std::invalid_argument("chatter: windows >= 1");
    if (windows > rc.n_steps)
        throw std::invalid_argument("chatter: more windows than time steps");
    ControlField out;
    out.dt = rc.dt;
    out.n_steps = rc.n_steps;
    out.n_cells = rc.n_cells;
    out.idx.assign(static_cast<std::size_t>(rc.n_steps) * rc.n_cells, 0);

    std::vector<double> share;
    std::vector<int> counts;
    std::vector<double> carry;
    for (int c = 0; c < rc.n_cells; ++c) chatter_cell(rc, windows, c, out, share, counts, carry);
    return out;
}

ControlField chatter(const RelaxedControl& rc, int windows) {
    if (windows < 1) throw std::invalid_argument("chatter: windows >= 1");
    if (windows > rc.n_steps)
        throw std::invalid_argument("chatter: more windows than time steps");
    ControlField out;
    out.dt = rc.dt;
    out.n_steps = rc.n_steps;
    out.n_cells = rc.n_cells;
    out.idx.assign(static_cast<std::size_t>(rc.n_steps) * rc.n_cells, 0);

#pragma omp parallel
    {
        std::vector<double> share;
        std::vector<int> counts;
        std::vector<double> carry;
#pragma omp for
        for (int c = 0; c < rc.n_cells; ++c)
            chatter_cell(rc, windows, c, out, share, counts, carry);
    }
    return out;
}

namespace {

void require_compatible(const RealizedControl& u1, const RealizedControl& u2) {
    if (!(u1.grid == u2.grid))
        throw std::invalid_argument("weak_norm_defect: spatial grids differ");
    if (u1.n_steps != u2.n_steps || u1.dt != u2.dt)
        throw std::invalid_argument("weak_norm_defect: time grids differ");
}

}  // namespace

double weak_norm_defect_serial(const RealizedControl& u1, const RealizedControl& u2) {
    require_compatible(u1, u2);
    const int steps = u1.n_steps;
    const int cells = u1.grid.cells();
    const double vol = u1.grid.cell_volume();

    // prefix[t] = integral_0^{t dt} (u1 - u2), per cell.
    std::vector<double> prefix(static_cast<std::size_t>(steps + 1) * cells, 0.0);
    for (int t = 0; t < steps; ++t)
        for (int c = 0; c < cells; ++c)
            prefix[(t + 1) * static_cast<std::size_t>(cells) + c] =
                prefix[t * static_cast<std::size_t>(cells) + c] +
                u1.dt * (u1.at(t, c) - u2.at(t, c));

    double worst_sq = 0.0;
    for (int s = 0; s <= steps; ++s)
        for (int t = s + 1; t <= steps; ++t) {
            double acc = 0.0;
            for (int c = 0; c < cells; ++c) {
                const double d = prefix[t * static_cast<std::size_t>(cells) + c] -
                                 prefix[s * static_cast<std::size_t>(cells) + c];
                acc += d * d;
            }
            worst_sq = std::max(worst_sq, acc * vol);
        }
    return std::sqrt(worst_sq);
}

double weak_norm_defect(const RealizedControl& u1, const RealizedControl& u2) {
    require_compatible(u1, u2);
    const int steps = u1.n_steps;
    const int cells = u1.grid.cells();
    const double vol = u1.grid.cell_volume();

    std::vector<double> prefix(static_cast<std::size_t>(steps + 1) * cells, 0.0);
    for (int t = 0; t < steps; ++t)
        for (int c = 0; c < cells; ++c)
            prefix[(t + 1) * static_cast<std::size_t>(cells) + c] =
                prefix[t * static_cast<std::size_t>(cells) + c] +
                u1.dt * (u1.at(t, c) - u2.at(t, c));

    double worst_sq = 0.0;
#pragma omp parallel for reduction(max : worst_sq) schedule(static)
    for (int s = 0; s <= steps; ++s) {
        double local = 0.0;
        for (int t = s + 1; t <= steps; ++t) {
            double acc = 0.0;
            for (int c = 0; c < cells; ++c) {
                const double d = prefix[t * static_cast<std::size_t>(cells) + c] -
                                 prefix[s * static_cast<std::size_t>(cells) + c];
                acc += d * d;
            }
            local = std::max(local, acc * vol);
        }
        worst_sq = std::max(worst_sq, local);
    }
    return std::sqrt(worst_sq);
}

}  // namespace hyrelax
