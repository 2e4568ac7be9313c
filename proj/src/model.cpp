#include "hyrelax/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hyrelax {

void ConstraintBand::check_valid() const {
    require_same_grid(lower, upper, "ConstraintBand");
    const int n = lower.size();
    for (int i = 0; i < n; ++i) {
        if (!(0.0 <= lower[i] && lower[i] <= upper[i] && upper[i] <= 1.0))
            throw std::runtime_error("ConstraintBand: 0 <= lower <= upper <= 1 violated at cell " +
                                     std::to_string(i));
    }
}

ConstraintBand eval_bounds_serial(const ModelSpec& model, const Field& v, const Field& w) {
    require_same_grid(v, w, "eval_bounds");
    ConstraintBand band{Field(v.grid), Field(v.grid)};
    const int n = v.size();
    for (int i = 0; i < n; ++i) {
        band.lower.values[i] = model.f_lower(v[i], w[i]);
        band.upper.values[i] = model.f_upper(v[i], w[i]);
    }
    return band;
}

ConstraintBand eval_bounds(const ModelSpec& model, const Field& v, const Field& w) {
    require_same_grid(v, w, "eval_bounds");
    ConstraintBand band{Field(v.grid), Field(v.grid)};
    const int n = v.size();
#pragma omp parallel for if (n > 2048)
    for (int i = 0; i < n; ++i) {
        band.lower.values[i] = model.f_lower(v[i], w[i]);
        band.upper.values[i] = model.f_upper(v[i], w[i]);
    }
    return band;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : clauses) {
        os << (c.pass ? "[pass] " : "[FAIL] ") << c.clause;
        if (!c.pass) os << "  worst=" << c.worst << " at " << c.witness;
        os << "\n";
    }
    return os.str();
}

namespace {

std::string point_str(std::initializer_list<double> xs) {
    std::ostringstream os;
    os << "(";
    bool first = true;
    for (double x : xs) {
        if (!first) os << ", ";
        os << x;
        first = false;
    }
    os << ")";
    return os.str();
}

// Tracks the most violating sample of a clause; "violation" is positive
// margin. The witness string is only built when the worst value improves, so
// the dense sampling loops stay allocation-free.
struct WorstTracker {
    double worst = 0.0;
    std::string witness;

    template <class MakeWitness>
    void offer(double violation, MakeWitness make_witness) {
        if (violation > worst) {
            worst = violation;
            witness = make_witness();
        }
    }
    ClauseResult finish(std::string clause, double tol = 0.0) const {
        ClauseResult r;
        r.clause = std::move(clause);
        r.pass = worst <= tol;
        r.worst = worst;
        r.witness = witness;
        return r;
    }
};

double hausdorff_1d(const double* A, const double* B, int n) {
    auto one_sided = [n](const double* X, const double* Y) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) best = std::min(best, std::abs(X[i] - Y[j]));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(A, B), one_sided(B, A));
}

}  // namespace

ValidationReport validate_hypotheses(const ModelSpec& model, const InitialData& init,
                                     const ControlSet* controls, int box_samples) {
    if (box_samples < 2) throw std::invalid_argument("validate_hypotheses: box_samples >= 2");
    ValidationReport report;
    const double R = model.R0_cap;
    const int ns = box_samples;
    auto grid_pt = [&](int k) { return R * k / (ns - 1); };

    // (H1): 0 <= f_* <= f^* <= 1 on the sampled (v, w) box.
    {
        WorstTracker t;
        for (int iv = 0; iv < ns; ++iv)
            for (int iw = 0; iw < ns; ++iw) {
                const double v = grid_pt(iv), w = grid_pt(iw);
                const double lo = model.f_lower(v, w), up = model.f_upper(v, w);
                const double viol = std::max({-lo, lo - up, up - 1.0});
                t.offer(viol, [&] { return point_str({v, w}); });
            }
        report.clauses.push_back(t.finish("H1: 0 <= f_* <= f^* <= 1 on box"));
    }

    // (H2) structural zeros: h(s,0,w) = 0 and g(s,v,0) = 0 for s in [0,1].
    {
        WorstTracker t;
        for (int is = 0; is < ns; ++is)
            for (int iy = 0; iy < ns; ++iy) {
                const double s = static_cast<double>(is) / (ns - 1);
                const double y = grid_pt(iy);
                t.offer(std::abs(model.h_rate(s, 0.0, y)),
                        [&] { return "h at " + point_str({s, 0.0, y}); });
                t.offer(std::abs(model.g_rate(s, y, 0.0)),
                        [&] { return "g at " + point_str({s, y, 0.0}); });
            }
        report.clauses.push_back(t.finish("H2: h(s,0,w) = 0 and g(s,v,0) = 0", 0.0));
    }

    // (H2) Lipschitz: axis-aligned difference quotients of F, h, g vs L.
    {
        WorstTracker t;
        const double step = R / (ns - 1);
        auto check_fn = [&](const RateFn& fn, const char* name) {
            for (int is = 0; is < ns; ++is)
                for (int iv = 0; iv < ns; ++iv)
                    for (int iw = 0; iw < ns; ++iw) {
                        const double s = grid_pt(is), v = grid_pt(iv), w = grid_pt(iw);
                        const double f0 = fn(s, v, w);
                        auto witness = [&] {
                            return std::string(name) + " quotient at " + point_str({s, v, w});
                        };
                        if (is + 1 < ns)
                            t.offer(std::abs(fn(s + step, v, w) - f0) / step - model.L, witness);
                        if (iv + 1 < ns)
                            t.offer(std::abs(fn(s, v + step, w) - f0) / step - model.L, witness);
                        if (iw + 1 < ns)
                            t.offer(std::abs(fn(s, v, w + step) - f0) / step - model.L, witness);
                    }
        };
        check_fn(model.F_rate, "F");
        check_fn(model.h_rate, "h");
        check_fn(model.g_rate, "g");
        report.clauses.push_back(t.finish("H2: sampled Lipschitz quotients of F, h, g <= L"));
    }

    // Band Lipschitz quotients vs L0 (used by the clamp-deviation estimate).
    {
        WorstTracker t;
        const double step = R / (ns - 1);
        auto check_bound = [&](const BoundFn& fn, const char* name) {
            for (int iv = 0; iv < ns; ++iv)
                for (int iw = 0; iw < ns; ++iw) {
                    const double v = grid_pt(iv), w = grid_pt(iw);
                    const double f0 = fn(v, w);
                    auto witness = [&] {
                        return std::string(name) + " quotient at " + point_str({v, w});
                    };
                    if (iv + 1 < ns)
                        t.offer(std::abs(fn(v + step, w) - f0) / step - model.L0, witness);
                    if (iw + 1 < ns)
                        t.offer(std::abs(fn(v, w + step) - f0) / step - model.L0, witness);
                }
        };
        check_bound(model.f_lower, "f_*");
        check_bound(model.f_upper, "f^*");
        report.clauses.push_back(t.finish("H1/L0: sampled band Lipschitz quotients <= L0"));
    }

    // (H3): v0, w0 >= 0 and f_*(v0,w0) <= sigma0 <= f^*(v0,w0) per cell.
    {
        WorstTracker t;
        const int n = init.sigma0.size();
        for (int i = 0; i < n; ++i) {
            const double v = init.v0[i], w = init.w0[i], s = init.sigma0[i];
            const double lo = model.f_lower(v, w), up = model.f_upper(v, w);
            t.offer(std::max({-v, -w, lo - s, s - up}),
                    [&] { return "cell " + std::to_string(i); });
        }
        report.clauses.push_back(t.finish("H3: v0, w0 >= 0 and sigma0 inside the band"));
    }

    if (controls != nullptr) {
        const int K = controls->count();
        // (U2): |phi_j| <= m on sampled states (t, x fixed at a few probes).
        {
            WorstTracker t;
            const double probes[2] = {0.0, 0.37};
            for (double tx : probes)
                for (int is = 0; is < ns; ++is)
                    for (int iv = 0; iv < ns; ++iv)
                        for (int iw = 0; iw < ns; ++iw) {
                            const double s = grid_pt(is), v = grid_pt(iv), w = grid_pt(iw);
                            for (int j = 0; j < K; ++j) {
                                const double val =
                                    controls->generators[j](tx, tx, 0.0, s, v, w);
                                t.offer(std::abs(val) - controls->m_bound, [&] {
                                    return "phi_" + std::to_string(j + 1) + " at " +
                                           point_str({s, v, w});
                                });
                            }
                        }
            report.clauses.push_back(t.finish("U2: |phi_j| <= m on box"));
        }
        // (U3): Hausdorff quotient between generator sets at adjacent states.
        {
            WorstTracker t;
            const double step = R / (ns - 1);
            std::vector<double> base(K), moved(K);
            auto fill_values = [&](double s, double v, double w, std::vector<double>& out) {
                for (int j = 0; j < K; ++j)
                    out[j] = controls->generators[j](0.0, 0.0, 0.0, s, v, w);
            };
            for (int is = 0; is < ns; ++is)
                for (int iv = 0; iv < ns; ++iv)
                    for (int iw = 0; iw < ns; ++iw) {
                        const double s = grid_pt(is), v = grid_pt(iv), w = grid_pt(iw);
                        fill_values(s, v, w, base);
                        auto offer_pair = [&](double s2, double v2, double w2) {
                            fill_values(s2, v2, w2, moved);
                            const double d = hausdorff_1d(base.data(), moved.data(), K);
                            t.offer(d / step - controls->k_lip, [&] {
                                return point_str({s, v, w}) + " -> " + point_str({s2, v2, w2});
                            });
                        };
                        if (is + 1 < ns) offer_pair(s + step, v, w);
                        if (iv + 1 < ns) offer_pair(s, v + step, w);
                        if (iw + 1 < ns) offer_pair(s, v, w + step);
                    }
            report.clauses.push_back(
                t.finish("U3: sampled Hausdorff quotients <= k_lip", 1e-12));
        }
    }

    return report;
}

ReactionSups reaction_sups(const ModelSpec& model, int box_samples) {
    ReactionSups sup;
    const double R = model.R0_cap;
    const int ns = box_samples;
    for (int is = 0; is < ns; ++is)
        for (int iv = 0; iv < ns; ++iv)
            for (int iw = 0; iw < ns; ++iw) {
                const double s = R * is / (ns - 1);
                const double v = R * iv / (ns - 1);
                const double w = R * iw / (ns - 1);
                sup.F_inf = std::max(sup.F_inf, std::abs(model.F_rate(s, v, w)));
                sup.h_inf = std::max(sup.h_inf, std::abs(model.h_rate(s, v, w)));
                sup.g_inf = std::max(sup.g_inf, std::abs(model.g_rate(s, v, w)));
            }
    return sup;
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double dlogistic(double x) {
    const double s = logistic(x);
    return s * (1.0 - s);
}

// Smooth axis-separable bump in [0,1]^dim coordinates.
double bump_profile(const GridSpec& g, int cell, double center, double width) {
    const auto p = g.cell_center(cell);
    double prod = 1.0;
    for (int a = 0; a < g.dim; ++a) {
        const double xi = p[a] / g.extent[a];
        const double z = (xi - center) / width;
        prod *= std::exp(-z * z);
    }
    return prod;
}

ModelSpec budworm_model() {
    ModelSpec m;
    m.name = "budworm";
    m.f_lower = [](double v, double w) { return 0.4 * logistic(1.5 - v - 0.5 * w); };
    m.df_lower_dv = [](double v, double w) { return -0.4 * dlogistic(1.5 - v - 0.5 * w); };
    m.df_lower_dw = [](double v, double w) { return -0.2 * dlogistic(1.5 - v - 0.5 * w); };
    m.f_upper = [](double v, double w) { return 0.5 + 0.5 * logistic(2.0 - v - 0.5 * w); };
    m.df_upper_dv = [](double v, double w) { return -0.5 * dlogistic(2.0 - v - 0.5 * w); };
    m.df_upper_dw = [](double v, double w) { return -0.25 * dlogistic(2.0 - v - 0.5 * w); };
    m.F_rate = [](double s, double v, double) { return 0.5 * (1.0 - s) - 0.3 * s * v; };
    m.h_rate = [](double s, double v, double w) { return v * (s - 0.4 * w) / (1.0 + v); };
    m.g_rate = [](double, double v, double w) { return w * (0.8 * v - 0.3) / (1.0 + w); };
    m.a = 0.5;
    m.L = 2.5;
    m.L0 = 0.2;
    m.R0_cap = 2.0;
    return m;
}

ModelSpec stop_test_model() {
    ModelSpec m = budworm_model();  // same band geometry
    m.name = "stop-test";
    m.F_rate = [](double, double, double) { return 0.0; };
    // h == 1 once v >= 0.5, so a bounded control drives v' directly there.
    m.h_rate = [](double, double v, double) { return std::min(2.0 * v, 1.0); };
    m.g_rate = [](double, double, double) { return 0.0; };
    m.a = 1.0;
    m.L = 2.5;
    m.R0_cap = 3.0;
    return m;
}

ModelSpec decoupled_model() {
    ModelSpec m;
    m.name = "decoupled";
    m.f_lower = [](double, double) { return 0.2; };
    m.f_upper = [](double, double) { return 0.8; };
    m.df_lower_dv = m.df_lower_dw = [](double, double) { return 0.0; };
    m.df_upper_dv = m.df_upper_dw = [](double, double) { return 0.0; };
    m.F_rate = m.h_rate = m.g_rate = [](double, double, double) { return 0.0; };
    m.a = 0.0;
    m.L = 1.001;  // H2 wants L > 1; sampled quotients are zero
    m.L0 = 0.01;
    m.R0_cap = 2.0;
    return m;
}

Field band_midpoint(const ModelSpec& m, const Field& v, const Field& w) {
    Field s(v.grid);
    for (int i = 0; i < s.size(); ++i)
        s.values[i] = 0.5 * (m.f_lower(v[i], w[i]) + m.f_upper(v[i], w[i]));
    return s;
}

}  // namespace

Preset preset(const std::string& name, const GridSpec& grid) {
    Preset p;
    if (name == "budworm") {
        p.model = budworm_model();
        Field v0(grid), w0(grid);
        for (int c = 0; c < grid.cells(); ++c) {
            v0.values[c] = 0.5 + 0.5 * bump_profile(grid, c, 0.4, 0.18);
            w0.values[c] = 0.3 + 0.3 * bump_profile(grid, c, 0.65, 0.22);
        }
        p.init = {band_midpoint(p.model, v0, w0), v0, w0};
        p.controls.m_bound = 1.0;
        p.controls.k_lip = 1.0;
        p.controls.generators = {
            [](double, double, double, double, double, double) { return 0.0; },
            [m = p.controls.m_bound](double, double, double, double, double v, double) {
                return m / (1.0 + v);
            }};
        return p;
    }
    if (name == "stop-test") {
        p.model = stop_test_model();
        Field v0(grid, 1.5), w0(grid, 0.0);
        p.init = {band_midpoint(p.model, v0, w0), v0, w0};
        p.controls.m_bound = 0.8;
        p.controls.k_lip = 0.0;  // constant generators
        p.controls.generators = {
            [](double, double, double, double, double, double) { return -0.8; },
            [](double, double, double, double, double, double) { return 0.8; }};
        return p;
    }
    if (name == "decoupled") {
        p.model = decoupled_model();
        Field sigma0(grid, 0.5), v0(grid), w0(grid);
        for (int c = 0; c < grid.cells(); ++c) {
            v0.values[c] = 0.5 + 0.5 * bump_profile(grid, c, 0.5, 0.15);
            w0.values[c] = 0.4 + 0.2 * bump_profile(grid, c, 0.3, 0.2);
        }
        p.init = {sigma0, v0, w0};
        p.controls.m_bound = 1.0;
        p.controls.k_lip = 1.0;
        p.controls.generators = {
            [](double, double, double, double, double, double) { return 0.0; },
            [m = p.controls.m_bound](double, double, double, double, double v, double) {
                return m / (1.0 + v);
            }};
        return p;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() { return {"budworm", "stop-test", "decoupled"}; }

}  // namespace hyrelax
