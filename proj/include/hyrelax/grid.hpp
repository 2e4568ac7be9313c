// Cell-centered uniform grids on intervals and rectangles, and the
// grid functions living on them.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyrelax {

// Discretized domain: 1-D interval or 2-D rectangle, cell-centered layout.
// Cell i along an axis has its center at (i + 1/2) * spacing.
struct GridSpec {
    int dim = 1;
    std::array<int, 2> n_cells{1, 1};
    std::array<double, 2> extent{1.0, 1.0};

    static GridSpec line(int n, double length = 1.0) {
        GridSpec g;
        g.dim = 1;
        g.n_cells = {n, 1};
        g.extent = {length, 1.0};
        g.validate();
        return g;
    }

    static GridSpec rect(int nx, int ny, double lx = 1.0, double ly = 1.0) {
        GridSpec g;
        g.dim = 2;
        g.n_cells = {nx, ny};
        g.extent = {lx, ly};
        g.validate();
        return g;
    }

    void validate() const {
        if (dim != 1 && dim != 2)
            throw std::invalid_argument("GridSpec: dim must be 1 or 2");
        for (int a = 0; a < dim; ++a) {
            if (n_cells[a] < 1)
                throw std::invalid_argument("GridSpec: n_cells >= 1 per axis");
            if (!(extent[a] > 0.0))
                throw std::invalid_argument("GridSpec: extent > 0 per axis");
        }
    }

    double spacing(int axis) const { return extent[axis] / n_cells[axis]; }

    int cells() const { return dim == 1 ? n_cells[0] : n_cells[0] * n_cells[1]; }

    // Measure of one cell (length in 1-D, area in 2-D).
    double cell_volume() const {
        double v = spacing(0);
        if (dim == 2) v *= spacing(1);
        return v;
    }

    double domain_measure() const {
        double v = extent[0];
        if (dim == 2) v *= extent[1];
        return v;
    }

    double center(int axis, int i) const { return (i + 0.5) * spacing(axis); }

    // Cell center coordinates of the flat index; y = 0 in 1-D.
    std::array<double, 2> cell_center(int flat) const {
        if (dim == 1) return {center(0, flat), 0.0};
        const int i = flat % n_cells[0];
        const int j = flat / n_cells[0];
        return {center(0, i), center(1, j)};
    }

    int flat(int i, int j) const { return j * n_cells[0] + i; }

    bool operator==(const GridSpec&) const = default;
};

// A grid function: one real value per cell. Discrete element of L2(domain).
struct Field {
    GridSpec grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const GridSpec& g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.cells()), fill) {}

    template <class Fn>
    static Field from_function(const GridSpec& g, Fn f) {
        Field out(g);
        const int n = g.cells();
        for (int c = 0; c < n; ++c) {
            const auto p = g.cell_center(c);
            out.values[static_cast<std::size_t>(c)] = f(p[0], p[1]);
        }
        return out;
    }

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument(std::string(where) + ": fields live on different grids");
}

inline double field_min(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double v : f.values) m = std::min(m, v);
    return m;
}

inline double field_max(const Field& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double v : f.values) m = std::max(m, v);
    return m;
}

// Sum of f over the domain, i.e. the discrete integral.
inline double field_mass(const Field& f) {
    const double vol = f.grid.cell_volume();
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * vol;
}

}  // namespace hyrelax
