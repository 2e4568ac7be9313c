#include "hyrelax/geometry.hpp"

#include <cmath>

namespace hyrelax {

namespace {

// Per-cell stencil shared by the serial and parallel entry points so both
// produce bitwise-identical results.
inline double laplacian_at_1d(const std::vector<double>& v, int i, int n, double inv_h2) {
    const double left = (i > 0) ? v[i - 1] - v[i] : 0.0;
    const double right = (i < n - 1) ? v[i + 1] - v[i] : 0.0;
    return (left + right) * inv_h2;
}

inline double laplacian_at_2d(const std::vector<double>& v, int i, int j, int nx, int ny,
                              double inv_hx2, double inv_hy2) {
    const int c = j * nx + i;
    const double lx = (i > 0) ? v[c - 1] - v[c] : 0.0;
    const double rx = (i < nx - 1) ? v[c + 1] - v[c] : 0.0;
    const double ly = (j > 0) ? v[c - nx] - v[c] : 0.0;
    const double ry = (j < ny - 1) ? v[c + nx] - v[c] : 0.0;
    return (lx + rx) * inv_hx2 + (ly + ry) * inv_hy2;
}

}  // namespace

Field neumann_laplacian_serial(const Field& f) {
    Field out(f.grid);
    if (f.grid.dim == 1) {
        const int n = f.grid.n_cells[0];
        const double inv_h2 = 1.0 / (f.grid.spacing(0) * f.grid.spacing(0));
        for (int i = 0; i < n; ++i) out.values[i] = laplacian_at_1d(f.values, i, n, inv_h2);
    } else {
        const int nx = f.grid.n_cells[0];
        const int ny = f.grid.n_cells[1];
        const double inv_hx2 = 1.0 / (f.grid.spacing(0) * f.grid.spacing(0));
        const double inv_hy2 = 1.0 / (f.grid.spacing(1) * f.grid.spacing(1));
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                out.values[f.grid.flat(i, j)] =
                    laplacian_at_2d(f.values, i, j, nx, ny, inv_hx2, inv_hy2);
    }
    return out;
}

Field neumann_laplacian(const Field& f) {
    Field out(f.grid);
    if (f.grid.dim == 1) {
        const int n = f.grid.n_cells[0];
        const double inv_h2 = 1.0 / (f.grid.spacing(0) * f.grid.spacing(0));
#pragma omp parallel for if (n > 4096)
        for (int i = 0; i < n; ++i) out.values[i] = laplacian_at_1d(f.values, i, n, inv_h2);
    } else {
        const int nx = f.grid.n_cells[0];
        const int ny = f.grid.n_cells[1];
        const double inv_hx2 = 1.0 / (f.grid.spacing(0) * f.grid.spacing(0));
        const double inv_hy2 = 1.0 / (f.grid.spacing(1) * f.grid.spacing(1));
#pragma omp parallel for if (nx * ny > 4096)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                out.values[f.grid.flat(i, j)] =
                    laplacian_at_2d(f.values, i, j, nx, ny, inv_hx2, inv_hy2);
    }
    return out;
}

// Inner products are kept serial: a fixed summation order keeps trajectories
// and report files byte-reproducible across thread counts.
double l2_inner(const Field& f, const Field& g) {
    require_same_grid(f, g, "l2_inner");
    double s = 0.0;
    const int n = f.size();
    for (int i = 0; i < n; ++i) s += f[i] * g[i];
    return s * f.grid.cell_volume();
}

double l2_norm(const Field& f) { return std::sqrt(l2_inner(f, f)); }

double grad_norm_sq(const Field& f) {
    const GridSpec& g = f.grid;
    double s = 0.0;
    if (g.dim == 1) {
        const int n = g.n_cells[0];
        const double h = g.spacing(0);
        for (int i = 0; i + 1 < n; ++i) {
            const double d = (f[i + 1] - f[i]) / h;
            s += d * d;
        }
        return s * g.cell_volume();
    }
    const int nx = g.n_cells[0];
    const int ny = g.n_cells[1];
    const double hx = g.spacing(0);
    const double hy = g.spacing(1);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const double d = (f[g.flat(i + 1, j)] - f[g.flat(i, j)]) / hx;
            s += d * d;
        }
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = (f[g.flat(i, j + 1)] - f[g.flat(i, j)]) / hy;
            s += d * d;
        }
    return s * g.cell_volume();
}

std::vector<double> solve_tridiagonal(const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      const std::vector<double>& c,
                                      const std::vector<double>& d) {
    const int n = static_cast<int>(b.size());
    std::vector<double> cp(n, 0.0), dp(n, 0.0), x(n, 0.0);
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for (int i = 1; i < n; ++i) {
        const double m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    x[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

namespace {

// Tridiagonal coefficients of (I - coef * L_1d) on n cells with zero-flux
// closure; diag_shift adds to the identity part (2-D x-mode coupling).
void helmholtz_bands(int n, double coef_over_h2, double diag_shift, std::vector<double>& a,
                     std::vector<double>& b, std::vector<double>& c) {
    a.assign(n, 0.0);
    b.assign(n, 0.0);
    c.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double diag = 1.0 + diag_shift;
        if (i > 0) {
            a[i] = -coef_over_h2;
            diag += coef_over_h2;
        }
        if (i < n - 1) {
            c[i] = -coef_over_h2;
            diag += coef_over_h2;
        }
        b[i] = diag;
    }
}

Field solve_helmholtz_1d(const Field& rhs, double coef) {
    const int n = rhs.grid.n_cells[0];
    const double h = rhs.grid.spacing(0);
    std::vector<double> a, b, c;
    helmholtz_bands(n, coef / (h * h), 0.0, a, b, c);
    Field out(rhs.grid);
    out.values = solve_tridiagonal(a, b, c, rhs.values);
    return out;
}

// 2-D direct solve: expand in the exact eigenbasis of the 1-D operator along
// x (cosine modes cos(pi k (i+1/2)/nx)), solve one tridiagonal system in y
// per mode, transform back. Exact up to roundoff for any nx, ny.
Field solve_helmholtz_2d(const Field& rhs, double coef) {
    const GridSpec& g = rhs.grid;
    const int nx = g.n_cells[0];
    const int ny = g.n_cells[1];
    const double hx = g.spacing(0);
    const double hy = g.spacing(1);

    std::vector<double> basis(static_cast<std::size_t>(nx) * nx);  // basis[k*nx+i]
    std::vector<double> eig(nx);
    const double pi = std::acos(-1.0);
    for (int k = 0; k < nx; ++k) {
        const double theta = pi * k / nx;
        const double s = std::sin(0.5 * theta);
        eig[k] = -4.0 / (hx * hx) * s * s;
        for (int i = 0; i < nx; ++i) basis[k * nx + i] = std::cos(theta * (i + 0.5));
    }

    // Forward transform per row: hat[k*ny + j].
    std::vector<double> hat(static_cast<std::size_t>(nx) * ny, 0.0);
#pragma omp parallel for if (nx * ny > 4096)
    for (int k = 0; k < nx; ++k) {
        const double scale = (k == 0) ? 1.0 / nx : 2.0 / nx;
        for (int j = 0; j < ny; ++j) {
            double s = 0.0;
            for (int i = 0; i < nx; ++i) s += rhs.values[g.flat(i, j)] * basis[k * nx + i];
            hat[k * ny + j] = s * scale;
        }
    }

    // Per mode: (I - coef*Ly + coef*|eig_k| I) y_hat = rhs_hat.
#pragma omp parallel for if (nx * ny > 4096)
    for (int k = 0; k < nx; ++k) {
        std::vector<double> a, b, c;
        helmholtz_bands(ny, coef / (hy * hy), -coef * eig[k], a, b, c);
        std::vector<double> d(hat.begin() + k * ny, hat.begin() + (k + 1) * ny);
        std::vector<double> y = solve_tridiagonal(a, b, c, d);
        std::copy(y.begin(), y.end(), hat.begin() + k * ny);
    }

    Field out(g);
#pragma omp parallel for if (nx * ny > 4096)
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double s = 0.0;
            for (int k = 0; k < nx; ++k) s += hat[k * ny + j] * basis[k * nx + i];
            out.values[g.flat(i, j)] = s;
        }
    return out;
}

}  // namespace

Field solve_helmholtz(const Field& rhs, double dt, double diffusivity) {
    if (!(dt >= 0.0)) throw std::invalid_argument("solve_helmholtz: dt must be >= 0");
    if (!(diffusivity >= 0.0))
        throw std::invalid_argument("solve_helmholtz: diffusivity must be >= 0");
    const double coef = dt * diffusivity;
    if (coef == 0.0) return rhs;
    if (rhs.grid.dim == 1) return solve_helmholtz_1d(rhs, coef);
    return solve_helmholtz_2d(rhs, coef);
}

}  // namespace hyrelax
