// Discrete Neumann Laplacian, L2 inner products and norms, and the
// implicit-diffusion (Helmholtz) solve. Zero-flux boundary closure makes
// discrete conservation exact.
//
// Hot kernels come in two flavors: the default OpenMP-parallel entry point
// and a *_serial reference used by the test and benchmark suites.
#pragma once

#include "hyrelax/grid.hpp"

namespace hyrelax {

// Cell-centered Laplacian with one-sided zero-flux closure:
// 3-point stencil in 1-D, 5-point in 2-D. Constants are in the kernel and
// the weighted cell sum of the output vanishes.
Field neumann_laplacian(const Field& f);
Field neumann_laplacian_serial(const Field& f);

double l2_inner(const Field& f, const Field& g);
double l2_norm(const Field& f);

// Squared H-norm of the discrete gradient via face differences. Equals
// -<Lf, f> exactly in exact arithmetic (summation by parts, zero flux).
double grad_norm_sq(const Field& f);

// Solves (I - dt * diffusivity * Laplacian_N) y = rhs exactly:
// Thomas algorithm in 1-D, cosine-transform in x + tridiagonal in y in 2-D.
// Residual norm stays below 1e-10 * norm(rhs).
Field solve_helmholtz(const Field& rhs, double dt, double diffusivity);

// Thomas algorithm for a tridiagonal system; b is the main diagonal,
// a the sub- and c the super-diagonal (a[0], c[n-1] unused).
std::vector<double> solve_tridiagonal(const std::vector<double>& a,
                                      const std::vector<double>& b,
                                      const std::vector<double>& c,
                                      const std::vector<double>& d);

}  // namespace hyrelax
