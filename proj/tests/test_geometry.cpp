#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hyrelax/geometry.hpp"

using namespace hyrelax;

namespace {

std::mt19937_64 rng(12345);

double unit(std::mt19937_64& r) { return (r() >> 11) * 0x1.0p-53; }

Field random_field(const GridSpec& g) {
    Field f(g);
    for (auto& x : f.values) x = 2.0 * unit(rng) - 1.0;
    return f;
}

}  // namespace

TEST_CASE("laplacian of a constant field is zero") {
    for (const GridSpec& g : {GridSpec::line(17), GridSpec::rect(9, 7)}) {
        const Field f(g, 3.25);
        const Field lf = neumann_laplacian(f);
        for (double x : lf.values) CHECK(x == 0.0);
    }
}

TEST_CASE("1-D three-cell stencil evaluates directly") {
    const GridSpec g = GridSpec::line(3, 3.0);  // h = 1
    Field f(g);
    f.values = {0.0, 1.0, 0.0};
    const Field lf = neumann_laplacian(f);
    CHECK(lf[0] == doctest::Approx(1.0));
    CHECK(lf[1] == doctest::Approx(-2.0));
    CHECK(lf[2] == doctest::Approx(1.0));
    CHECK(std::abs(field_mass(lf)) <= 1e-15);
}

TEST_CASE("laplacian of cos(pi x) converges at second order") {
    const double pi = std::acos(-1.0);
    auto max_err = [&](int n) {
        const GridSpec g = GridSpec::line(n);
        const Field f = Field::from_function(g, [&](double x, double) { return std::cos(pi * x); });
        const Field lf = neumann_laplacian(f);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = g.center(0, i);
            worst = std::max(worst, std::abs(lf[i] + pi * pi * std::cos(pi * x)));
        }
        return worst;
    };
    const double e64 = max_err(64);
    const double e128 = max_err(128);
    CHECK(e64 / e128 > 3.3);
    CHECK(e64 / e128 < 4.7);
}

TEST_CASE("parallel laplacian matches the serial reference bitwise") {
    for (const GridSpec& g : {GridSpec::line(10000), GridSpec::rect(150, 80)}) {
        const Field f = random_field(g);
        const Field a = neumann_laplacian(f);
        const Field b = neumann_laplacian_serial(f);
        for (int i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
}

TEST_CASE("conservation: weighted cell sum of the laplacian vanishes") {
    for (const GridSpec& g : {GridSpec::line(64), GridSpec::line(7, 2.5), GridSpec::rect(16, 24)}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Field f = random_field(g);
            CHECK(std::abs(field_mass(neumann_laplacian(f))) <= 1e-12 * l2_norm(f));
        }
    }
}

TEST_CASE("summation by parts: symmetry and negativity") {
    for (const GridSpec& g : {GridSpec::line(33), GridSpec::rect(8, 11, 2.0, 0.5)}) {
        const Field f = random_field(g);
        const Field h = random_field(g);
        const Field lf = neumann_laplacian(f);
        const Field lh = neumann_laplacian(h);
        CHECK(l2_inner(lf, h) == doctest::Approx(l2_inner(f, lh)).epsilon(1e-10));
        CHECK(l2_inner(lf, f) <= 1e-12);
        // face-difference gradient norm equals -<Lf, f>
        CHECK(grad_norm_sq(f) == doctest::Approx(-l2_inner(lf, f)).epsilon(1e-10));
    }
}

TEST_CASE("inner product basics") {
    const GridSpec g = GridSpec::line(19);
    const Field ones(g, 1.0);
    CHECK(l2_norm(ones) == doctest::Approx(1.0));

    const GridSpec g2 = GridSpec::line(2, 1.0);  // h = 0.5
    Field f(g2);
    f.values = {3.0, 4.0};
    CHECK(l2_norm(f) == doctest::Approx(std::sqrt(12.5)));

    // direct-summation oracle for norm^2
    const GridSpec g3 = GridSpec::line(40, 1.7);
    const Field r = random_field(g3);
    double direct = 0.0;
    for (double x : r.values) direct += x * x * g3.spacing(0);
    CHECK(l2_inner(r, r) == doctest::Approx(direct).epsilon(1e-13));

    const Field other(GridSpec::line(7));
    CHECK_THROWS(l2_inner(r, other));
}

TEST_CASE("helmholtz: constants sit in the kernel and dt=0 is the identity") {
    for (const GridSpec& g : {GridSpec::line(12), GridSpec::rect(6, 9)}) {
        const Field c(g, 0.7);
        const Field y = solve_helmholtz(c, 0.3, 2.0);
        for (double x : y.values) CHECK(x == doctest::Approx(0.7).epsilon(1e-13));

        const Field r = random_field(g);
        const Field id = solve_helmholtz(r, 0.0, 1.0);
        for (int i = 0; i < r.size(); ++i) CHECK(id[i] == r[i]);
    }
}

TEST_CASE("helmholtz: discrete cosine eigenfunction identity and O(h^2) accuracy") {
    const double pi = std::acos(-1.0);
    const double dt = 0.2;

    // exact identity with the discrete eigenvalue
    for (int n : {32, 64}) {
        const GridSpec g = GridSpec::line(n);
        const double h = g.spacing(0);
        const Field f =
            Field::from_function(g, [&](double x, double) { return std::cos(pi * x); });
        const double lam = -4.0 / (h * h) * std::pow(std::sin(pi / (2 * n)), 2);
        const Field y = solve_helmholtz(f, dt, 1.0);
        for (int i = 0; i < n; ++i)
            CHECK(y[i] == doctest::Approx(f[i] / (1.0 - dt * lam)).epsilon(1e-12));
    }

    // O(h^2) agreement with the continuum eigenvalue
    auto cont_err = [&](int n) {
        const GridSpec g = GridSpec::line(n);
        const Field f =
            Field::from_function(g, [&](double x, double) { return std::cos(pi * x); });
        const Field y = solve_helmholtz(f, dt, 1.0);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(y[i] - f[i] / (1.0 + dt * pi * pi)));
        return worst;
    };
    const double r = cont_err(32) / cont_err(64);
    CHECK(r > 3.3);
    CHECK(r < 4.7);
}

TEST_CASE("helmholtz round-trip residual stays below 1e-10 relative") {
    std::mt19937_64 local(99);
    for (const GridSpec& g :
         {GridSpec::line(50), GridSpec::line(128, 3.0), GridSpec::rect(24, 17, 1.0, 2.0)}) {
        for (int rep = 0; rep < 3; ++rep) {
            const Field rhs = random_field(g);
            const double dt = 0.05 + 0.4 * unit(local);
            const double kappa = 0.1 + 2.0 * unit(local);
            const Field y = solve_helmholtz(rhs, dt, kappa);
            const Field ly = neumann_laplacian(y);
            Field resid(g);
            for (int i = 0; i < y.size(); ++i)
                resid.values[i] = y[i] - dt * kappa * ly[i] - rhs[i];
            CHECK(l2_norm(resid) <= 1e-10 * l2_norm(rhs));
        }
    }
}

TEST_CASE("grid invariants") {
    CHECK_THROWS(GridSpec::line(0));
    CHECK_THROWS(GridSpec::line(4, -1.0));
    const GridSpec g = GridSpec::rect(4, 5, 2.0, 1.0);
    CHECK(g.cells() == 20);
    CHECK(g.cell_volume() == doctest::Approx(0.5 * 0.2));
    CHECK(g.center(0, 0) == doctest::Approx(0.25));
}
