#include <doctest.h>

#include <cmath>

#include "srf/grid.hpp"

using namespace srf;

TEST_CASE("derivatives are 4th order on smooth data") {
    auto err_at = [](int n) {
        Grid g(n);
        Profile f(static_cast<size_t>(n)), ref(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double s = g.cell(i);
            f[static_cast<size_t>(i)] = std::sin(2.0 * M_PI * s) + s * s * s;
            ref[static_cast<size_t>(i)] = 2.0 * M_PI * std::cos(2.0 * M_PI * s) + 3.0 * s * s;
        }
        const Profile d = g.deriv_cell(f);
        double e = 0.0;
        for (int i = 0; i < n; ++i)
            e = std::max(e, std::abs(d[static_cast<size_t>(i)] - ref[static_cast<size_t>(i)]));
        return e;
    };
    const double e1 = err_at(128), e2 = err_at(256);
    CHECK(e1 / e2 > 8.0); // >= 8x reduction per refinement
    CHECK(e2 < 1e-6);
}

TEST_CASE("staggered face derivative matches analytic values") {
    Grid g(256);
    Profile f(256);
    for (int i = 0; i < 256; ++i) {
        const double s = g.cell(i);
        f[static_cast<size_t>(i)] = std::exp(s) * std::cos(s);
    }
    const Profile d = g.deriv_cell_to_face(f);
    double e = 0.0;
    for (int j = 0; j <= 256; ++j) {
        const double s = g.faces()[static_cast<size_t>(j)];
        const double ref = std::exp(s) * (std::cos(s) - std::sin(s));
        e = std::max(e, std::abs(d[static_cast<size_t>(j)] - ref));
    }
    CHECK(e < 1e-9);
}

TEST_CASE("quadrature: midpoint with endpoint corrections") {
    auto err_at = [](int n) {
        Grid g(n);
        Profile f(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double s = g.cell(i);
            f[static_cast<size_t>(i)] = std::exp(2.0 * s);
        }
        return std::abs(g.integrate(f) - 0.5 * (std::exp(2.0) - 1.0));
    };
    CHECK(err_at(256) < 1e-12);
    // refinement contract: N -> 2N changes the result by < 1e-8
    Grid g1(128), g2(256);
    auto fill = [](const Grid& g) {
        Profile f(static_cast<size_t>(g.n()));
        for (int i = 0; i < g.n(); ++i) {
            const double s = g.cell(i);
            f[static_cast<size_t>(i)] = std::cos(3.0 * s) / (1.0 + s * s);
        }
        return f;
    };
    CHECK(std::abs(g1.integrate(fill(g1)) - g2.integrate(fill(g2))) < 1e-8);
}

TEST_CASE("cumulative integral and interpolation") {
    Grid g(256);
    Profile f(256);
    for (int i = 0; i < 256; ++i) {
        const double s = g.cell(i);
        f[static_cast<size_t>(i)] = 3.0 * s * s;
    }
    const Profile c = g.cumulative(f);
    double e = 0.0;
    for (int j = 0; j <= 256; ++j) {
        const double s = g.faces()[static_cast<size_t>(j)];
        e = std::max(e, std::abs(c[static_cast<size_t>(j)] - s * s * s));
    }
    CHECK(e < 1e-12);

    for (double s : {0.0123, 0.5, 0.777, 0.9987})
        CHECK(g.interp(f, s) == doctest::Approx(3.0 * s * s).epsilon(1e-8));
}

TEST_CASE("grid rejects tiny sizes") {
    CHECK_THROWS_AS(Grid(8), std::invalid_argument);
}
