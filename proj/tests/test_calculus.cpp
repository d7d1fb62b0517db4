#include <doctest.h>

#include <cmath>

#include "srf/calculus.hpp"
#include "srf/errors.hpp"
#include "test_util.hpp"

using namespace srf;
using namespace srf::test;

namespace {

struct Setup {
    ModelSpec model;
    Calculus calc;
    explicit Setup(int n = 256, Family fam = Family::Round, double a = 1.0, double b = 1.0)
        : model(build_model(fam, a, b, n)), calc(model) {}
};

} // namespace

TEST_CASE("metric_from_potential: zero potential gives the background exactly") {
    Setup su;
    const TransverseMetric g = su.calc.metric_from_potential(BasicField(su.model.grid, 0.0));
    for (size_t i = 0; i < g.regular().size(); ++i)
        CHECK(g.regular()[i] == su.model.m0()[i]);
}

TEST_CASE("metric_from_potential matches the hand-reduced Hessian of a polynomial") {
    // psi = s^2(1-s): for the round weights (D = 1, J = -1/(s(1-s)))
    //   ddbar psi = s(1-s) d/ds [ s(1-s) psi' ]
    // with psi' = 2s - 3s^2, evaluated symbolically below.
    auto check_at = [](int n) {
        Setup su(n);
        Profile psi(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double s = su.calc.grid()->cell(i);
            psi[static_cast<size_t>(i)] = s * s * (1.0 - s);
        }
        const Profile H = su.calc.ddbar(psi);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double s = su.calc.grid()->cell(i);
            // d/ds [ s(1-s)(2s - 3s^2) ] = d/ds [ 2s^2 - 5s^3 + 3s^4 ]
            const double inner = 4.0 * s - 15.0 * s * s + 12.0 * s * s * s;
            const double ref = s * (1.0 - s) * inner;
            worst = std::max(worst, std::abs(H[static_cast<size_t>(i)] - ref));
        }
        return worst;
    };
    CHECK(check_at(256) < 1e-11); // stencils are exact on polynomials
}

TEST_CASE("metric_from_potential signals positivity loss") {
    Setup su;
    Profile phi(256);
    for (int i = 0; i < 256; ++i) {
        const double s = su.calc.grid()->cell(i);
        phi[static_cast<size_t>(i)] = 5.0 * std::cos(M_PI * s); // far past the cone boundary
    }
    CHECK_THROWS_AS(su.calc.metric_from_potential(BasicField(su.model.grid, phi)),
                    PositivityLost);
}

TEST_CASE("curvature: round scalar is 2, trace identity exact, scaling law") {
    Setup su;
    const TransverseMetric g0 = su.calc.background();
    const CurvatureData c = su.calc.curvature(g0);
    for (size_t i = 0; i < c.scalar.values.size(); ++i)
        CHECK(c.scalar[i] == doctest::Approx(2.0).epsilon(1e-10));

    // trace identity scalar = 2 g^{-1} ricci holds exactly by construction
    const Profile inv = g0.inverse();
    for (size_t i = 0; i < inv.size(); ++i)
        CHECK(c.scalar[i] == doctest::Approx(2.0 * inv[i] * c.ricci[i]).epsilon(1e-14));

    // g -> lambda g: scalar -> scalar / lambda
    Profile ml = g0.regular();
    for (double& v : ml) v *= 2.5;
    const CurvatureData cl = su.calc.curvature(TransverseMetric(su.calc.grid(), ml));
    for (size_t i = 0; i < cl.scalar.values.size(); ++i)
        CHECK(cl.scalar[i] == doctest::Approx(c.scalar[i] / 2.5).epsilon(1e-10));
}

TEST_CASE("curvature converges at 4th order on a perturbed metric") {
    auto err_at = [](int n) {
        Setup su(n, Family::Weighted, 1.0, std::sqrt(2.0));
        const auto table = load_table("weighted_background.txt");
        const TransverseMetric g0 = su.calc.background();
        const CurvatureData c = su.calc.curvature(g0);
        // compare against the closed form at matching nodes (fixture is n=256)
        double worst = 0.0;
        const int stride = 256 / n;
        if (stride * n != 256) return worst;
        for (int i = 0; i < n; ++i) {
            const double a = 1.0, b = std::sqrt(2.0);
            const double s = su.calc.grid()->cell(i);
            const double D = a * s + b * (1.0 - s);
            const double Rc = (2.0 * D + 4.0 * (a - b) * (1.0 - 2.0 * s) -
                               6.0 * (a - b) * (a - b) * s * (1.0 - s) / D) /
                              (a + b);
            worst = std::max(worst, std::abs(c.scalar[static_cast<size_t>(i)] - 2.0 * Rc));
        }
        return worst;
    };
    const double e1 = err_at(128), e2 = err_at(256);
    CHECK(e2 < 1e-6);
    CHECK(e1 / e2 > 8.0);
}

TEST_CASE("basic laplacian: constants, divergence theorem, eigenfunction") {
    Setup su(384); // the 1e-8 quadrature tolerances sit at the truncation floor of n=256
    const TransverseMetric g0 = su.calc.background();
    const BasicField lc = su.calc.basic_laplacian(g0, BasicField(su.model.grid, 3.7));
    CHECK(lc.max_abs() < 1e-12); // annihilates constants

    const BasicField f = smooth_field(su.model.grid, 0.8, -0.4, 1.3);
    const BasicField lf = su.calc.basic_laplacian(g0, f);
    CHECK(std::abs(su.calc.integrate(g0, lf.values)) < 1e-8);

    // first torus-invariant eigenfunction 1 - 2s of the background Laplacian
    const int n = su.calc.grid()->n();
    Profile eig(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) eig[static_cast<size_t>(i)] = 1.0 - 2.0 * su.calc.grid()->cell(i);
    const BasicField le = su.calc.basic_laplacian(g0, BasicField(su.model.grid, eig));
    double worst = 0.0;
    for (size_t i = 0; i < eig.size(); ++i)
        worst = std::max(worst, std::abs(le[i] + eig[i])); // Lap f = -1 * f
    CHECK(worst < 1e-10);
}

TEST_CASE("gradient norm: constants, scaling, symbolic check") {
    Setup su;
    const TransverseMetric g0 = su.calc.background();
    CHECK(su.calc.grad_norm_sq(g0, BasicField(su.model.grid, 2.0)).max_abs() < 1e-20);

    // |grad f|^2 scales like 1/lambda
    const BasicField f = smooth_field(su.model.grid, 0.5, 0.2, -0.7);
    const BasicField n1 = su.calc.grad_norm_sq(g0, f);
    Profile ml = g0.regular();
    for (double& v : ml) v *= 3.0;
    const BasicField n2 = su.calc.grad_norm_sq(TransverseMetric(su.calc.grid(), ml), f);
    for (size_t i = 0; i < n1.values.size(); ++i)
        CHECK(n2[i] == doctest::Approx(n1[i] / 3.0).epsilon(1e-12));

    // symbolic: f = s^2 on the round background,
    // |grad f|^2 = (2s)^2 s(1-s)/(m D^2) with m = 2, D = 1
    Profile f2(256);
    for (int i = 0; i < 256; ++i) {
        const double s = su.calc.grid()->cell(i);
        f2[static_cast<size_t>(i)] = s * s;
    }
    const BasicField g2 = su.calc.grad_norm_sq(g0, BasicField(su.model.grid, f2));
    for (int i = 0; i < 256; ++i) {
        const double s = su.calc.grid()->cell(i);
        CHECK(g2[static_cast<size_t>(i)] ==
              doctest::Approx(4.0 * s * s * s * (1.0 - s) / 2.0).epsilon(1e-9));
    }
}

TEST_CASE("integrate: linearity, half-interval symmetry, refinement") {
    Setup su;
    const TransverseMetric g0 = su.calc.background();
    const double vol = su.calc.volume(g0);
    CHECK(vol == doctest::Approx(4.0 * M_PI).epsilon(1e-12));

    // smoothed half-interval indicator on the round background: half volume
    Profile ind(256);
    for (int i = 0; i < 256; ++i) {
        const double s = su.calc.grid()->cell(i);
        ind[static_cast<size_t>(i)] = 0.5 * (1.0 + std::tanh((0.5 - s) / 0.02));
    }
    CHECK(su.calc.integrate(g0, ind) == doctest::Approx(0.5 * vol).epsilon(1e-3));

    // linearity
    const BasicField f = smooth_field(su.model.grid, 1.0, 0.5, 0.0);
    const BasicField g = smooth_field(su.model.grid, -0.3, 0.0, 2.0);
    Profile comb(256);
    for (size_t i = 0; i < comb.size(); ++i) comb[i] = 2.0 * f[i] - 3.0 * g[i];
    CHECK(su.calc.integrate(g0, comb) ==
          doctest::Approx(2.0 * su.calc.integrate(g0, f.values) -
                          3.0 * su.calc.integrate(g0, g.values)).epsilon(1e-12));
}

TEST_CASE("volume is potential-shift invariant and determinant-scaling") {
    Setup su;
    BasicField phi = smooth_field(su.model.grid, 0.02, -0.01, 0.05);
    const TransverseMetric g1 = su.calc.metric_from_potential(phi);
    BasicField phi_shift = phi + 10.0;
    const TransverseMetric g2 = su.calc.metric_from_potential(phi_shift);
    CHECK(su.calc.volume(g1) == doctest::Approx(su.calc.volume(g2)).epsilon(1e-10));
}

TEST_CASE("self-adjointness and integration by parts") {
    Setup su(384);
    const TransverseMetric g0 = su.calc.background();
    BasicField phi = smooth_field(su.model.grid, 0.03, 0.015, -0.02);
    const TransverseMetric g1 = su.calc.metric_from_potential(phi);

    const BasicField f = smooth_field(su.model.grid, 0.9, -0.2, 0.6);
    const BasicField g = smooth_field(su.model.grid, -0.5, 0.8, 0.1);
    for (const TransverseMetric* gT : {&g0, &g1}) {
        const BasicField lf = su.calc.basic_laplacian(*gT, f);
        const BasicField lg = su.calc.basic_laplacian(*gT, g);
        Profile t1(f.values.size()), t2(f.values.size()), t3(f.values.size());
        for (size_t i = 0; i < t1.size(); ++i) {
            t1[i] = f[i] * lg[i];
            t2[i] = g[i] * lf[i];
            t3[i] = f[i] * lf[i];
        }
        CHECK(std::abs(su.calc.integrate(*gT, t1) - su.calc.integrate(*gT, t2)) < 1e-8);
        const double gsq = su.calc.integrate(*gT, su.calc.grad_norm_sq(*gT, f).values);
        CHECK(std::abs(gsq + su.calc.integrate(*gT, t3)) < 1e-8);
    }
}

TEST_CASE("laplacian errors shrink by >= 8x when the grid doubles") {
    auto err_at = [](int n) {
        Setup su(n);
        const TransverseMetric g0 = su.calc.background();
        Profile f(static_cast<size_t>(n)), ref(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double s = su.calc.grid()->cell(i);
            f[static_cast<size_t>(i)] = std::cos(2.0 * M_PI * s);
            // Lap f = (1/(m D)) d/ds [s(1-s) f'] with m = 2, D = 1
            const double fp = -2.0 * M_PI * std::sin(2.0 * M_PI * s);
            const double fpp = -4.0 * M_PI * M_PI * std::cos(2.0 * M_PI * s);
            ref[static_cast<size_t>(i)] = 0.5 * ((1.0 - 2.0 * s) * fp + s * (1.0 - s) * fpp);
        }
        const BasicField lf =
            su.calc.basic_laplacian(g0, BasicField(su.model.grid, f));
        double e = 0.0;
        for (size_t i = 0; i < ref.size(); ++i)
            e = std::max(e, std::abs(lf[i] - ref[i]));
        return e;
    };
    const double e1 = err_at(128), e2 = err_at(256);
    CHECK(e1 / e2 > 8.0);
    CHECK(e2 < 1e-7);
}

TEST_CASE("solve_ddbar inverts the reduced Poisson problem") {
    Setup su;
    const TransverseMetric g0 = su.calc.background();
    // manufacture rhs = ddbar(psi) and recover psi up to its mean
    const BasicField psi = smooth_field(su.model.grid, 0.4, -0.15, 0.3);
    const Profile rhs = su.calc.ddbar(psi.values);
    double resid = 0.0;
    const BasicField sol = su.calc.solve_ddbar(g0, rhs, &resid);
    CHECK(resid < 1e-10);
    const double mean = su.calc.integrate(g0, psi.values) / su.calc.volume(g0);
    double worst = 0.0;
    for (size_t i = 0; i < rhs.size(); ++i)
        worst = std::max(worst, std::abs(sol[i] - (psi[i] - mean)));
    CHECK(worst < 1e-9);
}
