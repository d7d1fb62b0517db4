#include <doctest.h>

#include <cmath>

#include "srf/errors.hpp"
#include "srf/gauge.hpp"
#include "test_util.hpp"

using namespace srf;
using namespace srf::test;

namespace {

struct Setup {
    ModelSpec model;
    Calculus calc;
    explicit Setup(int n = 256) : model(build_model(Family::Round, 1.0, 1.0, n)), calc(model) {}
};

Trajectory frozen_einstein(const Calculus& calc, double T, int slices) {
    Trajectory traj;
    traj.kind = FlowKind::Unnormalized;
    traj.model = &calc.model();
    for (int k = 0; k <= slices; ++k) {
        FlowState st;
        st.t = T * k / slices;
        st.phi = BasicField(calc.grid(), 0.0);
        Profile m = calc.model().m0();
        for (double& v : m) v *= (1.0 - st.t); // the exact shrinking solution
        st.gT = TransverseMetric(calc.grid(), std::move(m));
        st.curv = calc.curvature(st.gT);
        traj.states.push_back(std::move(st));
    }
    return traj;
}

struct Coupled {
    Trajectory un;
    DilatonPath path;
};

Coupled coupled_run(const Calculus& calc, uint64_t seed, double t_un, int slices) {
    FlowOptions opt;
    opt.store_dt = 0.01;
    BasicField phi0(calc.grid(), seeded_smooth(calc.grid(), seed));
    Trajectory traj = run_flow(calc, phi0, 1.2, opt);
    Coupled c{to_unnormalized(calc, traj, t_un, slices), {}};
    BasicField fT(calc.grid(), seeded_smooth(calc.grid(), seed + 1));
    c.path = solve_backward_F(calc, c.un, fT);
    return c;
}

} // namespace

TEST_CASE("transport: constant dilatons give identity maps") {
    Setup su;
    Trajectory traj = frozen_einstein(su.calc, 0.4, 20);
    const DilatonPath path = solve_backward_F(su.calc, traj, BasicField(su.model.grid, 0.7));
    // on the shrinking Einstein solution a constant terminal dilaton stays
    // spatially constant, so the gauge field vanishes
    const GaugePath gp = transport(su.calc, traj, path);
    double worst = 0.0;
    for (size_t k = 0; k < gp.maps.size(); ++k)
        for (int i = 0; i < su.model.grid->n(); ++i)
            worst = std::max(worst,
                             std::abs(gp.maps[k][static_cast<size_t>(i)] -
                                      su.calc.grid()->cell(i)));
    CHECK(worst < 1e-12);
    // pulled metric equals the original in regular components
    for (size_t k = 0; k < gp.maps.size(); ++k) {
        const Profile comp = traj.states[k].gT.regular();
        for (size_t i = 0; i < comp.size(); ++i) {
            const double s = su.calc.grid()->cell(static_cast<int>(i));
            const double D = 1.0;
            const double Eref = comp[i] * D * D / 2.0; // Ehat of the Kahler profile
            CHECK(gp.pulled_Ehat[k][i] == doctest::Approx(Eref).epsilon(1e-9));
            CHECK(gp.pulled_Ghat[k][i] == doctest::Approx(2.0 * comp[i]).epsilon(1e-9));
            (void)s;
        }
    }
}

TEST_CASE("transport maps stay monotone and compose with their inverse") {
    Setup su;
    Coupled c = coupled_run(su.calc, 11, 0.5, 50);
    const GaugePath gp = transport(su.calc, c.un, c.path);
    const Grid& g = *su.calc.grid();
    for (const Profile& map : gp.maps) {
        for (size_t i = 0; i + 1 < map.size(); ++i) CHECK(map[i + 1] > map[i]);
    }
    // numeric inverse composition sigma^{-1}(sigma(s)) = s
    const Profile& sigma = gp.maps.back();
    double worst = 0.0;
    for (int i = 8; i < g.n() - 8; ++i) {
        const double target = g.cell(i);
        // invert by bisection on the monotone node map
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (g.interp(sigma, mid) < target) lo = mid; else hi = mid;
        }
        const double sinv = 0.5 * (lo + hi);
        worst = std::max(worst, std::abs(g.interp(sigma, sinv) - target));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("gradient flow form: Einstein residual and generic refinement") {
    Setup su;
    // frozen Einstein with constant dilaton: all residuals vanish identically
    Trajectory traj = frozen_einstein(su.calc, 0.4, 40);
    const DilatonPath path = solve_backward_F(su.calc, traj, BasicField(su.model.grid, 0.3));
    const GaugePath gp = transport(su.calc, traj, path);
    const GradientFlowResiduals r0 = check_gradient_flow_form(su.calc, gp);
    CHECK(r0.max() < 1e-7);

    // generic run: residual below 1e-3 and shrinking >= 4x under refinement.
    // The trajectory storage cadence refines twice as fast as the probe since
    // its local cubic interpolation is the dominant third-order error term.
    auto resid_at = [&](int n, int slices, double store) {
        ModelSpec model = build_model(Family::Round, 1.0, 1.0, n);
        Calculus calc(model);
        FlowOptions fo;
        fo.store_dt = store;
        BasicField phi0(calc.grid(), seeded_smooth(calc.grid(), 21));
        Trajectory traj = run_flow(calc, phi0, 1.2, fo);
        Trajectory un = to_unnormalized(calc, traj, 0.4, slices);
        BasicField fT(calc.grid(), seeded_smooth(calc.grid(), 22));
        const DilatonPath path = solve_backward_F(calc, un, fT);
        const GaugePath g2 = transport(calc, un, path);
        return check_gradient_flow_form(calc, g2).max();
    };
    const double fine = resid_at(256, 120, 0.004);
    const double coarse = resid_at(128, 60, 0.016);
    CHECK(fine < 1e-3);
    CHECK(coarse / fine >= 4.0);
}

TEST_CASE("corrupted transport map is detected") {
    Setup su;
    Coupled c = coupled_run(su.calc, 31, 0.4, 40);
    GaugePath gp = transport(su.calc, c.un, c.path);
    for (size_t k = 0; k < gp.pulled_Ehat.size(); ++k)
        gp.pulled_Ehat[k][100] *= 1.5; // corrupt one node of the pulled metric
    CHECK(check_gradient_flow_form(su.calc, gp).max() > 0.1);
}

TEST_CASE("diffT invariance: energy, scalar transport, change of variables") {
    Setup su;
    Coupled c = coupled_run(su.calc, 41, 0.5, 50);
    const GaugePath gp = transport(su.calc, c.un, c.path);
    const DiffTInvarianceReport rep = check_diffT_invariance(su.calc, gp);
    CHECK(rep.energy_discrepancy < 1e-5);
    CHECK(rep.scalar_transport < 1e-5);
    CHECK(rep.mass_change_of_variables < 1e-6);
    CHECK(rep.fiber_irrelevance == 0.0);
}

TEST_CASE("identity maps give exactly zero invariance discrepancy") {
    Setup su;
    Trajectory traj = frozen_einstein(su.calc, 0.3, 15);
    const DilatonPath path = solve_backward_F(su.calc, traj, BasicField(su.model.grid, 0.0));
    const GaugePath gp = transport(su.calc, traj, path);
    const DiffTInvarianceReport rep = check_diffT_invariance(su.calc, gp);
    CHECK(rep.energy_discrepancy < 1e-10);
    CHECK(rep.scalar_transport < 1e-8);
}
