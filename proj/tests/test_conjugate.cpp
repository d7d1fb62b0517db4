#include <doctest.h>

#include <cmath>

#include "srf/conjugate.hpp"
#include "srf/errors.hpp"
#include "srf/io.hpp"
#include "test_util.hpp"

using namespace srf;
using namespace srf::test;

namespace {

struct Setup {
    ModelSpec model;
    Calculus calc;
    explicit Setup(int n = 256) : model(build_model(Family::Round, 1.0, 1.0, n)), calc(model) {}
};

// trajectory frozen at the Einstein background
Trajectory frozen_trajectory(const Calculus& calc, double T, int slices) {
    Trajectory traj;
    traj.kind = FlowKind::Unnormalized;
    traj.model = &calc.model();
    for (int k = 0; k <= slices; ++k) {
        FlowState st;
        st.t = T * k / slices;
        st.phi = BasicField(calc.grid(), 0.0);
        st.gT = calc.background();
        st.curv = calc.curvature(st.gT);
        traj.states.push_back(std::move(st));
    }
    return traj;
}

BasicField legendre_perturbation(GridPtr grid, double amp) {
    Profile p(static_cast<size_t>(grid->n()));
    for (int i = 0; i < grid->n(); ++i) {
        const double x = 1.0 - 2.0 * grid->cell(i);
        p[static_cast<size_t>(i)] = amp * (0.5 * (3.0 * x * x - 1.0) + 0.3 * x);
    }
    return BasicField(std::move(grid), std::move(p));
}

} // namespace

TEST_CASE("frozen Einstein metric: F-version closed form f = c + Rc (T - t)") {
    Setup su;
    const double T = 0.5, c = 0.7;
    Trajectory traj = frozen_trajectory(su.calc, T, 25);
    const DilatonPath path = solve_backward_F(su.calc, traj, BasicField(su.model.grid, c));
    const double Rc = load_constants().at("round_Rc"); // Hermitian-trace curvature = 1
    double worst = 0.0;
    for (size_t k = 0; k < path.fields.size(); ++k) {
        const double expect = c + Rc * (T - traj.states[k].t);
        for (double v : path.fields[k].values)
            worst = std::max(worst, std::abs(v - expect));
    }
    CHECK(worst < 1e-8);
    // terminal condition reproduced bit-exactly
    for (double v : path.fields.back().values) CHECK(v == c);
}

TEST_CASE("frozen Einstein metric: W-version closed form with the tau forcing") {
    Setup su;
    const double T = 0.5, c = 0.4, tauT = 0.5;
    Trajectory traj = frozen_trajectory(su.calc, T, 25);
    const DilatonPath path =
        solve_backward_W(su.calc, traj, BasicField(su.model.grid, c), tauT);
    double worst = 0.0;
    for (size_t k = 0; k < path.fields.size(); ++k) {
        const double t = traj.states[k].t;
        const double tau = tauT + (T - t);
        const double expect = c + (T - t) - std::log(tau / tauT); // n = 1
        for (double v : path.fields[k].values)
            worst = std::max(worst, std::abs(v - expect));
        CHECK(path.tau[k] == doctest::Approx(tau).epsilon(1e-14));
    }
    CHECK(worst < 1e-8);
    // d tau/dt = -1 exactly on the grid
    for (size_t k = 1; k < path.tau.size(); ++k)
        CHECK(path.tau[k - 1] - path.tau[k] ==
              doctest::Approx(traj.states[k].t - traj.states[k - 1].t).epsilon(1e-12));
}

TEST_CASE("non-positive tau is rejected") {
    Setup su;
    Trajectory traj = frozen_trajectory(su.calc, 0.5, 10);
    CHECK_THROWS_AS(
        solve_backward_W(su.calc, traj, BasicField(su.model.grid, 0.0), -0.1),
        NonPositiveTau);
}

TEST_CASE("coupled solve: PDE residual, convergence order, detector sanity") {
    auto residual_at = [](int n, int slices) {
        Setup su(n);
        FlowOptions opt;
        opt.store_dt = 0.6 / slices; // storage refines under the probe resolution
        Trajectory traj =
            run_flow(su.calc, legendre_perturbation(su.model.grid, 0.05), 1.2, opt);
        Trajectory un = to_unnormalized(su.calc, traj, 0.5, slices);
        const DilatonPath path =
            solve_backward_F(su.calc, un, legendre_perturbation(su.model.grid, 0.3));
        return pde_residual(su.calc, un, path);
    };
    const double r = residual_at(256, 120);
    CHECK(r < 1e-4);
    // halving both h and dt shrinks the residual by >= 4x
    const double r_coarse = residual_at(128, 60);
    CHECK(r_coarse / r >= 4.0);
}

TEST_CASE("corrupted path is detected by the residual probe") {
    Setup su;
    Trajectory traj = frozen_trajectory(su.calc, 0.5, 25);
    DilatonPath path = solve_backward_F(su.calc, traj, BasicField(su.model.grid, 0.2));
    path.fields[10].values[100] += 0.5;
    CHECK(pde_residual(su.calc, traj, path) > 0.1);
}

TEST_CASE("conjugate mass is conserved along the unnormalized flow") {
    Setup su;
    FlowOptions opt;
    opt.store_dt = 0.02;
    Trajectory traj = run_flow(su.calc, legendre_perturbation(su.model.grid, 0.05), 1.5, opt);
    Trajectory un = to_unnormalized(su.calc, traj, 0.6, 60);
    const DilatonPath path =
        solve_backward_F(su.calc, un, legendre_perturbation(su.model.grid, 0.4));
    std::vector<double> mass;
    for (size_t k = 0; k < un.states.size(); ++k) {
        Profile e(path.fields[k].values.size());
        for (size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-path.fields[k][i]);
        mass.push_back(su.calc.integrate(un.states[k].gT, e));
    }
    for (double m : mass)
        CHECK(std::abs(m - mass.back()) / mass.back() < 1e-6);

    // positivity of e^{-f} at every node and time
    for (const auto& f : path.fields)
        for (double v : f.values) CHECK(std::exp(-v) > 0.0);
}

TEST_CASE("entropy variant conserves the chi-constraint mass") {
    Setup su;
    FlowOptions opt;
    opt.store_dt = 0.02;
    Trajectory traj = run_flow(su.calc, legendre_perturbation(su.model.grid, 0.05), 1.5, opt);
    Trajectory un = to_unnormalized(su.calc, traj, 0.6, 60);
    const double tauT = 0.5;
    const DilatonPath path =
        solve_backward_W(su.calc, un, legendre_perturbation(su.model.grid, 0.4), tauT);
    std::vector<double> cons;
    for (size_t k = 0; k < un.states.size(); ++k) {
        Profile e(path.fields[k].values.size());
        for (size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-path.fields[k][i]);
        cons.push_back(su.calc.integrate(un.states[k].gT, e) / (4.0 * M_PI * path.tau[k]));
    }
    for (double m : cons)
        CHECK(std::abs(m - cons.back()) / cons.back() < 1e-6);
}
