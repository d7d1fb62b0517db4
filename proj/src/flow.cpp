#include "srf/flow.hpp"

#include <algorithm>
#include <cmath>

#include "srf/errors.hpp"

namespace srf {

namespace {

Profile flow_rhs(const Calculus& calc, const Profile& phi, const BasicField& F_bg) {
    // d phi/dt = log(m_phi / m0) + kappa phi - F
    const ModelSpec& mod = calc.model();
    Profile inc = calc.ddbar_regular(phi);
    const size_t n = inc.size();
    Profile rhs(n);
    for (size_t i = 0; i < n; ++i) {
        const double m = mod.m0()[i] + inc[i];
        if (!(m > 0.0)) throw PositivityLost(static_cast<int>(i), m);
        rhs[i] = std::log(m / mod.m0()[i]) + mod.kappa * phi[i] - F_bg[i];
    }
    return rhs;
}

Profile rk4_phi(const Calculus& calc, const Profile& phi, double dt, const BasicField& F_bg) {
    const size_t n = phi.size();
    Profile k1 = flow_rhs(calc, phi, F_bg);
    Profile tmp(n);
    for (size_t i = 0; i < n; ++i) tmp[i] = phi[i] + 0.5 * dt * k1[i];
    Profile k2 = flow_rhs(calc, tmp, F_bg);
    for (size_t i = 0; i < n; ++i) tmp[i] = phi[i] + 0.5 * dt * k2[i];
    Profile k3 = flow_rhs(calc, tmp, F_bg);
    for (size_t i = 0; i < n; ++i) tmp[i] = phi[i] + dt * k3[i];
    Profile k4 = flow_rhs(calc, tmp, F_bg);
    Profile out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = phi[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

FlowState make_state(const Calculus& calc, double t, BasicField phi, bool with_u) {
    FlowState st;
    st.t = t;
    st.gT = calc.metric_from_potential(phi);
    st.phi = std::move(phi);
    st.curv = calc.curvature(st.gT);
    if (with_u) st.u = ricci_potential(calc, st.gT);
    return st;
}

} // namespace

double dt_stability_cap(const Calculus& calc, const TransverseMetric& gT, double safety) {
    // linearized diffusivity nu(s) = s(1-s)/(m D^2); RK4 real-axis limit with
    // the 4th-order stencil gives dt <~ 0.52 h^2/max(nu); the safety factor
    // is the user's c in c h^2 min(ghat J^2).
    const ModelSpec& mod = calc.model();
    const Profile& m = gT.regular();
    double numax = 0.0;
    for (size_t i = 0; i < m.size(); ++i) {
        const double nu = mod.ss1_cells()[i] / (m[i] * mod.D_cells()[i] * mod.D_cells()[i]);
        numax = std::max(numax, nu);
    }
    const double h = calc.grid()->h();
    return safety * h * h / numax;
}

BasicField ricci_deviation_potential(const Calculus& calc, const TransverseMetric& gT,
                                     double* residual_out) {
    const CurvatureData curv = calc.curvature(gT);
    const Profile& m0 = calc.model().m0();
    const ModelSpec& mod = calc.model();
    Profile rhs(m0.size());
    for (size_t i = 0; i < m0.size(); ++i)
        rhs[i] = curv.ricci[i] - mod.kappa * mod.ss1_cells()[i] * m0[i];
    return calc.solve_ddbar(gT, rhs, residual_out);
}

FlowState step_normalized(const Calculus& calc, const FlowState& state, double dt,
                          const BasicField& F_bg) {
    const double cap = dt_stability_cap(calc, state.gT, 1.0) * 0.52;
    if (dt > cap) throw StepRejected(dt);
    Profile next = rk4_phi(calc, state.phi.values, dt, F_bg);
    return make_state(calc, state.t + dt, BasicField(calc.grid(), std::move(next)), true);
}

Trajectory run_flow(const Calculus& calc, const BasicField& phi0, double t_end,
                    const FlowOptions& opt) {
    Trajectory traj;
    traj.kind = FlowKind::Normalized;
    traj.model = &calc.model();

    BasicField F_bg = ricci_deviation_potential(calc, calc.background());

    // fixed store cadence; the integrator subdivides each interval
    const int n_store = std::max(1, static_cast<int>(std::round(t_end / opt.store_dt)));
    const double sdt = t_end / n_store;

    Profile phi = phi0.values;
    traj.states.push_back(make_state(calc, 0.0, phi0, true));

    double dt = 0.0;
    int steps_since_check = 0;
    for (int k = 0; k < n_store; ++k) {
        const double t_target = (k + 1) * sdt;
        double t = k * sdt;
        while (t < t_target - 1e-14) {
            // stability cap from the current diffusivity (clamped, the RK
            // stages certify positivity themselves)
            double numax = 0.0;
            {
                const Profile inc = calc.ddbar_regular(phi);
                const ModelSpec& mod = calc.model();
                for (size_t i = 0; i < inc.size(); ++i) {
                    const double m = std::max(1e-12, mod.m0()[i] + inc[i]);
                    numax = std::max(numax, mod.ss1_cells()[i] /
                                                (m * mod.D_cells()[i] * mod.D_cells()[i]));
                }
            }
            const double h = calc.grid()->h();
            const double cap = opt.dt_safety * h * h / numax;
            dt = std::min({cap, opt.max_dt, t_target - t});
            bool accepted = false;
            while (!accepted) {
                try {
                    Profile cand = rk4_phi(calc, phi, dt, F_bg);
                    if (++steps_since_check >= opt.err_check_interval) {
                        steps_since_check = 0;
                        // step-doubling error estimate
                        Profile half = rk4_phi(calc, phi, 0.5 * dt, F_bg);
                        half = rk4_phi(calc, half, 0.5 * dt, F_bg);
                        double err = 0.0;
                        for (size_t i = 0; i < cand.size(); ++i)
                            err = std::max(err, std::abs(cand[i] - half[i]));
                        if (err > opt.err_tol) throw StepRejected(dt);
                        cand = std::move(half);
                    }
                    phi = std::move(cand);
                    accepted = true;
                } catch (const NumericalError& e) {
                    dt *= 0.5;
                    if (dt < 1e-14)
                        throw SolverFailure(std::string("flow step collapsed at t = ") +
                                            std::to_string(t) + ": " + e.what());
                }
            }
            t += dt;
        }
        try {
            traj.states.push_back(make_state(calc, t_target, BasicField(calc.grid(), phi), true));
        } catch (const NumericalError& e) {
            throw SolverFailure(std::string("invalid state at t = ") +
                                std::to_string(t_target) + ": " + e.what());
        }
    }
    return traj;
}

Profile Trajectory::metric_at(double t) const {
    const double lo = t0(), hi = t1();
    if (t < lo - 1e-12 || t > hi + 1e-12)
        throw RangeExceeded("time " + std::to_string(t) + " outside trajectory [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    t = std::clamp(t, lo, hi);
    const double step = dt();
    const size_t n = states.size();
    double x = (t - lo) / step;
    size_t i1 = std::min(n - 2, static_cast<size_t>(std::floor(x)));
    const double u = x - static_cast<double>(i1);
    // Catmull-Rom in time on the regular metric profiles
    const size_t i0 = (i1 == 0) ? 0 : i1 - 1;
    const size_t i2 = i1 + 1;
    const size_t i3 = std::min(n - 1, i2 + 1);
    const Profile& p0 = states[i0].gT.regular();
    const Profile& p1 = states[i1].gT.regular();
    const Profile& p2 = states[i2].gT.regular();
    const Profile& p3 = states[i3].gT.regular();
    Profile out(p1.size());
    for (size_t k = 0; k < out.size(); ++k) {
        const double m0 = (i1 == 0) ? (-0.5 * p3[k] + 2.0 * p2[k] - 1.5 * p1[k])
                                    : 0.5 * (p2[k] - p0[k]);
        const double m1 = (i2 == n - 1) ? (1.5 * p2[k] - 2.0 * p1[k] + 0.5 * p0[k])
                                        : 0.5 * (p3[k] - p1[k]);
        const double d = p2[k] - p1[k];
        out[k] = p1[k] + u * (m0 + u * (3.0 * d - 2.0 * m0 - m1 + u * (m0 + m1 - 2.0 * d)));
    }
    return out;
}

Trajectory to_unnormalized(const Calculus& calc, const Trajectory& traj,
                           double t_max, int n_out) {
    if (!(t_max > 0.0) || t_max >= 1.0)
        throw std::invalid_argument("t_max must lie in (0,1)");
    const double need = -std::log(1.0 - t_max);
    if (need > traj.t1() + 1e-12)
        throw RangeExceeded("conversion needs log-time " + std::to_string(need) +
                            " beyond stored " + std::to_string(traj.t1()));
    Trajectory out;
    out.kind = FlowKind::Unnormalized;
    out.model = traj.model;
    out.states.reserve(static_cast<size_t>(n_out) + 1);
    for (int k = 0; k <= n_out; ++k) {
        const double t = t_max * k / n_out;
        const double theta = -std::log(1.0 - t);
        Profile m = traj.metric_at(theta);
        for (double& v : m) v *= (1.0 - t);
        FlowState st;
        st.t = t;
        st.gT = TransverseMetric(calc.grid(), std::move(m));
        st.curv = calc.curvature(st.gT);
        st.phi = BasicField(calc.grid(), 0.0);
        out.states.push_back(std::move(st));
    }
    return out;
}

BasicField ricci_potential(const Calculus& calc, const TransverseMetric& gT,
                           double* residual_out) {
    const CurvatureData curv = calc.curvature(gT);
    const ModelSpec& mod = calc.model();
    const Profile& m = gT.regular();
    Profile rhs(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        rhs[i] = mod.ss1_cells()[i] * m[i] - curv.ricci[i];
    BasicField u = calc.solve_ddbar(gT, rhs, residual_out);
    // additive constant from int e^{-u} dmu = 4 pi (exact, the map is a pure
    // exponential shift)
    Profile ex(m.size());
    for (size_t i = 0; i < m.size(); ++i) ex[i] = std::exp(-u[i]);
    const double mass = calc.integrate(gT, ex);
    const double c = std::log(mass / (4.0 * M_PI));
    for (double& v : u.values) v += c;
    return u;
}

double a_quantity(const Calculus& calc, const TransverseMetric& gT, const BasicField& u) {
    Profile f(u.values.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = u[i] * std::exp(-u[i]);
    return calc.integrate(gT, f) / (4.0 * M_PI);
}

double min_scalar_barrier(double y0, double t) {
    // y' = y^2 - y, y(0) = y0  =>  y(t) = y0 / (y0 + (1 - y0) e^t)
    return y0 / (y0 + (1.0 - y0) * std::exp(t));
}

} // namespace srf
