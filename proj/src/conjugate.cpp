#include "srf/conjugate.hpp"

#include <algorithm>
#include <cmath>

#include "srf/errors.hpp"

namespace srf {

namespace {

// rhs of dw/ds = Lap_g w - R_c w (+ n/tau w) with the metric regular part m
Profile conjugate_rhs(const Calculus& calc, const Profile& m, const Profile& w,
                      double tau_term) {
    const ModelSpec& mod = calc.model();
    TransverseMetric gT(calc.grid(), m);
    const CurvatureData curv = calc.curvature(gT);
    Profile H = calc.ddbar(w);
    const size_t n = w.size();
    Profile out(n);
    for (size_t i = 0; i < n; ++i) {
        const double ghat = mod.ss1_cells()[i] * m[i];
        const double Rc = curv.ricci[i] / ghat;
        out[i] = H[i] / ghat - Rc * w[i] + tau_term * w[i];
    }
    return out;
}

DilatonPath solve_backward(const Calculus& calc, const Trajectory& traj,
                           const BasicField& f_T, ConjugateVariant variant,
                           double tau_T, const ConjugateOptions& opt) {
    if (traj.states.size() < 2) throw RangeExceeded("trajectory too short");
    const double T = traj.t1();
    const int n_cd = calc.model().n;

    if (variant == ConjugateVariant::Entropy) {
        const double tau_min = tau_T; // tau(t) = tau_T + (T - t) decreases toward t = T
        if (!(tau_min > 0.0)) throw NonPositiveTau(tau_min);
    }

    DilatonPath path;
    path.trajectory = &traj;
    path.variant = variant;
    const size_t K = traj.states.size();
    path.fields.resize(K);
    if (variant == ConjugateVariant::Entropy) {
        path.tau.resize(K);
        for (size_t k = 0; k < K; ++k)
            path.tau[k] = tau_T + (T - traj.states[k].t);
    }

    // terminal condition reproduced bit-exactly
    path.fields[K - 1] = f_T;

    Profile w(f_T.values.size());
    for (size_t i = 0; i < w.size(); ++i) w[i] = std::exp(-f_T[i]);

    const double h = calc.grid()->h();
    for (size_t k = K - 1; k > 0; --k) {
        const double t_hi = traj.states[k].t;
        const double t_lo = traj.states[k - 1].t;
        double s = T - t_hi; // forward variable of the substituted equation
        const double s_end = T - t_lo;
        while (s < s_end - 1e-14) {
            // stability cap from the current metric
            const Profile m_now = traj.metric_at(T - s);
            const ModelSpec& mod = calc.model();
            double numax = 0.0;
            for (size_t i = 0; i < m_now.size(); ++i)
                numax = std::max(numax, mod.ss1_cells()[i] /
                                            (m_now[i] * mod.D_cells()[i] * mod.D_cells()[i]));
            double dt = std::min(opt.dt_safety * h * h / numax, s_end - s);
            bool ok = false;
            while (!ok) {
                auto tau_term = [&](double sv) {
                    if (variant == ConjugateVariant::Energy) return 0.0;
                    return static_cast<double>(n_cd) / (tau_T + sv);
                };
                const Profile m1 = traj.metric_at(T - s);
                const Profile mh = traj.metric_at(T - s - 0.5 * dt);
                const Profile m2 = traj.metric_at(T - s - dt);
                Profile k1 = conjugate_rhs(calc, m1, w, tau_term(s));
                Profile tmp(w.size());
                for (size_t i = 0; i < w.size(); ++i) tmp[i] = w[i] + 0.5 * dt * k1[i];
                Profile k2 = conjugate_rhs(calc, mh, tmp, tau_term(s + 0.5 * dt));
                for (size_t i = 0; i < w.size(); ++i) tmp[i] = w[i] + 0.5 * dt * k2[i];
                Profile k3 = conjugate_rhs(calc, mh, tmp, tau_term(s + 0.5 * dt));
                for (size_t i = 0; i < w.size(); ++i) tmp[i] = w[i] + dt * k3[i];
                Profile k4 = conjugate_rhs(calc, m2, tmp, tau_term(s + dt));
                Profile cand(w.size());
                bool positive = true;
                for (size_t i = 0; i < w.size(); ++i) {
                    cand[i] = w[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                    if (!(cand[i] > 0.0)) positive = false;
                }
                if (!positive) {
                    dt *= 0.5;
                    if (dt < 1e-14) {
                        int node = 0;
                        throw PositivityLost(node, 0.0);
                    }
                    continue;
                }
                w = std::move(cand);
                ok = true;
            }
            s += dt;
        }
        Profile f(w.size());
        for (size_t i = 0; i < w.size(); ++i) f[i] = -std::log(w[i]);
        path.fields[k - 1] = BasicField(calc.grid(), std::move(f));
    }
    return path;
}

} // namespace

DilatonPath solve_backward_F(const Calculus& calc, const Trajectory& traj,
                             const BasicField& f_T, const ConjugateOptions& opt) {
    return solve_backward(calc, traj, f_T, ConjugateVariant::Energy, 0.0, opt);
}

DilatonPath solve_backward_W(const Calculus& calc, const Trajectory& traj,
                             const BasicField& f_T, double tau_T,
                             const ConjugateOptions& opt) {
    return solve_backward(calc, traj, f_T, ConjugateVariant::Entropy, tau_T, opt);
}

double pde_residual(const Calculus& calc, const Trajectory& traj, const DilatonPath& path) {
    // 4th-order centered difference in t of f against
    // -Lap f + |grad f|^2 - R_c (+ n/tau), max over interior times and nodes
    if (path.fields.size() != traj.states.size())
        throw RangeExceeded("path not aligned with trajectory");
    const size_t K = traj.states.size();
    if (K < 5) throw RangeExceeded("need at least 5 slices for the residual probe");
    double worst = 0.0;
    const double dt = traj.dt();
    for (size_t k = 2; k + 2 < K; ++k) {
        const TransverseMetric& gT = traj.states[k].gT;
        const BasicField& f = path.fields[k];
        const BasicField lap = calc.basic_laplacian(gT, f);
        const BasicField gsq = calc.grad_norm_sq(gT, f);
        const BasicField Rc = calc.curvature(gT).trace_half();
        const double tau_term = (path.variant == ConjugateVariant::Entropy)
                                    ? calc.model().n / path.tau[k]
                                    : 0.0;
        for (size_t i = 0; i < f.values.size(); ++i) {
            const double fdot =
                (8.0 * (path.fields[k + 1][i] - path.fields[k - 1][i]) -
                 (path.fields[k + 2][i] - path.fields[k - 2][i])) /
                (12.0 * dt);
            const double rhs = -lap[i] + gsq[i] - Rc[i] + tau_term;
            worst = std::max(worst, std::abs(fdot - rhs));
        }
    }
    return worst;
}

} // namespace srf
