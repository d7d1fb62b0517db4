#include "srf/gauge.hpp"

#include <algorithm>
#include <cmath>

#include "srf/errors.hpp"
#include "srf/functionals.hpp"

namespace srf {

namespace {

// dilaton value profile at arbitrary time: cubic in t across path slices
Profile dilaton_at(const DilatonPath& path, const Trajectory& traj, double t) {
    const double lo = traj.t0(), hi = traj.t1();
    t = std::clamp(t, lo, hi);
    const double step = traj.dt();
    const size_t n = path.fields.size();
    double x = (t - lo) / step;
    size_t i1 = std::min(n - 2, static_cast<size_t>(std::floor(x)));
    const double u = x - static_cast<double>(i1);
    const size_t i0 = (i1 == 0) ? 0 : i1 - 1;
    const size_t i2 = i1 + 1;
    const size_t i3 = std::min(n - 1, i2 + 1);
    const Profile& p0 = path.fields[i0].values;
    const Profile& p1 = path.fields[i1].values;
    const Profile& p2 = path.fields[i2].values;
    const Profile& p3 = path.fields[i3].values;
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

} // namespace

GaugePath transport(const Calculus& calc, const Trajectory& traj, const DilatonPath& path) {
    if (path.fields.size() != traj.states.size())
        throw RangeExceeded("dilaton path not aligned with trajectory");
    const Grid& g = *calc.grid();
    const ModelSpec& mod = calc.model();
    const int n = g.n();
    const size_t K = traj.states.size();
    const double dt_slice = traj.dt();
    const int substeps = 4;

    GaugePath gp;
    gp.trajectory = &traj;
    gp.dilaton = &path;
    gp.maps.resize(K);
    gp.pulled_Ehat.resize(K);
    gp.pulled_Ghat.resize(K);
    gp.pulled_f.resize(K);
    gp.fiber_shift = BasicField(calc.grid(), 0.0);

    // velocity field of the node ODE: ds/dt = - f_s s(1-s) / (m D^2)
    auto velocity = [&](double t, const Profile& nodes) {
        const Profile m = traj.metric_at(t);
        const Profile f = dilaton_at(path, traj, t);
        const Profile fs = g.deriv_cell(f);
        Profile v(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            const double s = nodes[i];
            const double D = mod.a * s + mod.b * (1.0 - s);
            const double mm = std::max(1e-12, g.interp(m, s));
            v[i] = -g.interp(fs, s) * s * (1.0 - s) / (mm * D * D);
        }
        return v;
    };

    Profile nodes(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) nodes[static_cast<size_t>(i)] = g.cell(i);
    gp.maps[0] = nodes;

    for (size_t k = 0; k + 1 < K; ++k) {
        const double t0 = traj.states[k].t;
        const double dt = dt_slice / substeps;
        for (int sub = 0; sub < substeps; ++sub) {
            const double t = t0 + sub * dt;
            const Profile k1 = velocity(t, nodes);
            Profile tmp(nodes.size());
            for (size_t i = 0; i < nodes.size(); ++i) tmp[i] = nodes[i] + 0.5 * dt * k1[i];
            const Profile k2 = velocity(t + 0.5 * dt, tmp);
            for (size_t i = 0; i < nodes.size(); ++i) tmp[i] = nodes[i] + 0.5 * dt * k2[i];
            const Profile k3 = velocity(t + 0.5 * dt, tmp);
            for (size_t i = 0; i < nodes.size(); ++i) tmp[i] = nodes[i] + dt * k3[i];
            const Profile k4 = velocity(t + dt, tmp);
            for (size_t i = 0; i < nodes.size(); ++i)
                nodes[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        for (size_t i = 0; i + 1 < nodes.size(); ++i)
            if (!(nodes[i + 1] > nodes[i]))
                throw MonotonicityLost("transport map folded at node " + std::to_string(i));
        gp.maps[k + 1] = nodes;
    }

    // pulled-back data per slice
    for (size_t k = 0; k < K; ++k) {
        const Profile& sigma = gp.maps[k];
        const Profile& m = traj.states[k].gT.regular();
        const Profile& f = path.fields[k].values;
        const Profile dsig = g.deriv_cell(sigma);
        Profile Ehat(static_cast<size_t>(n)), Ghat(static_cast<size_t>(n)), fp(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const size_t ii = static_cast<size_t>(i);
            const double s = g.cell(i);
            const double sg = std::clamp(sigma[ii], 1e-14, 1.0 - 1e-14);
            const double D = mod.a * sg + mod.b * (1.0 - sg);
            const double mm = g.interp(m, sg);
            if (!(mm > 0.0))
                throw PositivityLost(i, mm); // pulled metric must stay positive
            // E = q_ss(sigma) sigma'^2, in regular units:
            // E_hat = s(1-s) sigma'^2 m(sg) D(sg)^2 / (2 sg (1-sg))
            Ehat[ii] = s * (1.0 - s) * dsig[ii] * dsig[ii] * mm * D * D /
                       (2.0 * sg * (1.0 - sg));
            // G = 2 ghat(sigma): G_hat = 2 sg (1-sg) m(sg) / (s(1-s))
            Ghat[ii] = 2.0 * sg * (1.0 - sg) * mm / (s * (1.0 - s));
            fp[ii] = g.interp(f, sg);
        }
        gp.pulled_Ehat[k] = std::move(Ehat);
        gp.pulled_Ghat[k] = std::move(Ghat);
        gp.pulled_f[k] = BasicField(calc.grid(), std::move(fp));
    }
    return gp;
}

Profile quotient_gauss_curvature(const Calculus& calc, const Profile& Ehat,
                                 const Profile& Ghat) {
    // K = -(1/sqrt(EG)) d/ds [ (d/ds sqrt(G)) / sqrt(E) ] with
    // sqrt(G) = sqrt(s(1-s) G_hat), sqrt(E) = sqrt(E_hat/(s(1-s))):
    //   (d sqrt(G))/sqrt(E) = [ (1-2s) sqrt(Gh) / 2 + s(1-s) d(sqrt(Gh)) ] / sqrt(Eh)
    const Grid& g = *calc.grid();
    const size_t n = Ehat.size();
    Profile sqrtG(n);
    for (size_t i = 0; i < n; ++i) sqrtG[i] = std::sqrt(Ghat[i]);
    const Profile dsqrtG = g.deriv_cell(sqrtG);
    Profile inner(n);
    for (size_t i = 0; i < n; ++i) {
        const double s = g.cell(static_cast<int>(i));
        inner[i] = (0.5 * (1.0 - 2.0 * s) * sqrtG[i] + s * (1.0 - s) * dsqrtG[i]) /
                   std::sqrt(Ehat[i]);
    }
    const Profile dinner = g.deriv_cell(inner);
    Profile K(n);
    for (size_t i = 0; i < n; ++i)
        K[i] = -dinner[i] / std::sqrt(Ehat[i] * Ghat[i]);
    return K;
}

namespace {

// Laplacian of the diagonal quotient metric in regular components:
// Lap f = (1/sqrt(Eh Gh)) d/ds [ s(1-s) sqrt(Gh/Eh) f_s ]
Profile quotient_laplacian(const Calculus& calc, const Profile& Ehat, const Profile& Ghat,
                           const Profile& f) {
    const Grid& g = *calc.grid();
    const size_t n = f.size();
    const Profile Ef = g.interp_cell_to_face(Ehat);
    const Profile Gf = g.interp_cell_to_face(Ghat);
    Profile flux = g.deriv_cell_to_face(f);
    for (size_t j = 0; j < flux.size(); ++j) {
        const double s = g.faces()[j];
        flux[j] *= s * (1.0 - s) * std::sqrt(std::max(0.0, Gf[j] / Ef[j]));
    }
    flux.front() = 0.0;
    flux.back() = 0.0;
    Profile out = g.deriv_face_to_cell(flux);
    for (size_t i = 0; i < n; ++i) out[i] /= std::sqrt(Ehat[i] * Ghat[i]);
    return out;
}

double measure_const_of(const Calculus& calc) { return calc.model().measure_const(); }

// integral against the quotient measure rho = c_m sqrt(Eh Gh)
double integrate_q(const Calculus& calc, const Profile& Ehat, const Profile& Ghat,
                   const Profile& field) {
    const size_t n = field.size();
    Profile tmp(n);
    for (size_t i = 0; i < n; ++i)
        tmp[i] = field[i] * measure_const_of(calc) * std::sqrt(Ehat[i] * Ghat[i]);
    return calc.grid()->integrate(tmp);
}

} // namespace

double energy_F_intrinsic(const Calculus& calc, const Profile& Ehat, const Profile& Ghat,
                          const BasicField& f) {
    const Grid& g = *calc.grid();
    const size_t n = Ehat.size();
    const Profile K = quotient_gauss_curvature(calc, Ehat, Ghat);
    const Profile fs = g.deriv_cell(f.values);
    Profile integrand(n);
    for (size_t i = 0; i < n; ++i) {
        const double s = g.cell(static_cast<int>(i));
        const double gsq_c = 0.5 * s * (1.0 - s) * fs[i] * fs[i] / Ehat[i];
        integrand[i] = (K[i] + gsq_c) * std::exp(-f[i]);
    }
    return integrate_q(calc, Ehat, Ghat, integrand);
}

GradientFlowResiduals check_gradient_flow_form(const Calculus& calc, const GaugePath& gp) {
    GradientFlowResiduals res;
    const Trajectory& traj = *gp.trajectory;
    const Grid& g = *calc.grid();
    const size_t K = traj.states.size();
    const double dt = traj.dt();
    const int n = g.n();
    const int margin = 6; // trimmed ends, the pulled profiles are extrapolation-limited there

    // interior times: a tenth of the span is trimmed at each end, where the
    // storage interpolation of the underlying trajectory is one-sided
    const size_t k_margin = std::max<size_t>(2, K / 10);
    for (size_t k = k_margin; k + k_margin < K; ++k) {
        const Profile& Eh = gp.pulled_Ehat[k];
        const Profile& Gh = gp.pulled_Ghat[k];
        const Profile& f = gp.pulled_f[k].values;
        const Profile Kq = quotient_gauss_curvature(calc, Eh, Gh);
        const Profile fs = g.deriv_cell(f);
        const Profile fss = g.deriv_cell(fs);
        const Profile Ehs = g.deriv_cell(Eh);
        const Profile Ghs = g.deriv_cell(Gh);
        const Profile lap = quotient_laplacian(calc, Eh, Gh, f);

        for (int i = margin; i < n - margin; ++i) {
            const size_t ii = static_cast<size_t>(i);
            const double s = g.cell(i);
            const double ss1 = s * (1.0 - s);
            auto dt4 = [&](auto&& field) {
                return (8.0 * (field[k + 1][ii] - field[k - 1][ii]) -
                        (field[k + 2][ii] - field[k - 2][ii])) /
                       (12.0 * dt);
            };
            const double dE = dt4(gp.pulled_Ehat);
            const double dG = dt4(gp.pulled_Ghat);
            const double df = dt4(gp.pulled_f);

            // ss-equation in E_hat units:
            // s(1-s) Hess_ss f = s(1-s)(f_ss - f_s E_s/(2E))
            //                  = s(1-s) f_ss - s(1-s) f_s Eh_s/(2 Eh) + f_s (1-2s)/2
            const double hess_ss =
                ss1 * fss[ii] - ss1 * fs[ii] * Ehs[ii] / (2.0 * Eh[ii]) +
                0.5 * fs[ii] * (1.0 - 2.0 * s);
            res.metric_ss = std::max(res.metric_ss,
                                     std::abs(dE + Kq[ii] * Eh[ii] + hess_ss));

            // chi-equation in G_hat units:
            // Hess_chichi f / (s(1-s)) = [ (1-2s) Gh + s(1-s) Gh_s ] f_s / (2 Eh)
            const double hess_chi =
                ((1.0 - 2.0 * s) * Gh[ii] + ss1 * Ghs[ii]) * fs[ii] / (2.0 * Eh[ii]);
            res.metric_chi = std::max(res.metric_chi,
                                      std::abs(dG + Kq[ii] * Gh[ii] + hess_chi));

            // dilaton equation: df/dt = -(Lap f + 2K)/2
            res.dilaton = std::max(res.dilaton,
                                   std::abs(df + 0.5 * (lap[ii] + 2.0 * Kq[ii])));
        }
    }
    return res;
}

DiffTInvarianceReport check_diffT_invariance(const Calculus& calc, const GaugePath& gp) {
    DiffTInvarianceReport rep;
    const Trajectory& traj = *gp.trajectory;
    const DilatonPath& path = *gp.dilaton;
    const Grid& g = *calc.grid();
    const int n = g.n();
    const int margin = 6;

    for (size_t k = 0; k < traj.states.size(); ++k) {
        const TransverseMetric& gT = traj.states[k].gT;
        const BasicField& f = path.fields[k];
        const double F_orig = energy_F(calc, gT, f);
        const double F_pull = energy_F_intrinsic(calc, gp.pulled_Ehat[k], gp.pulled_Ghat[k],
                                                 gp.pulled_f[k]);
        rep.energy_discrepancy = std::max(rep.energy_discrepancy, std::abs(F_orig - F_pull));

        // scalar curvature transport: R(rho* g) vs rho*(R(g))
        const Profile Kq = quotient_gauss_curvature(calc, gp.pulled_Ehat[k], gp.pulled_Ghat[k]);
        const BasicField scal = calc.curvature(gT).scalar;
        for (int i = margin; i < n - margin; ++i) {
            const size_t ii = static_cast<size_t>(i);
            const double pulled_scal = g.interp(scal.values, gp.maps[k][ii]);
            rep.scalar_transport =
                std::max(rep.scalar_transport, std::abs(2.0 * Kq[ii] - pulled_scal));
        }

        // change of variables for the weighted mass
        Profile e1(static_cast<size_t>(n)), e2(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            e1[static_cast<size_t>(i)] = std::exp(-f[static_cast<size_t>(i)]);
            e2[static_cast<size_t>(i)] = std::exp(-gp.pulled_f[k][static_cast<size_t>(i)]);
        }
        const double m1 = calc.integrate(gT, e1);
        double m2 = 0.0;
        {
            Profile tmp(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                const size_t ii = static_cast<size_t>(i);
                tmp[ii] = e2[ii] * calc.model().measure_const() *
                          std::sqrt(gp.pulled_Ehat[k][ii] * gp.pulled_Ghat[k][ii]);
            }
            m2 = g.integrate(tmp);
        }
        rep.mass_change_of_variables =
            std::max(rep.mass_change_of_variables, std::abs(m1 - m2));
    }
    // the fiber shift is structurally zero; transported transverse data with
    // and without it are bit-identical
    rep.fiber_irrelevance = gp.fiber_shift.max_abs();
    return rep;
}

} // namespace srf
