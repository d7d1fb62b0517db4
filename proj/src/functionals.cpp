#include "srf/functionals.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "srf/errors.hpp"

namespace srf {

double energy_F(const Calculus& calc, const TransverseMetric& gT, const BasicField& f) {
    const CurvatureData curv = calc.curvature(gT);
    const BasicField Rc = curv.trace_half();
    const BasicField gsq = calc.grad_norm_sq(gT, f);
    Profile integrand(f.values.size());
    for (size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = (Rc[i] + gsq[i]) * std::exp(-f[i]);
    return calc.integrate(gT, integrand);
}

double entropy_W(const Calculus& calc, const TransverseMetric& gT, const BasicField& f,
                 double tau) {
    if (!(tau > 0.0)) throw NonPositiveTau(tau);
    const int n = calc.model().n;
    const CurvatureData curv = calc.curvature(gT);
    const BasicField Rc = curv.trace_half();
    const BasicField gsq = calc.grad_norm_sq(gT, f);
    Profile integrand(f.values.size());
    for (size_t i = 0; i < integrand.size(); ++i)
        integrand[i] = (tau * (Rc[i] + gsq[i]) + f[i] - 2.0 * n) * std::exp(-f[i]);
    return std::pow(4.0 * M_PI * tau, -n) * calc.integrate(gT, integrand);
}

double dF_dt_formula(const Calculus& calc, const TransverseMetric& gT, const BasicField& f) {
    const CurvatureData curv = calc.curvature(gT);
    const Profile Hf = calc.ddbar(f.values);
    const BasicField X = calc.pure_hessian(gT, f);
    const ModelSpec& mod = calc.model();
    const Profile& m = gT.regular();
    Profile integrand(f.values.size());
    for (size_t i = 0; i < integrand.size(); ++i) {
        const double ghat = mod.ss1_cells()[i] * m[i];
        const double herm = (curv.ricci[i] + Hf[i]) / ghat; // g^{-1}(Ric + ddbar f)
        integrand[i] = (herm * herm + X[i] * X[i]) * std::exp(-f[i]);
    }
    return calc.integrate(gT, integrand);
}

VariationResult variation_F(const Calculus& calc, const TransverseMetric& gT,
                            const BasicField& f, const BasicField& psi,
                            const BasicField& h, double eps) {
    const CurvatureData curv = calc.curvature(gT);
    const Profile Hf = calc.ddbar(f.values);
    const Profile Hpsi = calc.ddbar(psi.values);
    const BasicField lap_f = calc.basic_laplacian(gT, f);
    const BasicField gsq = calc.grad_norm_sq(gT, f);
    const ModelSpec& mod = calc.model();
    const Profile& m = gT.regular();

    Profile integrand(f.values.size());
    for (size_t i = 0; i < integrand.size(); ++i) {
        const double ghat = mod.ss1_cells()[i] * m[i];
        const double v_c = Hpsi[i] / ghat; // trace of the variation
        const double pairing = (Hpsi[i] / ghat) * ((curv.ricci[i] + Hf[i]) / ghat);
        const double Rc = curv.ricci[i] / ghat;
        integrand[i] =
            std::exp(-f[i]) * (-pairing + (v_c - h[i]) * (2.0 * lap_f[i] - gsq[i] + Rc));
    }
    const double analytic = calc.integrate(gT, integrand);

    // centered finite difference at eps
    auto perturbed = [&](double sign) {
        Profile mr = gT.regular();
        const Profile inc = calc.ddbar_regular(psi.values);
        for (size_t i = 0; i < mr.size(); ++i) mr[i] += sign * eps * inc[i];
        TransverseMetric gp(calc.grid(), std::move(mr));
        BasicField fp = f;
        for (size_t i = 0; i < fp.values.size(); ++i) fp.values[i] += sign * eps * h[i];
        return energy_F(calc, gp, fp);
    };
    const double numeric = (perturbed(1.0) - perturbed(-1.0)) / (2.0 * eps);
    return {analytic, numeric};
}

namespace {

// Dense stiffness matrix of the Dirichlet form
//   E(w) = int |nabla w|^2 weight dmu = c_m int (w')^2 s(1-s)/D * weight ds
// using the same staggered 4th-order gradient as the rest of the calculus.
Eigen::MatrixXd stiffness_matrix(const Calculus& calc, const Profile& face_weight) {
    const Grid& g = *calc.grid();
    const int n = g.n();
    const ModelSpec& mod = calc.model();
    Eigen::MatrixXd G(n + 1, n); // cell -> face gradient
    G.setZero();
    Profile e(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        e[static_cast<size_t>(j)] = 1.0;
        const Profile col = g.deriv_cell_to_face(e);
        for (int i = 0; i <= n; ++i) G(i, j) = col[static_cast<size_t>(i)];
        e[static_cast<size_t>(j)] = 0.0;
    }
    Eigen::VectorXd wdiag(n + 1);
    for (int j = 0; j <= n; ++j) {
        const double base =
            mod.measure_const() * mod.ss1_faces()[static_cast<size_t>(j)] /
            mod.D_faces()[static_cast<size_t>(j)] * g.h();
        wdiag(j) = base * face_weight[static_cast<size_t>(j)];
    }
    return G.transpose() * wdiag.asDiagonal() * G;
}

} // namespace

MuResult mu(const Calculus& calc, const TransverseMetric& gT, double tau,
            const MuOptions& opt) {
    if (!(tau > 0.0)) throw NonPositiveTau(tau);
    // scale invariance reduces tau to 1: mu(g, tau) = mu(g/tau, 1)
    if (std::abs(tau - 1.0) > 1e-15) {
        Profile m = gT.regular();
        for (double& v : m) v /= tau;
        return mu(calc, TransverseMetric(calc.grid(), std::move(m)), 1.0, opt);
    }

    const Grid& g = *calc.grid();
    const int n = g.n();
    const double mass_target = 4.0 * M_PI; // (4 pi tau)^n at tau = 1, n = 1

    const CurvatureData curv = calc.curvature(gT);
    const Profile Rc = curv.trace_half().values;

    // quadratic part: 4 * Dirichlet form with unit weight
    Profile unit(static_cast<size_t>(n) + 1, 1.0);
    const Eigen::MatrixXd A = stiffness_matrix(calc, unit);
    const DensityProfile dens = calc.fiber_density(gT);
    Eigen::VectorXd mass(n);
    for (int i = 0; i < n; ++i)
        mass(i) = dens.values[static_cast<size_t>(i)] *
                  g.quadrature_weights()[static_cast<size_t>(i)];

    const double inv4pi = 1.0 / (4.0 * M_PI);
    auto objective = [&](const Eigen::VectorXd& w) {
        const double quad = 4.0 * w.dot(A * w);
        double rest = 0.0;
        for (int i = 0; i < n; ++i) {
            const double wi = w(i);
            const double w2 = wi * wi;
            const double logw = 0.5 * std::log(std::max(w2, 1e-300));
            rest += mass(i) * (Rc[static_cast<size_t>(i)] * w2 - 2.0 * w2 * logw - 2.0 * w2);
        }
        return inv4pi * (quad + rest);
    };
    auto gradient = [&](const Eigen::VectorXd& w) {
        Eigen::VectorXd grd = 8.0 * (A * w);
        for (int i = 0; i < n; ++i) {
            const double wi = w(i);
            const double logw = 0.5 * std::log(std::max(wi * wi, 1e-300));
            grd(i) += mass(i) * (2.0 * Rc[static_cast<size_t>(i)] * wi - 4.0 * wi * logw -
                                 2.0 * wi - 4.0 * wi);
        }
        return (inv4pi * grd).eval();
    };
    auto normalize = [&](Eigen::VectorXd& w) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += mass(i) * w(i) * w(i);
        w *= std::sqrt(mass_target / s);
    };

    // Sobolev-gradient preconditioner: the Dirichlet part makes the plain
    // projected gradient O(h^-2)-stiff, so directions are solved against
    // 8A + 2M (factored once per call)
    Eigen::PartialPivLU<Eigen::MatrixXd> precond(
        (8.0 * A + 2.0 * Eigen::MatrixXd(mass.asDiagonal())).eval());

    Rng rng(opt.seed);
    MuResult best;
    best.value = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < std::max(1, opt.restarts); ++restart) {
        Eigen::VectorXd w(n);
        if (restart == 0) {
            w.setOnes();
        } else {
            Rng r = rng.split(static_cast<uint64_t>(restart));
            const double a1 = r.uniform(-0.8, 0.8);
            const double a2 = r.uniform(-0.5, 0.5);
            const double a3 = r.uniform(-0.3, 0.3);
            for (int i = 0; i < n; ++i) {
                const double s = g.cell(i);
                w(i) = std::exp(a1 * std::cos(M_PI * s) + a2 * std::cos(2.0 * M_PI * s) +
                                a3 * s * (1.0 - s) * 6.0);
            }
        }
        normalize(w);

        double fval = objective(w);
        int it = 0;
        double gnorm = 0.0;
        double step0 = 1.0;
        for (; it < opt.max_iters; ++it) {
            Eigen::VectorXd grd = gradient(w);
            // projected L2 gradient norm is the convergence measure
            Eigen::VectorXd gl2 = grd.cwiseQuotient(mass);
            gl2 -= (w.dot(grd) / mass_target) * w;
            gnorm = 0.0;
            for (int i = 0; i < n; ++i) gnorm += mass(i) * gl2(i) * gl2(i);
            gnorm = std::sqrt(gnorm);
            if (gnorm < opt.grad_tol * std::max(1.0, std::abs(fval))) break;

            // Sobolev direction: minimize the P-norm over the constraint
            // tangent, i.e. project against P^{-1}(M w) rather than w
            Eigen::VectorXd Pg = precond.solve(grd);
            Eigen::VectorXd Mw(n);
            for (int i = 0; i < n; ++i) Mw(i) = mass(i) * w(i);
            Eigen::VectorXd PMw = precond.solve(Mw);
            const double lam = Mw.dot(Pg) / std::max(1e-300, Mw.dot(PMw));
            Eigen::VectorXd dir = Pg - lam * PMw;
            double slope = dir.dot(grd); // = |grd_t|_{P^{-1}}^2 >= 0
            if (!(slope > 1e-14 * gnorm)) { // degenerate: plain gradient
                dir = gl2;
                slope = dir.dot(grd);
            }

            double step = step0;
            bool moved = false;
            for (int ls = 0; ls < 50; ++ls) {
                Eigen::VectorXd cand = w - step * dir;
                normalize(cand);
                const double fc = objective(cand);
                if (fc < fval - 1e-4 * step * slope) {
                    w = std::move(cand);
                    fval = fc;
                    moved = true;
                    step0 = std::min(4.0, step * 1.7);
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }

        if (fval < best.value) {
            // positivity by sign-flip (the functional is even in w)
            Profile wp(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) wp[static_cast<size_t>(i)] = std::abs(w(i));
            best.value = fval;
            best.minimizer = BasicField(calc.grid(), std::move(wp));
            best.iterations = it;
            best.converged = gnorm < 10.0 * opt.grad_tol * std::max(1.0, std::abs(fval));
        }
    }

    // Newton polish on the Euler-Lagrange system itself: the descent phase
    // works on the symmetric Dirichlet form whose boundary rows differ from
    // the pointwise Laplacian at a handful of edge cells; a few Newton steps
    // move the minimizer onto the stationary point of the pointwise operator.
    {
        // dense Laplacian matrix of gT
        Eigen::MatrixXd Lap(n, n);
        Profile e(static_cast<size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            e[static_cast<size_t>(j)] = 1.0;
            const BasicField col = calc.basic_laplacian(gT, BasicField(calc.grid(), e));
            for (int i = 0; i < n; ++i) Lap(i, j) = col[static_cast<size_t>(i)];
            e[static_cast<size_t>(j)] = 0.0;
        }
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) w(i) = best.minimizer[static_cast<size_t>(i)];
        double muv = best.value;
        for (int newton = 0; newton < 12; ++newton) {
            Eigen::VectorXd F(n + 1);
            Eigen::VectorXd Lw = Lap * w;
            double cons = -4.0 * M_PI;
            for (int i = 0; i < n; ++i) {
                const double wi = std::max(w(i), 1e-300);
                F(i) = -4.0 * Lw(i) + Rc[static_cast<size_t>(i)] * w(i) -
                       2.0 * w(i) * std::log(wi) - 2.0 * calc.model().n * w(i) - muv * w(i);
                cons += mass(i) * w(i) * w(i);
            }
            F(n) = cons;
            double fn = F.norm();
            if (fn < 1e-11 * std::max(1.0, w.norm())) break;
            Eigen::MatrixXd J(n + 1, n + 1);
            J.setZero();
            J.topLeftCorner(n, n) = -4.0 * Lap;
            for (int i = 0; i < n; ++i) {
                const double wi = std::max(w(i), 1e-300);
                J(i, i) += Rc[static_cast<size_t>(i)] - 2.0 * std::log(wi) - 2.0 -
                           2.0 * calc.model().n - muv;
                J(i, n) = -w(i);
                J(n, i) = 2.0 * mass(i) * w(i);
            }
            Eigen::VectorXd delta = J.partialPivLu().solve(F);
            if (!delta.allFinite()) break;
            w -= delta.head(n);
            muv -= delta(n);
        }
        if (w.minCoeff() > 0.0 && std::isfinite(muv)) {
            Profile wp(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) wp[static_cast<size_t>(i)] = w(i);
            best.minimizer = BasicField(calc.grid(), std::move(wp));
            best.value = muv;
            best.converged = true;
        }
    }

    // Euler-Lagrange residual: -4 Lap w + R w - 2 w log w - 2 n w = mu w
    {
        const BasicField& w1 = best.minimizer;
        const BasicField lap = calc.basic_laplacian(gT, w1);
        double scale = 0.0, worst = 0.0;
        Profile resid(w1.values.size());
        for (size_t i = 0; i < resid.size(); ++i) {
            const double wi = w1[i];
            const double r = -4.0 * lap[i] + Rc[i] * wi - 2.0 * wi * std::log(std::max(wi, 1e-300)) -
                             2.0 * calc.model().n * wi - best.value * wi;
            resid[i] = r;
            scale = std::max(scale, std::abs(wi));
        }
        // weighted L2 residual per unit mass; pointwise sup is dominated by
        // the operator-mismatch at the last grid cells
        double num = 0.0;
        for (size_t i = 0; i < resid.size(); ++i)
            num += mass(static_cast<int>(i)) * resid[i] * resid[i];
        worst = std::sqrt(num / mass_target) / std::max(scale, 1e-300);
        best.el_residual = worst;
        best.constraint = calc.integrate(gT, [&] {
            Profile sq(w1.values.size());
            for (size_t i = 0; i < sq.size(); ++i) sq[i] = w1[i] * w1[i];
            return sq;
        }());
    }
    return best;
}

double poincare_residual(const Calculus& calc, const TransverseMetric& gT,
                         const BasicField& u, const BasicField& f) {
    const double V = calc.volume(gT);
    Profile e(u.values.size());
    for (size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-u[i]);
    const BasicField gsq = calc.grad_norm_sq(gT, f); // Hermitian-trace norm
    Profile t1(e.size()), t2(e.size()), t3(e.size());
    for (size_t i = 0; i < e.size(); ++i) {
        t1[i] = f[i] * f[i] * e[i];
        t2[i] = 2.0 * gsq[i] * e[i]; // Riemannian |nabla f|^2 = 2 * Hermitian
        t3[i] = f[i] * e[i];
    }
    const double lhs = calc.integrate(gT, t1) / V;
    const double rhs = calc.integrate(gT, t2) / V;
    const double mean = calc.integrate(gT, t3) / V;
    return rhs + mean * mean - lhs;
}

double entropy_W_of_w(const Calculus& calc, const TransverseMetric& gT, const Profile& w) {
    // W = (4 pi)^{-n} int [ 4 |nabla w|^2 + R w^2 - 2 w^2 log w - 2 n w^2 ] dmu
    const int n_cd = calc.model().n;
    const CurvatureData curv = calc.curvature(gT);
    const BasicField Rc = curv.trace_half();
    BasicField wf(calc.grid(), w);
    const BasicField gsq = calc.grad_norm_sq(gT, wf);
    Profile integrand(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        const double w2 = w[i] * w[i];
        const double wlog = (w[i] > 0.0) ? w2 * std::log(w[i]) : 0.0;
        integrand[i] = 4.0 * gsq[i] + Rc[i] * w2 - 2.0 * wlog - 2.0 * n_cd * w2;
    }
    return std::pow(4.0 * M_PI, -n_cd) * calc.integrate(gT, integrand);
}

SpectrumResult weighted_lambda1(const Calculus& calc, const TransverseMetric& gT,
                                const BasicField& u) {
    const Grid& g = *calc.grid();
    const int n = g.n();
    // Dirichlet form of L in the e^{-u} dmu inner product (Riemannian
    // normalization = 2x the Hermitian-trace form)
    const Profile uf = g.interp_cell_to_face(u.values);
    Profile face_w(static_cast<size_t>(n) + 1);
    for (size_t j = 0; j < face_w.size(); ++j) face_w[j] = 2.0 * std::exp(-uf[j]);
    Eigen::MatrixXd A = stiffness_matrix(calc, face_w);
    const DensityProfile dens = calc.fiber_density(gT);
    Eigen::VectorXd mass(n);
    for (int i = 0; i < n; ++i)
        mass(i) = dens.values[static_cast<size_t>(i)] * g.h() *
                  std::exp(-u[static_cast<size_t>(i)]);
    Eigen::MatrixXd M = mass.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
    if (es.info() != Eigen::Success) throw SolverFailure("eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    SpectrumResult out;
    const double tol = std::max(1e-8, 1e-10 * std::abs(ev(n - 1)));
    int k = 0;
    while (k < n && ev(k) < tol) ++k;
    out.kernel_dim = k;
    out.lambda1 = (k < n) ? ev(k) : 0.0;
    return out;
}

} // namespace srf
