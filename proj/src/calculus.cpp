#include "srf/calculus.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "srf/errors.hpp"

namespace srf {

TransverseMetric::TransverseMetric(GridPtr grid, Profile regular)
    : grid_(std::move(grid)), m_(std::move(regular)) {
    for (size_t i = 0; i < m_.size(); ++i) {
        if (!(m_[i] > 0.0) || !std::isfinite(m_[i]))
            throw PositivityLost(static_cast<int>(i), m_[i]);
    }
}

Profile TransverseMetric::component() const {
    Profile g(m_.size());
    for (size_t i = 0; i < m_.size(); ++i) {
        const double s = grid_->cell(static_cast<int>(i));
        g[i] = s * (1.0 - s) * m_[i];
    }
    return g;
}

Profile TransverseMetric::inverse() const {
    Profile g = component();
    for (double& v : g) v = 1.0 / v;
    return g;
}

double TransverseMetric::min_regular() const {
    double m = m_[0];
    for (double v : m_) m = std::min(m, v);
    return m;
}

BasicField CurvatureData::trace_half() const {
    return 0.5 * scalar;
}

Calculus::Calculus(const ModelSpec& model) : model_(&model) {}

Profile Calculus::ddbar(const Profile& f) const {
    const Grid& g = *grid();
    const ModelSpec& m = *model_;
    Profile flux = g.deriv_cell_to_face(f);
    for (size_t j = 0; j < flux.size(); ++j)
        flux[j] *= m.ss1_faces()[j] / m.D_faces()[j];
    flux.front() = 0.0; // boundary fluxes vanish through s(1-s)
    flux.back() = 0.0;
    Profile out = g.deriv_face_to_cell(flux);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] *= m.ss1_cells()[i] / m.D_cells()[i];
    return out;
}

Profile Calculus::ddbar_regular(const Profile& f) const {
    const Grid& g = *grid();
    const ModelSpec& m = *model_;
    Profile flux = g.deriv_cell_to_face(f);
    for (size_t j = 0; j < flux.size(); ++j)
        flux[j] *= m.ss1_faces()[j] / m.D_faces()[j];
    flux.front() = 0.0;
    flux.back() = 0.0;
    Profile out = g.deriv_face_to_cell(flux);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] /= m.D_cells()[i];
    return out;
}

TransverseMetric Calculus::background() const {
    return TransverseMetric(grid(), model_->m0());
}

TransverseMetric Calculus::metric_from_potential(const BasicField& phi) const {
    if (!phi.finite()) throw NumericalError("potential has non-finite values");
    Profile inc = ddbar_regular(phi.values);
    Profile m = model_->m0();
    for (size_t i = 0; i < m.size(); ++i) m[i] += inc[i];
    return TransverseMetric(grid(), std::move(m)); // certifies positivity
}

CurvatureData Calculus::curvature(const TransverseMetric& gT) const {
    // Rhat = -H[log ghat]; with ghat = s(1-s) m the flux reduces to the
    // pole-regular form  P = -( s(1-s) (log m)' + (1-2s) ) / D  at faces.
    const Grid& g = *grid();
    const ModelSpec& mod = *model_;
    const size_t n = gT.regular().size();
    Profile logm(n);
    for (size_t i = 0; i < n; ++i) logm[i] = std::log(gT.regular()[i]);
    Profile dlogm = g.deriv_cell_to_face(logm);
    Profile P(n + 1);
    for (size_t j = 0; j <= n; ++j) {
        const double s = g.faces()[j];
        P[j] = -(mod.ss1_faces()[j] * dlogm[j] + (1.0 - 2.0 * s)) / mod.D_faces()[j];
    }
    Profile dP = g.deriv_face_to_cell(P);
    Profile rhat(n), scal(n);
    for (size_t i = 0; i < n; ++i) {
        // Rhat = -(1/J) dP/ds with 1/J = -s(1-s)/D
        rhat[i] = mod.ss1_cells()[i] / mod.D_cells()[i] * dP[i];
        scal[i] = 2.0 * rhat[i] / (mod.ss1_cells()[i] * gT.regular()[i]);
    }
    CurvatureData c;
    c.ricci = BasicField(grid(), std::move(rhat));
    c.scalar = BasicField(grid(), std::move(scal));
    return c;
}

BasicField Calculus::basic_laplacian(const TransverseMetric& gT, const BasicField& f) const {
    Profile H = ddbar(f.values);
    const Profile& m = gT.regular();
    for (size_t i = 0; i < H.size(); ++i)
        H[i] /= model_->ss1_cells()[i] * m[i];
    return BasicField(grid(), std::move(H));
}

BasicField Calculus::grad_norm_sq(const TransverseMetric& gT, const BasicField& f) const {
    // |nabla f|^2 = (f')^2 s(1-s) / (m D^2)
    const Grid& g = *grid();
    Profile fp = g.deriv_cell(f.values);
    const ModelSpec& mod = *model_;
    const Profile& m = gT.regular();
    Profile out(fp.size());
    for (size_t i = 0; i < fp.size(); ++i)
        out[i] = fp[i] * fp[i] * mod.ss1_cells()[i] / (m[i] * mod.D_cells()[i] * mod.D_cells()[i]);
    return BasicField(grid(), std::move(out));
}

BasicField Calculus::pure_hessian(const TransverseMetric& gT, const BasicField& f) const {
    // X = Delta_B f - <df, d log ghat> / (ghat J^2), the contraction of the
    // pure second covariant derivative; (log ghat)' stays regular through
    // (log m)' + (1-2s)/(s(1-s)) with the measure factors absorbed.
    const Grid& g = *grid();
    const ModelSpec& mod = *model_;
    const Profile& m = gT.regular();
    const size_t n = m.size();
    Profile fp = g.deriv_cell(f.values);
    Profile logm(n);
    for (size_t i = 0; i < n; ++i) logm[i] = std::log(m[i]);
    Profile dlogm = g.deriv_cell(logm);
    BasicField lap = basic_laplacian(gT, f);
    Profile out(n);
    for (size_t i = 0; i < n; ++i) {
        const double ss1 = mod.ss1_cells()[i];
        const double D = mod.D_cells()[i];
        const double s = g.cell(static_cast<int>(i));
        const double dlogg = dlogm[i] + (1.0 - 2.0 * s) / ss1;
        // 1/(ghat J^2) = s(1-s) / (m D^2); the 1/s(1-s) of dlogg cancels
        out[i] = lap[i] - fp[i] * dlogg * ss1 / (m[i] * D * D);
    }
    return BasicField(grid(), std::move(out));
}

DensityProfile Calculus::fiber_density(const TransverseMetric& gT) const {
    const ModelSpec& mod = *model_;
    const Profile& m = gT.regular();
    Profile d(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        d[i] = mod.measure_const() * m[i] * mod.D_cells()[i];
    return DensityProfile{grid(), std::move(d)};
}

double Calculus::integrate(const TransverseMetric& gT, const Profile& field) const {
    const DensityProfile d = fiber_density(gT);
    Profile prod(field.size());
    for (size_t i = 0; i < field.size(); ++i) prod[i] = field[i] * d.values[i];
    return grid()->integrate(prod);
}

double Calculus::volume(const TransverseMetric& gT) const {
    return fiber_density(gT).total();
}

Profile Calculus::q_ss(const TransverseMetric& gT) const {
    const ModelSpec& mod = *model_;
    const Profile& m = gT.regular();
    Profile q(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        q[i] = m[i] * mod.D_cells()[i] * mod.D_cells()[i] / (2.0 * mod.ss1_cells()[i]);
    return q;
}

struct Calculus::Solver {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

BasicField Calculus::solve_ddbar(const TransverseMetric& gT, const Profile& rhs,
                                 double* residual_out) const {
    // The ddbar operator itself is metric-independent; factor its bordered
    // (mean + multiplier) extension once and reuse it.  The requested mean —
    // zero against the measure of gT — is imposed by a constant shift after
    // the solve.
    const int n = grid()->n();
    if (!solver_) {
        Eigen::MatrixXd A(n + 1, n + 1);
        A.setZero();
        Profile e(static_cast<size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            e[static_cast<size_t>(j)] = 1.0;
            Profile col = ddbar(e);
            for (int i = 0; i < n; ++i) A(i, j) = col[static_cast<size_t>(i)];
            e[static_cast<size_t>(j)] = 0.0;
        }
        for (int j = 0; j < n; ++j) {
            A(n, j) = 1.0; // plain-average constraint row, any well-posed one works
            A(j, n) = 1.0; // multiplier column absorbs the non-solvable component
        }
        auto s = std::make_shared<Solver>();
        s->lu.compute(A);
        solver_ = std::move(s);
    }
    Eigen::VectorXd b(n + 1);
    for (int i = 0; i < n; ++i) b(i) = rhs[static_cast<size_t>(i)];
    b(n) = 0.0;
    Eigen::VectorXd x = solver_->lu.solve(b);
    if (!x.allFinite()) throw SolverFailure("ddbar solve produced non-finite values");
    Profile f(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) f[static_cast<size_t>(i)] = x(i);
    if (residual_out) {
        const Profile back = ddbar(f);
        double r = 0.0;
        for (int i = 0; i < n; ++i)
            r = std::max(r, std::abs(back[static_cast<size_t>(i)] - rhs[static_cast<size_t>(i)] + x(n)));
        *residual_out = r;
    }
    // shift to mean zero against the measure of gT
    BasicField out(grid(), std::move(f));
    const double mean = integrate(gT, out.values) / volume(gT);
    for (double& v : out.values) v -= mean;
    return out;
}

} // namespace srf
