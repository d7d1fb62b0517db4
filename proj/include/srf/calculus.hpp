#pragma once

#include "srf/grid.hpp"
#include "srf/model.hpp"

namespace srf {

/// Transverse Kahler metric, represented by the regular part
/// m(s) = ghat(s)/(s(1-s)) of the angular-frame component, strictly
/// positive on the closed interval.  component() exposes ghat itself.
class TransverseMetric {
public:
    TransverseMetric() = default;
    /// Certifies positivity; throws PositivityLost otherwise.
    TransverseMetric(GridPtr grid, Profile regular);

    const Profile& regular() const { return m_; }
    GridPtr grid() const { return grid_; }

    /// ghat(s_i) = s(1-s) m(s_i): the metric component profile.
    Profile component() const;
    /// det of the transverse Hermitian metric in the chart equals the
    /// component; inverse() is its reciprocal.
    Profile det() const { return component(); }
    Profile inverse() const;

    double min_regular() const;

private:
    GridPtr grid_;
    Profile m_;
};

/// ricci holds the angular-frame profile Rhat = |w|^2 R_{w wbar}; scalar is
/// the Riemannian scalar curvature of the transverse metric, which satisfies
/// scalar = 2 * inverse * ricci nodewise.  trace_half() = scalar/2 is the
/// Hermitian trace used by the flow and the functionals.
struct CurvatureData {
    BasicField ricci;   // Rhat profile
    BasicField scalar;  // real scalar curvature, = 2 g^{-1} Rhat
    BasicField trace_half() const;
};

/// Discrete transverse calculus bound to one model (weight profiles, measure).
class Calculus {
public:
    explicit Calculus(const ModelSpec& model);

    const ModelSpec& model() const { return *model_; }
    GridPtr grid() const { return model_->grid; }

    /// Reduced ddbar on basic profiles:
    ///   H[f] = s(1-s)/D * d/ds( s(1-s) f' / D ),
    /// the angular-frame component of the (1,1) Hessian of f.
    Profile ddbar(const Profile& f) const;

    /// Same divided by s(1-s): the increment of the regular metric part.
    Profile ddbar_regular(const Profile& f) const;

    TransverseMetric background() const;

    /// g^T_0 + ddbar(phi); throws PositivityLost when the potential leaves
    /// the Kahler cone.
    TransverseMetric metric_from_potential(const BasicField& phi) const;

    CurvatureData curvature(const TransverseMetric& gT) const;

    /// Basic Laplacian (Hermitian trace of the Hessian), annihilates
    /// constants identically.
    BasicField basic_laplacian(const TransverseMetric& gT, const BasicField& f) const;

    /// |nabla f|^2 = g^{w wbar} |d f|^2 reduced to the profile, paired with
    /// basic_laplacian so that integration by parts holds.
    BasicField grad_norm_sq(const TransverseMetric& gT, const BasicField& f) const;

    /// Angular-frame component of the pure (2,0) Hessian contracted twice
    /// with the inverse metric (needed by the energy-derivative identity).
    BasicField pure_hessian(const TransverseMetric& gT, const BasicField& f) const;

    /// Measure density rho(s) = c_m m(s) D(s) of the metric gT.
    DensityProfile fiber_density(const TransverseMetric& gT) const;

    double integrate(const TransverseMetric& gT, const Profile& field) const;
    double volume(const TransverseMetric& gT) const;

    /// Solve H[f] = rhs for the mean-zero basic f (discrete dense solve);
    /// rhs must integrate to ~0 against |J|.  residual_out receives the
    /// max-norm discrete residual.
    BasicField solve_ddbar(const TransverseMetric& gT, const Profile& rhs,
                           double* residual_out = nullptr) const;

    /// Quotient line element q_ss = ghat J^2/2 at cells (for distances).
    Profile q_ss(const TransverseMetric& gT) const;

private:
    const ModelSpec* model_;
    struct Solver;
    mutable std::shared_ptr<Solver> solver_; // cached LU of the ddbar operator
};

} // namespace srf
