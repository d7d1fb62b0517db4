#pragma once

#include "srf/conjugate.hpp"

namespace srf {

/// Time family of leaf-coordinate diffeomorphisms integrating
/// d rho/dt = -1/2 grad f, with the transported transverse data.
///
/// The transported metric leaves the Kahler profile class: it is carried as
/// the pole-regular pair (E_hat, G_hat) of the diagonal quotient metric
///   q = E ds^2 + G dchi^2,  E = E_hat/(s(1-s)),  G = s(1-s) G_hat.
/// The fiber component of the gauge field vanishes for basic dilatons; the
/// zero shift profile is carried to make that explicit.
struct GaugePath {
    const Trajectory* trajectory = nullptr;
    const DilatonPath* dilaton = nullptr;
    std::vector<Profile> maps;        // node positions sigma_t(s_i), strictly monotone
    std::vector<Profile> pulled_Ehat; // per time
    std::vector<Profile> pulled_Ghat;
    std::vector<BasicField> pulled_f;
    BasicField fiber_shift;           // identically zero in the basic reduction
};

/// Integrate the node ODE ds/dt = -(1/2) (grad f)^s along the coupled
/// trajectory/dilaton pair; throws MonotonicityLost when a map folds.
GaugePath transport(const Calculus& calc, const Trajectory& traj, const DilatonPath& path);

struct GradientFlowResiduals {
    double metric_ss = 0.0; // d/dt E_hat + K E_hat + [s(1-s) Hess_ss f]
    double metric_chi = 0.0;
    double dilaton = 0.0;   // d/dt f + (Lap_q f + R_q)/2
    double max() const { return std::max(metric_ss, std::max(metric_chi, dilaton)); }
};

/// Finite-difference residuals of the pulled-back gradient-flow equations
///   d q/dt = -(Ric_q + Hess_q f),   d f/dt = -(Lap f + R)/2,
/// measured on the pole-regular component pair over interior times.
GradientFlowResiduals check_gradient_flow_form(const Calculus& calc, const GaugePath& gp);

struct DiffTInvarianceReport {
    double energy_discrepancy = 0.0;      // max_t |F(g,f) - F(rho* g, rho* f)|
    double scalar_transport = 0.0;        // max |rho* R(g) - R(rho* g)|
    double mass_change_of_variables = 0.0;// max_t |int e^{-f} dmu difference|
    double fiber_irrelevance = 0.0;       // transported data before/after shift
};

DiffTInvarianceReport check_diffT_invariance(const Calculus& calc, const GaugePath& gp);

/// Intrinsic transverse energy of a transported (non-Kahler) pair.
double energy_F_intrinsic(const Calculus& calc, const Profile& Ehat, const Profile& Ghat,
                          const BasicField& f);

/// Gaussian curvature of the diagonal quotient metric in regular components.
Profile quotient_gauss_curvature(const Calculus& calc, const Profile& Ehat,
                                 const Profile& Ghat);

} // namespace srf
