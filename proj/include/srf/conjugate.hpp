#pragma once

#include "srf/flow.hpp"

namespace srf {

enum class ConjugateVariant { Energy, Entropy };

/// Time-indexed family of basic dilatons f(t) aligned with a trajectory;
/// tau is filled for the entropy variant (d tau/dt = -1 on the grid).
struct DilatonPath {
    const Trajectory* trajectory = nullptr;
    ConjugateVariant variant = ConjugateVariant::Energy;
    std::vector<BasicField> fields; // f at each trajectory state
    std::vector<double> tau;        // entropy variant only

    const BasicField& at(size_t k) const { return fields[k]; }
};

struct ConjugateOptions {
    double dt_safety = 0.2;
};

/// Integrate w = e^{-f} forward in s = T - t with dw/ds = Lap w - (R^T/... )
/// the Hermitian-trace curvature acting as potential; the terminal condition
/// is reproduced exactly and positivity of w is asserted at every step.
DilatonPath solve_backward_F(const Calculus& calc, const Trajectory& traj,
                             const BasicField& f_T, const ConjugateOptions& opt = {});

/// Entropy version with the extra n/tau forcing; tau(t) = tau_T + (T - t)
/// must stay positive over the whole interval.
DilatonPath solve_backward_W(const Calculus& calc, const Trajectory& traj,
                             const BasicField& f_T, double tau_T,
                             const ConjugateOptions& opt = {});

/// Max interior residual of the declared backward equation, measured by
/// finite differences on the stored path.
double pde_residual(const Calculus& calc, const Trajectory& traj, const DilatonPath& path);

} // namespace srf
