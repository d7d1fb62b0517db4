#pragma once

#include <vector>

#include "srf/calculus.hpp"

namespace srf {

/// State of the potential-level flow at one time.  For normalized states the
/// caches satisfy gT = metric_from_potential(phi), ddbar u = g - Ric with
/// int e^{-u} dmu = 4 pi.  Unnormalized states carry the metric directly.
struct FlowState {
    double t = 0.0;
    BasicField phi;
    TransverseMetric gT;
    CurvatureData curv;
    BasicField u; // Ricci potential (normalized trajectories only)
};

enum class FlowKind { Normalized, Unnormalized };

/// Ordered, immutable sequence of states at uniform spacing.
struct Trajectory {
    FlowKind kind = FlowKind::Normalized;
    const ModelSpec* model = nullptr;
    std::vector<FlowState> states;

    double t0() const { return states.front().t; }
    double t1() const { return states.back().t; }
    double dt() const { return states.size() > 1 ? states[1].t - states[0].t : 0.0; }

    /// Metric regular-part profile at arbitrary time by cubic interpolation
    /// in t across stored states; throws RangeExceeded outside the span.
    Profile metric_at(double t) const;
};

struct FlowOptions {
    double dt_safety = 0.1;       // stability-cap prefactor c in c h^2 min(ghat J^2)
    double store_dt = 0.01;       // spacing of stored states
    double err_tol = 1e-7;        // step-doubling error tolerance (per step)
    int err_check_interval = 64;  // steps between embedded error estimates
    double max_dt = 1e-2;
};

/// Basic F with ddbar F = Ric(gT) - kappa * g_background, mean-zero; the
/// discrete Poisson residual is reported through residual_out.
BasicField ricci_deviation_potential(const Calculus& calc, const TransverseMetric& gT,
                                     double* residual_out = nullptr);

/// One explicit RK4 step of d phi/dt = log det ratio + kappa phi - F.
/// Throws StepRejected when dt exceeds the stability cap or the embedded
/// error estimate fails; PositivityLost propagates from the cache rebuild.
FlowState step_normalized(const Calculus& calc, const FlowState& state, double dt,
                          const BasicField& F_bg);

/// Integrate the normalized flow from phi0 on [0, t_end].
Trajectory run_flow(const Calculus& calc, const BasicField& phi0, double t_end,
                    const FlowOptions& opt = {});

/// (1-t) g(-log(1-t)) resampled on a uniform grid over [0, t_max], t_max < 1.
Trajectory to_unnormalized(const Calculus& calc, const Trajectory& traj,
                           double t_max, int n_out);

/// Ricci potential of a metric: ddbar u = g - Ric, int e^{-u} dmu = 4 pi.
BasicField ricci_potential(const Calculus& calc, const TransverseMetric& gT,
                           double* residual_out = nullptr);

/// a = (4 pi)^{-n} int u e^{-u} dmu, the monotone companion of u.
double a_quantity(const Calculus& calc, const TransverseMetric& gT, const BasicField& u);

/// Stability time-step cap for the metric gT.
double dt_stability_cap(const Calculus& calc, const TransverseMetric& gT, double safety);

/// Lower barrier for min R^T/2 under the normalized flow: the solution of
/// y' = y^2 - y with y(0) = y0, evaluated at time t.
double min_scalar_barrier(double y0, double t);

} // namespace srf
