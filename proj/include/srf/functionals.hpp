#pragma once

#include "srf/calculus.hpp"
#include "srf/rng.hpp"

namespace srf {

/// Transverse energy  F(g,f) = int (R^T + |nabla f|^2) e^{-f} dmu, with the
/// Hermitian-trace curvature and matching gradient norm.
double energy_F(const Calculus& calc, const TransverseMetric& gT, const BasicField& f);

/// Transverse entropy
///   W(g,f,tau) = (4 pi tau)^{-n} int ( tau (R^T + |nabla f|^2) + f - 2n ) e^{-f} dmu.
double entropy_W(const Calculus& calc, const TransverseMetric& gT, const BasicField& f,
                 double tau);

/// The exact time derivative of F along the coupled flow/backward system:
///   (1/2) int |Ric + D^2 f|^2 e^{-f} dmu
/// with the full real Hessian (Hermitian block plus pure block).
double dF_dt_formula(const Calculus& calc, const TransverseMetric& gT, const BasicField& f);

struct VariationResult {
    double analytic;
    double numeric;
};

/// First variation of F in the direction (v = ddbar psi, h), both from the
/// closed-form integral and from a centered finite difference at step eps.
VariationResult variation_F(const Calculus& calc, const TransverseMetric& gT,
                            const BasicField& f, const BasicField& psi,
                            const BasicField& h, double eps);

/// Constrained minimizer of W(g, . , tau) over the sphere
/// int w^2 dmu = (4 pi tau)^n, w = e^{-f/2}.
struct MuResult {
    double value = 0.0;       // mu(g, tau)
    BasicField minimizer;     // w_1 > 0
    double el_residual = 0.0; // Euler-Lagrange residual (scaled sup norm)
    int iterations = 0;
    bool converged = true;
    double constraint = 0.0;  // int w^2 dmu (diagnostic)
};

struct MuOptions {
    int restarts = 8;
    int max_iters = 600;
    double grad_tol = 1e-8;
    uint64_t seed = 12345;
};

MuResult mu(const Calculus& calc, const TransverseMetric& gT, double tau,
            const MuOptions& opt = {});

/// RHS - LHS of the weighted Poincare inequality
///   (1/V) int f^2 e^{-u} dmu <= (1/V) int |nabla f|^2_g e^{-u} dmu
///                               + ((1/V) int f e^{-u} dmu)^2
/// with the Riemannian gradient norm; non-negative when u is the Ricci
/// potential of gT.
double poincare_residual(const Calculus& calc, const TransverseMetric& gT,
                         const BasicField& u, const BasicField& f);

struct SpectrumResult {
    double lambda1 = 0.0; // smallest nonzero eigenvalue
    int kernel_dim = 0;   // should be 1 (constants)
};

/// Smallest positive eigenvalue of the drift operator L = -Lap + grad u . grad
/// (Riemannian normalization), symmetrized in the e^{-u} dmu inner product.
SpectrumResult weighted_lambda1(const Calculus& calc, const TransverseMetric& gT,
                                const BasicField& u);

/// Entropy W(g, f, 1) of an arbitrary w = e^{-f/2} >= 0 given as a profile,
/// evaluated in the w-form (safe where w = 0); expects int w^2 dmu = 4 pi.
double entropy_W_of_w(const Calculus& calc, const TransverseMetric& gT, const Profile& w);

} // namespace srf
