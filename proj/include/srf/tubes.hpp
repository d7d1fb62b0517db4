#pragma once

#include <vector>

#include "srf/calculus.hpp"
#include "srf/functionals.hpp"
#include "srf/rng.hpp"

namespace srf {

/// Arclength / mass tables of one transverse metric: sigma(s) is the
/// quotient distance from the s=0 orbit, M(s) the cumulative measure.
/// Built on a refined grid in the regularizing angle t = 2 asin(sqrt(s)).
class TubeGeometry {
public:
    TubeGeometry(const Calculus& calc, const TransverseMetric& gT, int refine = 8);

    double sigma(double s) const;
    double s_of_sigma(double sig) const;
    double diameter() const { return sigma_total_; }
    double total_mass() const { return mass_total_; }
    double mass_below(double s) const;
    double mass_of_sigma(double sig) const;

    /// Volume of the set { |sigma(s) - sigma(center)| <= r }.
    double band_volume(double center_s, double r) const;

    /// Coarea density dV/dr of the band at radius r (sum over the one or two
    /// boundary components).
    double band_coarea(double center_s, double r) const;

    /// Integral of a basic field over the annulus r_lo <= d <= r_hi about
    /// center_s, on the refined angle grid.
    double integrate_band(double center_s, double r_lo, double r_hi,
                          const Profile& field, const Grid& grid) const;

private:
    std::vector<double> t_, s_, sig_, mass_, ell_; // ell = rho/sqrt(q_ss)
    double sigma_total_ = 0.0, mass_total_ = 0.0, dt_ = 0.0;
    double eval(const std::vector<double>& tab, double s) const;
    double lookup_t(const std::vector<double>& tab, double t) const;
    double t_of_sigma(double sig) const;
};

struct TubeReport {
    double center_s = 0.0;
    std::vector<double> radii;
    std::vector<double> volumes;
    int q = 0;                       // orbit-closure dimension at the center
    double fitted_coefficient = 0.0; // limit of V(r)/r^{3-q}
    double expected_coefficient = 0.0;
    double orbit_volume = 0.0;       // Vol(P) in the model measure normalization
};

struct NoncollapseResult {
    double ratio = 0.0;   // Vol(T(p,r)) / r^2
    bool vacuous = false; // curvature hypothesis |R^T| <= 1/r^2 failed on the tube
    double max_scalar = 0.0;
};

struct RadiusSelection {
    double r_prime = 0.0;
    int k = 0; // r' = r / 2^k
    // certificates
    double curvature_bound = 0.0;    // max |R^T| r'^2 over T(p,r')
    double chain_ratio = 0.0;        // (r')^{-2} V(r') / (r^{-2} V(r)), must be <= 9
    double shell_difference = 0.0;   // V(r') - V(r'/2)
    double shell_bound = 0.0;        // 9 (r'/r)^2 V(r)
    bool ok_curvature = false, ok_chain = false, ok_shell = false;
};

struct AnnulusReport {
    double base_s = 0.0;
    double volume = 0.0;         // Vol(T(2^k1, 2^k2))
    double r1 = 0.0, r2 = 0.0;   // slice radii from the averaging steps
    double S_r1 = 0.0, S_r2 = 0.0;
    double bound_r1 = 0.0, bound_r2 = 0.0; // 2 V / 2^{k_i}
    double volume_slice = 0.0;             // Vol(T(r1, r2))
    double curvature_integral = 0.0;       // int_{T(r1,r2)} R^T dmu
    double coarea_identity_error = 0.0;    // |int_0^r S - V(r)| at r = 2^{k2}
};

/// Quotient distance between the orbit-closure level sets at s1 and s2.
double transverse_distance(const Calculus& calc, const TransverseMetric& gT,
                           double s1, double s2);

/// sup over pairs of transverse_distance = the full s-integral.
double transverse_diameter(const Calculus& calc, const TransverseMetric& gT);

/// Volume of the transverse tube of radius r about center_s.  For rank-2
/// centers this is the sigma-band; rank-1 tubes are supported at the poles
/// and, by homogeneity, anywhere on the Round Einstein background.
double tube_volume(const Calculus& calc, const TransverseMetric& gT,
                   double center_s, double r);

/// Fit V(r)/r^{3-q} = c0 + c1 r^2 over the given radii and compare with the
/// tube-expansion prediction (q=1: pi Vol(P), q=2: 2 Vol(P)).
TubeReport gray_fit(const Calculus& calc, const TransverseMetric& gT,
                    double center_s, const std::vector<double>& radii);

NoncollapseResult noncollapse_ratio(const Calculus& calc, const TransverseMetric& gT,
                                    double center_s, double r);

/// Dyadic search r' = r/2^k for the first radius whose volume ratio to its
/// half is <= 3^{2n} = 9, with the three checked certificates.
RadiusSelection radius_selection(const Calculus& calc, const TransverseMetric& gT,
                                 double center_s, double r);

/// Coarea diagnostics on the annulus 2^{k1} <= d^T <= 2^{k2} about the
/// minimum of the Ricci potential u.
AnnulusReport annulus_diagnostics(const Calculus& calc, const TransverseMetric& gT,
                                  const BasicField& u, int k1, int k2);

struct LipschitzReport {
    double max_violation = 0.0;   // max |h(x)-h(y)| - dist(x,y) over pairs
    double max_grad = 0.0;        // discrete sup |grad h| away from the kink
    int pairs = 0;
};

/// Monte Carlo check that h = d^T(z, .) is 1-Lipschitz for the ambient round
/// metric (Round family only; the closed-form unit-sphere normalization is
/// used, rescaled models inherit the bound by homothety).
LipschitzReport lipschitz_check(const Calculus& calc, int n_pairs, uint64_t seed);

struct TubeEquivalenceReport {
    double sym_diff_fraction = 0.0; // vs the d^T tube volume
    double dT_fraction = 0.0;       // MC volume fractions
    double geo_fraction = 0.0;
    double quad_fraction = 0.0;     // quadrature d^T tube volume fraction
};

/// Monte Carlo comparison of the d^T tube with the geodesic tube about the
/// orbit closure (Round family, unit-sphere normalization).
TubeEquivalenceReport tube_equivalence_mc(const Calculus& calc, double center_s, double r,
                                          int samples, uint64_t seed);

/// Entropy of the normalized radial cutoff supported on the tube of radius r
/// about center_s: a valid tau=1 test function, hence an upper bound for
/// mu(g,1); collapses to -infinity with the tube volume.
double cutoff_entropy(const Calculus& calc, const TransverseMetric& gT,
                      double center_s, double r);

/// The smooth bump: 1 on [0,1/2], 0 on [1,inf), strictly decreasing between.
double cutoff_bump(double x);

} // namespace srf
