#pragma once

#include "srf/grid.hpp"

namespace srf {

enum class Family { Round, Weighted };

/// Density rho(s) with  int_S h dmu = int_0^1 h(s) rho(s) ds  for basic h.
struct DensityProfile {
    GridPtr grid;
    Profile values;
    double total() const { return grid->integrate(values); }
};

/// A model Sasaki 3-manifold: S^3 with Reeb field xi_{a,b} = a H_1 + b H_2,
/// leaf coordinate s = |z_1|^2, contact form eta_round / (a|z_1|^2 + b|z_2|^2).
///
/// The transverse metric is carried as the angular-frame profile
/// ghat(s) = |w|^2 g_{w wbar} in the chart w = z_2^a / z_1^b, stored through
/// its regular part m(s) = ghat / (s(1-s)) which is smooth and positive up to
/// the poles.  The background is rescaled so that the transverse Einstein
/// constant is kappa = 1; with D(s) = a s + b(1-s):
///
///   m0(s) = (a+b) / D(s)^3,      measure density rho(s) = c_m m(s) D(s),
///   c_m = 4 pi a b / (a+b)  so that Vol(S, background) = 4 pi = (4 pi)^n.
///
/// The fiber normalization is a global convention; it cancels in every
/// monotonicity statement and makes the volume equal to the (4 pi)^n mass
/// used to normalize the Ricci potential.
class ModelSpec {
public:
    Family family;
    double a, b;
    int n = 1;           // transverse complex dimension (extension point)
    double kappa = 1.0;  // Einstein normalization constant after rescale

    GridPtr grid;
    BasicField background_potential; // Kahler potential of the background, regular branch at s=0
    DensityProfile fiber_density_bg; // density of the background metric

    double weight(double s) const { return a * s + b * (1.0 - s); }
    double measure_const() const { return cm_; }

    /// Regular metric part m0(s) of the background (kappa=1).
    const Profile& m0() const { return m0_; }

    /// Weight profile D at cells / faces.
    const Profile& D_cells() const { return D_; }
    const Profile& D_faces() const { return Df_; }
    const Profile& ss1_cells() const { return ss1_; }   // s(1-s) at cells
    const Profile& ss1_faces() const { return ss1f_; }  // s(1-s) at faces

private:
    friend ModelSpec build_model(Family, double, double, int);
    double cm_ = 0.0;
    Profile m0_, D_, Df_, ss1_, ss1f_;
};

/// Construct a model; rejects non-positive weights and Round with a != b.
/// The returned background satisfies the contact identities to 1e-10 and,
/// for the Round family, Ric^T = kappa g^T_0 exactly.
ModelSpec build_model(Family family, double a, double b, int grid_n);

/// Dimension of the closure of the Reeb orbit through leaf coordinate s:
/// 1 if a/b is rational or s is one of the two exceptional circle orbits,
/// else 2 (irrational torus closure).
int orbit_closure_rank(const ModelSpec& model, double s);

/// Max residual of eta(xi) - 1 and of the contractions of d eta with xi over
/// sampled points; both vanish for the encoded contact structure.
double contact_identity_residual(const ModelSpec& model, int samples = 64);

/// True when a/b is rational with denominator <= 10^6 (continued fractions).
bool weights_rational(double a, double b);

} // namespace srf
