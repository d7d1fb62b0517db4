#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace srf {

using Profile = std::vector<double>;

/// Uniform cell-centered grid on the leaf coordinate s in [0,1].
///
/// Cells sit at s_i = (i+1/2)h, faces at s_j = j h.  All spatial operators
/// are 4th order: derivatives use staggered cell<->face stencils, ghost
/// values come from one-sided polynomial extrapolation (smooth profiles in
/// s are generically *not* even across the poles, so reflection would cost
/// accuracy).  Boundary-face fluxes of the Legendre-type operators vanish
/// identically through the s(1-s) factor.
class Grid {
public:
    explicit Grid(int n);

    int n() const { return n_; }
    double h() const { return h_; }
    const Profile& cells() const { return s_; }
    const Profile& faces() const { return sf_; }
    double cell(int i) const { return s_[static_cast<size_t>(i)]; }

    /// First derivative at cells (4th order centered, extrapolation ghosts).
    Profile deriv_cell(const Profile& f) const;

    /// First derivative at faces (n+1 values) from cell data, 4th order.
    Profile deriv_cell_to_face(const Profile& f) const;

    /// First derivative at cells from face data (n+1 values), 4th order.
    Profile deriv_face_to_cell(const Profile& F) const;

    /// Interpolate cell data to faces, 4th order.
    Profile interp_cell_to_face(const Profile& f) const;

    /// Integral over [0,1] of cell data: midpoint rule with Euler-Maclaurin
    /// endpoint corrections (h^2 and h^4 terms), ~6th order for smooth data.
    double integrate(const Profile& f) const;

    /// Cumulative integral at faces: C[j] = int_0^{s_j} f ds, same accuracy
    /// class as integrate() in the interior.
    Profile cumulative(const Profile& f) const;

    /// Cell weights W with integrate(f) == sum W_i f_i exactly (midpoint plus
    /// the Euler-Maclaurin endpoint corrections as linear functionals).
    const Profile& quadrature_weights() const { return qw_; }

    /// Value of a smooth profile at an arbitrary point by cubic interpolation
    /// (with quintic extrapolation ghosts near the endpoints).
    double interp(const Profile& f, double s) const;

private:
    int n_;
    double h_;
    Profile s_, sf_;
    // extrapolation weights for the two ghost cells at each end
    std::vector<double> ghost_lo_1_, ghost_lo_2_, ghost_hi_1_, ghost_hi_2_;
    Profile qw_;

    std::vector<double> extended(const Profile& f) const; // n+4 values, 2 ghosts each side
    double one_sided_deriv(const Profile& f, bool left, int order) const;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Basic (Reeb-invariant) scalar function stored as a profile over s.
struct BasicField {
    GridPtr grid;
    Profile values;

    BasicField() = default;
    BasicField(GridPtr g, Profile v) : grid(std::move(g)), values(std::move(v)) {}
    BasicField(GridPtr g, double fill)
        : grid(std::move(g)), values(static_cast<size_t>(grid->n()), fill) {}

    int n() const { return grid->n(); }
    double& operator[](size_t i) { return values[i]; }
    double operator[](size_t i) const { return values[i]; }

    bool finite() const;
    double max_abs() const;
};

BasicField operator+(const BasicField& a, const BasicField& b);
BasicField operator-(const BasicField& a, const BasicField& b);
BasicField operator*(double c, const BasicField& a);
BasicField operator+(const BasicField& a, double c);

} // namespace srf
