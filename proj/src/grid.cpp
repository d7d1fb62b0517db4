#include "srf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srf {

namespace {

// Lagrange extrapolation weights: value at x from samples at xs[0..k-1].
std::vector<double> lagrange_weights(const std::vector<double>& xs, double x) {
    const size_t k = xs.size();
    std::vector<double> w(k, 1.0);
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            w[i] *= (x - xs[j]) / (xs[i] - xs[j]);
        }
    }
    return w;
}

constexpr int kGhostPts = 6; // quintic extrapolation

} // namespace

Grid::Grid(int n) : n_(n), h_(1.0 / n) {
    if (n < 16) throw std::invalid_argument("grid size must be >= 16");
    s_.resize(static_cast<size_t>(n));
    sf_.resize(static_cast<size_t>(n) + 1);
    for (int i = 0; i < n; ++i) s_[static_cast<size_t>(i)] = (i + 0.5) * h_;
    for (int j = 0; j <= n; ++j) sf_[static_cast<size_t>(j)] = j * h_;

    std::vector<double> xs(kGhostPts);
    for (int i = 0; i < kGhostPts; ++i) xs[static_cast<size_t>(i)] = (i + 0.5) * h_;
    ghost_lo_1_ = lagrange_weights(xs, -0.5 * h_);
    ghost_lo_2_ = lagrange_weights(xs, -1.5 * h_);
    for (int i = 0; i < kGhostPts; ++i) xs[static_cast<size_t>(i)] = 1.0 - (i + 0.5) * h_;
    ghost_hi_1_ = lagrange_weights(xs, 1.0 + 0.5 * h_);
    ghost_hi_2_ = lagrange_weights(xs, 1.0 + 1.5 * h_);

    // quadrature weights: apply integrate() to unit vectors near the ends
    qw_.assign(static_cast<size_t>(n), h_);
    Profile e(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < std::min(n, 10); ++i) {
        e[static_cast<size_t>(i)] = 1.0;
        qw_[static_cast<size_t>(i)] = integrate(e);
        e[static_cast<size_t>(i)] = 0.0;
        const int j = n - 1 - i;
        e[static_cast<size_t>(j)] = 1.0;
        qw_[static_cast<size_t>(j)] = integrate(e);
        e[static_cast<size_t>(j)] = 0.0;
    }
}

std::vector<double> Grid::extended(const Profile& f) const {
    const size_t n = static_cast<size_t>(n_);
    std::vector<double> e(n + 4);
    std::copy(f.begin(), f.end(), e.begin() + 2);
    double g1 = 0, g2 = 0, h1 = 0, h2 = 0;
    for (int i = 0; i < kGhostPts; ++i) {
        g1 += ghost_lo_1_[static_cast<size_t>(i)] * f[static_cast<size_t>(i)];
        g2 += ghost_lo_2_[static_cast<size_t>(i)] * f[static_cast<size_t>(i)];
        h1 += ghost_hi_1_[static_cast<size_t>(i)] * f[n - 1 - static_cast<size_t>(i)];
        h2 += ghost_hi_2_[static_cast<size_t>(i)] * f[n - 1 - static_cast<size_t>(i)];
    }
    e[1] = g1; e[0] = g2;
    e[n + 2] = h1; e[n + 3] = h2;
    return e;
}

Profile Grid::deriv_cell(const Profile& f) const {
    const auto e = extended(f);
    const size_t n = static_cast<size_t>(n_);
    Profile d(n);
    const double c = 1.0 / (12.0 * h_);
    for (size_t i = 0; i < n; ++i) {
        const size_t k = i + 2;
        d[i] = c * (e[k - 2] - 8.0 * e[k - 1] + 8.0 * e[k + 1] - e[k + 2]);
    }
    return d;
}

Profile Grid::deriv_cell_to_face(const Profile& f) const {
    const auto e = extended(f);
    const size_t n = static_cast<size_t>(n_);
    Profile d(n + 1);
    const double c = 1.0 / (24.0 * h_);
    // face j sits between extended cells (j+1, j+2)
    for (size_t j = 0; j <= n; ++j)
        d[j] = c * (e[j] - 27.0 * e[j + 1] + 27.0 * e[j + 2] - e[j + 3]);
    return d;
}

Profile Grid::interp_cell_to_face(const Profile& f) const {
    const auto e = extended(f);
    const size_t n = static_cast<size_t>(n_);
    Profile v(n + 1);
    for (size_t j = 0; j <= n; ++j)
        v[j] = (-e[j] + 9.0 * e[j + 1] + 9.0 * e[j + 2] - e[j + 3]) / 16.0;
    return v;
}

Profile Grid::deriv_face_to_cell(const Profile& F) const {
    const size_t n = static_cast<size_t>(n_);
    if (F.size() != n + 1) throw std::invalid_argument("face data has wrong size");
    // two ghost faces per side, quintic extrapolation from 6 nearest faces
    std::vector<double> e(n + 5);
    std::copy(F.begin(), F.end(), e.begin() + 2);
    {
        std::vector<double> xs(kGhostPts), wl1, wl2;
        for (int i = 0; i < kGhostPts; ++i) xs[static_cast<size_t>(i)] = i * h_;
        wl1 = lagrange_weights(xs, -h_);
        wl2 = lagrange_weights(xs, -2.0 * h_);
        double a = 0, b = 0, c = 0, d = 0;
        for (int i = 0; i < kGhostPts; ++i) {
            a += wl1[static_cast<size_t>(i)] * F[static_cast<size_t>(i)];
            b += wl2[static_cast<size_t>(i)] * F[static_cast<size_t>(i)];
            c += wl1[static_cast<size_t>(i)] * F[n - static_cast<size_t>(i)];
            d += wl2[static_cast<size_t>(i)] * F[n - static_cast<size_t>(i)];
        }
        e[1] = a; e[0] = b;
        e[n + 3] = c; e[n + 4] = d;
    }
    Profile out(n);
    const double c = 1.0 / (24.0 * h_);
    // cell i has faces i (left) and i+1 (right): extended faces i+1, i+2, i+3, i+4 around it
    for (size_t i = 0; i < n; ++i)
        out[i] = c * (e[i + 1] - 27.0 * e[i + 2] + 27.0 * e[i + 3] - e[i + 4]);
    return out;
}

double Grid::one_sided_deriv(const Profile& f, bool left, int order) const {
    // order-th derivative at the endpoint from the 8 nearest cells
    const int k = 8;
    std::vector<double> xs(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i)
        xs[static_cast<size_t>(i)] = left ? (i + 0.5) * h_ : 1.0 - (i + 0.5) * h_;
    // Fit polynomial through the points, differentiate at the boundary.
    // Newton form would be fine; solve a small Vandermonde instead.
    std::vector<double> rhs(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i)
        rhs[static_cast<size_t>(i)] = left ? f[static_cast<size_t>(i)]
                                           : f[static_cast<size_t>(n_ - 1 - i)];
    const double x0 = left ? 0.0 : 1.0;
    std::vector<std::vector<double>> A(static_cast<size_t>(k), std::vector<double>(static_cast<size_t>(k)));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            A[static_cast<size_t>(i)][static_cast<size_t>(j)] = std::pow(xs[static_cast<size_t>(i)] - x0, j);
    // Gaussian elimination
    for (int col = 0; col < k; ++col) {
        int piv = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::abs(A[static_cast<size_t>(piv)][static_cast<size_t>(col)])) piv = r;
        std::swap(A[static_cast<size_t>(col)], A[static_cast<size_t>(piv)]);
        std::swap(rhs[static_cast<size_t>(col)], rhs[static_cast<size_t>(piv)]);
        for (int r = col + 1; r < k; ++r) {
            const double fac = A[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                               A[static_cast<size_t>(col)][static_cast<size_t>(col)];
            for (int c2 = col; c2 < k; ++c2)
                A[static_cast<size_t>(r)][static_cast<size_t>(c2)] -= fac * A[static_cast<size_t>(col)][static_cast<size_t>(c2)];
            rhs[static_cast<size_t>(r)] -= fac * rhs[static_cast<size_t>(col)];
        }
    }
    std::vector<double> coef(static_cast<size_t>(k));
    for (int r = k - 1; r >= 0; --r) {
        double v = rhs[static_cast<size_t>(r)];
        for (int c2 = r + 1; c2 < k; ++c2)
            v -= A[static_cast<size_t>(r)][static_cast<size_t>(c2)] * coef[static_cast<size_t>(c2)];
        coef[static_cast<size_t>(r)] = v / A[static_cast<size_t>(r)][static_cast<size_t>(r)];
    }
    double fact = 1.0;
    for (int i = 2; i <= order; ++i) fact *= i;
    return coef[static_cast<size_t>(order)] * fact;
}

double Grid::integrate(const Profile& f) const {
    double sum = 0.0;
    for (double v : f) sum += v;
    sum *= h_;
    // Euler-Maclaurin corrections for the midpoint rule:
    //   int = h*sum + h^2/24 [f'] - 7 h^4/5760 [f'''] + O(h^6)
    const double d1_lo = one_sided_deriv(f, true, 1);
    const double d1_hi = one_sided_deriv(f, false, 1);
    const double d3_lo = one_sided_deriv(f, true, 3);
    const double d3_hi = one_sided_deriv(f, false, 3);
    sum += h_ * h_ / 24.0 * (d1_hi - d1_lo);
    sum -= 7.0 * std::pow(h_, 4) / 5760.0 * (d3_hi - d3_lo);
    return sum;
}

Profile Grid::cumulative(const Profile& f) const {
    // 4th-order cumulative integral at faces from cell averages:
    // integrate the interpolating polynomial cell by cell (Simpson-like on
    // the face-interpolated values plus the midpoint).
    const size_t n = static_cast<size_t>(n_);
    const Profile fv = interp_cell_to_face(f);
    Profile c(n + 1, 0.0);
    for (size_t i = 0; i < n; ++i)
        c[i + 1] = c[i] + h_ / 6.0 * (fv[i] + 4.0 * f[i] + fv[i + 1]);
    return c;
}

double Grid::interp(const Profile& f, double s) const {
    const auto e = extended(f);
    // 6-point local Lagrange through the extended cells around s
    const double x = s / h_ - 0.5; // cell-index coordinate
    int base = static_cast<int>(std::floor(x)) - 2;
    base = std::max(-2, std::min(n_ - 4, base));
    double out = 0.0;
    for (int j = 0; j < 6; ++j) {
        double w = 1.0;
        for (int k = 0; k < 6; ++k) {
            if (k == j) continue;
            w *= (x - (base + k)) / static_cast<double>(j - k);
        }
        out += w * e[static_cast<size_t>(base + j + 2)];
    }
    return out;
}

bool BasicField::finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

double BasicField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

BasicField operator+(const BasicField& a, const BasicField& b) {
    BasicField r = a;
    for (size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
    return r;
}

BasicField operator-(const BasicField& a, const BasicField& b) {
    BasicField r = a;
    for (size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
    return r;
}

BasicField operator*(double c, const BasicField& a) {
    BasicField r = a;
    for (double& v : r.values) v *= c;
    return r;
}

BasicField operator+(const BasicField& a, double c) {
    BasicField r = a;
    for (double& v : r.values) v += c;
    return r;
}

} // namespace srf
