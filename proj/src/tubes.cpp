#include "srf/tubes.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "srf/errors.hpp"

namespace srf {

namespace {

double interp_linear(const std::vector<double>& x, const std::vector<double>& y, double v) {
    if (v <= x.front()) return y.front();
    if (v >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const size_t i = static_cast<size_t>(it - x.begin()) - 1;
    const double t = (v - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
}

} // namespace

TubeGeometry::TubeGeometry(const Calculus& calc, const TransverseMetric& gT, int refine) {
    const Grid& g = *calc.grid();
    const ModelSpec& mod = calc.model();
    const int M = refine * g.n(); // intervals in t, even for Simpson
    const int K = M + 1;
    t_.resize(static_cast<size_t>(K));
    s_.resize(static_cast<size_t>(K));
    sig_.resize(static_cast<size_t>(K));
    mass_.resize(static_cast<size_t>(K));
    ell_.resize(static_cast<size_t>(K));
    dt_ = M_PI / M;

    // integrands in the angle t (s = sin^2(t/2)):
    //   sigma' = sqrt(m/2) D,   mass' = c_m m D sqrt(s(1-s)),
    //   coarea density rho/sqrt(q_ss) = c_m sqrt(2 m s(1-s))
    std::vector<double> f_sig(static_cast<size_t>(K)), f_mass(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) {
        const double t = k * dt_;
        const double sn = std::sin(0.5 * t);
        const double s = sn * sn;
        const double m = std::max(1e-300, g.interp(gT.regular(), s));
        const double D = mod.a * s + mod.b * (1.0 - s);
        t_[static_cast<size_t>(k)] = t;
        s_[static_cast<size_t>(k)] = s;
        f_sig[static_cast<size_t>(k)] = std::sqrt(0.5 * m) * D;
        f_mass[static_cast<size_t>(k)] =
            mod.measure_const() * m * D * std::sqrt(std::max(0.0, s * (1.0 - s)));
        ell_[static_cast<size_t>(k)] =
            mod.measure_const() * std::sqrt(2.0 * m * std::max(0.0, s * (1.0 - s)));
    }
    auto cumulate = [&](const std::vector<double>& f, std::vector<double>& out) {
        out[0] = 0.0;
        for (int k = 1; k < K; ++k) {
            if (k % 2 == 0) {
                out[static_cast<size_t>(k)] =
                    out[static_cast<size_t>(k - 2)] +
                    dt_ / 3.0 *
                        (f[static_cast<size_t>(k - 2)] + 4.0 * f[static_cast<size_t>(k - 1)] +
                         f[static_cast<size_t>(k)]);
            } else {
                out[static_cast<size_t>(k)] =
                    out[static_cast<size_t>(k - 1)] +
                    dt_ / 12.0 *
                        (5.0 * f[static_cast<size_t>(k - 1)] + 8.0 * f[static_cast<size_t>(k)] -
                         (k + 1 < K ? f[static_cast<size_t>(k + 1)] : f[static_cast<size_t>(k)]));
            }
        }
    };
    cumulate(f_sig, sig_);
    cumulate(f_mass, mass_);
    sigma_total_ = sig_.back();
    mass_total_ = mass_.back();
}

double TubeGeometry::lookup_t(const std::vector<double>& tab, double t) const {
    // cubic interpolation on the uniform t-grid (the tables are smooth in t)
    const double x = std::clamp(t / dt_, 0.0, static_cast<double>(tab.size() - 1));
    const size_t n = tab.size();
    size_t i = std::min(n - 2, static_cast<size_t>(std::floor(x)));
    const double u = x - static_cast<double>(i);
    const size_t i0 = (i == 0) ? 0 : i - 1;
    const size_t i3 = std::min(n - 1, i + 2);
    const double p0 = tab[i0], p1 = tab[i], p2 = tab[i + 1], p3 = tab[i3];
    const double m1 = (i == 0) ? (-0.5 * p3 + 2.0 * p2 - 1.5 * p1) : 0.5 * (p2 - p0);
    const double m2 = (i + 2 > n - 1) ? (1.5 * p2 - 2.0 * p1 + 0.5 * p0) : 0.5 * (p3 - p1);
    const double d = p2 - p1;
    return p1 + u * (m1 + u * (3.0 * d - 2.0 * m1 - m2 + u * (m1 + m2 - 2.0 * d)));
}

double TubeGeometry::eval(const std::vector<double>& tab, double s) const {
    // the leaf coordinate maps to the angle exactly; evaluate on the t-grid
    const double t = 2.0 * std::asin(std::sqrt(std::clamp(s, 0.0, 1.0)));
    return lookup_t(tab, t);
}

double TubeGeometry::sigma(double s) const { return eval(sig_, s); }

double TubeGeometry::t_of_sigma(double sig) const {
    sig = std::clamp(sig, 0.0, sigma_total_);
    // sig_ is strictly increasing on the uniform t grid
    size_t lo = 0, hi = sig_.size() - 1;
    while (hi - lo > 1) {
        const size_t mid = (lo + hi) / 2;
        if (sig_[mid] <= sig) lo = mid; else hi = mid;
    }
    const double den = sig_[hi] - sig_[lo];
    const double u = (den > 0.0) ? (sig - sig_[lo]) / den : 0.0;
    return (static_cast<double>(lo) + u) * dt_;
}

double TubeGeometry::s_of_sigma(double sig) const {
    const double t = t_of_sigma(sig);
    const double sn = std::sin(0.5 * t);
    return sn * sn;
}

double TubeGeometry::mass_below(double s) const { return eval(mass_, s); }

double TubeGeometry::mass_of_sigma(double sig) const {
    return lookup_t(mass_, t_of_sigma(sig));
}

double TubeGeometry::band_volume(double center_s, double r) const {
    const double c = sigma(center_s);
    const double lo = std::max(0.0, c - r);
    const double hi = std::min(sigma_total_, c + r);
    return mass_of_sigma(hi) - mass_of_sigma(lo);
}

double TubeGeometry::band_coarea(double center_s, double r) const {
    const double c = sigma(center_s);
    double S = 0.0;
    if (c + r < sigma_total_) S += lookup_t(ell_, t_of_sigma(c + r));
    if (c - r > 0.0) S += lookup_t(ell_, t_of_sigma(c - r));
    return S;
}

double TubeGeometry::integrate_band(double center_s, double r_lo, double r_hi,
                                    const Profile& field, const Grid& grid) const {
    // integral of a basic field over the annulus r_lo <= |sigma - c| <= r_hi,
    // evaluated on the fine t-grid against the mass density; boundary
    // intervals are weighted by their covered fraction (sigma is monotone)
    const double c = sigma(center_s);
    double acc = 0.0;
    for (size_t k = 0; k + 1 < t_.size(); ++k) {
        const double s_lo = sig_[k], s_hi = sig_[k + 1];
        if (!(s_hi > s_lo)) continue;
        // coverage of the annulus on this sigma interval
        double cover = 0.0;
        for (int side = -1; side <= 1; side += 2) {
            const double a = c + side * r_lo;
            const double b = c + side * r_hi;
            const double lo = std::min(a, b), hi = std::max(a, b);
            cover += std::max(0.0, std::min(hi, s_hi) - std::max(lo, s_lo));
        }
        if (cover <= 0.0) continue;
        const double frac = std::min(1.0, cover / (s_hi - s_lo));
        const double tmid = (static_cast<double>(k) + 0.5) * dt_;
        const double smid = std::sin(0.5 * tmid) * std::sin(0.5 * tmid);
        const double dmass = mass_[k + 1] - mass_[k];
        acc += grid.interp(field, smid) * dmass * frac;
    }
    return acc;
}

double transverse_distance(const Calculus& calc, const TransverseMetric& gT,
                           double s1, double s2) {
    if (s1 < 0.0 || s1 > 1.0 || s2 < 0.0 || s2 > 1.0)
        throw std::invalid_argument("leaf coordinates must lie in [0,1]");
    if (s1 == s2) return 0.0;
    TubeGeometry geo(calc, gT);
    return std::abs(geo.sigma(s2) - geo.sigma(s1));
}

double transverse_diameter(const Calculus& calc, const TransverseMetric& gT) {
    TubeGeometry geo(calc, gT);
    return geo.diameter();
}

namespace {

bool metric_is_background_einstein(const Calculus& calc, const TransverseMetric& gT) {
    if (calc.model().family != Family::Round) return false;
    const Profile& m = gT.regular();
    const Profile& m0 = calc.model().m0();
    double rel = 0.0;
    for (size_t i = 0; i < m.size(); ++i)
        rel = std::max(rel, std::abs(m[i] - m0[i]) / m0[i]);
    return rel < 1e-10;
}

int center_rank(const Calculus& calc, double center_s) {
    return orbit_closure_rank(calc.model(), center_s);
}

} // namespace

double tube_volume(const Calculus& calc, const TransverseMetric& gT,
                   double center_s, double r) {
    if (r < 0.0) throw std::invalid_argument("tube radius must be >= 0");
    if (r == 0.0) return 0.0;
    TubeGeometry geo(calc, gT);
    const int q = center_rank(calc, center_s);
    if (q == 1 && center_s > 1e-12 && center_s < 1.0 - 1e-12) {
        // rank-1 interior orbits: the tube is a quotient disk, representable
        // in the band picture only where the quotient is homogeneous
        if (!metric_is_background_einstein(calc, gT))
            throw Unsupported("interior rank-1 tubes need the homogeneous Round background");
        return geo.band_volume(0.0, r); // any center is congruent to the pole
    }
    return geo.band_volume(center_s, r);
}

TubeReport gray_fit(const Calculus& calc, const TransverseMetric& gT,
                    double center_s, const std::vector<double>& radii) {
    if (radii.size() < 3) throw std::invalid_argument("need at least 3 radii");
    TubeReport rep;
    rep.center_s = center_s;
    rep.radii = radii;
    rep.q = center_rank(calc, center_s);
    const int codim_pow = 3 - rep.q; // V ~ r^{N-q}, N = 3

    TubeGeometry geo(calc, gT);
    const ModelSpec& mod = calc.model();

    for (double r : radii)
        rep.volumes.push_back(tube_volume(calc, gT, center_s, r));

    // least squares V(r)/r^p = c0 + c1 r^2
    double S0 = 0, S1 = 0, S2 = 0, b0 = 0, b1 = 0;
    for (size_t k = 0; k < radii.size(); ++k) {
        const double r = radii[k];
        const double y = rep.volumes[k] / std::pow(r, codim_pow);
        const double x = r * r;
        S0 += 1.0; S1 += x; S2 += x * x;
        b0 += y; b1 += x * y;
    }
    const double det = S0 * S2 - S1 * S1;
    const double c0 = (S2 * b0 - S1 * b1) / det;
    const double c1 = (S0 * b1 - S1 * b0) / det;
    rep.fitted_coefficient = c0;
    const double rmax = *std::max_element(radii.begin(), radii.end());
    if (std::abs(c1) * rmax * rmax > 0.5 * std::abs(c0))
        throw FitUnstable("quadratic correction dominates the tube fit");

    if (rep.q == 2) {
        // Vol(P) = rho / sqrt(q_ss) at the center
        const double s = center_s;
        const double m = calc.grid()->interp(gT.regular(), s);
        const double D = mod.a * s + mod.b * (1.0 - s);
        rep.orbit_volume = mod.measure_const() * std::sqrt(2.0 * m * s * (1.0 - s));
        (void)D;
        rep.expected_coefficient = 2.0 * rep.orbit_volume;
    } else {
        // circle orbits: Vol(P) = c_m / (2 pi b) at s=0, c_m/(2 pi a) at s=1;
        // on the homogeneous Round background every orbit is congruent
        const double w = (center_s < 0.5) ? mod.b : mod.a;
        rep.orbit_volume = mod.measure_const() / (2.0 * M_PI * w);
        rep.expected_coefficient = M_PI * rep.orbit_volume;
    }
    return rep;
}

NoncollapseResult noncollapse_ratio(const Calculus& calc, const TransverseMetric& gT,
                                    double center_s, double r) {
    NoncollapseResult res;
    const double V = tube_volume(calc, gT, center_s, r);
    res.ratio = V / (r * r);
    // curvature hypothesis |R^T| <= 1/r^2 on the tube (Riemannian scalar)
    TubeGeometry geo(calc, gT);
    const CurvatureData curv = calc.curvature(gT);
    const double c = geo.sigma(center_s);
    double maxR = 0.0;
    const Grid& g = *calc.grid();
    for (int i = 0; i < g.n(); ++i) {
        const double s = g.cell(i);
        if (std::abs(geo.sigma(s) - c) <= r)
            maxR = std::max(maxR, std::abs(curv.scalar[static_cast<size_t>(i)]));
    }
    res.max_scalar = maxR;
    res.vacuous = maxR > 1.0 / (r * r);
    return res;
}

RadiusSelection radius_selection(const Calculus& calc, const TransverseMetric& gT,
                                 double center_s, double r) {
    RadiusSelection sel;
    const double V_r = tube_volume(calc, gT, center_s, r);
    double rk = r;
    for (int k = 0; k < 40; ++k) {
        const double Vk = tube_volume(calc, gT, center_s, rk);
        const double Vk2 = tube_volume(calc, gT, center_s, 0.5 * rk);
        if (Vk2 <= 0.0) break;
        const double ratio = Vk / Vk2;
        if (ratio <= 9.0) {
            sel.r_prime = rk;
            sel.k = k;
            sel.chain_ratio = (Vk / (rk * rk)) / (V_r / (r * r));
            sel.shell_difference = Vk - Vk2;
            sel.shell_bound = 9.0 * (rk / r) * (rk / r) * V_r;
            const NoncollapseResult nc = noncollapse_ratio(calc, gT, center_s, rk);
            sel.curvature_bound = nc.max_scalar * rk * rk;
            const NoncollapseResult nc0 = noncollapse_ratio(calc, gT, center_s, r);
            // hypothesis constant C = r^2 max|R| at the entry radius
            sel.ok_curvature = sel.curvature_bound <= std::max(1.0, nc0.max_scalar * r * r) + 1e-12;
            sel.ok_chain = sel.chain_ratio <= 9.0 + 1e-12;
            sel.ok_shell = sel.shell_difference <= sel.shell_bound + 1e-12;
            return sel;
        }
        rk *= 0.5;
    }
    throw NotFound("no dyadic radius satisfies the volume-ratio criterion");
}

AnnulusReport annulus_diagnostics(const Calculus& calc, const TransverseMetric& gT,
                                  const BasicField& u, int k1, int k2) {
    if (k2 <= k1) throw std::invalid_argument("need k1 < k2");
    AnnulusReport rep;
    TubeGeometry geo(calc, gT);
    const double r_out = std::pow(2.0, k2);
    const double r_in = std::pow(2.0, k1);
    if (r_out > geo.diameter())
        throw DegenerateAnnulus("outer radius exceeds the transverse diameter");

    // base point: minimum of the Ricci potential
    const Grid& g = *calc.grid();
    int imin = 0;
    for (int i = 1; i < g.n(); ++i)
        if (u[static_cast<size_t>(i)] < u[static_cast<size_t>(imin)]) imin = i;
    rep.base_s = g.cell(imin);

    auto V = [&](double r) { return geo.band_volume(rep.base_s, r); };
    rep.volume = V(r_out) - V(r_in);

    // slice radii by scanning for the averaged coarea bound
    auto find_slice = [&](double lo, double hi, double bound) {
        const int steps = 512;
        for (int i = 0; i <= steps; ++i) {
            const double rr = lo + (hi - lo) * i / steps;
            if (geo.band_coarea(rep.base_s, rr) <= bound) return rr;
        }
        return hi;
    };
    rep.bound_r1 = 2.0 * rep.volume / r_in;
    rep.bound_r2 = 2.0 * rep.volume / r_out;
    rep.r1 = find_slice(r_in, 2.0 * r_in, rep.bound_r1);
    rep.r2 = find_slice(0.5 * r_out, r_out, rep.bound_r2);
    rep.S_r1 = geo.band_coarea(rep.base_s, rep.r1);
    rep.S_r2 = geo.band_coarea(rep.base_s, rep.r2);
    rep.volume_slice = V(rep.r2) - V(rep.r1);

    // curvature integral over T(r1, r2) with the Riemannian scalar, on the
    // refined band grid (a sharp indicator on the cell grid would cost O(h))
    const CurvatureData curv = calc.curvature(gT);
    rep.curvature_integral =
        geo.integrate_band(rep.base_s, rep.r1, rep.r2, curv.scalar.values, g);

    // coarea identity at r_out: integrate S over [0, r] against dr
    {
        const int steps = 65536; // the integrand has a kink where the band
                                 // reaches a pole, keep the rule fine
        double acc = 0.0;
        for (int i = 0; i < steps; ++i) {
            const double rr = r_out * (i + 0.5) / steps;
            acc += geo.band_coarea(rep.base_s, rr) * (r_out / steps);
        }
        rep.coarea_identity_error = std::abs(acc - V(r_out));
    }
    return rep;
}

double cutoff_bump(double x) {
    if (x <= 0.5) return 1.0;
    if (x >= 1.0) return 0.0;
    auto e = [](double t) { return (t > 0.0) ? std::exp(-1.0 / t) : 0.0; };
    const double a = e(1.0 - x);
    const double b = e(x - 0.5);
    return a / (a + b);
}

double cutoff_entropy(const Calculus& calc, const TransverseMetric& gT,
                      double center_s, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("cutoff radius must be positive");
    TubeGeometry geo(calc, gT);
    const Grid& g = *calc.grid();
    const double c = geo.sigma(center_s);
    Profile w(static_cast<size_t>(g.n()));
    for (int i = 0; i < g.n(); ++i)
        w[static_cast<size_t>(i)] = cutoff_bump(std::abs(geo.sigma(g.cell(i)) - c) / r);
    Profile w2(w.size());
    for (size_t i = 0; i < w.size(); ++i) w2[i] = w[i] * w[i];
    const double mass = calc.integrate(gT, w2);
    if (!(mass > 0.0)) throw NumericalError("cutoff support has no volume");
    const double eC = std::sqrt(4.0 * M_PI / mass);
    for (double& v : w) v *= eC;
    return entropy_W_of_w(calc, gT, w);
}

namespace {

struct S3Point {
    std::array<double, 4> x; // (Re z1, Im z1, Re z2, Im z2)
    double s() const { return x[0] * x[0] + x[1] * x[1]; }
};

S3Point sample_s3(Rng& rng) {
    S3Point p;
    double n2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        p.x[static_cast<size_t>(i)] = rng.normal();
        n2 += p.x[static_cast<size_t>(i)] * p.x[static_cast<size_t>(i)];
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& v : p.x) v *= inv;
    return p;
}

double ambient_dist(const S3Point& a, const S3Point& b) {
    double dot = 0.0;
    for (int i = 0; i < 4; ++i) dot += a.x[static_cast<size_t>(i)] * b.x[static_cast<size_t>(i)];
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

// Hopf projection to the unit 2-sphere
std::array<double, 3> hopf(const S3Point& p) {
    const double re1 = p.x[0], im1 = p.x[1], re2 = p.x[2], im2 = p.x[3];
    return {2.0 * (re1 * re2 + im1 * im2), 2.0 * (im1 * re2 - re1 * im2),
            re1 * re1 + im1 * im1 - re2 * re2 - im2 * im2};
}

// quotient distance on the radius-1/2 sphere = d^T on the unit round S^3
double quotient_dist(const S3Point& a, const S3Point& b) {
    const auto na = hopf(a), nb = hopf(b);
    double dot = na[0] * nb[0] + na[1] * nb[1] + na[2] * nb[2];
    return 0.5 * std::acos(std::clamp(dot, -1.0, 1.0));
}

// geodesic distance from x to the Reeb orbit (Hopf circle) of p
double orbit_dist(const S3Point& x, const S3Point& p) {
    const double re = x.x[0] * p.x[0] + x.x[1] * p.x[1] + x.x[2] * p.x[2] + x.x[3] * p.x[3];
    const double im = x.x[0] * p.x[1] - x.x[1] * p.x[0] + x.x[2] * p.x[3] - x.x[3] * p.x[2];
    const double mod = std::sqrt(re * re + im * im);
    return std::acos(std::clamp(mod, 0.0, 1.0));
}

} // namespace

LipschitzReport lipschitz_check(const Calculus& calc, int n_pairs, uint64_t seed) {
    if (calc.model().family != Family::Round)
        throw Unsupported("ambient closed forms exist for the Round family only");
    LipschitzReport rep;
    rep.pairs = n_pairs;
    Rng rng(seed, 7001);
    // reference point z at s0
    const double s0 = 0.37;
    S3Point z;
    z.x = {std::sqrt(s0), 0.0, std::sqrt(1.0 - s0), 0.0};
    for (int k = 0; k < n_pairs; ++k) {
        const S3Point x = sample_s3(rng);
        const S3Point y = sample_s3(rng);
        const double hx = quotient_dist(z, x);
        const double hy = quotient_dist(z, y);
        rep.max_violation = std::max(rep.max_violation,
                                     std::abs(hx - hy) - ambient_dist(x, y));
    }
    // discrete |grad h| on the unit-round quotient profile, away from the
    // kink at s0 and from the poles (h is only a.e. differentiable)
    const Grid& g = *calc.grid();
    Profile h(static_cast<size_t>(g.n()));
    for (int i = 0; i < g.n(); ++i)
        h[static_cast<size_t>(i)] = std::abs(std::asin(std::sqrt(g.cell(i))) -
                                             std::asin(std::sqrt(s0)));
    const Profile hp = g.deriv_cell(h);
    const double margin = 8.0 * g.h();
    for (int i = 0; i < g.n(); ++i) {
        const double s = g.cell(i);
        if (s < margin || s > 1.0 - margin || std::abs(s - s0) < margin) continue;
        // |grad h|^2 = (h')^2 / q_ss with the unit-round q_ss = 1/(4 s(1-s))
        const double gr = std::abs(hp[static_cast<size_t>(i)]) * 2.0 *
                          std::sqrt(s * (1.0 - s));
        rep.max_grad = std::max(rep.max_grad, gr);
    }
    return rep;
}

TubeEquivalenceReport tube_equivalence_mc(const Calculus& calc, double center_s, double r,
                                          int samples, uint64_t seed) {
    if (calc.model().family != Family::Round)
        throw Unsupported("geodesic tubes are computed on the Round family only");
    TubeEquivalenceReport rep;
    Rng rng(seed, 9002);
    S3Point p;
    p.x = {std::sqrt(center_s), 0.0, std::sqrt(1.0 - center_s), 0.0};
    long in_dT = 0, in_geo = 0, sym = 0;
    for (int k = 0; k < samples; ++k) {
        const S3Point x = sample_s3(rng);
        const bool a = quotient_dist(p, x) <= r;
        const bool b = orbit_dist(x, p) <= r;
        in_dT += a;
        in_geo += b;
        sym += (a != b);
    }
    rep.dT_fraction = static_cast<double>(in_dT) / samples;
    rep.geo_fraction = static_cast<double>(in_geo) / samples;
    rep.sym_diff_fraction = (in_dT > 0)
                                ? static_cast<double>(sym) / static_cast<double>(in_dT)
                                : 0.0;
    // quadrature tube volume fraction on the unit-round (contact) profile:
    // quotient radius-1/2 sphere, uniform density in s, disk fraction
    // V/Vtot = sin^2(r) ... computed through the band geometry for
    // cross-validation instead of the closed form:
    {
        // contact-normalized round metric: m_c = 1/(2 D^3) = 1/2
        Profile mc(static_cast<size_t>(calc.grid()->n()), 0.5);
        TransverseMetric gc(calc.grid(), std::move(mc));
        TubeGeometry geo(calc, gc);
        rep.quad_fraction = geo.band_volume(0.0, r) / geo.total_mass();
    }
    return rep;
}

} // namespace srf
