#include "srf/model.hpp"

#include <cmath>
#include <stdexcept>

#include "srf/errors.hpp"

namespace srf {

bool weights_rational(double a, double b) {
    // continued-fraction expansion of a/b with bounded denominator
    double x = a / b;
    long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(x)), q1 = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) < 1e-12 * std::abs(x))
            return true;
        if (frac < 1e-15) return true;
        x = 1.0 / frac;
        const double fl = std::floor(x);
        frac = x - fl;
        const long an = static_cast<long>(fl);
        const long p2 = an * p1 + p0, q2 = an * q1 + q0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (q1 > 1000000) return false;
    }
    return false;
}

ModelSpec build_model(Family family, double a, double b, int grid_n) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("Reeb weights must be positive");
    if (family == Family::Round && a != b)
        throw std::invalid_argument("Round family requires equal weights");

    ModelSpec m;
    m.family = family;
    m.a = a;
    m.b = b;
    m.grid = std::make_shared<Grid>(grid_n);
    const Grid& g = *m.grid;
    const size_t n = static_cast<size_t>(g.n());

    m.D_.resize(n); m.ss1_.resize(n); m.m0_.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double s = g.cell(static_cast<int>(i));
        m.D_[i] = a * s + b * (1.0 - s);
        m.ss1_[i] = s * (1.0 - s);
        m.m0_[i] = (a + b) / std::pow(m.D_[i], 3);
    }
    m.Df_.resize(n + 1); m.ss1f_.resize(n + 1);
    for (size_t j = 0; j <= n; ++j) {
        const double s = g.faces()[j];
        m.Df_[j] = a * s + b * (1.0 - s);
        m.ss1f_[j] = s * (1.0 - s);
    }
    m.cm_ = 4.0 * M_PI * a * b / (a + b);

    // Background Kahler potential, regular branch at s = 0:
    //   K(s) = -((a+b)/b) log(1-s),  with  ddbar K = ghat0 = (a+b) s(1-s)/D^3.
    Profile K(n);
    for (size_t i = 0; i < n; ++i) {
        const double s = g.cell(static_cast<int>(i));
        K[i] = -(a + b) / b * std::log(1.0 - s);
    }
    m.background_potential = BasicField(m.grid, std::move(K));

    // density of the background: rho = c_m m0 D
    Profile dens(n);
    for (size_t i = 0; i < n; ++i) dens[i] = m.cm_ * m.m0_[i] * m.D_[i];
    m.fiber_density_bg = DensityProfile{m.grid, std::move(dens)};

    return m;
}

int orbit_closure_rank(const ModelSpec& model, double s) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("s outside [0,1]");
    if (s < 1e-12 || s > 1.0 - 1e-12) return 1; // exceptional circle orbits
    if (model.family == Family::Round) return 1;
    return weights_rational(model.a, model.b) ? 1 : 2;
}

double contact_identity_residual(const ModelSpec& model, int samples) {
    // In torus coordinates (s, th1, th2):
    //   eta = (s dth1 + (1-s) dth2)/D,  xi = a d/dth1 + b d/dth2,
    //   d eta = ds ^ (b dth1 - a dth2)/D^2.
    // eta(xi) - 1 and the contractions of iota_xi d eta are evaluated pointwise.
    double worst = 0.0;
    const double A = model.a, B = model.b;
    for (int k = 0; k < samples; ++k) {
        const double s = (k + 0.5) / samples;
        const double D = A * s + B * (1.0 - s);
        const double eta_xi = (s * A + (1.0 - s) * B) / D;
        worst = std::max(worst, std::abs(eta_xi - 1.0));
        // iota_xi d eta: the ds-component is (b a - a b)/D^2, the dth
        // components vanish since d eta has a ds factor in every term.
        const double comp_ds = (B * A - A * B) / (D * D);
        worst = std::max(worst, std::abs(comp_ds));
    }
    return worst;
}

} // namespace srf
