#pragma once
// radial.hpp — rotationally symmetric profiles of the prescribed mean
// curvature equation, from the first integral of the radial reduction:
//   sinh(rho) u'(rho) / W = 2 H0 (cosh(rho) - 1) + c,
//   W = sqrt(1 + u'^2 + 4 tau^2 tanh^2(rho/2)).
// u' comes out in closed form; u is recovered by adaptive quadrature.

#include <cmath>
#include <stdexcept>

#include "geometry.hpp"

namespace cmclab {

struct RadialProfile {
    ModelParams params;
    double c = 0.0;  // integration constant; 0 for profiles regular at rho = 0
    double rho_min = 0.0, rho_max = 0.0;
    double rho_anchor = 0.0, u_anchor = 0.0;
    double quad_tol = 1e-12;

    double flux_ratio(double rho) const {  // u'/W
        return (2.0 * params.h0 * (std::cosh(rho) - 1.0) + c) / std::sinh(rho);
    }

    double du(double rho) const {
        const double phi = flux_ratio(rho);
        if (!(std::abs(phi) < 1.0))
            throw std::domain_error("RadialProfile: |u'/W| >= 1, no graph solution here");
        const double a = 2.0 * params.tau * std::tanh(0.5 * rho);
        return phi * std::sqrt((1.0 + a * a) / (1.0 - phi * phi));
    }

    double u(double rho) const { return u_anchor + integrate(rho_anchor, rho); }

  private:
    double simpson(double a, double b, double fa, double fm, double fb) const {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    double adapt(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) const {
        const double m = 0.5 * (a + b);
        const double flm = du(0.5 * (a + m));
        const double frm = du(0.5 * (m + b));
        const double left = simpson(a, m, fa, flm, fm);
        const double right = simpson(m, b, fm, frm, fb);
        const double err = left + right - whole;
        if (std::abs(err) <= 15.0 * tol || depth >= 40)
            return left + right + err / 15.0;
        return adapt(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               adapt(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    double integrate(double a, double b) const {
        if (a == b)
            return 0.0;
        const double fa = du(a), fb = du(b), fm = du(0.5 * (a + b));
        return adapt(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), quad_tol, 0);
    }
};

// Builds the profile and validates |u'/W| < 1 across the range.
inline RadialProfile radial_ode_oracle(const ModelParams& params, double rho_min, double rho_max,
                                       bool regular_at_zero, double c, double rho_anchor,
                                       double u_anchor) {
    if (!(0.0 < rho_min && rho_min < rho_max))
        throw std::domain_error("radial_ode_oracle: need 0 < rho_min < rho_max");
    RadialProfile p;
    p.params = params;
    p.c = regular_at_zero ? 0.0 : c;
    p.rho_min = rho_min;
    p.rho_max = rho_max;
    p.rho_anchor = rho_anchor;
    p.u_anchor = u_anchor;
    const int probes = 257;
    for (int k = 0; k < probes; ++k) {
        const double rho = rho_min + (rho_max - rho_min) * k / (probes - 1);
        (void)p.du(rho);  // throws if the first integral leaves the graph regime
    }
    return p;
}

} // namespace cmclab
