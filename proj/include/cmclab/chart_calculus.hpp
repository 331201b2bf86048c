#pragma once
// chart_calculus.hpp — differential operators for a metric given nodewise in
// the (rho, theta) coordinate basis of the annulus chart: Laplace-Beltrami,
// gradient pairings, and Gauss curvature by the Brioschi formula.

#include <cmath>
#include <vector>

#include "grid.hpp"

namespace cmclab {

// g^{ab} d_a u d_b v per node (one-sided differences at the radial rows).
inline std::vector<double> metric_grad_pair(const AnnularGrid& g, const std::vector<Mat2>& gc,
                                            const std::vector<double>& u,
                                            const std::vector<double>& v) {
    std::vector<double> out(g.size());
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const Mat2 ginv = inverse(gc[idx]);
            const Vec2 du{d_rho(u, g, i, j), d_theta(u, g, i, j)};
            const Vec2 dv{d_rho(v, g, i, j), d_theta(v, g, i, j)};
            out[idx] = dot(du, ginv * dv);
        }
    return out;
}

// Laplace-Beltrami of u for the metric gc, conservative staggered fluxes with
// node-averaged coefficients; interior rows only (boundary rows left zero).
inline std::vector<double> laplace_beltrami(const AnnularGrid& g, const std::vector<Mat2>& gc,
                                            const std::vector<double>& u) {
    const double dr = g.drho(), dt = g.dtheta();
    const int n = g.size();
    // sqrt(det g) * g^{-1} per node
    std::vector<Mat2> c(n);
    std::vector<double> sq(n);
    for (int idx = 0; idx < n; ++idx) {
        sq[idx] = std::sqrt(gc[idx].det());
        c[idx] = sq[idx] * inverse(gc[idx]);
    }
    std::vector<double> out(g.size(), 0.0);
    auto flux_r = [&](int i, int j) {  // radial face (i+1/2, j)
        const int a = g.index(i, j), b = g.index(i + 1, j);
        const Mat2 cf = 0.5 * (c[a] + c[b]);
        const double un = (u[b] - u[a]) / dr;
        const double ut = (u[g.index(i, j + 1)] - u[g.index(i, j - 1)] + u[g.index(i + 1, j + 1)] -
                           u[g.index(i + 1, j - 1)]) /
                          (4.0 * dt);
        return cf.a11 * un + cf.a12 * ut;
    };
    auto flux_t = [&](int i, int j) {  // angular face (i, j+1/2)
        const int a = g.index(i, j), b = g.index(i, j + 1);
        const Mat2 cf = 0.5 * (c[a] + c[b]);
        const double ut = (u[b] - u[a]) / dt;
        double un;
        if (i == 0)
            un = (-3.0 * (u[a] + u[b]) + 4.0 * (u[g.index(1, j)] + u[g.index(1, j + 1)]) -
                  (u[g.index(2, j)] + u[g.index(2, j + 1)])) /
                 (4.0 * dr);
        else if (i == g.n_rho - 1)
            un = (3.0 * (u[a] + u[b]) - 4.0 * (u[g.index(i - 1, j)] + u[g.index(i - 1, j + 1)]) +
                  (u[g.index(i - 2, j)] + u[g.index(i - 2, j + 1)])) /
                 (4.0 * dr);
        else
            un = (u[g.index(i + 1, j)] - u[g.index(i - 1, j)] + u[g.index(i + 1, j + 1)] -
                  u[g.index(i - 1, j + 1)]) /
                 (4.0 * dr);
        return cf.a21 * un + cf.a22 * ut;
    };
    for (int i = 1; i + 1 < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const double div = (flux_r(i, j) - flux_r(i - 1, j)) / dr +
                               (flux_t(i, j) - flux_t(i, j - 1)) / dt;
            out[idx] = div / sq[idx];
        }
    return out;
}

// Gauss curvature by the Brioschi formula on a logical n1 x n2 grid with
// spacings d1, d2 and periodic second axis; evaluated at nodes at least two
// rows away from the first-axis edges (zero elsewhere). Metric components
// (E, F, G) = (a11, a12, a22) per node, index = i1 * n2 + i2.
inline std::vector<double> gauss_curvature_brioschi(const std::vector<Mat2>& gc, int n1, int n2,
                                                    double d1, double d2, bool periodic2) {
    auto idx = [&](int i, int j) {
        if (periodic2)
            j = ((j % n2) + n2) % n2;
        return i * n2 + j;
    };
    std::vector<double> E(n1 * n2), F(n1 * n2), G(n1 * n2);
    for (int k = 0; k < n1 * n2; ++k) {
        E[k] = gc[k].a11;
        F[k] = gc[k].a12;
        G[k] = gc[k].a22;
    }
    std::vector<double> out(n1 * n2, 0.0);
    const int j_lo = periodic2 ? 0 : 2, j_hi = periodic2 ? n2 : n2 - 2;
    for (int i = 2; i < n1 - 2; ++i)
        for (int j = j_lo; j < j_hi; ++j) {
            auto d_1 = [&](const std::vector<double>& a) {
                return (a[idx(i + 1, j)] - a[idx(i - 1, j)]) / (2.0 * d1);
            };
            auto d_2 = [&](const std::vector<double>& a) {
                return (a[idx(i, j + 1)] - a[idx(i, j - 1)]) / (2.0 * d2);
            };
            auto d_11 = [&](const std::vector<double>& a) {
                return (a[idx(i + 1, j)] - 2.0 * a[idx(i, j)] + a[idx(i - 1, j)]) / (d1 * d1);
            };
            auto d_22 = [&](const std::vector<double>& a) {
                return (a[idx(i, j + 1)] - 2.0 * a[idx(i, j)] + a[idx(i, j - 1)]) / (d2 * d2);
            };
            auto d_12 = [&](const std::vector<double>& a) {
                return (a[idx(i + 1, j + 1)] - a[idx(i + 1, j - 1)] - a[idx(i - 1, j + 1)] +
                        a[idx(i - 1, j - 1)]) /
                       (4.0 * d1 * d2);
            };
            const double e = E[idx(i, j)], f = F[idx(i, j)], gg = G[idx(i, j)];
            const double m11 = -0.5 * d_22(E) + d_12(F) - 0.5 * d_11(G);
            auto det3 = [](double a11, double a12, double a13, double a21, double a22, double a23,
                           double a31, double a32, double a33) {
                return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
                       a13 * (a21 * a32 - a22 * a31);
            };
            const double A = det3(m11, 0.5 * d_1(E), d_1(F) - 0.5 * d_2(E),
                                  d_2(F) - 0.5 * d_1(G), e, f,
                                  0.5 * d_2(G), f, gg);
            const double B = det3(0.0, 0.5 * d_2(E), 0.5 * d_1(G),
                                  0.5 * d_2(E), e, f,
                                  0.5 * d_1(G), f, gg);
            const double denom = e * gg - f * f;
            out[idx(i, j)] = (A - B) / (denom * denom);
        }
    return out;
}

} // namespace cmclab
