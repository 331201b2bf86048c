#pragma once
// sister.hpp — surface data quadruples (g, S, nu, T) extracted from solved
// graphs, the rotation to the sister minimal-surface data in E(0, tau'), the
// Jacobi potential identity, and the flat chart pulled back through the
// sister projection.
//
// Per-node conventions: the base chart basis is the H^2-orthonormal polar
// pair X1 = e_rho, X2 = e_theta; the shape operator and the Killing part are
// stored in the g-orthonormal gauge obtained from (X1, X2) by Gram-Schmidt.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chart_calculus.hpp"
#include "graph_ops.hpp"

namespace cmclab {

struct SurfaceData {
    AnnularGrid grid;
    ModelParams params;
    std::vector<Mat2> g_chart;   // induced metric in the (X1, X2) basis
    std::vector<Mat2> g_coord;   // induced metric in the (d_rho, d_theta) basis
    std::vector<Mat2> shape;     // shape operator in the gauge
    std::vector<double> nu;      // angle function
    std::vector<Vec2> killing;   // T in the gauge
    std::vector<Mat2> gauge;     // columns = gauge vectors in the (X1, X2) basis
    std::vector<double> heights; // sigma values (kept for downstream audits)
};

struct SisterData {
    AnnularGrid grid;
    ModelParams params;          // carries tau' and theta
    std::vector<Mat2> g_chart;   // g' = g
    std::vector<Mat2> g_coord;
    std::vector<Mat2> shape;     // S' = e^{theta J}(S - I/2) in the gauge
    std::vector<double> nu;      // nu' = nu
    std::vector<Vec2> killing;   // T' = e^{theta J} T in the gauge
    std::vector<Mat2> gauge;
};

struct FlatChart {
    AnnularGrid grid;
    std::vector<Mat2> g0_coord;     // flat pullback metric, coordinate basis
    std::vector<Vec2> quotient;     // quotient field G in the gauge
    std::vector<Vec2> chi;          // G / sqrt(1 + |G|_0^2)
    std::vector<double> nu;
    std::vector<double> gauss_curvature;  // by finite differences, inner nodes
};

// Extracts (g, S, nu, T) from a section: S by differentiating the upward unit
// normal N = (-lift(G sigma) + xi)/W along the chart directions, with the
// ambient connection from the finite-difference Christoffel symbols.
inline SurfaceData extract_surface_data(const GridSection& s, double chris_step = 1e-5) {
    const AnnularGrid& g = s.grid;
    const ModelParams& par = s.params;
    const GradientField f = gradient_field_polar(s);
    for (double nu_v : f.nu)
        if (!(nu_v > 0.0))
            throw std::domain_error("extract_surface_data: nu <= 0 node");

    SurfaceData out;
    out.grid = g;
    out.params = par;
    out.g_chart = induced_metric(s, f);
    out.g_coord = induced_metric_coord(s, f);
    out.nu = f.nu;
    out.heights = s.values;
    out.shape.resize(g.size());
    out.killing.resize(g.size());
    out.gauge.resize(g.size());

    // ambient coordinate components of N over the grid
    std::vector<double> nx(g.size()), ny(g.size()), nz(g.size());
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const auto [x, y] = polar_to_cartesian({g.rho(i), g.theta(j)});
            const ModelPoint q{x, y, s.values[idx]};
            const Frame fr = orthonormal_frame(par, q);
            const double th = g.theta(j);
            // G in the Euclidean-orthonormal frame of H^2
            const Vec2 ge = rotation(th) * f.g[idx];
            const double w = f.w[idx];
            const TangentVector n =
                (-ge.x / w) * fr.f1 + (-ge.y / w) * fr.f2 + (1.0 / w) * fr.xi;
            nx[idx] = n.x;
            ny[idx] = n.y;
            nz[idx] = n.z;
        }

    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const auto [x, y] = polar_to_cartesian({g.rho(i), g.theta(j)});
            const ModelPoint q{x, y, s.values[idx]};
            const Frame fr = orthonormal_frame(par, q);
            const double th = g.theta(j);
            const double sh = std::sinh(g.rho(i));

            // surface basis E_a = lift(X_a) + G_a xi in ambient coordinates
            auto lift = [&](Vec2 chart) {
                const Vec2 e = rotation(th) * chart;
                return e.x * fr.f1 + e.y * fr.f2;
            };
            const Vec2 G = f.g[idx];
            const TangentVector e1 = lift({1.0, 0.0}) + G.x * fr.xi;
            const TangentVector e2 = lift({0.0, 1.0}) + G.y * fr.xi;
            const TangentVector n{nx[idx], ny[idx], nz[idx]};

            // chart derivatives of the N component fields
            const TangentVector dn_rho{d_rho(nx, g, i, j), d_rho(ny, g, i, j),
                                       d_rho(nz, g, i, j)};
            const TangentVector dn_th{d_theta(nx, g, i, j) / sh, d_theta(ny, g, i, j) / sh,
                                      d_theta(nz, g, i, j) / sh};

            const auto gamma = christoffel(par, q, chris_step);
            auto connection = [&](const TangentVector& a, const TangentVector& b) {
                const double as[3] = {a.x, a.y, a.z}, bs[3] = {b.x, b.y, b.z};
                double c[3] = {0, 0, 0};
                for (int k = 0; k < 3; ++k)
                    for (int p = 0; p < 3; ++p)
                        for (int r = 0; r < 3; ++r)
                            c[k] += gamma[k][p][r] * as[p] * bs[r];
                return TangentVector{c[0], c[1], c[2]};
            };
            const TangentVector v1 = -1.0 * (dn_rho + connection(e1, n));
            const TangentVector v2 = -1.0 * (dn_th + connection(e2, n));

            // S in the chart basis from g . Scol_b = [ds(V_b, E_a)]_a
            const Mat2 gc = out.g_chart[idx];
            const Vec2 col1 = solve2(gc, {metric_eval(par, q, v1, e1), metric_eval(par, q, v1, e2)});
            const Vec2 col2 = solve2(gc, {metric_eval(par, q, v2, e1), metric_eval(par, q, v2, e2)});
            const Mat2 s_chart{col1.x, col2.x, col1.y, col2.y};

            // Gram-Schmidt gauge
            const double n1 = std::sqrt(gc.a11);
            const double n2 = std::sqrt(gc.a22 - gc.a12 * gc.a12 / gc.a11);
            const Mat2 q_gauge{1.0 / n1, -gc.a12 / (gc.a11 * n2), 0.0, 1.0 / n2};
            out.gauge[idx] = q_gauge;
            out.shape[idx] = inverse(q_gauge) * s_chart * q_gauge;
            const Vec2 t_chart = killing_tangential(f, idx);
            out.killing[idx] = inverse(q_gauge) * t_chart;
        }
    return out;
}

// Jacobi potential Ric(N,N) + |S|^2 of the original or sister surface:
//   original: -(1 + 2 tau^2) + (1 + 4 tau^2) nu^2 + |S|^2
//   sister:   -2 tau'^2 + 4 tau'^2 nu^2 + |S'|^2
inline double jacobi_potential_value(double nu, double shape_frob2, const ModelParams& par,
                                     bool is_sister) {
    if (is_sister) {
        const double tp2 = par.tau_prime * par.tau_prime;
        return -2.0 * tp2 + 4.0 * tp2 * nu * nu + shape_frob2;
    }
    const double t2 = par.tau * par.tau;
    return -(1.0 + 2.0 * t2) + (1.0 + 4.0 * t2) * nu * nu + shape_frob2;
}

template <class Data>
std::vector<double> jacobi_potential(const Data& data, const ModelParams& par, bool is_sister) {
    std::vector<double> out(data.nu.size());
    for (size_t k = 0; k < data.nu.size(); ++k)
        out[k] = jacobi_potential_value(data.nu[k], data.shape[k].frob2(), par, is_sister);
    return out;
}

// Rotation to the sister data; requires the target mean curvature 1/2.
// The tangent rotation acts clockwise in the (e_rho, e_theta) gauge: that is
// the orientation of J induced by the grid chart and the upward normal, and
// the one under which the flat-chart audit closes (K(g0) -> 0).
inline SisterData sister(const SurfaceData& data, const ModelParams& par) {
    if (std::abs(par.h0 - 0.5) > 1e-14)
        throw std::invalid_argument("sister: correspondence requires H0 = 1/2");
    const Mat2 rot = rotation(-par.theta);
    SisterData out;
    out.grid = data.grid;
    out.params = par;
    out.g_chart = data.g_chart;
    out.g_coord = data.g_coord;
    out.nu = data.nu;
    out.gauge = data.gauge;
    out.shape.resize(data.shape.size());
    out.killing.resize(data.killing.size());
    const Mat2 half = 0.5 * Mat2::identity();
    for (size_t k = 0; k < data.shape.size(); ++k) {
        out.shape[k] = rot * (data.shape[k] - half);
        out.killing[k] = rot * data.killing[k];
    }
    return out;
}

// Flat chart of the sister graph: g0(V, W) = g(V, W) - g(V, T') g(W, T') and
// quotient field G = T' / nu^2; Gauss curvature of g0 audited by finite
// differences.
inline FlatChart flat_chart(const SisterData& data) {
    const AnnularGrid& g = data.grid;
    for (double nu_v : data.nu)
        if (!(nu_v > 0.0))
            throw std::domain_error("flat_chart: nu' <= 0 node");
    FlatChart out;
    out.grid = g;
    out.nu = data.nu;
    out.g0_coord.resize(g.size());
    out.quotient.resize(g.size());
    out.chi.resize(g.size());
    for (int i = 0; i < g.n_rho; ++i) {
        const double sh = std::sinh(g.rho(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            // T' components: gauge -> chart -> coordinate basis
            const Vec2 t_chart = data.gauge[idx] * data.killing[idx];
            const Vec2 t_coord{t_chart.x, t_chart.y / sh};
            const Mat2 gc = data.g_coord[idx];
            const Vec2 w = gc * t_coord;  // covector g T'
            out.g0_coord[idx] = gc - outer(w, w);
            const double nu2 = data.nu[idx] * data.nu[idx];
            out.quotient[idx] = data.killing[idx] / nu2;
            out.chi[idx] = data.nu[idx] * out.quotient[idx];
        }
    }
    out.gauss_curvature = gauss_curvature_brioschi(out.g0_coord, g.n_rho, g.n_theta, g.drho(),
                                                   g.dtheta(), /*periodic2=*/true);
    return out;
}

// Discrete curve comparison for the flat-chart length bound: returns the g0
// length and the integral of nu against H^2 length along a node path.
inline std::pair<double, double> curve_length_flat_vs_nu(const FlatChart& chart,
                                                         const std::vector<std::pair<int, int>>& path) {
    const AnnularGrid& g = chart.grid;
    double len0 = 0.0, len_nu = 0.0;
    for (size_t k = 0; k + 1 < path.size(); ++k) {
        auto [i0, j0] = path[k];
        auto [i1, j1] = path[k + 1];
        const int a = g.index(i0, j0), b = g.index(i1, j1);
        double djs = j1 - j0;
        if (djs > g.n_theta / 2.0) djs -= g.n_theta;
        if (djs < -g.n_theta / 2.0) djs += g.n_theta;
        const Vec2 dc{(i1 - i0) * g.drho(), djs * g.dtheta()};
        const Mat2 g0 = 0.5 * (chart.g0_coord[a] + chart.g0_coord[b]);
        len0 += std::sqrt(dot(dc, g0 * dc));
        const double rho_mid = 0.5 * (g.rho(i0) + g.rho(i1));
        const double sh = std::sinh(rho_mid);
        const double dl_h2 = std::sqrt(dc.x * dc.x + sh * sh * dc.y * dc.y);
        len_nu += 0.5 * (chart.nu[a] + chart.nu[b]) * dl_h2;
    }
    return {len0, len_nu};
}

} // namespace cmclab
