#pragma once
// graph_ops.hpp — discrete fields and divergence-form operators for sections
// over annuli in H^2 and Cartesian patches in the disk model.
//
// Field components live in the orthonormal polar basis (d_rho, (1/sinh rho) d_theta).
// The divergence-form operators are conservative: each grid cell carries
// weighted gradient samples of the bilinear interpolant, every operator below
// is the exact gradient (or Hessian) of the resulting cell energy, and the
// assembled bilinear form is symmetric by construction.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace cmclab {

// ---------------------------------------------------------------------------
// Node-centered fields.
// ---------------------------------------------------------------------------

// Per-node graph gradient data: G sigma, W = sqrt(1+|G|^2), nu = 1/W.
struct GradientField {
    AnnularGrid grid;
    std::vector<Vec2> g;
    std::vector<double> w;
    std::vector<double> nu;

    Vec2 chi(int idx) const { return g[idx] / w[idx]; }
};

// G sigma = sigma_rho d_rho + (1/sinh rho)(sigma_theta / sinh rho - 2 tau tanh(rho/2)) d_theta
// in the orthonormal polar basis.
inline GradientField gradient_field_polar(const GridSection& s) {
    const AnnularGrid& g = s.grid;
    const double tau = s.params.tau;
    GradientField f{g, std::vector<Vec2>(g.size()), std::vector<double>(g.size()),
                    std::vector<double>(g.size())};
    for (int i = 0; i < g.n_rho; ++i) {
        const double sh = std::sinh(g.rho(i));
        const double off = -2.0 * tau * std::tanh(0.5 * g.rho(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const double sr = d_rho(s.values, g, i, j);
            const double st = d_theta(s.values, g, i, j);
            f.g[idx] = {sr, st / sh + off};
            f.w[idx] = std::sqrt(1.0 + norm2(f.g[idx]));
            f.nu[idx] = 1.0 / f.w[idx];
        }
    }
    return f;
}

// Induced metric in the orthonormal polar basis: I + G G^T.
inline std::vector<Mat2> induced_metric(const GridSection& s, const GradientField& f) {
    std::vector<Mat2> out(s.grid.size());
    for (int idx = 0; idx < s.grid.size(); ++idx)
        out[idx] = Mat2::identity() + outer(f.g[idx], f.g[idx]);
    return out;
}

inline std::vector<Mat2> induced_metric(const GridSection& s) {
    return induced_metric(s, gradient_field_polar(s));
}

// Induced metric in the (rho, theta) coordinate basis (d_rho, d_theta).
inline std::vector<Mat2> induced_metric_coord(const GridSection& s, const GradientField& f) {
    const AnnularGrid& g = s.grid;
    std::vector<Mat2> out(g.size());
    for (int i = 0; i < g.n_rho; ++i) {
        const double sh = std::sinh(g.rho(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const Vec2 G = f.g[idx];
            out[idx] = {1.0 + G.x * G.x, sh * G.x * G.y, sh * G.x * G.y,
                        sh * sh * (1.0 + G.y * G.y)};
        }
    }
    return out;
}

// Tangential part of the Killing field in the graph chart: xi = T + nu N with
// T corresponding to the base vector G sigma / W^2 (orthonormal polar basis).
inline Vec2 killing_tangential(const GradientField& f, int idx) {
    return f.g[idx] / (f.w[idx] * f.w[idx]);
}

// ---------------------------------------------------------------------------
// Cell quadrature.
//
// Cells are the grid rectangles (rho_i, rho_{i+1}) x (theta_j, theta_{j+1});
// each carries four Gauss samples of the gradient of the bilinear
// interpolant, so every divergence-form operator below is the exact gradient
// (or Hessian) of a cellwise energy. That keeps the assembled linearization
// symmetric and the flux balance conservative, with no one-sided samples
// anywhere.
// ---------------------------------------------------------------------------

// One quadrature sample of the bilinear-interpolant gradient in the
// orthonormal polar basis. Nodes are ordered (i,j), (i+1,j), (i,j+1),
// (i+1,j+1); coef[k] is the per-node gradient coefficient used by the
// assembly, while sample_gradient evaluates the same map in difference form so
// that constants are annihilated exactly. weight is the area weight
// sinh(rho) drho dtheta / 4; b_theta is the tau offset added to the theta
// component of a base-section gradient.
struct CellSample {
    std::array<int, 4> node{};
    std::array<Vec2, 4> coef{};
    double weight = 0.0;
    double b_theta = 0.0;
    double wa = 0.0, wb = 0.0;        // cell coordinates of the sample
    double inv_dr = 0.0, inv_dts = 0.0;  // 1/drho, 1/(dtheta sinh rho)
    static constexpr int count = 4;
};

inline Vec2 sample_gradient(const CellSample& f, const std::vector<double>& v) {
    const double v00 = v[f.node[0]], v10 = v[f.node[1]];
    const double v01 = v[f.node[2]], v11 = v[f.node[3]];
    return {((1.0 - f.wb) * (v10 - v00) + f.wb * (v11 - v01)) * f.inv_dr,
            ((1.0 - f.wa) * (v01 - v00) + f.wa * (v11 - v10)) * f.inv_dts};
}

template <class F>
void for_each_cell_sample(const AnnularGrid& g, double tau, F&& fn) {
    const double dr = g.drho(), dt = g.dtheta();
    constexpr double gp = 0.21132486540518713;  // (1 - 1/sqrt(3)) / 2
    const double qx[2] = {gp, 1.0 - gp};
    CellSample f;
    for (int i = 0; i + 1 < g.n_rho; ++i) {
        for (int j = 0; j < g.n_theta; ++j) {
            f.node = {g.index(i, j), g.index(i + 1, j), g.index(i, j + 1), g.index(i + 1, j + 1)};
            for (int qa = 0; qa < 2; ++qa)
                for (int qb = 0; qb < 2; ++qb) {
                    const double a = qx[qa];   // radial cell coordinate in [0,1]
                    const double b = qx[qb];   // angular cell coordinate
                    const double rho_q = g.rho(i) + a * dr;
                    const double s_q = std::sinh(rho_q);
                    f.wa = a;
                    f.wb = b;
                    f.inv_dr = 1.0 / dr;
                    f.inv_dts = 1.0 / (dt * s_q);
                    f.coef[0] = {-(1.0 - b) / dr, -(1.0 - a) / (dt * s_q)};
                    f.coef[1] = {(1.0 - b) / dr, -a / (dt * s_q)};
                    f.coef[2] = {-b / dr, (1.0 - a) / (dt * s_q)};
                    f.coef[3] = {b / dr, a / (dt * s_q)};
                    f.weight = 0.25 * s_q * dr * dt;
                    f.b_theta = -2.0 * tau * std::tanh(0.5 * rho_q);
                    fn(f);
                }
        }
    }
}

// Quadrature mass per node: m_a = sum_q w_q phi_a(q). For nodes away from the
// boundary rows this is sinh(rho_i) drho dtheta + O(drho^2).
inline std::vector<double> node_mass(const AnnularGrid& g) {
    std::vector<double> m(g.size(), 0.0);
    const double dr = g.drho(), dt = g.dtheta();
    constexpr double gp = 0.21132486540518713;
    const double qx[2] = {gp, 1.0 - gp};
    for (int i = 0; i + 1 < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j)
            for (int qa = 0; qa < 2; ++qa)
                for (int qb = 0; qb < 2; ++qb) {
                    const double a = qx[qa], b = qx[qb];
                    const double w = 0.25 * std::sinh(g.rho(i) + a * dr) * dr * dt;
                    m[g.index(i, j)] += w * (1.0 - a) * (1.0 - b);
                    m[g.index(i + 1, j)] += w * a * (1.0 - b);
                    m[g.index(i, j + 1)] += w * (1.0 - a) * b;
                    m[g.index(i + 1, j + 1)] += w * a * b;
                }
    return m;
}

// ---------------------------------------------------------------------------
// Divergence-form operators.
// ---------------------------------------------------------------------------

// Divergence of a node 2-vector field by node-centered differences (one-sided
// at the radial boundary rows):
//   Div X = d_rho X_rho + coth(rho) X_rho + (1/sinh rho) d_theta X_theta.
// Used for boundary-row values where the staggered cells are incomplete.
inline double node_divergence(const AnnularGrid& g, const std::vector<double>& xr,
                              const std::vector<double>& xt, int i, int j) {
    const double rho = g.rho(i);
    return d_rho(xr, g, i, j) + (std::cosh(rho) / std::sinh(rho)) * xr[g.index(i, j)] +
           d_theta(xt, g, i, j) / std::sinh(rho);
}

// Mean curvature H[sigma] = (1/2) Div_{H^2}(G sigma / W) at every node.
// Interior rows use the conservative face fluxes; boundary rows fall back to
// the node-centered divergence of chi.
inline std::vector<double> mean_curvature(const GridSection& s) {
    const AnnularGrid& g = s.grid;
    std::vector<double> acc(g.size(), 0.0);
    for_each_cell_sample(g, s.params.tau, [&](const CellSample& f) {
        Vec2 G = sample_gradient(f, s.values);
        G.y += f.b_theta;
        const Vec2 chi = G / std::sqrt(1.0 + norm2(G));
        for (int k = 0; k < f.count; ++k)
            acc[f.node[k]] += f.weight * dot(chi, f.coef[k]);
    });
    std::vector<double> h(g.size(), 0.0);
    const std::vector<double> mass = node_mass(g);
    for (int i = 1; i + 1 < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            h[idx] = -acc[idx] / (2.0 * mass[idx]);
        }
    // boundary rows
    const GradientField f = gradient_field_polar(s);
    std::vector<double> xr(g.size()), xt(g.size());
    for (int idx = 0; idx < g.size(); ++idx) {
        xr[idx] = f.g[idx].x / f.w[idx];
        xt[idx] = f.g[idx].y / f.w[idx];
    }
    for (int i : {0, g.n_rho - 1})
        for (int j = 0; j < g.n_theta; ++j)
            h[g.index(i, j)] = 0.5 * node_divergence(g, xr, xt, i, j);
    return h;
}

// Residual of the linearized operator Div((grad v - chi (grad v, chi)) / W)
// around the base section, with the same conservative fluxes.
inline std::vector<double> jacobi_residual(const GridSection& base, const std::vector<double>& v) {
    const AnnularGrid& g = base.grid;
    if ((int)v.size() != g.size())
        throw std::invalid_argument("jacobi_residual: size mismatch");
    std::vector<double> acc(g.size(), 0.0);
    for_each_cell_sample(g, base.params.tau, [&](const CellSample& f) {
        Vec2 G = sample_gradient(f, base.values);
        G.y += f.b_theta;
        const double w = std::sqrt(1.0 + norm2(G));
        const Vec2 chi = G / w;
        const Vec2 dv = sample_gradient(f, v);
        const Vec2 pv = (dv - dot(dv, chi) * chi) / w;
        for (int k = 0; k < f.count; ++k)
            acc[f.node[k]] += f.weight * dot(pv, f.coef[k]);
    });
    std::vector<double> r(g.size(), 0.0);
    const std::vector<double> mass = node_mass(g);
    for (int i = 1; i + 1 < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            r[idx] = -acc[idx] / mass[idx];
        }
    // boundary rows: node-centered P grad v
    const GradientField f = gradient_field_polar(base);
    std::vector<double> xr(g.size()), xt(g.size());
    for (int i = 0; i < g.n_rho; ++i) {
        const double sh = std::sinh(g.rho(i));
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const Vec2 dv{d_rho(v, g, i, j), d_theta(v, g, i, j) / sh};
            const Vec2 chi = f.chi(idx);
            const Vec2 pv = (dv - dot(dv, chi) * chi) / f.w[idx];
            xr[idx] = pv.x;
            xt[idx] = pv.y;
        }
    }
    for (int i : {0, g.n_rho - 1})
        for (int j = 0; j < g.n_theta; ++j)
            r[g.index(i, j)] = node_divergence(g, xr, xt, i, j);
    return r;
}

// Intrinsic divergence on the graph: Div_g X = (1/W) Div(W X), X given as a
// node field in the orthonormal polar basis.
inline std::vector<double> divergence_g(const GridSection& s, const std::vector<Vec2>& x) {
    const AnnularGrid& g = s.grid;
    if ((int)x.size() != g.size())
        throw std::invalid_argument("divergence_g: size mismatch");
    const GradientField f = gradient_field_polar(s);
    std::vector<double> yr(g.size()), yt(g.size());
    for (int idx = 0; idx < g.size(); ++idx) {
        yr[idx] = f.w[idx] * x[idx].x;
        yt[idx] = f.w[idx] * x[idx].y;
    }
    const double dr = g.drho(), dt = g.dtheta();
    std::vector<double> out(g.size(), 0.0);
    for (int i = 1; i + 1 < g.n_rho; ++i) {
        const double sp = std::sinh(g.rho(i) + 0.5 * dr);
        const double sm = std::sinh(g.rho(i) - 0.5 * dr);
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const double frp = 0.5 * (yr[g.index(i, j)] + yr[g.index(i + 1, j)]);
            const double frm = 0.5 * (yr[g.index(i - 1, j)] + yr[g.index(i, j)]);
            const double ftp = 0.5 * (yt[g.index(i, j)] + yt[g.index(i, j + 1)]);
            const double ftm = 0.5 * (yt[g.index(i, j - 1)] + yt[g.index(i, j)]);
            const double div = (dt * (sp * frp - sm * frm) + dr * (ftp - ftm)) / g.cell_measure(i);
            out[idx] = div / f.w[idx];
        }
    }
    for (int i : {0, g.n_rho - 1})
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            out[idx] = node_divergence(g, yr, yt, i, j) / f.w[idx];
        }
    return out;
}

// ---------------------------------------------------------------------------
// Audit pairings. These mirror the flux quadrature exactly, so the discrete
// Stokes identities close to rounding for test fields vanishing near the
// boundary rows.
// ---------------------------------------------------------------------------

// sum_f weight_f (chi_f, D_f phi); equals -2 sum_ij H_ij phi_ij m_ij for phi
// supported away from the boundary rows.
inline double curvature_flux_pairing(const GridSection& s, const std::vector<double>& phi) {
    double acc = 0.0;
    for_each_cell_sample(s.grid, s.params.tau, [&](const CellSample& f) {
        Vec2 G = sample_gradient(f, s.values);
        G.y += f.b_theta;
        const Vec2 chi = G / std::sqrt(1.0 + norm2(G));
        acc += f.weight * dot(chi, sample_gradient(f, phi));
    });
    return acc;
}

// Edge-midpoint pairing of W X against grad phi matching divergence_g's fluxes.
inline double divergence_g_pairing(const GridSection& s, const std::vector<Vec2>& x,
                                   const std::vector<double>& phi) {
    const AnnularGrid& g = s.grid;
    const GradientField f = gradient_field_polar(s);
    std::vector<double> yr(g.size()), yt(g.size());
    for (int idx = 0; idx < g.size(); ++idx) {
        yr[idx] = f.w[idx] * x[idx].x;
        yt[idx] = f.w[idx] * x[idx].y;
    }
    const double dr = g.drho(), dt = g.dtheta();
    double acc = 0.0;
    for (int i = 0; i + 1 < g.n_rho; ++i) {
        const double s_f = std::sinh(g.rho(i) + 0.5 * dr);
        for (int j = 0; j < g.n_theta; ++j) {
            const double fr = 0.5 * (yr[g.index(i, j)] + yr[g.index(i + 1, j)]);
            acc += dt * s_f * fr * (phi[g.index(i + 1, j)] - phi[g.index(i, j)]);
        }
    }
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const double ft = 0.5 * (yt[g.index(i, j)] + yt[g.index(i, j + 1)]);
            acc += dr * ft * (phi[g.index(i, j + 1)] - phi[g.index(i, j)]);
        }
    return acc;
}

// ---------------------------------------------------------------------------
// Cartesian-chart fields on a patch.
// ---------------------------------------------------------------------------

struct PatchGradientField {
    CartesianPatch patch;
    std::vector<double> gx, gy;  // coordinate components of G sigma
    std::vector<double> w, nu;   // norms taken with the H^2 metric
};

namespace patch_detail {

inline double dxi(const std::vector<double>& v, const CartesianPatch& p, int ix, int iy) {
    if (ix == 0)
        return (-3.0 * v[p.index(0, iy)] + 4.0 * v[p.index(1, iy)] - v[p.index(2, iy)]) /
               (2.0 * p.dx);
    if (ix == p.nx - 1)
        return (3.0 * v[p.index(ix, iy)] - 4.0 * v[p.index(ix - 1, iy)] + v[p.index(ix - 2, iy)]) /
               (2.0 * p.dx);
    return (v[p.index(ix + 1, iy)] - v[p.index(ix - 1, iy)]) / (2.0 * p.dx);
}

inline double dyi(const std::vector<double>& v, const CartesianPatch& p, int ix, int iy) {
    if (iy == 0)
        return (-3.0 * v[p.index(ix, 0)] + 4.0 * v[p.index(ix, 1)] - v[p.index(ix, 2)]) /
               (2.0 * p.dy);
    if (iy == p.ny - 1)
        return (3.0 * v[p.index(ix, iy)] - 4.0 * v[p.index(ix, iy - 1)] + v[p.index(ix, iy - 2)]) /
               (2.0 * p.dy);
    return (v[p.index(ix, iy + 1)] - v[p.index(ix, iy - 1)]) / (2.0 * p.dy);
}

} // namespace patch_detail

// G sigma = (sigma_x + 2 tau lambda y)/lambda^2 dx + (sigma_y - 2 tau lambda x)/lambda^2 dy.
inline PatchGradientField gradient_field_cartesian(const PatchSection& s) {
    const CartesianPatch& p = s.patch;
    PatchGradientField f{p, std::vector<double>(p.size()), std::vector<double>(p.size()),
                         std::vector<double>(p.size()), std::vector<double>(p.size())};
    for (int ix = 0; ix < p.nx; ++ix)
        for (int iy = 0; iy < p.ny; ++iy) {
            const double x = p.x(ix), y = p.y(iy);
            const double lam = conformal_factor(s.params, x, y);
            const double sx = patch_detail::dxi(s.values, p, ix, iy);
            const double sy = patch_detail::dyi(s.values, p, ix, iy);
            const int idx = p.index(ix, iy);
            f.gx[idx] = (sx + 2.0 * s.params.tau * lam * y) / (lam * lam);
            f.gy[idx] = (sy - 2.0 * s.params.tau * lam * x) / (lam * lam);
            const double n2 = lam * lam * (f.gx[idx] * f.gx[idx] + f.gy[idx] * f.gy[idx]);
            f.w[idx] = std::sqrt(1.0 + n2);
            f.nu[idx] = 1.0 / f.w[idx];
        }
    return f;
}

// Mean curvature in the Cartesian chart, conservative midpoint fluxes:
// 2H = (1/lambda^2) [ d_x(lambda^2 Gx/W) + d_y(lambda^2 Gy/W) ].
// Interior nodes only; the two-node boundary rings are left at zero.
inline std::vector<double> patch_mean_curvature(const PatchSection& s) {
    const CartesianPatch& p = s.patch;
    const double tau = s.params.tau;
    std::vector<double> h(p.size(), 0.0);
    // face value of lambda^2 * G / W, normal direction dir (0 = x, 1 = y)
    auto face_flux = [&](int ix, int iy, int dir) {
        // face between (ix,iy) and its +dir neighbor
        const double xf = p.x(ix) + (dir == 0 ? 0.5 * p.dx : 0.0);
        const double yf = p.y(iy) + (dir == 1 ? 0.5 * p.dy : 0.0);
        const double lam = conformal_factor(s.params, xf, yf);
        double sx, sy;
        if (dir == 0) {
            sx = (s.at(ix + 1, iy) - s.at(ix, iy)) / p.dx;
            sy = (s.at(ix, iy + 1) - s.at(ix, iy - 1) + s.at(ix + 1, iy + 1) -
                  s.at(ix + 1, iy - 1)) /
                 (4.0 * p.dy);
        } else {
            sy = (s.at(ix, iy + 1) - s.at(ix, iy)) / p.dy;
            sx = (s.at(ix + 1, iy) - s.at(ix - 1, iy) + s.at(ix + 1, iy + 1) -
                  s.at(ix - 1, iy + 1)) /
                 (4.0 * p.dx);
        }
        const double gx = (sx + 2.0 * tau * lam * yf) / (lam * lam);
        const double gy = (sy - 2.0 * tau * lam * xf) / (lam * lam);
        const double w = std::sqrt(1.0 + lam * lam * (gx * gx + gy * gy));
        return lam * lam * (dir == 0 ? gx : gy) / w;
    };
    for (int ix = 2; ix < p.nx - 2; ++ix)
        for (int iy = 2; iy < p.ny - 2; ++iy) {
            const double lam = conformal_factor(s.params, p.x(ix), p.y(iy));
            const double div = (face_flux(ix, iy, 0) - face_flux(ix - 1, iy, 0)) / p.dx +
                               (face_flux(ix, iy, 1) - face_flux(ix, iy - 1, 1)) / p.dy;
            h[p.index(ix, iy)] = 0.5 * div / (lam * lam);
        }
    return h;
}

} // namespace cmclab
