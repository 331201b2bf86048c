#pragma once
// geometry.hpp — explicit Riemannian model of E(kappa,tau) on D_kappa x R:
//   ds^2 = lambda^2 (dx^2 + dy^2) + (2 tau lambda (y dx - x dy) + dz)^2,
//   lambda = 2 / (1 + kappa (x^2 + y^2)).
// Evaluates the metric, the horizontal orthonormal frame, the height
// gradient, the scaling diffeomorphism between parameter pairs, and a
// finite-difference Levi-Civita connection.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "la.hpp"

namespace cmclab {

struct ModelParams {
    double kappa = -1.0;  // base curvature, <= 0
    double tau = 0.0;     // bundle parameter
    double h0 = 0.5;      // target mean curvature
    double theta = 0.0;   // sister rotation angle, in (0, pi)
    double tau_prime = 0.5;

    static ModelParams make(double kappa, double tau, double h0 = 0.5) {
        if (kappa > 0.0)
            throw std::domain_error("ModelParams: kappa must be <= 0");
        ModelParams p;
        p.kappa = kappa;
        p.tau = tau;
        p.h0 = h0;
        p.tau_prime = std::sqrt(tau * tau + 0.25);
        p.theta = std::atan2(0.5, tau);  // cos = tau/tau', sin = (1/2)/tau'
        return p;
    }
};

struct ModelPoint {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Components in the coordinate basis (dx, dy, dz) at a base point.
using TangentVector = Vec3;

struct Frame {
    TangentVector f1, f2, xi;
};

struct PolarPoint {
    double rho = 0.0;        // hyperbolic radius, >= 0
    double theta_ang = 0.0;  // angle in [0, 2 pi)
};

inline bool in_domain(const ModelParams& p, double x, double y) {
    return 1.0 + p.kappa * (x * x + y * y) > 0.0;
}

inline double conformal_factor(const ModelParams& p, double x, double y) {
    const double denom = 1.0 + p.kappa * (x * x + y * y);
    if (denom <= 0.0)
        throw std::domain_error("conformal_factor: point outside D_kappa");
    return 2.0 / denom;
}

// Full coordinate metric as a symmetric 3x3 array (row-major).
inline std::array<std::array<double, 3>, 3> metric_tensor(const ModelParams& p, const ModelPoint& q) {
    const double lam = conformal_factor(p, q.x, q.y);
    const double a = 2.0 * p.tau * lam * q.y;   // dx coefficient of the connection form
    const double b = -2.0 * p.tau * lam * q.x;  // dy coefficient
    return {{{lam * lam + a * a, a * b, a},
             {a * b, lam * lam + b * b, b},
             {a, b, 1.0}}};
}

inline double metric_eval(const ModelParams& p, const ModelPoint& q, const TangentVector& u,
                          const TangentVector& v) {
    const double lam = conformal_factor(p, q.x, q.y);
    const double a = 2.0 * p.tau * lam * q.y;
    const double b = -2.0 * p.tau * lam * q.x;
    const double fu = a * u.x + b * u.y + u.z;
    const double fv = a * v.x + b * v.y + v.z;
    return lam * lam * (u.x * v.x + u.y * v.y) + fu * fv;
}

// F1 = (1/lambda) dx - 2 tau y dz, F2 = (1/lambda) dy + 2 tau x dz, xi = dz.
inline Frame orthonormal_frame(const ModelParams& p, const ModelPoint& q) {
    const double lam = conformal_factor(p, q.x, q.y);
    Frame f;
    f.f1 = {1.0 / lam, 0.0, -2.0 * p.tau * q.y};
    f.f2 = {0.0, 1.0 / lam, 2.0 * p.tau * q.x};
    f.xi = {0.0, 0.0, 1.0};
    return f;
}

// zeta = grad z = -2 tau y F1 + 2 tau x F2 + xi; dual to dz under the metric.
inline TangentVector grad_z(const ModelParams& p, const ModelPoint& q) {
    const double lam = conformal_factor(p, q.x, q.y);
    const double t = p.tau;
    return {-2.0 * t * q.y / lam, 2.0 * t * q.x / lam, 1.0 + 4.0 * t * t * (q.x * q.x + q.y * q.y)};
}

// h_mu: (x,y,z) -> mu (x,y,z) maps E(kappa,tau) to E(kappa/mu^2, tau/mu).
inline std::pair<ModelPoint, ModelParams> scaling_map(double mu, const ModelPoint& q,
                                                      const ModelParams& p) {
    if (mu <= 0.0)
        throw std::domain_error("scaling_map: mu must be positive");
    ModelPoint image{mu * q.x, mu * q.y, mu * q.z};
    ModelParams target = ModelParams::make(p.kappa / (mu * mu), p.tau / mu, p.h0);
    if (!in_domain(target, image.x, image.y))
        throw std::domain_error("scaling_map: image outside target domain");
    return {image, target};
}

inline ModelPoint vertical_translate(const ModelPoint& q, double t) {
    return {q.x, q.y, q.z + t};
}

// Christoffel symbols Gamma^k_{ij} from central differences of the closed-form
// metric. gamma[k][i][j], symmetric in (i, j).
inline std::array<std::array<std::array<double, 3>, 3>, 3>
christoffel(const ModelParams& p, const ModelPoint& q, double step = 1e-5) {
    if (!(step > 1e-12))
        throw std::domain_error("christoffel: step underflow");
    auto at = [&](int dir, double s) {
        ModelPoint r = q;
        (dir == 0 ? r.x : dir == 1 ? r.y : r.z) += s;
        return metric_tensor(p, r);
    };
    // dg[l][i][j] = d g_ij / d x_l
    std::array<std::array<std::array<double, 3>, 3>, 3> dg{};
    for (int l = 0; l < 3; ++l) {
        const auto gp = at(l, step), gm = at(l, -step);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * step);
    }
    const auto g = metric_tensor(p, q);
    // invert g
    std::array<std::array<double, 3>, 3> ginv{};
    {
        const auto& m = g;
        const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        ginv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
        ginv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
        ginv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
        ginv[1][0] = ginv[0][1];
        ginv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
        ginv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
        ginv[2][0] = ginv[0][2];
        ginv[2][1] = ginv[1][2];
        ginv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    }
    std::array<std::array<std::array<double, 3>, 3>, 3> gamma{};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int l = 0; l < 3; ++l)
                    s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                gamma[k][i][j] = 0.5 * s;
            }
    return gamma;
}

using VectorField = std::function<TangentVector(const ModelPoint&)>;

// Covariant derivative (nabla_X Y)(q) with finite-difference partials of Y and
// finite-difference Christoffel symbols; second-order accurate in step.
inline TangentVector covariant_derivative(const ModelParams& p, const VectorField& X,
                                          const VectorField& Y, const ModelPoint& q,
                                          double step = 1e-5) {
    if (!(step > 1e-12))
        throw std::domain_error("covariant_derivative: step underflow");
    const TangentVector xq = X(q);
    // dY[l] = partial of Y along coordinate l
    std::array<TangentVector, 3> dY;
    for (int l = 0; l < 3; ++l) {
        ModelPoint qp = q, qm = q;
        (l == 0 ? qp.x : l == 1 ? qp.y : qp.z) += step;
        (l == 0 ? qm.x : l == 1 ? qm.y : qm.z) -= step;
        if (!in_domain(p, qp.x, qp.y) || !in_domain(p, qm.x, qm.y))
            throw std::domain_error("covariant_derivative: stencil leaves domain");
        dY[l] = (Y(qp) - Y(qm)) / (2.0 * step);
    }
    const TangentVector yq = Y(q);
    const auto gamma = christoffel(p, q, step);
    TangentVector out = xq.x * dY[0] + xq.y * dY[1] + xq.z * dY[2];
    const double xs[3] = {xq.x, xq.y, xq.z};
    const double ys[3] = {yq.x, yq.y, yq.z};
    double corr[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                corr[k] += gamma[k][i][j] * xs[i] * ys[j];
    out += TangentVector{corr[0], corr[1], corr[2]};
    return out;
}

// Hyperbolic polar chart on D_{-1}: x = tanh(rho/2) cos th, y = tanh(rho/2) sin th.
inline std::pair<double, double> polar_to_cartesian(const PolarPoint& q) {
    if (q.rho < 0.0)
        throw std::domain_error("polar_to_cartesian: rho must be >= 0");
    const double r = std::tanh(0.5 * q.rho);
    return {r * std::cos(q.theta_ang), r * std::sin(q.theta_ang)};
}

inline PolarPoint cartesian_to_polar(double x, double y) {
    const double r = std::sqrt(x * x + y * y);
    if (r == 0.0)
        return {0.0, 0.0};  // convention at the origin
    if (r >= 1.0)
        throw std::domain_error("cartesian_to_polar: point outside D_{-1}");
    double th = std::atan2(y, x);
    if (th < 0.0)
        th += 2.0 * std::acos(-1.0);
    return {2.0 * std::atanh(r), th};
}

} // namespace cmclab
