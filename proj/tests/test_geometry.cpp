#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "cmclab/estimates.hpp"
#include "cmclab/geometry.hpp"

using namespace cmclab;

namespace {

const ModelParams kHyp0 = ModelParams::make(-1.0, 0.0);
const ModelParams kHyp05 = ModelParams::make(-1.0, 0.5);
const ModelParams kFlat05 = ModelParams::make(0.0, 0.5);

ModelPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> xy(-0.6, 0.6), z(-2.0, 2.0);
    return {xy(rng), xy(rng), z(rng)};
}

TangentVector random_vector(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    return {c(rng), c(rng), c(rng)};
}

} // namespace

TEST_CASE("model parameters derive the sister angle and bundle parameter") {
    CHECK(kHyp0.tau_prime == Approx(0.5).epsilon(1e-15));
    CHECK(kHyp0.theta == Approx(std::acos(-1.0) / 2.0).epsilon(1e-15));
    const ModelParams p = ModelParams::make(-1.0, 0.5);
    CHECK(p.tau_prime == Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(std::cos(p.theta) == Approx(p.tau / p.tau_prime).margin(1e-15));
    CHECK(std::sin(p.theta) == Approx(0.5 / p.tau_prime).margin(1e-15));
    CHECK(p.theta > 0.0);
    CHECK(p.theta <= std::acos(-1.0));
    CHECK_THROWS_AS(ModelParams::make(0.25, 0.0), std::domain_error);
}

TEST_CASE("conformal factor") {
    CHECK(conformal_factor(kHyp0, 0.0, 0.0) == 2.0);
    CHECK(conformal_factor(ModelParams::make(0.0, 0.0), 0.7, -0.3) == 2.0);
    CHECK(conformal_factor(kHyp0, std::sqrt(0.5), 0.0) == Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS(conformal_factor(kHyp0, 1.0, 0.2), std::domain_error);
}

TEST_CASE("metric evaluation matches the closed bilinear form") {
    const TangentVector dz{0.0, 0.0, 1.0};
    CHECK(metric_eval(kHyp05, {0.2, -0.1, 1.4}, dz, dz) == 1.0);
    const TangentVector dx{1.0, 0.0, 0.0};
    CHECK(metric_eval(kHyp0, {0.0, 0.0, 0.0}, dx, dx) == Approx(4.0));
    // cross term vanishes on the x-axis: the dx coefficient of the
    // connection form is 2 tau lambda y
    CHECK(metric_eval(ModelParams::make(-1.0, 0.5), {0.3, 0.0, 0.0}, dx, dz) ==
          Approx(0.0).margin(1e-15));
}

TEST_CASE("orthonormal frame") {
    const Frame f = orthonormal_frame(kHyp0, {0.0, 0.0, 0.0});
    CHECK(f.f1.x == Approx(0.5));
    CHECK(f.f2.y == Approx(0.5));
    CHECK(f.xi.z == 1.0);
    CHECK(orthonormal_frame(ModelParams::make(-1.0, 1.0), {0.0, 0.5, 0.0}).f1.z ==
          Approx(-1.0));

    std::mt19937_64 rng(11);
    for (const ModelParams& p : {kHyp0, kHyp05, kFlat05}) {
        double worst = 0.0;
        for (int k = 0; k < 1000000; ++k) {
            const ModelPoint q = random_point(rng);
            const Frame fr = orthonormal_frame(p, q);
            const TangentVector basis[3] = {fr.f1, fr.f2, fr.xi};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    worst = std::max(worst, std::abs(metric_eval(p, q, basis[a], basis[b]) -
                                                     (a == b ? 1.0 : 0.0)));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("height gradient zeta is metric-dual to dz") {
    CHECK(grad_z(kHyp05, {0.0, 0.0, 0.7}).x == 0.0);
    CHECK(grad_z(kHyp05, {0.0, 0.0, 0.7}).z == 1.0);
    std::mt19937_64 rng(12);
    for (const ModelParams& p : {kHyp05, kFlat05}) {
        for (int k = 0; k < 2000; ++k) {
            const ModelPoint q = random_point(rng);
            const TangentVector zeta = grad_z(p, q);
            const TangentVector v = random_vector(rng);
            CHECK(metric_eval(p, q, zeta, v) == Approx(v.z).margin(1e-12));
            const double r2 = q.x * q.x + q.y * q.y;
            CHECK(metric_eval(p, q, zeta, zeta) ==
                  Approx(1.0 + 4.0 * p.tau * p.tau * r2).margin(1e-12));
        }
    }
    // tau = 0: zeta = xi everywhere
    const TangentVector z0 = grad_z(kHyp0, {0.3, -0.2, 0.5});
    CHECK(z0.x == 0.0);
    CHECK(z0.y == 0.0);
    CHECK(z0.z == 1.0);
}

TEST_CASE("scaling map parameter arithmetic and pullback") {
    const ModelPoint p{0.1, 0.2, 0.3};
    const auto [q1, t1] = scaling_map(1.0, p, kHyp05);
    CHECK(q1.x == p.x);
    CHECK(t1.kappa == kHyp05.kappa);

    const auto [q2, t2] = scaling_map(2.0, {0.05, 0.0, 0.1}, ModelParams::make(-4.0, 1.0));
    CHECK(t2.kappa == Approx(-1.0));
    CHECK(t2.tau == Approx(0.5));
    (void)q2;

    // finite-difference Jacobian pullback oracle
    std::mt19937_64 rng(13);
    for (double mu : {0.5, 2.0, 3.0}) {
        for (int k = 0; k < 200; ++k) {
            std::uniform_real_distribution<double> xy(-0.25, 0.25), z(-1.0, 1.0);
            const ModelPoint q{xy(rng), xy(rng), z(rng)};
            const auto [img, target] = scaling_map(mu, q, kHyp05);
            const TangentVector u = random_vector(rng), v = random_vector(rng);
            const double h = 1e-3;
            auto push = [&](const TangentVector& w) {
                // central difference of the scaling map along w
                const ModelPoint qp{q.x + h * w.x, q.y + h * w.y, q.z + h * w.z};
                const ModelPoint qm{q.x - h * w.x, q.y - h * w.y, q.z - h * w.z};
                const auto [ip, tp] = scaling_map(mu, qp, kHyp05);
                const auto [im, tm] = scaling_map(mu, qm, kHyp05);
                (void)tp;
                (void)tm;
                return TangentVector{(ip.x - im.x) / (2 * h), (ip.y - im.y) / (2 * h),
                                     (ip.z - im.z) / (2 * h)};
            };
            const double lhs = metric_eval(target, img, push(u), push(v));
            const double rhs = mu * mu * metric_eval(kHyp05, q, u, v);
            CHECK(lhs == Approx(rhs).margin(1e-8 * std::max(1.0, std::abs(rhs))));
        }
    }
}

TEST_CASE("vertical translation is an isometry") {
    const ModelPoint p{0.1, 0.2, 0.3};
    CHECK(vertical_translate(p, 0.0).z == 0.3);
    CHECK(vertical_translate(p, 1.5).z == Approx(1.8));
    std::mt19937_64 rng(14);
    for (int k = 0; k < 200; ++k) {
        const ModelPoint q = random_point(rng);
        const ModelPoint qt = vertical_translate(q, 0.77);
        const TangentVector u = random_vector(rng), v = random_vector(rng);
        CHECK(metric_eval(kHyp05, q, u, v) ==
              Approx(metric_eval(kHyp05, qt, u, v)).margin(1e-12));
    }
}

TEST_CASE("finite-difference connection") {
    auto xi_field = [](const ModelPoint&) { return TangentVector{0.0, 0.0, 1.0}; };
    const ModelPoint q{0.2, -0.15, 0.4};

    SECTION("the vertical Killing field is geodesic") {
        const TangentVector r = covariant_derivative(kHyp05, xi_field, xi_field, q);
        CHECK(euclid_norm(r) < 1e-12);
    }

    SECTION("the two bundle-curvature pairings agree") {
        auto f1 = [&](const ModelPoint& p) { return orthonormal_frame(kHyp05, p).f1; };
        auto f2 = [&](const ModelPoint& p) { return orthonormal_frame(kHyp05, p).f2; };
        const TangentVector d12 = covariant_derivative(kHyp05, f1, f2, q);
        const TangentVector d1xi = covariant_derivative(kHyp05, f1, xi_field, q);
        const Frame fr = orthonormal_frame(kHyp05, q);
        const double via_vertical = 2.0 * metric_eval(kHyp05, q, d12, fr.xi);
        const double via_killing = -2.0 * metric_eval(kHyp05, q, d1xi, fr.f2);
        CHECK(via_vertical == Approx(via_killing).margin(5e-8));
    }

    SECTION("product case: the fiber direction is parallel along the base") {
        auto f1 = [&](const ModelPoint& p) { return orthonormal_frame(kHyp0, p).f1; };
        const TangentVector r = covariant_derivative(kHyp0, f1, xi_field, q);
        CHECK(euclid_norm(r) < 1e-10);
    }

    SECTION("metric compatibility residual decays at second order") {
        auto f1 = [&](const ModelPoint& p) { return orthonormal_frame(kHyp05, p).f1; };
        auto y_field = [&](const ModelPoint& p) {
            const Frame fr = orthonormal_frame(kHyp05, p);
            return TangentVector{0.3 * fr.f1.x + fr.f2.x, 0.3 * fr.f1.y + fr.f2.y,
                                 0.3 * fr.f1.z + fr.f2.z + 0.1 * p.x};
        };
        auto residual = [&](double h) {
            // X(g(Y,Z)) - g(DY,Z) - g(Y,DZ) with an independent scalar FD
            auto scalar = [&](const ModelPoint& p) {
                return metric_eval(kHyp05, p, y_field(p), y_field(p));
            };
            const TangentVector x = f1(q);
            const double hs = 1e-6;  // scalar derivative step, fixed and fine
            const ModelPoint qp{q.x + hs * x.x, q.y + hs * x.y, q.z + hs * x.z};
            const ModelPoint qm{q.x - hs * x.x, q.y - hs * x.y, q.z - hs * x.z};
            const double lhs = (scalar(qp) - scalar(qm)) / (2 * hs);
            const TangentVector dy = covariant_derivative(kHyp05, f1, y_field, q, h);
            return std::abs(lhs - 2.0 * metric_eval(kHyp05, q, dy, y_field(q)));
        };
        const double r1 = residual(2e-3), r2 = residual(1e-3);
        const double order = std::log2(r1 / r2);
        CHECK(order > 1.9);
    }

    SECTION("torsion residual is small") {
        auto f1 = [&](const ModelPoint& p) { return orthonormal_frame(kHyp05, p).f1; };
        auto f2 = [&](const ModelPoint& p) { return orthonormal_frame(kHyp05, p).f2; };
        const double h = 1e-5;
        const TangentVector d12 = covariant_derivative(kHyp05, f1, f2, q, h);
        const TangentVector d21 = covariant_derivative(kHyp05, f2, f1, q, h);
        // bracket by the same finite differences
        auto bracket = [&](const ModelPoint& p) {
            TangentVector out{0, 0, 0};
            const TangentVector x = f1(p), y = f2(p);
            for (int l = 0; l < 3; ++l) {
                ModelPoint pp = p, pm = p;
                (l == 0 ? pp.x : l == 1 ? pp.y : pp.z) += h;
                (l == 0 ? pm.x : l == 1 ? pm.y : pm.z) -= h;
                const TangentVector dyl = (f2(pp) - f2(pm)) / (2 * h);
                const TangentVector dxl = (f1(pp) - f1(pm)) / (2 * h);
                const double xs = (l == 0 ? x.x : l == 1 ? x.y : x.z);
                const double ys = (l == 0 ? y.x : l == 1 ? y.y : y.z);
                out += xs * dyl - ys * dxl;
            }
            return out;
        };
        const TangentVector t = d12 - d21 - bracket(q);
        CHECK(euclid_norm(t) < 1e-9);
    }

    SECTION("step underflow is rejected") {
        CHECK_THROWS_AS(covariant_derivative(kHyp05, xi_field, xi_field, q, 1e-14),
                        std::domain_error);
    }
}

TEST_CASE("hyperbolic polar chart") {
    const auto [x0, y0] = polar_to_cartesian({0.0, 1.3});
    CHECK(x0 == 0.0);
    CHECK(y0 == 0.0);
    const auto [x1, y1] = polar_to_cartesian({2.0, 0.0});
    CHECK(x1 == Approx(std::tanh(1.0)).epsilon(1e-15));
    CHECK(y1 == Approx(0.0).margin(1e-15));

    // round trip away from the origin
    for (double rho : {0.3, 1.0, 2.7}) {
        for (double th : {0.1, 2.0, 5.5}) {
            const auto [x, y] = polar_to_cartesian({rho, th});
            const PolarPoint back = cartesian_to_polar(x, y);
            CHECK(back.rho == Approx(rho).margin(1e-14));
            CHECK(back.theta_ang == Approx(th).margin(1e-14));
        }
    }
    const PolarPoint origin = cartesian_to_polar(0.0, 0.0);
    CHECK(origin.rho == 0.0);
    CHECK(origin.theta_ang == 0.0);

    // the polar radius is the hyperbolic distance from the origin
    for (double rho : {0.5, 1.7}) {
        const auto [x, y] = polar_to_cartesian({rho, 0.0});
        CHECK(hyperbolic_distance(0.0, 0.0, x, y) == Approx(rho).margin(1e-12));
    }
}
