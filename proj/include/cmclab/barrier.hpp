#pragma once
// barrier.hpp — affine-in-rho barriers h = f(theta) + alpha (rho0 - rho) on
// the annulus {rho1 <= rho <= rho0}: an upper barrier needs 2H[h] <= 1 and
// h >= M on the inner circle, a lower barrier needs 2H[k] >= 1 and k <= M.
// The slope is found by a doubling search from the height constraint, each
// candidate certified pointwise on the working grid and a refined one.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph_ops.hpp"

namespace cmclab {

struct BarrierSpec {
    double rho0 = 0.0, rho1 = 0.0;  // rho0 > rho1 > 0
    std::vector<double> f;          // boundary samples on {rho = rho0}, periodic
    double m_height = 0.0;          // height target on the inner circle
    double alpha = 0.0;             // slope; positive = upper, negative = lower
    double tau = 0.0;
};

struct BarrierReport {
    double alpha = 0.0;
    double max_violation = 0.0;  // max of 2H-1 (upper) or 1-2H (lower)
    double min_2h = 0.0, max_2h = 0.0;
    double boundary_trace_error = 0.0;
    double height_margin = 0.0;  // min(h - M) on the inner circle (upper); min(M - k) (lower)
    bool pass = false;
    int doublings = 0;
};

struct BarrierResult {
    double alpha = 0.0;
    GridSection section;
    BarrierReport report;
};

enum class BarrierDirection { above, below };

// Periodic Catmull-Rom interpolant through uniformly spaced samples on [0, 2pi).
inline std::function<double(double)> periodic_cubic_interpolant(std::vector<double> samples) {
    if (samples.size() < 4)
        throw std::invalid_argument("periodic_cubic_interpolant: need >= 4 samples");
    return [s = std::move(samples)](double theta) {
        const int n = (int)s.size();
        const double two_pi = 2.0 * std::acos(-1.0);
        double t = std::fmod(theta, two_pi);
        if (t < 0.0)
            t += two_pi;
        const double u = t / two_pi * n;
        const int j = std::min((int)std::floor(u), n - 1);
        const double x = u - j;
        auto at = [&](int k) { return s[((k % n) + n) % n]; };
        const double p0 = at(j - 1), p1 = at(j), p2 = at(j + 1), p3 = at(j + 2);
        return p1 + 0.5 * x * (p2 - p0 +
                               x * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                    x * (3.0 * (p1 - p2) + p3 - p0)));
    };
}

inline GridSection barrier_section(const std::function<double(double)>& f, double alpha,
                                   double rho0, double tau, const AnnularGrid& grid) {
    ModelParams p = ModelParams::make(-1.0, tau, 0.5);
    return GridSection::sample(grid, p,
                               [&](double rho, double th) { return f(th) + alpha * (rho0 - rho); });
}

// Pointwise certificate over a grid: sign of 2H - 1 in the requested direction.
inline BarrierReport verify_barrier(const GridSection& s, BarrierDirection dir,
                                    const std::function<double(double)>& f_reference,
                                    double rho0) {
    const std::vector<double> h = mean_curvature(s);
    BarrierReport rep;
    rep.min_2h = std::numeric_limits<double>::infinity();
    rep.max_2h = -rep.min_2h;
    for (double v : h) {
        rep.min_2h = std::min(rep.min_2h, 2.0 * v);
        rep.max_2h = std::max(rep.max_2h, 2.0 * v);
    }
    rep.max_violation =
        dir == BarrierDirection::above ? rep.max_2h - 1.0 : 1.0 - rep.min_2h;
    const AnnularGrid& g = s.grid;
    const int outer = (std::abs(g.rho_max - rho0) <= std::abs(g.rho_min - rho0)) ? g.n_rho - 1 : 0;
    for (int j = 0; j < g.n_theta; ++j)
        rep.boundary_trace_error =
            std::max(rep.boundary_trace_error, std::abs(s.at(outer, j) - f_reference(g.theta(j))));
    rep.pass = rep.max_violation <= 0.0;
    return rep;
}

struct barrier_search_failure : std::runtime_error {
    double max_violation = 0.0;
    explicit barrier_search_failure(double violation)
        : std::runtime_error("barrier: no certified slope after 60 doublings, max violation " +
                             std::to_string(violation)),
          max_violation(violation) {}
};

namespace barrier_detail {

inline BarrierResult build(const std::function<double(double)>& f, double rho0, double rho1,
                           double m_height, double tau, const AnnularGrid& grid,
                           BarrierDirection dir) {
    if (!(rho0 > rho1 && rho1 > 0.0))
        throw std::domain_error("barrier: need rho0 > rho1 > 0");
    if (std::abs(grid.rho_min - rho1) > 1e-12 || std::abs(grid.rho_max - rho0) > 1e-12)
        throw std::domain_error("barrier: grid does not span [rho1, rho0]");
    double f_min = std::numeric_limits<double>::infinity(), f_max = -f_min;
    for (int j = 0; j < grid.n_theta; ++j) {
        const double v = f(grid.theta(j));
        f_min = std::min(f_min, v);
        f_max = std::max(f_max, v);
    }
    const bool upper = dir == BarrierDirection::above;
    // slope satisfying the height constraint at the inner circle
    double alpha = upper ? std::max((m_height - f_min) / (rho0 - rho1), 1.0)
                         : std::min((m_height - f_max) / (rho0 - rho1), -1.0);
    const AnnularGrid fine = grid.refined();
    BarrierResult out;
    for (int k = 0; k <= 60; ++k) {
        out.section = barrier_section(f, alpha, rho0, tau, grid);
        out.report = verify_barrier(out.section, dir, f, rho0);
        const BarrierReport fine_rep =
            verify_barrier(barrier_section(f, alpha, rho0, tau, fine), dir, f, rho0);
        out.report.max_violation = std::max(out.report.max_violation, fine_rep.max_violation);
        out.report.pass = out.report.pass && fine_rep.pass;
        out.report.alpha = alpha;
        out.report.doublings = k;
        out.report.height_margin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < grid.n_theta; ++j) {
            const double edge = out.section.at(0, j);  // inner circle row
            out.report.height_margin =
                std::min(out.report.height_margin, upper ? edge - m_height : m_height - edge);
        }
        if (out.report.pass) {
            out.alpha = alpha;
            return out;
        }
        alpha *= 2.0;
    }
    throw barrier_search_failure(out.report.max_violation);
}

} // namespace barrier_detail

inline BarrierResult build_upper_barrier(const std::function<double(double)>& f, double rho0,
                                         double rho1, double m_height, double tau,
                                         const AnnularGrid& grid) {
    return barrier_detail::build(f, rho0, rho1, m_height, tau, grid, BarrierDirection::above);
}

inline BarrierResult build_lower_barrier(const std::function<double(double)>& f, double rho0,
                                         double rho1, double m_height, double tau,
                                         const AnnularGrid& grid) {
    return barrier_detail::build(f, rho0, rho1, m_height, tau, grid, BarrierDirection::below);
}

// Sample-based entry point. A nonzero slope in the request skips the search
// and certifies that slope as given.
inline BarrierResult build_barrier(const BarrierSpec& spec, const AnnularGrid& grid,
                                   BarrierDirection dir) {
    const auto f = periodic_cubic_interpolant(spec.f);
    if (spec.alpha != 0.0) {
        BarrierResult out;
        out.alpha = spec.alpha;
        out.section = barrier_section(f, spec.alpha, spec.rho0, spec.tau, grid);
        out.report = verify_barrier(out.section, dir, f, spec.rho0);
        const BarrierReport fine = verify_barrier(
            barrier_section(f, spec.alpha, spec.rho0, spec.tau, grid.refined()), dir, f,
            spec.rho0);
        out.report.max_violation = std::max(out.report.max_violation, fine.max_violation);
        out.report.pass = out.report.pass && fine.pass;
        out.report.alpha = spec.alpha;
        return out;
    }
    return dir == BarrierDirection::above
               ? build_upper_barrier(f, spec.rho0, spec.rho1, spec.m_height, spec.tau, grid)
               : build_lower_barrier(f, spec.rho0, spec.rho1, spec.m_height, spec.tau, grid);
}

} // namespace cmclab
