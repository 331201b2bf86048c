#pragma once
// solver.hpp — damped Newton solver for the Dirichlet problem
//   Div_{H^2}(G sigma / W) = 2 H0   on an annulus,
// with the divergence-form linearization assembled from the same staggered
// faces as the residual (it is the exact Hessian of the face energy), plus
// continuation in the boundary lift.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "graph_ops.hpp"
#include "radial.hpp"

namespace cmclab {

struct SolverConfig {
    double newton_tol = 1e-10;   // max-norm of 2H - 2H0
    int max_newton = 50;
    double damping_min = 1.0 / 64.0;
    int continuation_steps = 4;
    double fd_epsilon = 1e-6;
    double linear_rel_tol = 1e-12;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    double ellipticity_floor = 0.0;
    double min_w = 0.0, max_w = 0.0;
    double max_abs_u = 0.0, max_grad = 0.0;
    double wall_time_sec = 0.0;
    std::vector<double> residual_history;
    std::string failure;
};

struct solve_error : std::runtime_error {
    SolveReport report;
    explicit solve_error(const std::string& what, SolveReport r = {})
        : std::runtime_error(what), report(std::move(r)) {}
};

// Min over nodes of (1 - |chi|^2)/W, the per-node ellipticity floor of the
// linearized coefficient P(X) = (X - chi (X, chi))/W.
inline double ellipticity_certificate(const GridSection& s) {
    const GradientField f = gradient_field_polar(s);
    double floor_val = std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < s.grid.size(); ++idx) {
        const Vec2 chi = f.chi(idx);
        const double v = (1.0 - norm2(chi)) / f.w[idx];
        if (!std::isfinite(v))
            return std::numeric_limits<double>::quiet_NaN();
        floor_val = std::min(floor_val, v);
    }
    return floor_val;
}

// Same floor over the staggered faces (the values entering the assembly).
inline double sample_ellipticity_floor(const GridSection& s) {
    double floor_val = std::numeric_limits<double>::infinity();
    for_each_cell_sample(s.grid, s.params.tau, [&](const CellSample& f) {
        Vec2 g = sample_gradient(f, s.values);
        g.y += f.b_theta;
        const double w = std::sqrt(1.0 + norm2(g));
        floor_val = std::min(floor_val, (1.0 - norm2(g) / (w * w)) / w);
    });
    return floor_val;
}

// Sparse divergence-form operator over the interior nodes, Dirichlet rows
// eliminated into a boundary coupling block.
struct LinearizedOperator {
    AnnularGrid grid;
    Eigen::SparseMatrix<double> interior;  // n_int x n_int, symmetric
    Eigen::SparseMatrix<double> boundary;  // n_int x n_bdry
    double ellipticity_floor = 0.0;

    int n_interior() const { return (grid.n_rho - 2) * grid.n_theta; }
    int n_boundary() const { return 2 * grid.n_theta; }

    // interior unknown id, or -1
    int interior_id(int node) const {
        const int i = node / grid.n_theta;
        return (i >= 1 && i <= grid.n_rho - 2) ? node - grid.n_theta : -1;
    }
    // boundary id: row 0 -> [0, n_theta), row n_rho-1 -> [n_theta, 2 n_theta)
    int boundary_id(int node) const {
        const int i = node / grid.n_theta;
        if (i == 0)
            return node;
        if (i == grid.n_rho - 1)
            return grid.n_theta + (node - i * grid.n_theta);
        return -1;
    }
};

// Assembles sum_f w_f D_f^T P_f D_f with P = (I - chi chi^T)/W at face values.
inline LinearizedOperator assemble_linearization(const GridSection& s) {
    const AnnularGrid& g = s.grid;
    LinearizedOperator op;
    op.grid = g;
    op.ellipticity_floor = ellipticity_certificate(s);
    if (!(op.ellipticity_floor > 0.0) || !std::isfinite(op.ellipticity_floor))
        throw solve_error("assemble_linearization: ellipticity floor not positive");
    std::vector<Eigen::Triplet<double>> ti, tb;
    ti.reserve(static_cast<size_t>(g.size()) * 24);
    for_each_cell_sample(g, s.params.tau, [&](const CellSample& f) {
        Vec2 G = sample_gradient(f, s.values);
        G.y += f.b_theta;
        const double w = std::sqrt(1.0 + norm2(G));
        const Vec2 chi = G / w;
        // P coef[l] for each stencil slot
        std::array<Vec2, 8> pc;
        for (int l = 0; l < f.count; ++l)
            pc[l] = (f.coef[l] - dot(f.coef[l], chi) * chi) / w;
        for (int k = 0; k < f.count; ++k) {
            const int row = op.interior_id(f.node[k]);
            if (row < 0)
                continue;
            for (int l = 0; l < f.count; ++l) {
                const double val = f.weight * dot(f.coef[k], pc[l]);
                const int col = op.interior_id(f.node[l]);
                if (col >= 0)
                    ti.emplace_back(row, col, val);
                else
                    tb.emplace_back(row, op.boundary_id(f.node[l]), val);
            }
        }
    });
    op.interior.resize(op.n_interior(), op.n_interior());
    op.interior.setFromTriplets(ti.begin(), ti.end());
    op.boundary.resize(op.n_interior(), op.n_boundary());
    op.boundary.setFromTriplets(tb.begin(), tb.end());
    return op;
}

namespace solver_detail {

// Gradient of the cell energy sum_q w_q W_q - sum_a rhs_a m_a sigma_a at the
// interior nodes; zero of this gradient is the discrete equation
// Div(G sigma / W) = rhs with rhs = 2 H0 by default.
inline void energy_gradient(const GridSection& s, double h0, const std::vector<double>& mass,
                            std::vector<double>& grad,
                            const std::vector<double>* rhs = nullptr) {
    const AnnularGrid& g = s.grid;
    grad.assign(g.size(), 0.0);
    for_each_cell_sample(g, s.params.tau, [&](const CellSample& f) {
        Vec2 G = sample_gradient(f, s.values);
        G.y += f.b_theta;
        const Vec2 chi = G / std::sqrt(1.0 + norm2(G));
        for (int k = 0; k < f.count; ++k)
            grad[f.node[k]] += f.weight * dot(chi, f.coef[k]);
    });
    for (int i = 1; i + 1 < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            grad[idx] += (rhs ? (*rhs)[idx] : 2.0 * h0) * mass[idx];
        }
}

// Max over interior nodes of |2H - 2H0| derived from the energy gradient.
inline double residual_norm(const GridSection& s, const std::vector<double>& mass,
                            const std::vector<double>& grad) {
    const AnnularGrid& g = s.grid;
    double r = 0.0;
    for (int i = 1; i + 1 < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            r = std::max(r, std::abs(grad[idx] / mass[idx]));
        }
    return r;
}

} // namespace solver_detail

// Boundary traces for the two circles, one value per theta node.
struct BoundaryTraces {
    std::vector<double> inner, outer;
};

inline GridSection blend_initial_guess(const AnnularGrid& g, const ModelParams& params,
                                       const BoundaryTraces& b) {
    GridSection s(g, params);
    for (int i = 0; i < g.n_rho; ++i) {
        const double t = (g.rho(i) - g.rho_min) / (g.rho_max - g.rho_min);
        for (int j = 0; j < g.n_theta; ++j)
            s.at(i, j) = (1.0 - t) * b.inner[j] + t * b.outer[j];
    }
    return s;
}

// Damped Newton iteration on the discrete equation; boundary rows are pinned
// to the traces, the linearization is refactorized every step.
inline std::pair<GridSection, SolveReport>
newton_solve_dirichlet(const AnnularGrid& grid, const BoundaryTraces& traces, double h0,
                       const ModelParams& params, const SolverConfig& config,
                       const GridSection* initial = nullptr,
                       const std::vector<double>* rhs = nullptr) {
    const auto t_start = std::chrono::steady_clock::now();
    if ((int)traces.inner.size() != grid.n_theta || (int)traces.outer.size() != grid.n_theta)
        throw std::invalid_argument("newton_solve_dirichlet: trace size mismatch");
    for (double v : traces.inner)
        if (!std::isfinite(v))
            throw std::invalid_argument("newton_solve_dirichlet: non-finite inner trace");
    for (double v : traces.outer)
        if (!std::isfinite(v))
            throw std::invalid_argument("newton_solve_dirichlet: non-finite outer trace");

    GridSection s = initial ? *initial : blend_initial_guess(grid, params, traces);
    s.grid = grid;
    s.params = params;
    for (int j = 0; j < grid.n_theta; ++j) {
        s.at(0, j) = traces.inner[j];
        s.at(grid.n_rho - 1, j) = traces.outer[j];
    }

    SolveReport rep;
    const std::vector<double> mass = node_mass(grid);
    std::vector<double> grad;
    solver_detail::energy_gradient(s, h0, mass, grad, rhs);
    double res = solver_detail::residual_norm(s, mass, grad);
    rep.residual_history.push_back(res);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    bool analyzed = false;
    const int n_int = (grid.n_rho - 2) * grid.n_theta;

    auto finish = [&](bool ok, const std::string& why) {
        rep.converged = ok;
        rep.final_residual = res;
        rep.failure = why;
        const GradientField f = gradient_field_polar(s);
        rep.min_w = *std::min_element(f.w.begin(), f.w.end());
        rep.max_w = *std::max_element(f.w.begin(), f.w.end());
        rep.ellipticity_floor = ellipticity_certificate(s);
        for (double v : s.values)
            rep.max_abs_u = std::max(rep.max_abs_u, std::abs(v));
        for (const Vec2& gv : f.g)
            rep.max_grad = std::max(rep.max_grad, norm(gv));
        rep.wall_time_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    while (res > config.newton_tol) {
        if (rep.iterations >= config.max_newton) {
            finish(false, "newton iteration limit reached");
            throw solve_error("newton_solve_dirichlet: no convergence", rep);
        }
        LinearizedOperator op = assemble_linearization(s);
        if (!analyzed) {
            ldlt.analyzePattern(op.interior);
            analyzed = true;
        }
        ldlt.factorize(op.interior);
        if (ldlt.info() != Eigen::Success) {
            finish(false, "factorization failed");
            throw solve_error("newton_solve_dirichlet: factorization failed", rep);
        }
        Eigen::VectorXd neg_grad(n_int);
        for (int i = 1; i + 1 < grid.n_rho; ++i)
            for (int j = 0; j < grid.n_theta; ++j)
                neg_grad[op.interior_id(grid.index(i, j))] = -grad[grid.index(i, j)];
        Eigen::VectorXd delta = ldlt.solve(neg_grad);
        double lin_res = (op.interior * delta - neg_grad).lpNorm<Eigen::Infinity>();
        const double rhs_norm = neg_grad.lpNorm<Eigen::Infinity>();
        if (rhs_norm > 0.0 && lin_res / rhs_norm > config.linear_rel_tol) {
            const Eigen::VectorXd corr = ldlt.solve(neg_grad - op.interior * delta);
            delta += corr;
            lin_res = (op.interior * delta - neg_grad).lpNorm<Eigen::Infinity>();
            if (lin_res / rhs_norm > 10.0 * config.linear_rel_tol) {
                finish(false, "linear solve tolerance not met");
                throw solve_error("newton_solve_dirichlet: linear solve tolerance not met", rep);
            }
        }
        // damped update
        double step = 1.0;
        GridSection trial = s;
        std::vector<double> trial_grad;
        double trial_res = 0.0;
        for (;;) {
            for (int i = 1; i + 1 < grid.n_rho; ++i)
                for (int j = 0; j < grid.n_theta; ++j) {
                    const int idx = grid.index(i, j);
                    trial.values[idx] = s.values[idx] + step * delta[op.interior_id(idx)];
                }
            solver_detail::energy_gradient(trial, h0, mass, trial_grad, rhs);
            trial_res = solver_detail::residual_norm(trial, mass, trial_grad);
            if (std::isfinite(trial_res) && trial_res < res)
                break;
            step *= 0.5;
            if (step < config.damping_min) {
                finish(false, "damping exhausted");
                throw solve_error("newton_solve_dirichlet: damping exhausted", rep);
            }
        }
        s.values.swap(trial.values);
        grad.swap(trial_grad);
        res = trial_res;
        rep.residual_history.push_back(res);
        ++rep.iterations;
    }
    finish(true, "");
    return {std::move(s), std::move(rep)};
}

// Height trace provider: callable of (rho, theta).
using TraceProvider = std::function<double(double, double)>;

inline BoundaryTraces traces_from_provider(const AnnularGrid& g, const TraceProvider& sigma,
                                           double inner_lift = 0.0) {
    BoundaryTraces b;
    b.inner.resize(g.n_theta);
    b.outer.resize(g.n_theta);
    for (int j = 0; j < g.n_theta; ++j) {
        b.inner[j] = sigma(g.rho_min, g.theta(j)) + inner_lift;
        b.outer[j] = sigma(g.rho_max, g.theta(j));
    }
    return b;
}

// Boundary-lift continuation: solves u = sigma + t on the inner circle and
// u = sigma on the outer circle by stepping the lift from 0 to t, each step
// warm-started from the previous one.
inline std::pair<GridSection, SolveReport>
continuation_solve(const TraceProvider& sigma, double t, const AnnularGrid& grid,
                   const ModelParams& params, const SolverConfig& config,
                   const GridSection* warm_start = nullptr) {
    const int steps = std::max(1, config.continuation_steps);
    GridSection current;
    SolveReport rep;
    bool have_current = false;
    if (warm_start) {
        current = *warm_start;
        have_current = true;
    }
    for (int k = (t == 0.0 ? steps : 1); k <= steps; ++k) {
        const double tk = t * k / steps;
        const BoundaryTraces b = traces_from_provider(grid, sigma, tk);
        auto [sol, r] =
            newton_solve_dirichlet(grid, b, params.h0, params, config,
                                   have_current ? &current : nullptr);
        current = std::move(sol);
        rep = std::move(r);
        have_current = true;
    }
    return {std::move(current), std::move(rep)};
}

// Doubling-then-bisection probe for the largest certified boundary lift.
inline double probe_max_lift(const TraceProvider& sigma, const AnnularGrid& grid,
                             const ModelParams& params, const SolverConfig& config,
                             double t_cap) {
    auto works = [&](double t) {
        try {
            continuation_solve(sigma, t, grid, params, config);
            return true;
        } catch (const solve_error&) {
            return false;
        }
    };
    double good = 0.0, t = std::min(t_cap, 0.01);
    while (t <= t_cap && works(t)) {
        good = t;
        if (t == t_cap)
            return good;
        t = std::min(2.0 * t, t_cap);
    }
    if (good == 0.0)
        return 0.0;
    double bad = t;
    for (int k = 0; k < 6; ++k) {
        const double mid = 0.5 * (good + bad);
        (works(mid) ? good : bad) = mid;
    }
    return good;
}

} // namespace cmclab
