#pragma once
// grid.hpp — polar annular grids on H^2 and Cartesian patches in the disk
// model, with the node-centered difference stencils shared by the field
// computations.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace cmclab {

// Uniform polar grid on the annulus {rho_min <= rho <= rho_max}, theta
// periodic. Nodes stored rho-major: index = i * n_theta + j.
struct AnnularGrid {
    double rho_min = 0.0, rho_max = 0.0;
    int n_rho = 0, n_theta = 0;

    static AnnularGrid make(double rho_min, double rho_max, int n_rho, int n_theta) {
        if (!(0.0 < rho_min && rho_min < rho_max))
            throw std::domain_error("AnnularGrid: need 0 < rho_min < rho_max");
        if (n_rho < 3 || n_theta < 8)
            throw std::domain_error("AnnularGrid: need n_rho >= 3 and n_theta >= 8");
        return {rho_min, rho_max, n_rho, n_theta};
    }

    double drho() const { return (rho_max - rho_min) / (n_rho - 1); }
    double dtheta() const { return 2.0 * std::acos(-1.0) / n_theta; }
    double rho(int i) const { return rho_min + i * drho(); }
    double theta(int j) const { return j * dtheta(); }
    int wrap(int j) const { return ((j % n_theta) + n_theta) % n_theta; }
    int index(int i, int j) const { return i * n_theta + wrap(j); }
    int size() const { return n_rho * n_theta; }
    bool interior_row(int i) const { return i >= 1 && i <= n_rho - 2; }
    // Cell measure sinh(rho_i) * drho * dtheta.
    double cell_measure(int i) const { return std::sinh(rho(i)) * drho() * dtheta(); }

    AnnularGrid refined() const { return {rho_min, rho_max, 2 * n_rho - 1, 2 * n_theta}; }
};

// Discrete section (height values) over an annular grid.
struct GridSection {
    AnnularGrid grid;
    ModelParams params;
    std::vector<double> values;

    GridSection() = default;
    GridSection(const AnnularGrid& g, const ModelParams& p)
        : grid(g), params(p), values(g.size(), 0.0) {}

    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }

    template <class F>
    static GridSection sample(const AnnularGrid& g, const ModelParams& p, F&& f) {
        GridSection s(g, p);
        for (int i = 0; i < g.n_rho; ++i)
            for (int j = 0; j < g.n_theta; ++j)
                s.at(i, j) = f(g.rho(i), g.theta(j));
        return s;
    }
};

// Node-centered radial derivative: central inside, second-order one-sided at
// the two radial boundary rows.
inline double d_rho(const std::vector<double>& v, const AnnularGrid& g, int i, int j) {
    const double h = g.drho();
    if (i == 0)
        return (-3.0 * v[g.index(0, j)] + 4.0 * v[g.index(1, j)] - v[g.index(2, j)]) / (2.0 * h);
    if (i == g.n_rho - 1)
        return (3.0 * v[g.index(i, j)] - 4.0 * v[g.index(i - 1, j)] + v[g.index(i - 2, j)]) /
               (2.0 * h);
    return (v[g.index(i + 1, j)] - v[g.index(i - 1, j)]) / (2.0 * h);
}

// Node-centered angular derivative, periodic.
inline double d_theta(const std::vector<double>& v, const AnnularGrid& g, int i, int j) {
    return (v[g.index(i, j + 1)] - v[g.index(i, j - 1)]) / (2.0 * g.dtheta());
}

// Uniform Cartesian patch inside D_{-1}; x-major: index = ix * ny + iy.
struct CartesianPatch {
    double x0 = 0.0, y0 = 0.0;  // lower-left corner
    double dx = 0.0, dy = 0.0;
    int nx = 0, ny = 0;

    static CartesianPatch make(double x0, double y0, double dx, double dy, int nx, int ny) {
        if (nx < 3 || ny < 3 || dx <= 0.0 || dy <= 0.0)
            throw std::domain_error("CartesianPatch: bad extents");
        CartesianPatch p{x0, y0, dx, dy, nx, ny};
        for (auto [cx, cy] : {std::pair{x0, y0}, {x0 + (nx - 1) * dx, y0},
                              {x0, y0 + (ny - 1) * dy}, {x0 + (nx - 1) * dx, y0 + (ny - 1) * dy}})
            if (cx * cx + cy * cy >= 1.0)
                throw std::domain_error("CartesianPatch: patch leaves D_{-1}");
        return p;
    }

    double x(int ix) const { return x0 + ix * dx; }
    double y(int iy) const { return y0 + iy * dy; }
    int index(int ix, int iy) const { return ix * ny + iy; }
    int size() const { return nx * ny; }
};

struct PatchSection {
    CartesianPatch patch;
    ModelParams params;
    std::vector<double> values;

    PatchSection() = default;
    PatchSection(const CartesianPatch& p, const ModelParams& mp)
        : patch(p), params(mp), values(p.size(), 0.0) {}

    double& at(int ix, int iy) { return values[patch.index(ix, iy)]; }
    double at(int ix, int iy) const { return values[patch.index(ix, iy)]; }

    template <class F>
    static PatchSection sample(const CartesianPatch& p, const ModelParams& mp, F&& f) {
        PatchSection s(p, mp);
        for (int ix = 0; ix < p.nx; ++ix)
            for (int iy = 0; iy < p.ny; ++iy)
                s.at(ix, iy) = f(p.x(ix), p.y(iy));
        return s;
    }
};

} // namespace cmclab
