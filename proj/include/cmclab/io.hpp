#pragma once
// io.hpp — deterministic text output: shortest round-trip float formatting,
// CSV/TSV writers for the grid dump formats, and FNV-1a checksums for the
// run manifest. All numeric text goes through std::to_chars, so output bytes
// do not depend on locale or stream state.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "graph_ops.hpp"
#include "sister.hpp"

namespace cmclab {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot write " + path.string());
    out << content;
    if (!out)
        throw io_error("write failed for " + path.string());
}

// Simple row-oriented table with a fixed separator.
class TextTable {
  public:
    explicit TextTable(char sep = ',') : sep_(sep) {}

    void header(const std::vector<std::string>& cols) { append_row(cols); }

    template <class... T>
    void row(const T&... vals) {
        append_row({fmt_any(vals)...});
    }

    const std::string& str() const { return body_; }

  private:
    template <class T>
    static std::string fmt_any(const T& v) {
        if constexpr (std::is_same_v<T, std::string>)
            return v;
        else if constexpr (std::is_convertible_v<T, const char*>)
            return std::string(v);
        else
            return fmt(v);
    }
    void append_row(const std::vector<std::string>& cols) {
        for (size_t k = 0; k < cols.size(); ++k) {
            body_ += cols[k];
            body_ += (k + 1 < cols.size() ? std::string(1, sep_) : std::string());
        }
        body_ += '\n';
    }
    char sep_;
    std::string body_;
};

// Grid dump: rho, theta, sigma, G_rho, G_theta, W, nu, H — rho-major rows.
inline std::string grid_dump_csv(const GridSection& s) {
    const AnnularGrid& g = s.grid;
    const GradientField f = gradient_field_polar(s);
    const std::vector<double> h = mean_curvature(s);
    TextTable t;
    t.header({"rho", "theta", "sigma", "G_rho", "G_theta", "W", "nu", "H"});
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            t.row(g.rho(i), g.theta(j), s.values[idx], f.g[idx].x, f.g[idx].y, f.w[idx], f.nu[idx],
                  h[idx]);
        }
    return t.str();
}

// Metric samples: x, y, z, lambda, g11, g12, g22, g13, g23, g33.
inline std::string metric_samples_csv(const ModelParams& params,
                                      const std::vector<ModelPoint>& points) {
    TextTable t;
    t.header({"x", "y", "z", "lambda", "g11", "g12", "g22", "g13", "g23", "g33"});
    for (const ModelPoint& p : points) {
        const auto g = metric_tensor(params, p);
        t.row(p.x, p.y, p.z, conformal_factor(params, p.x, p.y), g[0][0], g[0][1], g[1][1], g[0][2],
              g[1][2], g[2][2]);
    }
    return t.str();
}

// Surface data with sister columns suffixed _p.
inline std::string surface_data_csv(const SurfaceData& d, const SisterData& sd) {
    const AnnularGrid& g = d.grid;
    TextTable t;
    t.header({"rho", "theta", "g11", "g12", "g22", "S11", "S12", "S21", "S22", "nu", "T1", "T2",
              "g11_p", "g12_p", "g22_p", "S11_p", "S12_p", "S21_p", "S22_p", "nu_p", "T1_p",
              "T2_p"});
    for (int i = 0; i < g.n_rho; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            const Mat2 &gc = d.g_chart[idx], &s = d.shape[idx], &sp = sd.shape[idx];
            t.row(g.rho(i), g.theta(j), gc.a11, gc.a12, gc.a22, s.a11, s.a12, s.a21, s.a22,
                  d.nu[idx], d.killing[idx].x, d.killing[idx].y, gc.a11, gc.a12, gc.a22, sp.a11,
                  sp.a12, sp.a21, sp.a22, sd.nu[idx], sd.killing[idx].x, sd.killing[idx].y);
        }
    return t.str();
}

// Two-column TSV series.
template <class X, class Y>
std::string series_tsv(const std::string& xname, const std::string& yname,
                       const std::vector<X>& xs, const std::vector<Y>& ys) {
    TextTable t('\t');
    t.header({xname, yname});
    for (size_t k = 0; k < xs.size() && k < ys.size(); ++k)
        t.row(xs[k], ys[k]);
    return t.str();
}

} // namespace cmclab
