#pragma once
// runner.hpp — experiment orchestration behind the CLI: a versioned JSON
// config schema (floating parameters as decimal strings, unknown fields
// rejected), one entry point per command, and a run manifest listing every
// output file with its checksum.
//
// Data outputs (CSV/TSV/JSON) are byte-deterministic for a fixed config and
// seed; the manifest additionally carries wall-clock times and is the one
// file excluded from byte comparisons.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "barrier.hpp"
#include "estimates.hpp"
#include "foliation.hpp"
#include "io.hpp"
#include "version.hpp"

namespace cmclab {

using nlohmann::json;

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfg {

inline void check_keys(const json& obj, const std::string& ctx,
                       const std::set<std::string>& allowed,
                       const std::set<std::string>& required) {
    if (!obj.is_object())
        throw config_error(ctx + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw config_error(ctx + ": unknown field '" + it.key() + "'");
    for (const std::string& k : required)
        if (!obj.contains(k))
            throw config_error(ctx + ": missing field '" + k + "'");
}

// Floating parameters are decimal strings; parsed locale-independently.
inline double decimal(const json& v, const std::string& ctx) {
    if (!v.is_string())
        throw config_error(ctx + ": expected a decimal string");
    const std::string s = v.get<std::string>();
    double out = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw config_error(ctx + ": cannot parse decimal '" + s + "'");
    return out;
}

inline double decimal_or(const json& obj, const std::string& key, double fallback) {
    return obj.contains(key) ? decimal(obj.at(key), key) : fallback;
}

inline int integer(const json& v, const std::string& ctx) {
    if (!v.is_number_integer())
        throw config_error(ctx + ": expected an integer");
    return v.get<int>();
}

inline int integer_or(const json& obj, const std::string& key, int fallback) {
    return obj.contains(key) ? integer(obj.at(key), key) : fallback;
}

inline std::vector<double> decimal_array(const json& v, const std::string& ctx) {
    if (!v.is_array())
        throw config_error(ctx + ": expected an array of decimal strings");
    std::vector<double> out;
    for (const auto& e : v)
        out.push_back(decimal(e, ctx));
    return out;
}

} // namespace cfg

struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    ModelParams params = ModelParams::make(-1.0, 0.0, 0.5);
    SolverConfig solver;
    json raw;
};

struct ManifestEntry {
    std::string file;
    std::uint64_t bytes = 0;
    std::uint64_t checksum = 0;
};

struct RunManifest {
    std::string command;
    std::uint64_t config_hash = 0;
    std::string version;
    double wall_time_sec = 0.0;
    std::vector<ManifestEntry> outputs;
};

inline ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    cfg::check_keys(j, "config",
                    {"schema", "command", "seed", "out", "params", "solver", "grid", "boundary",
                     "barrier", "foliation", "derivative", "halfspace", "convergence", "audit",
                     "sister"},
                    {"schema", "command"});
    if (j.at("schema").get<std::string>() != "cmclab/1")
        throw config_error("config: unsupported schema (want cmclab/1)");
    ExperimentConfig c;
    c.command = j.at("command").get<std::string>();
    static const std::set<std::string> commands = {"solve",    "barrier",    "foliate",
                                                   "derivative", "sister",   "audit",
                                                   "halfspace", "convergence"};
    if (!commands.count(c.command))
        throw config_error("config: unknown command '" + c.command + "'");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw config_error("config: seed must be an integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("out"))
        c.out_dir = j["out"].get<std::string>();
    if (j.contains("params")) {
        cfg::check_keys(j["params"], "params", {"kappa", "tau", "h0"}, {});
        const double kappa = cfg::decimal_or(j["params"], "kappa", -1.0);
        const double tau = cfg::decimal_or(j["params"], "tau", 0.0);
        const double h0 = cfg::decimal_or(j["params"], "h0", 0.5);
        c.params = ModelParams::make(kappa, tau, h0);
    }
    if (j.contains("solver")) {
        cfg::check_keys(j["solver"], "solver",
                        {"newton_tol", "max_newton", "damping_min", "continuation_steps",
                         "fd_epsilon", "linear_rel_tol"},
                        {});
        const json& s = j["solver"];
        c.solver.newton_tol = cfg::decimal_or(s, "newton_tol", c.solver.newton_tol);
        c.solver.max_newton = cfg::integer_or(s, "max_newton", c.solver.max_newton);
        c.solver.damping_min = cfg::decimal_or(s, "damping_min", c.solver.damping_min);
        c.solver.continuation_steps =
            cfg::integer_or(s, "continuation_steps", c.solver.continuation_steps);
        c.solver.fd_epsilon = cfg::decimal_or(s, "fd_epsilon", c.solver.fd_epsilon);
        c.solver.linear_rel_tol = cfg::decimal_or(s, "linear_rel_tol", c.solver.linear_rel_tol);
    }
    c.raw = std::move(j);
    return c;
}

namespace run_detail {

struct OutputSink {
    std::filesystem::path dir;
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    void add(const std::string& name, std::string content) {
        files.emplace_back(name, std::move(content));
    }
};

inline AnnularGrid grid_from_config(const json& j) {
    cfg::check_keys(j, "grid", {"rho_min", "rho_max", "n_rho", "n_theta"},
                    {"rho_min", "rho_max", "n_rho", "n_theta"});
    return AnnularGrid::make(cfg::decimal(j.at("rho_min"), "grid.rho_min"),
                             cfg::decimal(j.at("rho_max"), "grid.rho_max"),
                             cfg::integer(j.at("n_rho"), "grid.n_rho"),
                             cfg::integer(j.at("n_theta"), "grid.n_theta"));
}

// Boundary provider over (rho, theta). The radial oracle kind carries its own
// validity range.
inline TraceProvider provider_from_config(const json& j, const ModelParams& params,
                                          double rho_min, double rho_max) {
    cfg::check_keys(j, "boundary",
                    {"kind", "c", "regular_at_zero", "rho_anchor", "u_anchor", "value", "lift"},
                    {"kind"});
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "radial_oracle") {
        const bool regular = j.contains("regular_at_zero") ? j["regular_at_zero"].get<bool>() : true;
        const double c = cfg::decimal_or(j, "c", 0.0);
        const double anchor_rho = cfg::decimal_or(j, "rho_anchor", rho_min);
        const double anchor_u = cfg::decimal_or(j, "u_anchor", 0.0);
        auto profile = std::make_shared<RadialProfile>(
            radial_ode_oracle(params, rho_min, rho_max, regular, c, anchor_rho, anchor_u));
        return [profile](double rho, double) { return profile->u(rho); };
    }
    if (kind == "constant") {
        const double v = cfg::decimal_or(j, "value", 0.0);
        return [v](double, double) { return v; };
    }
    throw config_error("boundary: unknown kind '" + kind + "'");
}

inline json solve_report_json(const SolveReport& rep) {
    json out;
    out["converged"] = rep.converged;
    out["iterations"] = rep.iterations;
    out["final_residual"] = rep.final_residual;
    out["ellipticity_floor"] = rep.ellipticity_floor;
    out["min_w"] = rep.min_w;
    out["max_w"] = rep.max_w;
    out["max_abs_u"] = rep.max_abs_u;
    out["max_grad"] = rep.max_grad;
    out["residual_history"] = rep.residual_history;
    if (!rep.failure.empty())
        out["failure"] = rep.failure;
    return out;
}

inline BoundaryTraces traces_from_config(const json& j, const ExperimentConfig& c,
                                         const AnnularGrid& grid) {
    if (j.contains("kind") && j.at("kind").get<std::string>() == "samples") {
        cfg::check_keys(j, "boundary", {"kind", "inner", "outer"}, {"kind", "inner", "outer"});
        BoundaryTraces traces;
        traces.inner = cfg::decimal_array(j.at("inner"), "boundary.inner");
        traces.outer = cfg::decimal_array(j.at("outer"), "boundary.outer");
        if ((int)traces.inner.size() != grid.n_theta || (int)traces.outer.size() != grid.n_theta)
            throw config_error("boundary: samples must have n_theta entries per circle");
        return traces;
    }
    const TraceProvider sigma = provider_from_config(j, c.params, grid.rho_min, grid.rho_max);
    const double lift = j.contains("lift") ? cfg::decimal(j.at("lift"), "boundary.lift") : 0.0;
    return traces_from_provider(grid, sigma, lift);
}

inline void cmd_solve(const ExperimentConfig& c, OutputSink& sink) {
    const AnnularGrid grid = grid_from_config(c.raw.at("grid"));
    const BoundaryTraces traces = traces_from_config(c.raw.at("boundary"), c, grid);
    auto [sol, rep] = newton_solve_dirichlet(grid, traces, c.params.h0, c.params, c.solver);
    sink.add("solution.csv", grid_dump_csv(sol));
    sink.add("solve_report.json", solve_report_json(rep).dump(2) + "\n");
}

inline void cmd_barrier(const ExperimentConfig& c, OutputSink& sink) {
    const json& b = c.raw.at("barrier");
    cfg::check_keys(b, "barrier",
                    {"rho0", "rho1", "M", "tau", "f", "direction", "n_rho", "n_theta", "alpha"},
                    {"rho0", "rho1", "M", "tau", "f", "direction"});
    BarrierSpec spec;
    spec.rho0 = cfg::decimal(b.at("rho0"), "barrier.rho0");
    spec.rho1 = cfg::decimal(b.at("rho1"), "barrier.rho1");
    spec.m_height = cfg::decimal(b.at("M"), "barrier.M");
    spec.tau = cfg::decimal(b.at("tau"), "barrier.tau");
    spec.f = cfg::decimal_array(b.at("f"), "barrier.f");
    spec.alpha = cfg::decimal_or(b, "alpha", 0.0);  // nonzero: verify this slope only
    const std::string dir = b.at("direction").get<std::string>();
    const int n_rho = cfg::integer_or(b, "n_rho", 65);
    const int n_theta = cfg::integer_or(b, "n_theta", (int)spec.f.size());
    if ((int)spec.f.size() != n_theta)
        throw config_error("barrier: f must have n_theta samples");
    const AnnularGrid grid = AnnularGrid::make(spec.rho1, spec.rho0, n_rho, n_theta);
    if (dir != "above" && dir != "below")
        throw config_error("barrier: direction must be 'above' or 'below'");
    const BarrierResult res = build_barrier(
        spec, grid, dir == "above" ? BarrierDirection::above : BarrierDirection::below);
    json out;
    out["alpha"] = res.alpha;
    out["max_violation"] = res.report.max_violation;
    out["pass"] = res.report.pass;
    out["min_2h"] = res.report.min_2h;
    out["max_2h"] = res.report.max_2h;
    out["doublings"] = res.report.doublings;
    out["height_margin"] = res.report.height_margin;
    out["boundary_trace_error"] = res.report.boundary_trace_error;
    sink.add("barrier.json", out.dump(2) + "\n");
    sink.add("barrier.csv", grid_dump_csv(res.section));
}

struct FoliationSetup {
    std::vector<AnnularGrid> grids;
    TraceProvider sigma;
    double delta = 0.0;
    int t_count = 5;
    double probe_result = -1.0;
};

inline FoliationSetup foliation_from_config(const ExperimentConfig& c) {
    const json& f = c.raw.at("foliation");
    cfg::check_keys(f, "foliation",
                    {"rho0", "radii", "n_rho_first", "n_theta", "delta", "t_count", "probe_cap"},
                    {"rho0", "radii", "n_rho_first", "n_theta", "t_count"});
    FoliationSetup setup;
    const double rho0 = cfg::decimal(f.at("rho0"), "foliation.rho0");
    const std::vector<double> radii = cfg::decimal_array(f.at("radii"), "foliation.radii");
    setup.grids = nested_annuli(rho0, radii, cfg::integer(f.at("n_rho_first"), "n_rho_first"),
                                cfg::integer(f.at("n_theta"), "n_theta"));
    setup.t_count = cfg::integer(f.at("t_count"), "t_count");
    setup.sigma = provider_from_config(c.raw.at("boundary"), c.params, rho0,
                                       setup.grids.back().rho_max);
    if (f.contains("delta")) {
        setup.delta = cfg::decimal(f.at("delta"), "foliation.delta");
    } else {
        const double cap = cfg::decimal_or(f, "probe_cap", 0.5);
        setup.probe_result =
            probe_max_lift(setup.sigma, setup.grids.front(), c.params, c.solver, cap);
        setup.delta = 0.5 * setup.probe_result;
        if (!(setup.delta > 0.0))
            throw solve_error("foliate: lift probe certified no positive lift");
    }
    return setup;
}

inline json family_json(const ContinuationFamily& fam, const FoliationSetup& setup) {
    json out;
    out["delta"] = fam.delta;
    out["lifts"] = fam.lifts;
    json radii = json::array();
    for (const AnnularGrid& g : fam.grids)
        radii.push_back(g.rho_max);
    out["radii"] = radii;
    if (setup.probe_result >= 0.0)
        out["probe_certified_lift"] = setup.probe_result;
    json audits = json::array();
    for (const SandwichAudit& a : fam.audits) {
        audits.push_back({{"max_order_violation", a.max_order_violation},
                          {"max_lift_violation", a.max_lift_violation}});
    }
    out["sandwich_audits"] = audits;
    out["gap_by_lift_and_radius"] = fam.gap;
    return out;
}

inline void cmd_foliate(const ExperimentConfig& c, OutputSink& sink) {
    FoliationSetup setup = foliation_from_config(c);
    ContinuationFamily fam =
        build_foliation(setup.sigma, setup.delta, setup.grids, setup.t_count, c.params, c.solver);
    sink.add("foliation.json", family_json(fam, setup).dump(2) + "\n");
    std::vector<double> ns;
    for (size_t n = 0; n < fam.grids.size(); ++n)
        ns.push_back(fam.grids[n].rho_max);
    sink.add("gap_series.tsv", series_tsv("outer_radius", "gap", ns, fam.gap.back()));
    for (size_t n = 0; n < fam.grids.size(); ++n)
        for (size_t k = 0; k < fam.lifts.size(); ++k)
            sink.add("u_t" + std::to_string(k) + "_n" + std::to_string(n) + ".csv",
                     grid_dump_csv(fam.u[n][k]));
}

inline void cmd_derivative(const ExperimentConfig& c, OutputSink& sink) {
    FoliationSetup setup = foliation_from_config(c);
    const json& d = c.raw.at("derivative");
    cfg::check_keys(d, "derivative", {"t_bar", "eps"}, {"t_bar", "eps"});
    const double t_bar = cfg::decimal(d.at("t_bar"), "derivative.t_bar");
    const std::vector<double> eps = cfg::decimal_array(d.at("eps"), "derivative.eps");
    ContinuationFamily fam =
        build_foliation(setup.sigma, setup.delta, setup.grids, setup.t_count, c.params, c.solver);
    DerivativeField df = numeric_derivative(fam, t_bar, eps);
    json out;
    out["t_bar"] = df.t_bar;
    out["eps"] = df.eps;
    out["residual"] = df.residual;
    out["dev_from_one"] = df.dev_from_one;
    json flags = json::array();
    for (char f : df.noise_flag)
        flags.push_back((bool)f);
    out["noise_flag"] = flags;
    out["richardson_residual"] = df.richardson_residual;
    out["truncation_estimate"] = df.truncation_estimate;
    out["dev_by_n"] = df.dev_by_n;
    sink.add("derivative.json", out.dump(2) + "\n");
    sink.add("eps_residual.tsv", series_tsv("eps", "residual", df.eps, df.residual));
    std::vector<double> ns;
    for (const AnnularGrid& g : fam.grids)
        ns.push_back(g.rho_max);
    sink.add("n_dev.tsv", series_tsv("outer_radius", "dev_from_one", ns, df.dev_by_n));
}

inline void cmd_sister(const ExperimentConfig& c, OutputSink& sink) {
    const AnnularGrid grid = grid_from_config(c.raw.at("grid"));
    const TraceProvider sigma =
        provider_from_config(c.raw.at("boundary"), c.params, grid.rho_min, grid.rho_max);
    const BoundaryTraces traces = traces_from_provider(grid, sigma);
    auto [sol, rep] = newton_solve_dirichlet(grid, traces, c.params.h0, c.params, c.solver);
    const SurfaceData data = extract_surface_data(sol, c.solver.fd_epsilon);
    const SisterData sis = sister(data, c.params);
    const FlatChart chart = flat_chart(sis);
    const std::vector<double> pot_orig = jacobi_potential(data, c.params, false);
    const std::vector<double> pot_sis = jacobi_potential(sis, c.params, true);
    double pot_gap = 0.0, tr_gap = 0.0, norm_gap = 0.0, k_max = 0.0;
    const AnnularGrid& g = grid;
    for (int i = 2; i < g.n_rho - 2; ++i)
        for (int j = 0; j < g.n_theta; ++j) {
            const int idx = g.index(i, j);
            pot_gap = std::max(pot_gap, std::abs(pot_orig[idx] - pot_sis[idx]));
            tr_gap = std::max(tr_gap, std::abs(data.shape[idx].trace() - 2.0 * c.params.h0));
            const Mat2 shifted = data.shape[idx] - 0.5 * Mat2::identity();
            norm_gap = std::max(norm_gap,
                                std::abs(sis.shape[idx].frob2() - shifted.frob2()));
            k_max = std::max(k_max, std::abs(chart.gauss_curvature[idx]));
        }
    json out;
    out["max_potential_gap"] = pot_gap;
    out["max_trace_gap"] = tr_gap;
    out["max_rotation_norm_residual"] = norm_gap;
    out["max_flat_gauss_curvature"] = k_max;
    out["theta"] = c.params.theta;
    out["tau_prime"] = c.params.tau_prime;
    sink.add("sister.json", out.dump(2) + "\n");
    sink.add("surface_data.csv", surface_data_csv(data, sis));
    sink.add("solve_report.json", solve_report_json(rep).dump(2) + "\n");
}

inline void cmd_audit(const ExperimentConfig& c, OutputSink& sink) {
    const json& a = c.raw.contains("audit") ? c.raw.at("audit") : json::object();
    if (!a.empty())
        cfg::check_keys(a, "audit", {"samples"}, {});
    const int samples = cfg::integer_or(a, "samples", 10000);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> unit(-0.6, 0.6);
    std::uniform_real_distribution<double> zdist(-2.0, 2.0);
    const std::vector<std::pair<double, double>> cases = {{-1.0, 0.0}, {-1.0, 0.5}, {0.0, 0.5}};
    json out = json::array();
    std::vector<ModelPoint> dump_points;
    for (auto [kappa, tau] : cases) {
        const ModelParams p = ModelParams::make(kappa, tau, 0.5);
        double frame_res = 0.0, dual_res = 0.0, scale_res = 0.0;
        for (int k = 0; k < samples; ++k) {
            const ModelPoint q{unit(rng), unit(rng), zdist(rng)};
            const Frame fr = orthonormal_frame(p, q);
            const TangentVector basis[3] = {fr.f1, fr.f2, fr.xi};
            for (int aI = 0; aI < 3; ++aI)
                for (int bI = 0; bI < 3; ++bI)
                    frame_res = std::max(frame_res,
                                         std::abs(metric_eval(p, q, basis[aI], basis[bI]) -
                                                  (aI == bI ? 1.0 : 0.0)));
            const TangentVector zeta = grad_z(p, q);
            const TangentVector v{zdist(rng), zdist(rng), zdist(rng)};
            dual_res = std::max(dual_res, std::abs(metric_eval(p, q, zeta, v) - v.z));
            for (double mu : {0.5, 2.0, 3.0}) {
                const auto [img, tp] = scaling_map(mu, q, p);
                const TangentVector u{zdist(rng), zdist(rng), zdist(rng)};
                const TangentVector w{zdist(rng), zdist(rng), zdist(rng)};
                const TangentVector mu_u{mu * u.x, mu * u.y, mu * u.z};
                const TangentVector mu_w{mu * w.x, mu * w.y, mu * w.z};
                scale_res = std::max(scale_res,
                                     std::abs(metric_eval(tp, img, mu_u, mu_w) -
                                              mu * mu * metric_eval(p, q, u, w)));
            }
            if (dump_points.size() < 32)
                dump_points.push_back(q);
        }
        out.push_back({{"kappa", kappa},
                       {"tau", tau},
                       {"frame_residual", frame_res},
                       {"duality_residual", dual_res},
                       {"scaling_residual", scale_res}});
    }
    json report;
    report["samples"] = samples;
    report["cases"] = out;
    sink.add("audit.json", report.dump(2) + "\n");
    sink.add("metric_samples.csv", metric_samples_csv(ModelParams::make(-1.0, 0.5, 0.5), dump_points));

    // gradient-estimate audits on a reference radial graph
    {
        const ModelParams p = ModelParams::make(-1.0, 0.0, 0.5);
        const RadialProfile prof = radial_ode_oracle(p, 0.5, 2.5, true, 0.0, 0.5, 0.5);
        const TraceProvider sigma = [&prof](double rho, double) { return prof.u(rho); };
        const AnnularGrid g = AnnularGrid::make(0.5, 2.5, 49, 48);
        auto [sol, rep] =
            newton_solve_dirichlet(g, traces_from_provider(g, sigma), 0.5, p, c.solver);
        const SurfaceData d = extract_surface_data(sol, c.solver.fd_epsilon);
        const BoundaryGradientReport brep =
            boundary_gradient_audit(sol, d, {1.0, 2.0, 4.0, 8.0}, {0.6, 0.7, 0.8});
        const InteriorGradientReport irep = interior_gradient_audit(
            sol, d, g.n_rho / 2, 7, 0.9, {2.0, 4.0, 8.0, 16.0}, {0.5, 0.6, 0.7});
        const HeightGradientReport hrep = height_gradient_estimates(sol, d, g.n_rho / 2, 0);
        json est;
        est["boundary"] = {{"certified", brep.certified},
                           {"params", {{"alpha", brep.alpha}, {"nu0", brep.nu0}}},
                           {"measured", brep.measured_sup_w},
                           {"bound", brep.bound}};
        est["interior"] = {{"certified", irep.certified},
                           {"params", {{"K", irep.k_exponent}, {"nu1", irep.nu1}}},
                           {"measured", irep.w_center},
                           {"bound", irep.bound}};
        est["height_identity"] = {{"certified", hrep.identity_residual < 1e-10},
                                  {"params", {{"center_row", g.n_rho / 2}}},
                                  {"measured", hrep.identity_residual},
                                  {"bound", 1e-10}};
        est["distance_squared"] = {{"certified", hrep.d2_bound_defect <= 1e-10},
                                   {"params", {{"horizontal_defect", hrep.horizontal_defect}}},
                                   {"measured", hrep.d2_bound_defect},
                                   {"bound", 0.0}};
        est["laplacian_bounds"] = {{"max_lap_h", hrep.max_lap_h},
                                   {"max_lap_d2", hrep.max_lap_d2}};
        sink.add("estimates.json", est.dump(2) + "\n");
    }
}

inline void cmd_halfspace(const ExperimentConfig& c, OutputSink& sink) {
    FoliationSetup setup = foliation_from_config(c);
    const json& h = c.raw.at("halfspace");
    cfg::check_keys(h, "halfspace", {"competitor_kind", "t0", "well_oriented", "cmc_tol"},
                    {"competitor_kind"});
    const std::string kind = h.at("competitor_kind").get<std::string>();
    Competitor comp;
    comp.well_oriented = h.contains("well_oriented") ? h["well_oriented"].get<bool>() : true;
    const TraceProvider sigma = setup.sigma;
    if (kind == "translate") {
        const double t0 = cfg::decimal(h.at("t0"), "halfspace.t0");
        comp.section = [sigma, t0](double rho, double th) { return sigma(rho, th) + t0; };
        comp.description = "translate";
    } else if (kind == "base") {
        comp.section = sigma;
        comp.description = "base";
    } else {
        throw config_error("halfspace: unknown competitor_kind");
    }
    const double cmc_tol = cfg::decimal_or(h, "cmc_tol", 1e-2);
    HalfSpaceReport rep = halfspace_experiment(sigma, comp, setup.delta, setup.grids,
                                               setup.t_count, c.params, c.solver, cmc_tol);
    json out;
    out["competitor"] = rep.competitor_description;
    out["well_oriented"] = comp.well_oriented;
    out["competitor_is_cmc"] = rep.competitor_is_cmc;
    out["competitor_cmc_residual"] = rep.competitor_cmc_residual;
    out["contact"] = rep.contact;
    out["contact_gap"] = rep.contact_gap;
    out["orderings_pass"] = rep.orderings_pass;
    out["gaps_non_increasing"] = rep.gaps_non_increasing;
    out["gap_series"] = rep.gap_series;
    json verdicts = json::array();
    for (const HalfSpacePairVerdict& v : rep.verdicts)
        verdicts.push_back({{"n", v.n},
                            {"t", v.t},
                            {"below_base", v.below_base},
                            {"boundary_clear", v.boundary_clear},
                            {"below_competitor", v.below_competitor},
                            {"boundary_margin", v.boundary_margin},
                            {"competitor_margin", v.competitor_margin},
                            {"margin_at", {{"rho", v.worst_rho}, {"theta", v.worst_theta}}}});
    out["verdicts"] = verdicts;
    sink.add("halfspace.json", out.dump(2) + "\n");
    std::vector<double> ns;
    for (const AnnularGrid& g : setup.grids)
        ns.push_back(g.rho_max);
    sink.add("gap_series.tsv", series_tsv("outer_radius", "gap", ns, rep.gap_series));
}

inline void cmd_convergence(const ExperimentConfig& c, OutputSink& sink) {
    const json& v = c.raw.at("convergence");
    cfg::check_keys(v, "convergence", {"rho_min", "rho_max", "n0", "levels", "oracle"},
                    {"rho_min", "rho_max", "n0", "levels"});
    const double rho_min = cfg::decimal(v.at("rho_min"), "rho_min");
    const double rho_max = cfg::decimal(v.at("rho_max"), "rho_max");
    const int n0 = cfg::integer(v.at("n0"), "n0");
    const int levels = cfg::integer(v.at("levels"), "levels");
    const std::string oracle =
        v.contains("oracle") ? v.at("oracle").get<std::string>() : "radial";
    if (levels < 3)
        throw config_error("convergence: need at least 3 refinement levels");

    // exact section: a radial first-integral profile, or a skewed manufactured
    // section whose right-hand side is taken from a 4x refined evaluation
    TraceProvider exact;
    const bool manufactured = (oracle == "manufactured");
    if (manufactured) {
        exact = [rho_min](double rho, double th) {
            return 2.0 * std::cosh(0.5 * rho) + 0.1 * std::cos(th) * std::sin(rho - rho_min);
        };
    } else if (oracle == "radial") {
        exact = provider_from_config(c.raw.at("boundary"), c.params, rho_min, rho_max);
    } else {
        throw config_error("convergence: oracle must be 'radial' or 'manufactured'");
    }

    TextTable table('\t');
    table.header({"n", "drho", "linf_error", "observed_order"});
    double prev_err = 0.0;
    std::vector<double> errors;
    for (int lvl = 0; lvl < levels; ++lvl) {
        const int n = n0 << lvl;
        const AnnularGrid grid = AnnularGrid::make(rho_min, rho_max, n, n);
        const BoundaryTraces traces = traces_from_provider(grid, exact);
        std::vector<double> rhs;
        if (manufactured) {
            const AnnularGrid fine =
                AnnularGrid::make(rho_min, rho_max, 4 * (n - 1) + 1, 4 * n);
            const GridSection sf = GridSection::sample(fine, c.params, exact);
            const std::vector<double> hf = mean_curvature(sf);
            rhs.assign(grid.size(), 0.0);
            for (int i = 0; i < grid.n_rho; ++i)
                for (int j = 0; j < grid.n_theta; ++j)
                    rhs[grid.index(i, j)] = 2.0 * hf[fine.index(4 * i, 4 * j)];
        }
        auto [sol, rep] =
            newton_solve_dirichlet(grid, traces, c.params.h0, c.params, c.solver, nullptr,
                                   manufactured ? &rhs : nullptr);
        double err = 0.0;
        for (int i = 0; i < grid.n_rho; ++i)
            for (int j = 0; j < grid.n_theta; ++j)
                err = std::max(err, std::abs(sol.at(i, j) - exact(grid.rho(i), grid.theta(j))));
        const double order = prev_err > 0.0 ? std::log2(prev_err / err) : 0.0;
        table.row(n, grid.drho(), err, order);
        errors.push_back(err);
        prev_err = err;
    }
    sink.add("convergence.tsv", table.str());
    json out;
    out["oracle"] = oracle;
    out["errors"] = errors;
    sink.add("convergence.json", out.dump(2) + "\n");
}

} // namespace run_detail

// Executes one command; writes outputs plus manifest.json under out_dir.
inline RunManifest run(const ExperimentConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    run_detail::OutputSink sink;
    sink.dir = c.out_dir;
    if (c.command == "solve")
        run_detail::cmd_solve(c, sink);
    else if (c.command == "barrier")
        run_detail::cmd_barrier(c, sink);
    else if (c.command == "foliate")
        run_detail::cmd_foliate(c, sink);
    else if (c.command == "derivative")
        run_detail::cmd_derivative(c, sink);
    else if (c.command == "sister")
        run_detail::cmd_sister(c, sink);
    else if (c.command == "audit")
        run_detail::cmd_audit(c, sink);
    else if (c.command == "halfspace")
        run_detail::cmd_halfspace(c, sink);
    else if (c.command == "convergence")
        run_detail::cmd_convergence(c, sink);
    else
        throw config_error("run: unknown command");

    RunManifest man;
    man.command = c.command;
    man.version = CMCLAB_VERSION;
    man.config_hash = fnv1a64(c.raw.dump());
    for (const auto& [name, content] : sink.files) {
        write_file(sink.dir / name, content);
        man.outputs.push_back({name, content.size(), fnv1a64(content)});
    }
    man.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json mj;
    mj["schema"] = "cmclab/1";
    mj["command"] = man.command;
    mj["version"] = man.version;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  (unsigned long long)man.config_hash);
    mj["config_hash"] = hash_hex;
    mj["wall_time_sec"] = man.wall_time_sec;
    json outs = json::array();
    for (const ManifestEntry& e : man.outputs) {
        char sum[32];
        std::snprintf(sum, sizeof(sum), "%016llx", (unsigned long long)e.checksum);
        outs.push_back({{"file", e.file}, {"bytes", e.bytes}, {"fnv1a64", sum}});
    }
    mj["outputs"] = outs;
    write_file(sink.dir / "manifest.json", mj.dump(2) + "\n");
    return man;
}

} // namespace cmclab
