// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criterion 9 drives the installed CLI binary (path in the
// CMCLAB_BIN environment variable) end to end.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cmclab/estimates.hpp"
#include "cmclab/foliation.hpp"
#include "cmclab/io.hpp"
#include "cmclab/runner.hpp"

using namespace cmclab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const char* label, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, label, detail.c_str());
    std::fflush(stdout);
    if (!pass)
        ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Geometry identities at random points.
// ---------------------------------------------------------------------------
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> xy(-0.6, 0.6), z(-2.0, 2.0), comp(-2.0, 2.0);
    const std::vector<std::pair<double, double>> cases = {{-1.0, 0.0}, {-1.0, 0.5}, {0.0, 0.5}};
    double worst = 0.0;
    const int samples = 12000;
    for (auto [kappa, tau] : cases) {
        const ModelParams p = ModelParams::make(kappa, tau, 0.5);
        for (int k = 0; k < samples; ++k) {
            const ModelPoint q{xy(rng), xy(rng), z(rng)};
            const Frame fr = orthonormal_frame(p, q);
            const TangentVector basis[3] = {fr.f1, fr.f2, fr.xi};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    worst = std::max(worst, std::abs(metric_eval(p, q, basis[a], basis[b]) -
                                                     (a == b ? 1.0 : 0.0)));
            const TangentVector v{comp(rng), comp(rng), comp(rng)};
            worst = std::max(worst, std::abs(metric_eval(p, q, grad_z(p, q), v) - v.z));
            for (double mu : {0.5, 2.0, 3.0}) {
                const auto [img, target] = scaling_map(mu, q, p);
                const TangentVector u{comp(rng), comp(rng), comp(rng)};
                const TangentVector w{comp(rng), comp(rng), comp(rng)};
                const double h = 1e-3;  // central differences; kept coarse for conditioning
                auto push = [&](const TangentVector& dir) {
                    const ModelPoint qp{q.x + h * dir.x, q.y + h * dir.y, q.z + h * dir.z};
                    const ModelPoint qm{q.x - h * dir.x, q.y - h * dir.y, q.z - h * dir.z};
                    const auto ip = scaling_map(mu, qp, p).first;
                    const auto im = scaling_map(mu, qm, p).first;
                    return TangentVector{(ip.x - im.x) / (2 * h), (ip.y - im.y) / (2 * h),
                                         (ip.z - im.z) / (2 * h)};
                };
                const double lhs = metric_eval(target, img, push(u), push(w));
                const double rhs = mu * mu * metric_eval(p, q, u, w);
                worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
            }
        }
    }
    const double t = seconds_since(t0);
    report(1, "geometry identities", worst < 1e-8 && t < 10.0,
           "max residual " + fmt2(worst) + ", " + fmt2(t) + " s, " +
               std::to_string(3 * samples) + " points");
}

// ---------------------------------------------------------------------------
// 2. Radial oracle reproduction with grid refinement.
// ---------------------------------------------------------------------------
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    SolverConfig cfg;
    bool pass = true;
    std::string detail;
    for (double tau : {0.0, 0.3}) {
        const ModelParams p = ModelParams::make(-1.0, tau, 0.5);
        // tau = 0 boundary data comes from u = 2 cosh(rho/2); the skew case
        // anchors the quadrature profile to the same inner value
        const RadialProfile prof =
            radial_ode_oracle(p, 0.5, 2.0, true, 0.0, 0.5, 2.0 * std::cosh(0.25));
        const TraceProvider sigma = [&](double rho, double) {
            return prof.params.tau == 0.0 ? 2.0 * std::cosh(0.5 * rho) : prof.u(rho);
        };
        std::vector<double> errs;
        for (int n : {64, 128, 256}) {
            const AnnularGrid g = AnnularGrid::make(0.5, 2.0, n, n);
            const BoundaryTraces b = traces_from_provider(g, sigma);
            auto [sol, rep] = newton_solve_dirichlet(g, b, 0.5, p, cfg);
            pass = pass && rep.converged && rep.final_residual <= 1e-10;
            double err = 0.0;
            std::vector<double> exact(g.n_rho);
            for (int i = 0; i < g.n_rho; ++i)
                exact[i] = sigma(g.rho(i), 0.0);
            for (int i = 0; i < g.n_rho; ++i)
                for (int j = 0; j < g.n_theta; ++j)
                    err = std::max(err, std::abs(sol.at(i, j) - exact[i]));
            errs.push_back(err);
        }
        pass = pass && errs[0] <= 5e-3;
        for (size_t k = 0; k + 1 < errs.size(); ++k)
            pass = pass && std::log2(errs[k] / errs[k + 1]) >= 1.8;
        detail += "tau=" + fmt2(tau) + " errs " + fmt2(errs[0]) + "/" + fmt2(errs[1]) + "/" +
                  fmt2(errs[2]) + " order " + fmt2(std::log2(errs[0] / errs[1])) + "," +
                  fmt2(std::log2(errs[1] / errs[2])) + "; ";
    }
    const double t = seconds_since(t0);
    pass = pass && t < 60.0;
    report(2, "radial oracle reproduction", pass, detail + fmt2(t) + " s");
}

// ---------------------------------------------------------------------------
// 3. Barrier certificates on working and refined grids.
// ---------------------------------------------------------------------------
void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    auto f = [](double th) { return 0.3 * std::cos(th); };
    bool pass = true;
    std::string detail;
    for (double tau : {0.0, 0.2}) {
        const AnnularGrid g = AnnularGrid::make(1.0, 2.0, 65, 64);
        try {
            const BarrierResult up = build_upper_barrier(f, 2.0, 1.0, 5.0, tau, g);
            const BarrierResult lo = build_lower_barrier(f, 2.0, 1.0, -5.0, tau, g);
            pass = pass && up.report.pass && lo.report.pass;
            detail += "tau=" + fmt2(tau) + " alpha " + fmt2(up.alpha) + "/" + fmt2(lo.alpha) + "; ";
        } catch (const std::exception& e) {
            pass = false;
            detail += std::string("exception: ") + e.what() + "; ";
        }
    }
    const double t = seconds_since(t0);
    pass = pass && t < 30.0;
    report(3, "barrier certificates", pass, detail + fmt2(t) + " s");
}

// Shared foliation family for criteria 4-6.
struct FamilyFixture {
    SolverConfig cfg;
    ModelParams params = ModelParams::make(-1.0, 0.0, 0.5);
    TraceProvider sigma = [](double rho, double) { return 2.0 * std::cosh(0.5 * rho); };
    std::vector<AnnularGrid> grids3 = nested_annuli(0.5, {2.0, 3.5, 5.0}, 49, 48);
    std::vector<AnnularGrid> grids4 = nested_annuli(0.5, {2.0, 3.5, 5.0, 6.5}, 49, 48);
};

// ---------------------------------------------------------------------------
// 4. Maximum-principle sandwich for the continuation family.
// ---------------------------------------------------------------------------
void criterion_4(const FamilyFixture& fix) {
    const ContinuationFamily fam =
        build_foliation(fix.sigma, 0.1, fix.grids3, 5, fix.params, fix.cfg);
    const double tol = 10.0 * fix.cfg.newton_tol;
    double worst = 0.0;
    for (const SandwichAudit& a : fam.audits)
        worst = std::max({worst, a.max_order_violation, a.max_lift_violation});
    report(4, "maximum-principle sandwich", worst <= tol,
           "5 lifts x 3 annuli, worst violation " + fmt2(worst) + " vs tol " + fmt2(tol));
}

// ---------------------------------------------------------------------------
// 5. Derivative field of the foliation.
// ---------------------------------------------------------------------------
void criterion_5(const FamilyFixture& fix) {
    const ContinuationFamily fam =
        build_foliation(fix.sigma, 0.1, fix.grids4, 5, fix.params, fix.cfg);
    const DerivativeField df =
        numeric_derivative(fam, 0.05, {0.025, 0.0125, 0.00625, 0.003125});
    bool pass = true;
    for (size_t k = 0; k + 1 < df.residual.size(); ++k)
        if (!df.noise_flag[k + 1])
            pass = pass && df.residual[k + 1] < df.residual[k];
    pass = pass && std::abs(df.richardson_residual) <= 10.0 * df.truncation_estimate;
    const AnnularGrid& g = fam.grids[df.n_index];
    for (const std::vector<double>& v : df.v)
        for (int j = 0; j < g.n_theta; ++j)
            pass = pass && v[g.index(0, j)] == 1.0;
    for (size_t n = 0; n + 1 < df.dev_by_n.size(); ++n)
        pass = pass && df.dev_by_n[n + 1] < df.dev_by_n[n];
    report(5, "derivative field", pass,
           "residuals " + fmt2(df.residual.front()) + "->" + fmt2(df.residual.back()) +
               ", richardson " + fmt2(df.richardson_residual) + ", dev " +
               fmt2(df.dev_by_n.front()) + "->" + fmt2(df.dev_by_n.back()));
}

// ---------------------------------------------------------------------------
// 6. Half-space ordering chain and shrinking gap.
// ---------------------------------------------------------------------------
void criterion_6(const FamilyFixture& fix) {
    Competitor comp{[&](double rho, double th) { return fix.sigma(rho, th) + 0.2; },
                    "vertical translate by 0.2", true};
    const HalfSpaceReport rep =
        halfspace_experiment(fix.sigma, comp, 0.1, fix.grids4, 5, fix.params, fix.cfg);
    const bool pass = rep.orderings_pass && rep.gaps_non_increasing &&
                      rep.gap_series.size() >= 4 && rep.competitor_is_cmc;
    std::string gaps;
    for (double g : rep.gap_series)
        gaps += fmt2(g) + " ";
    report(6, "half-space evidence", pass, "gaps " + gaps);
}

// ---------------------------------------------------------------------------
// 7. Sister identities and flat-chart audits.
// ---------------------------------------------------------------------------
void criterion_7() {
    // potential identity over random unit-trace data
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coef(-2.0, 3.0), nu_d(0.05, 1.0), tau_d(-2.0, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        const double a = coef(rng), b = coef(rng);
        const Mat2 s{a, b, b, 1.0 - a};
        const ModelParams p = ModelParams::make(-1.0, tau_d(rng), 0.5);
        const double nu = nu_d(rng);
        const Mat2 sp = rotation(-p.theta) * (s - 0.5 * Mat2::identity());
        worst = std::max(worst, std::abs(jacobi_potential_value(nu, s.frob2(), p, false) -
                                         jacobi_potential_value(nu, sp.frob2(), p, true)));
    }
    bool pass = worst < 1e-12;

    // solved-graph audits under refinement
    const ModelParams p = ModelParams::make(-1.0, 0.3, 0.5);
    SolverConfig cfg;
    const RadialProfile prof = radial_ode_oracle(p, 0.5, 2.5, true, 0.0, 0.5, 0.2);
    const TraceProvider sigma = [&](double rho, double) { return prof.u(rho); };
    std::vector<double> jac_res, k_res;
    for (int n : {64, 128, 256}) {
        const AnnularGrid g = AnnularGrid::make(0.5, 2.5, n, n);
        auto [sol, rep] = newton_solve_dirichlet(g, traces_from_provider(g, sigma), 0.5, p, cfg);
        const SurfaceData d = extract_surface_data(sol);
        const std::vector<double> jr = jacobi_check_nu(sol, d);
        const FlatChart chart = flat_chart(sister(d, p));
        double jmax = 0.0, kmax = 0.0;
        for (int i = 0; i < g.n_rho; ++i) {
            if (g.rho(i) < 0.8 || g.rho(i) > 2.2)
                continue;
            for (int j = 0; j < g.n_theta; ++j) {
                jmax = std::max(jmax, std::abs(jr[g.index(i, j)]));
                kmax = std::max(kmax, std::abs(chart.gauss_curvature[g.index(i, j)]));
            }
        }
        jac_res.push_back(jmax);
        k_res.push_back(kmax);
    }
    std::string detail = "identity " + fmt2(worst) + ", nu-jacobi";
    for (size_t k = 0; k + 1 < jac_res.size(); ++k) {
        pass = pass && jac_res[k] / jac_res[k + 1] >= 3.0;
        detail += " " + fmt2(jac_res[k] / jac_res[k + 1]) + "x";
    }
    detail += ", curvature";
    for (size_t k = 0; k + 1 < k_res.size(); ++k) {
        pass = pass && k_res[k] / k_res[k + 1] >= 3.0;
        detail += " " + fmt2(k_res[k] / k_res[k + 1]) + "x";
    }
    report(7, "sister identities", pass, detail);
}

// ---------------------------------------------------------------------------
// 8. Gradient-estimate audits.
// ---------------------------------------------------------------------------
void criterion_8() {
    const ModelParams p = ModelParams::make(-1.0, 0.0, 0.5);
    SolverConfig cfg;
    const RadialProfile prof = radial_ode_oracle(p, 0.5, 2.5, true, 0.0, 0.5, 0.5);
    const TraceProvider sigma = [&](double rho, double) { return prof.u(rho); };
    const AnnularGrid g = AnnularGrid::make(0.5, 2.5, 65, 64);
    auto [sol, rep] = newton_solve_dirichlet(g, traces_from_provider(g, sigma), 0.5, p, cfg);
    const SurfaceData d = extract_surface_data(sol);
    const BoundaryGradientReport brep =
        boundary_gradient_audit(sol, d, {1.0, 2.0, 4.0, 8.0}, {0.6, 0.7, 0.8});
    const InteriorGradientReport irep = interior_gradient_audit(
        sol, d, g.n_rho / 2, 7, 0.9, {2.0, 4.0, 8.0, 16.0}, {0.5, 0.6, 0.7});
    const bool pass = brep.certified && irep.certified && brep.measured_sup_w <= brep.bound &&
                      irep.w_center <= irep.bound;
    report(8, "gradient-estimate audits", pass,
           "boundary (alpha=" + fmt2(brep.alpha) + ", nu0=" + fmt2(brep.nu0) + ", supW " +
               fmt2(brep.measured_sup_w) + " <= " + fmt2(brep.bound) + "), interior (K=" +
               fmt2(irep.k_exponent) + ", nu1=" + fmt2(irep.nu1) + ", W " + fmt2(irep.w_center) +
               " <= " + fmt2(irep.bound) + ")");
}

// ---------------------------------------------------------------------------
// 9. Byte-identical reruns through the CLI.
// ---------------------------------------------------------------------------
void criterion_9() {
    const char* bin = std::getenv("CMCLAB_BIN");
    if (!bin) {
        report(9, "reproducibility", false, "CMCLAB_BIN not set");
        return;
    }
    const fs::path base = fs::temp_directory_path() / "cmclab_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const std::string cfg_path = (base / "audit.json").string();
    write_file(cfg_path, R"({
  "schema": "cmclab/1",
  "command": "audit",
  "seed": 99,
  "audit": {"samples": 2000}
})");
    const std::string solve_path = (base / "solve.json").string();
    write_file(solve_path, R"({
  "schema": "cmclab/1",
  "command": "solve",
  "seed": 99,
  "params": {"kappa": "-1", "tau": "0.3", "h0": "0.5"},
  "grid": {"rho_min": "0.5", "rho_max": "2", "n_rho": 33, "n_theta": 32},
  "boundary": {"kind": "radial_oracle"}
})");
    bool pass = true;
    std::string detail;
    for (const auto& [name, cpath] :
         std::vector<std::pair<std::string, std::string>>{{"audit", cfg_path},
                                                          {"solve", solve_path}}) {
        const fs::path out1 = base / (name + "_run1");
        const fs::path out2 = base / (name + "_run2");
        for (const fs::path& out : {out1, out2}) {
            const std::string cmd = std::string(bin) + " " + name + " --config " + cpath +
                                    " --out " + out.string() + " --seed 99 > /dev/null";
            if (std::system(cmd.c_str()) != 0) {
                pass = false;
                detail += name + " run failed; ";
            }
        }
        if (!pass)
            break;
        int compared = 0;
        for (const auto& entry : fs::directory_iterator(out1)) {
            const std::string fname = entry.path().filename().string();
            if (fname == "manifest.json")
                continue;  // carries wall-clock time
            ++compared;
            if (read_file(entry.path()) != read_file(out2 / fname)) {
                pass = false;
                detail += fname + " differs; ";
            }
        }
        detail += name + ": " + std::to_string(compared) + " files identical; ";
    }
    report(9, "reproducibility", pass, detail);
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    FamilyFixture fix;
    criterion_4(fix);
    criterion_5(fix);
    criterion_6(fix);
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("acceptance: %d failure(s), %.1f s total\n", g_failures, seconds_since(t0));
    return g_failures > 0 ? 1 : 0;
}
