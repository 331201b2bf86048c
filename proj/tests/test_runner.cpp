#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>

#include "cmclab/runner.hpp"

using namespace cmclab;
namespace fs = std::filesystem;

namespace {

std::string solve_config(const std::string& out) {
    return R"({
  "schema": "cmclab/1",
  "command": "solve",
  "seed": 3,
  "out": ")" + out + R"(",
  "params": {"kappa": "-1", "tau": "0", "h0": "0.5"},
  "grid": {"rho_min": "0.5", "rho_max": "2", "n_rho": 17, "n_theta": 16},
  "boundary": {"kind": "radial_oracle"}
})";
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("cmclab_test_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config validation") {
    SECTION("a valid config parses with defaults applied") {
        const ExperimentConfig c = parse_config(solve_config("x"));
        CHECK(c.command == "solve");
        CHECK(c.seed == 3);
        CHECK(c.params.kappa == -1.0);
        CHECK(c.solver.newton_tol == 1e-10);
    }

    SECTION("unknown fields are rejected") {
        CHECK_THROWS_AS(parse_config(R"({"schema":"cmclab/1","command":"solve","bogus":1})"),
                        config_error);
        CHECK_THROWS_AS(
            parse_config(
                R"({"schema":"cmclab/1","command":"solve","params":{"kappa":"-1","extra":"1"}})"),
            config_error);
    }

    SECTION("schema and command gates") {
        CHECK_THROWS_AS(parse_config(R"({"schema":"cmclab/2","command":"solve"})"), config_error);
        CHECK_THROWS_AS(parse_config(R"({"schema":"cmclab/1","command":"fly"})"), config_error);
        CHECK_THROWS_AS(parse_config("not json at all"), config_error);
    }

    SECTION("floating parameters must be decimal strings") {
        CHECK_THROWS_AS(
            parse_config(R"({"schema":"cmclab/1","command":"solve","params":{"tau":0.5}})"),
            config_error);
        CHECK_THROWS_AS(
            parse_config(R"({"schema":"cmclab/1","command":"solve","params":{"tau":"half"}})"),
            config_error);
    }
}

TEST_CASE("solve command writes a complete, checksummed manifest") {
    TempDir tmp("solve");
    ExperimentConfig c = parse_config(solve_config(tmp.path.string()));
    const RunManifest man = run(c);
    CHECK(man.command == "solve");
    REQUIRE(man.outputs.size() == 2);
    for (const ManifestEntry& e : man.outputs) {
        const std::string body = read_file(tmp.path / e.file);
        CHECK(body.size() == e.bytes);
        CHECK(fnv1a64(body) == e.checksum);
    }
    CHECK(fs::exists(tmp.path / "manifest.json"));
    // every file in the output directory is either listed or the manifest
    int extra = 0;
    for (const auto& entry : fs::directory_iterator(tmp.path)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json")
            continue;
        bool listed = false;
        for (const ManifestEntry& e : man.outputs)
            listed = listed || e.file == name;
        if (!listed)
            ++extra;
    }
    CHECK(extra == 0);
    // end to end against the radial profile: the boundary value on the outer
    // circle equals the oracle, and the report converged
    const json rep = json::parse(read_file(tmp.path / "solve_report.json"));
    CHECK(rep.at("converged").get<bool>());
    const std::string csv = read_file(tmp.path / "solution.csv");
    const std::string last_line = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
    const double sigma_out = std::stod(last_line.substr(last_line.find(',', last_line.find(',') + 1) + 1));
    const RadialProfile prof = radial_ode_oracle(ModelParams::make(-1.0, 0.0, 0.5), 0.5, 2.0,
                                                 true, 0.0, 0.5, 0.0);
    CHECK(sigma_out == Approx(prof.u(2.0)).margin(1e-12));
}

TEST_CASE("identical configs produce byte-identical data outputs") {
    TempDir a("det_a"), b("det_b");
    ExperimentConfig ca = parse_config(solve_config(a.path.string()));
    ExperimentConfig cb = parse_config(solve_config(b.path.string()));
    run(ca);
    run(cb);
    for (const std::string name : {"solution.csv", "solve_report.json"})
        CHECK(read_file(a.path / name) == read_file(b.path / name));
}

TEST_CASE("audit command reports small identity residuals") {
    TempDir tmp("audit");
    const std::string cfg = R"({
  "schema": "cmclab/1",
  "command": "audit",
  "seed": 42,
  "out": ")" + tmp.path.string() + R"(",
  "audit": {"samples": 500}
})";
    run(parse_config(cfg));
    const json rep = json::parse(read_file(tmp.path / "audit.json"));
    for (const auto& c : rep.at("cases")) {
        CHECK(c.at("frame_residual").get<double>() < 1e-8);
        CHECK(c.at("duality_residual").get<double>() < 1e-8);
        CHECK(c.at("scaling_residual").get<double>() < 1e-8);
    }
    CHECK(fs::exists(tmp.path / "metric_samples.csv"));
}

TEST_CASE("barrier command emits the certificate") {
    TempDir tmp("barrier");
    std::string f_arr = "[";
    for (int j = 0; j < 16; ++j)
        f_arr += (j ? "," : std::string()) + "\"0\"";
    f_arr += "]";
    const std::string cfg = R"({
  "schema": "cmclab/1",
  "command": "barrier",
  "out": ")" + tmp.path.string() + R"(",
  "barrier": {"rho0": "2", "rho1": "1", "M": "5", "tau": "0", "direction": "above",
              "n_rho": 17, "n_theta": 16, "f": )" + f_arr + R"(}
})";
    run(parse_config(cfg));
    const json rep = json::parse(read_file(tmp.path / "barrier.json"));
    CHECK(rep.at("pass").get<bool>());
    CHECK(rep.at("alpha").get<double>() == Approx(5.0));
    CHECK(rep.at("max_violation").get<double>() <= 0.0);
}

TEST_CASE("convergence command reports observed orders") {
    TempDir tmp("conv");
    const std::string cfg = R"({
  "schema": "cmclab/1",
  "command": "convergence",
  "out": ")" + tmp.path.string() + R"(",
  "boundary": {"kind": "radial_oracle"},
  "convergence": {"rho_min": "0.5", "rho_max": "2", "n0": 12, "levels": 3}
})";
    run(parse_config(cfg));
    const std::string tsv = read_file(tmp.path / "convergence.tsv");
    CHECK(tsv.find("observed_order") != std::string::npos);
    const json rep = json::parse(read_file(tmp.path / "convergence.json"));
    const auto errors = rep.at("errors").get<std::vector<double>>();
    REQUIRE(errors.size() == 3);
    CHECK(std::log2(errors[0] / errors[1]) > 1.8);
    CHECK(std::log2(errors[1] / errors[2]) > 1.8);

    SECTION("fewer than three levels is a config error") {
        const std::string bad = R"({
  "schema": "cmclab/1",
  "command": "convergence",
  "out": "unused",
  "boundary": {"kind": "radial_oracle"},
  "convergence": {"rho_min": "0.5", "rho_max": "2", "n0": 12, "levels": 1}
})";
        CHECK_THROWS_AS(run(parse_config(bad)), config_error);
    }
}

TEST_CASE("sampled boundary traces and fixed-slope barrier verification") {
    SECTION("samples boundary kind") {
        TempDir tmp("samples");
        std::string inner = "[", outer = "[";
        for (int j = 0; j < 16; ++j) {
            inner += (j ? "," : std::string()) + "\"1.5\"";
            outer += (j ? "," : std::string()) + "\"1.5\"";
        }
        inner += "]";
        outer += "]";
        const std::string cfg = R"({
  "schema": "cmclab/1",
  "command": "solve",
  "out": ")" + tmp.path.string() + R"(",
  "params": {"kappa": "-1", "tau": "0", "h0": "0"},
  "grid": {"rho_min": "0.5", "rho_max": "2", "n_rho": 17, "n_theta": 16},
  "boundary": {"kind": "samples", "inner": )" + inner + R"(, "outer": )" + outer + R"(}
})";
        run(parse_config(cfg));
        const json rep = json::parse(read_file(tmp.path / "solve_report.json"));
        CHECK(rep.at("converged").get<bool>());
        CHECK(rep.at("max_abs_u").get<double>() == Approx(1.5));
    }

    SECTION("explicit slope skips the search and is verified as given") {
        TempDir tmp("alpha");
        std::string f_arr = "[";
        for (int j = 0; j < 16; ++j)
            f_arr += (j ? "," : std::string()) + "\"0\"";
        f_arr += "]";
        const std::string cfg = R"({
  "schema": "cmclab/1",
  "command": "barrier",
  "out": ")" + tmp.path.string() + R"(",
  "barrier": {"rho0": "2", "rho1": "1", "M": "0", "tau": "0", "direction": "below",
              "alpha": "-0.1", "n_rho": 17, "n_theta": 16, "f": )" + f_arr + R"(}
})";
        run(parse_config(cfg));
        const json rep = json::parse(read_file(tmp.path / "barrier.json"));
        CHECK_FALSE(rep.at("pass").get<bool>());
        CHECK(rep.at("alpha").get<double>() == Approx(-0.1));
        CHECK(rep.at("max_violation").get<double>() > 0.5);
    }
}

TEST_CASE("manufactured-solution study reaches the same order") {
    TempDir tmp("mms");
    const std::string cfg = R"({
  "schema": "cmclab/1",
  "command": "convergence",
  "out": ")" + tmp.path.string() + R"(",
  "params": {"kappa": "-1", "tau": "0.2", "h0": "0.5"},
  "convergence": {"rho_min": "0.5", "rho_max": "2", "n0": 12, "levels": 3,
                  "oracle": "manufactured"}
})";
    run(parse_config(cfg));
    const json rep = json::parse(read_file(tmp.path / "convergence.json"));
    const auto errors = rep.at("errors").get<std::vector<double>>();
    REQUIRE(errors.size() == 3);
    CHECK(std::log2(errors[0] / errors[1]) > 1.8);
    CHECK(std::log2(errors[1] / errors[2]) > 1.8);
}
