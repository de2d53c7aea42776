#include "doctest.h"

#include "json.hpp"
#include "qmpemba/config.hpp"
#include "qmpemba/experiment.hpp"
#include "qmpemba/io.hpp"
#include "qmpemba/presets.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

using namespace qmpemba;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path = fs::temp_directory_path() /
               ("qmpemba_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

config::ExperimentConfig preset(std::string_view name) {
    const auto* p = presets::find(name);
    REQUIRE(p != nullptr);
    return config::parse_config(p->text);
}

}  // namespace

TEST_CASE("sha256 and number formatting") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::format_double(0.5) == "5e-01");
    CHECK(std::stod(io::format_double(0.1)) == 0.1);
}

TEST_CASE("runs are byte-for-byte deterministic") {
    TempDir a;
    TempDir b;
    const auto cfg = preset("correlated_crossing");
    const auto ra = experiment::run_experiment(cfg, a.path);
    const auto rb = experiment::run_experiment(cfg, b.path);
    REQUIRE(ra.files.size() == rb.files.size());
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
        CHECK(ra.files[i].path == rb.files[i].path);
        CHECK(io::read_file(a.path / ra.files[i].path) == io::read_file(b.path / rb.files[i].path));
    }
    CHECK(io::read_file(a.path / "manifest.json") == io::read_file(b.path / "manifest.json"));
}

TEST_CASE("manifest hashes match the written files") {
    TempDir dir;
    const auto summary = experiment::run_experiment(preset("oracle_check"), dir.path);
    const auto manifest = json::parse(io::read_file(dir.path / "manifest.json"));
    REQUIRE(manifest["files"].size() == summary.files.size());
    for (const auto& f : manifest["files"]) {
        const std::string bytes = io::read_file(dir.path / f["path"].get<std::string>());
        CHECK(f["sha256"] == io::sha256_hex(bytes));
        CHECK(f["bytes"].get<std::size_t>() == bytes.size());
    }
    const auto report = json::parse(summary.report);
    const auto& run = report["runs"][0];
    CHECK(run["oracle"]["steady_state_mismatch"].get<double>() < 1e-8);
    for (const auto& s : run["states"]) CHECK(s["oracle"]["max_abs_deviation"].get<double>() < 1e-6);
    CHECK(run["crossings"][0].contains("rho_level"));
}

TEST_CASE("curve CSV layout") {
    DistanceCurve c;
    c.times = {0.0, 1.0};
    c.distances = {1.0, 0.5};
    const std::string csv = experiment::curve_csv(c, 0.25);
    CHECK(csv.rfind("t,D,rescaled_D\n", 0) == 0);
    CHECK(csv.find("1e+00,5e-01,") != std::string::npos);
}

TEST_CASE("a failing state does not abort its siblings") {
    TempDir dir;
    auto cfg = preset("edge_crossing");
    cfg.time.t_max = 10.0;
    cfg.time.points = 101;
    cfg.analysis.fits.clear();
    config::StateConfig bad;
    bad.label = "overfilled";
    bad.spec.kind = InitialStateKind::Uniform;
    bad.spec.amplitude = 0.9;
    cfg.states.push_back(bad);
    const auto summary = experiment::run_experiment(cfg, dir.path);
    CHECK(summary.failed_states == 1);
    const auto report = json::parse(summary.report);
    const auto& states = report["runs"][0]["states"];
    REQUIRE(states.size() == 3);
    CHECK(states[0]["status"] == "ok");
    CHECK(states[1]["status"] == "ok");
    CHECK(states[2]["status"] == "error");
    CHECK(fs::exists(dir.path / "curve_left_edge.csv"));
    CHECK(!fs::exists(dir.path / "curve_overfilled.csv"));
    bool found = false;
    for (const auto& x : report["runs"][0]["crossings"]) {
        if (x["first"] == "left_edge" && x["second"] == "right_edge") {
            found = true;
            CHECK(x["verdict"] == "single-crossing");
        }
    }
    CHECK(found);
}

TEST_CASE("edge-state experiment") {
    TempDir dir;
    const auto report = json::parse(experiment::run_experiment(preset("edge_crossing"), dir.path).report);
    const auto& run = report["runs"][0];
    CHECK(run["crossings"][0]["verdict"] == "single-crossing");
    CHECK(run["crossings"][0]["initially_farther"] == "left_edge");
    CHECK(run["crossings"][0]["mpemba"] == true);
    const double right_rate = run["fits"][0]["value"];
    const double left_early = run["fits"][1]["value"];
    CHECK(std::abs(right_rate - 0.8) < 0.04);
    CHECK(left_early > right_rate);
}

TEST_CASE("correlated-state experiment under both boundaries") {
    TempDir dir;
    const auto summary = experiment::run_experiment(preset("correlated_crossing"), dir.path);
    CHECK(fs::exists(dir.path / "curve_correlated_obc.csv"));
    CHECK(fs::exists(dir.path / "curve_diagonal_pbc.csv"));
    const auto report = json::parse(summary.report);
    REQUIRE(report["runs"].size() == 2);
    CHECK(report["runs"][0]["boundary"] == "OBC");
    CHECK(report["runs"][0]["crossings"][0]["verdict"] == "double-crossing");
    CHECK(report["runs"][1]["crossings"][0]["crossing_times"].size() <= 1);
}

TEST_CASE("power-law experiment") {
    TempDir dir;
    const auto report = json::parse(experiment::run_experiment(preset("ring_power_law"), dir.path).report);
    const auto& fits = report["runs"][0]["fits"];
    REQUIRE(fits.size() == 2);
    CHECK(std::abs(fits[0]["value"].get<double>() + 0.25) < 0.25 * 0.1);
    CHECK(std::abs(fits[1]["value"].get<double>() + 0.75) < 0.75 * 0.1);
}

TEST_CASE("spectra experiment") {
    TempDir dir;
    const auto report = json::parse(experiment::run_experiment(preset("spectra"), dir.path).report);
    CHECK(report["spectra"]["obc"]["max_deviation_from_analytic"].get<double>() < 1e-10);
    CHECK(report["spectra"]["pbc"]["max_deviation_from_analytic"].get<double>() < 1e-10);
    CHECK(fs::exists(dir.path / "spectra_obc.csv"));
    CHECK(!report.contains("runs"));
}
