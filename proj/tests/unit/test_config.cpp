#include "doctest.h"

#include "qmpemba/config.hpp"
#include "qmpemba/presets.hpp"

#include <algorithm>
#include <string>

using namespace qmpemba;
using namespace qmpemba::config;

namespace {

const char* kMinimal = R"({
  "schema_version": 1,
  "model": {"J": 1.0, "gamma_g": 0.2, "gamma_l": 0.2, "L": 10},
  "states": [{"label": "a", "kind": "uniform", "amplitude": 0.25}],
  "time": {"t_max": 5.0, "points": 16}
})";

bool mentions(const ConfigError& e, std::string_view needle) {
    return std::any_of(e.violations().begin(), e.violations().end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

std::vector<std::string> violations_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
    const auto cfg = parse_config(kMinimal);
    CHECK(cfg.model.hopping == 1.0);
    CHECK(cfg.model.sites == 10);
    CHECK(cfg.model.boundaries == std::vector<Boundary>{Boundary::Open});
    CHECK(cfg.model.edge_compensation);
    CHECK(cfg.model.skin == SkinDirection::Left);
    REQUIRE(cfg.states.size() == 1);
    CHECK(cfg.states[0].spec.kind == InitialStateKind::Uniform);
    CHECK(cfg.time.grid == GridKind::Linear);
    CHECK(cfg.analysis.crossings);
    CHECK(!cfg.analysis.spectra);
    CHECK(!cfg.analysis.propagator);
    CHECK(cfg.output.directory == "qmpemba_output");
    CHECK(cfg.output.csv);
    CHECK(cfg.output.json);
    CHECK(cfg.seed == 0);
    const auto grid = time_grid(cfg.time);
    CHECK(grid.size() == 16);
    CHECK(grid.back() == 5.0);
}

TEST_CASE("violations name the offending field") {
    const auto v = violations_of(replaced(kMinimal, "\"gamma_l\": 0.2", "\"gamma_l\": -0.2"));
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("model.gamma_l") != std::string::npos);

    const auto unknown = violations_of(replaced(kMinimal, "\"L\": 10", "\"L\": 10, \"Lx\": 3"));
    REQUIRE(unknown.size() == 1);
    CHECK(unknown[0].find("model.Lx") != std::string::npos);
    CHECK(unknown[0].find("unknown key") != std::string::npos);

    const auto version = violations_of(replaced(kMinimal, "\"schema_version\": 1", "\"schema_version\": 2"));
    REQUIRE(version.size() == 1);
    CHECK(version[0].find("schema_version") != std::string::npos);

    CHECK(!violations_of("{ not json").empty());
}

TEST_CASE("all violations are collected") {
    std::string text = replaced(kMinimal, "\"gamma_l\": 0.2", "\"gamma_l\": -0.2");
    text = replaced(text, "\"points\": 16", "\"points\": 15");
    text = replaced(text, "\"amplitude\": 0.25", "\"amplitude\": \"big\"");
    try {
        parse_config(text);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.violations().size() == 3);
        CHECK(mentions(e, "model.gamma_l"));
        CHECK(mentions(e, "time.points"));
        CHECK(mentions(e, "states[0].amplitude"));
    }
}

TEST_CASE("state validation") {
    const std::string dup = replaced(kMinimal, R"({"label": "a", "kind": "uniform", "amplitude": 0.25})",
                                     R"({"label": "a", "kind": "uniform", "amplitude": 0.25},
                                        {"label": "a", "kind": "uniform", "amplitude": 0.1})");
    const auto v = violations_of(dup);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("duplicate label") != std::string::npos);

    CHECK(!violations_of(replaced(kMinimal, "\"label\": \"a\"", "\"label\": \"a b\"")).empty());
    CHECK(!violations_of(replaced(kMinimal, "\"kind\": \"uniform\"", "\"kind\": \"gaussian\"")).empty());
    const std::string edge = replaced(kMinimal, R"("kind": "uniform", "amplitude": 0.25)",
                                      R"("kind": "diagonal_edge", "side": "left", "width": 2, "amplitude": 0.7)");
    CHECK(!violations_of(edge).empty());
}

TEST_CASE("time and analysis validation") {
    CHECK(!violations_of(replaced(kMinimal, "\"t_max\": 5.0", "\"t_max\": 0.0")).empty());
    CHECK(!violations_of(replaced(kMinimal, "\"points\": 16", "\"points\": 16, \"t_min\": 0.1")).empty());
    const std::string log = replaced(kMinimal, "\"points\": 16", "\"points\": 16, \"grid\": \"log\"");
    const auto cfg = parse_config(log);
    CHECK(cfg.time.grid == GridKind::Log);
    CHECK(cfg.time.t_min == doctest::Approx(5e-3));
    CHECK(time_grid(cfg.time).front() == 0.0);

    const std::string oracle = replaced(kMinimal, "\"points\": 16}", "\"points\": 16}, \"analysis\": {\"oracle_check\": true}");
    CHECK(!violations_of(oracle).empty());
    CHECK(parse_config(replaced(oracle, "\"L\": 10", "\"L\": 5")).analysis.oracle_check);

    const std::string pairs = replaced(kMinimal, "\"points\": 16}", "\"points\": 16}, \"analysis\": {\"crossings\": [[\"a\", \"b\"]]}");
    CHECK(!violations_of(pairs).empty());
    const std::string prop = replaced(kMinimal, "\"points\": 16}", "\"points\": 16}, \"analysis\": {\"propagator\": \"ode\"}");
    CHECK(parse_config(prop).analysis.propagator == PropagatorMethod::Ode);
}

TEST_CASE("the edge-state preset parses to the expected experiment") {
    const auto* p = presets::find("edge_crossing");
    REQUIRE(p != nullptr);
    const auto cfg = parse_config(p->text);
    CHECK(cfg.model.hopping == 1.0);
    CHECK(cfg.model.gamma_gain == 0.2);
    CHECK(cfg.model.gamma_loss == 0.2);
    CHECK(cfg.model.sites == 40);
    CHECK(cfg.model.boundaries == std::vector<Boundary>{Boundary::Open});
    REQUIRE(cfg.states.size() == 2);
    CHECK(cfg.states[0].spec.side == Side::Left);
    CHECK(cfg.states[0].spec.width == 6);
    CHECK(cfg.states[0].spec.amplitude == 0.5);
    CHECK(cfg.states[1].spec.side == Side::Right);
    CHECK(cfg.states[1].spec.width == 2);
    CHECK(cfg.time.t_max == 100.0);
    CHECK(cfg.analysis.fits.size() == 3);
}

TEST_CASE("every shipped preset parses") {
    CHECK(presets::all().size() >= 6);
    CHECK(presets::find("no_such_preset") == nullptr);
    for (const auto& p : presets::all()) {
        CAPTURE(p.name);
        CHECK_NOTHROW(parse_config(p.text));
    }
}
