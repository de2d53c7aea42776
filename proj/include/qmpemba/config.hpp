#pragma once

#include "qmpemba/errors.hpp"
#include "qmpemba/mpemba.hpp"
#include "qmpemba/model.hpp"
#include "qmpemba/states.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qmpemba::config {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kMinGridPoints = 16;
// Dense 4^L superoperator exponentials get slow beyond this.
inline constexpr int kOracleCheckMaxSites = 5;

struct ModelConfig {
    double hopping = 1.0;
    double gamma_gain = 0.0;
    double gamma_loss = 0.0;
    int sites = 0;
    // One run per listed boundary.
    std::vector<Boundary> boundaries{Boundary::Open};
    bool edge_compensation = true;
    SkinDirection skin = SkinDirection::Left;

    ChainParameters chain(Boundary boundary) const;
};

struct StateConfig {
    std::string label;
    InitialStateSpec spec;
};

enum class GridKind { Linear, Log };

struct TimeConfig {
    double t_max = 0.0;
    GridKind grid = GridKind::Linear;
    int points = 0;
    double t_min = 0.0;  // log grid only
};

struct CrossingPair {
    std::string first;
    std::string second;
};

struct FitConfig {
    std::string state;
    FitKind kind = FitKind::Exponential;
    std::optional<FitWindow> window;  // nullopt: detect automatically
    bool rescaled = false;
    std::optional<Boundary> boundary;  // nullopt: every run
};

struct AnalysisConfig {
    bool crossings = true;
    std::vector<CrossingPair> pairs;  // empty with crossings on: every pair
    std::vector<FitConfig> fits;
    bool spectra = false;
    std::optional<PropagatorMethod> propagator;
    bool oracle_check = false;
};

struct OutputConfig {
    std::string directory = "qmpemba_output";
    bool csv = true;
    bool json = true;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    ModelConfig model;
    std::vector<StateConfig> states;
    TimeConfig time;
    AnalysisConfig analysis;
    OutputConfig output;
    std::uint64_t seed = 0;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Collects every violation before throwing ConfigError.
ExperimentConfig parse_config(std::string_view text);

std::vector<double> time_grid(const TimeConfig& time);

}  // namespace qmpemba::config
