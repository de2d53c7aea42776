#pragma once

#include "qmpemba/dynamics.hpp"
#include "qmpemba/model.hpp"
#include "qmpemba/states.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qmpemba {

struct DistanceCurve {
    std::vector<double> times;
    std::vector<double> distances;
    std::string label;
    std::string model_fingerprint;
};

enum class CrossingVerdict { None, SingleCrossing, DoubleCrossing, MultipleCrossing };

std::string_view to_string(CrossingVerdict v);

struct CrossingReport {
    std::vector<double> crossing_times;
    // 1 if the first curve starts farther from the steady state, 2 if the
    // second does, 0 if they start within the tolerance band.
    int initially_farther = 0;
    CrossingVerdict verdict = CrossingVerdict::None;
};

// Relative band inside which D1 - D2 counts as zero.
inline constexpr double kCrossingBand = 1e-9;
// Bisection stops at this relative width of the bracket.
inline constexpr double kCrossingTimeTolerance = 1e-4;

// Sign changes of D1 - D2 outside the tolerance band, each refined by
// bisection on the supplied evaluators (or log-linear interpolation of the
// grids when none are given).
CrossingReport detect_crossings(const DistanceCurve& first, const DistanceCurve& second,
                                const DistanceFunction& first_eval = {},
                                const DistanceFunction& second_eval = {});

enum class FitKind { PowerLaw, Exponential };

std::string_view to_string(FitKind k);

struct FitWindow {
    double start = 0.0;
    double end = 0.0;
};

struct DecayFit {
    FitWindow window;
    FitKind kind = FitKind::PowerLaw;
    // Power law: slope of ln D against ln t. Exponential: decay rate, minus the
    // slope of ln D against t.
    double value = 0.0;
    double residual = 0.0;  // RMS misfit of ln D
    std::size_t points = 0;
};

inline constexpr std::size_t kMinFitPoints = 8;

DecayFit fit_power_law(const DistanceCurve& curve, FitWindow window);
DecayFit fit_exponential_rate(const DistanceCurve& curve, FitWindow window);

// Widest span in ln t over which the local log-log slope varies by less than
// 0.1 (at least kMinFitPoints points).
FitWindow detect_algebraic_window(const DistanceCurve& curve);

// Final decade of the curve: [t_max / 10, t_max].
FitWindow detect_exponential_window(const DistanceCurve& curve);

// e^{4 Gamma t} D(t)
DistanceCurve rescaled_curve(const DistanceCurve& curve, double decay_scale);

std::vector<double> linear_grid(double t_max, int points);
// 0 followed by points - 1 log-spaced values in [t_min, t_max].
std::vector<double> log_grid(double t_min, double t_max, int points);

std::string model_fingerprint(const LatticeModel& model);

// Shared steady state, generator and propagators for one model. Distance
// evaluations for different states are independent and may run concurrently.
class RelaxationEngine {
public:
    struct Options {
        // Forces a propagator; otherwise Gauge (open chain), Circulant (PBC with
        // a circulant deviation) or Spectral, with ODE as the last resort.
        std::optional<PropagatorMethod> method;
        std::optional<Matrix> steady_state;
        SteadyStateOptions steady_state_options;
    };

    explicit RelaxationEngine(const LatticeModel& model);
    RelaxationEngine(const LatticeModel& model, Options options);

    const LatticeModel& model() const { return model_; }
    const EffectiveHamiltonian& generator() const { return generator_; }
    const Matrix& steady_state() const { return steady_; }
    // "imposed", "supplied", or the Lyapunov method used.
    const std::string& steady_state_source() const { return steady_source_; }
    double steady_state_residual() const { return steady_residual_; }
    const std::string& fingerprint() const { return fingerprint_; }

    CorrelationState initial_deviation(const InitialStateSpec& spec) const;

    PropagatorMethod method_for(const Matrix& deviation) const;
    const Propagator& propagator_for(const Matrix& deviation) const;
    DistanceFunction distance_function(const Matrix& deviation) const;
    Matrix deviation_at(const Matrix& deviation, double t) const;

    DistanceCurve distance_curve(const Matrix& deviation, std::span<const double> t_grid,
                                 std::string label = {}) const;
    DistanceCurve distance_curve(const InitialStateSpec& spec, std::span<const double> t_grid,
                                 std::string label = {}) const;

private:
    LatticeModel model_;
    Options options_;
    EffectiveHamiltonian generator_;
    Matrix steady_;
    std::string steady_source_;
    double steady_residual_ = 0.0;
    std::string fingerprint_;
    // Built on first use: the circulant path often makes it unnecessary.
    mutable std::once_flag general_once_;
    mutable std::unique_ptr<Propagator> general_;
    std::unique_ptr<Propagator> circulant_;

    const Propagator& general() const;
};

DistanceCurve distance_curve(const LatticeModel& model, const InitialStateSpec& spec,
                             std::span<const double> t_grid);

}  // namespace qmpemba
