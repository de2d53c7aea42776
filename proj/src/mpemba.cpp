#include "qmpemba/mpemba.hpp"

#include "qmpemba/errors.hpp"
#include "qmpemba/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qmpemba {

std::string_view to_string(CrossingVerdict v) {
    switch (v) {
        case CrossingVerdict::None: return "none";
        case CrossingVerdict::SingleCrossing: return "single-crossing";
        case CrossingVerdict::DoubleCrossing: return "double-crossing";
        case CrossingVerdict::MultipleCrossing: return "multiple-crossing";
    }
    return "unknown";
}

std::string_view to_string(FitKind k) {
    return k == FitKind::PowerLaw ? "power_law" : "exponential";
}

namespace {

int banded_sign(double a, double b) {
    const double diff = a - b;
    if (std::abs(diff) <= kCrossingBand * std::max(std::abs(a), std::abs(b))) return 0;
    return diff > 0.0 ? 1 : -1;
}

double refine_by_bisection(double lo, double hi, int lo_sign, const DistanceFunction& f1,
                           const DistanceFunction& f2) {
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= kCrossingTimeTolerance * std::max(mid, 1e-300)) return mid;
        const int s = banded_sign(f1(mid), f2(mid));
        if (s == 0) return mid;
        if (s == lo_sign) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double refine_by_interpolation(const DistanceCurve& a, const DistanceCurve& b, std::size_t lo,
                               std::size_t hi) {
    auto gap = [&](std::size_t i) {
        if (a.distances[i] > 0.0 && b.distances[i] > 0.0) {
            return std::log(a.distances[i]) - std::log(b.distances[i]);
        }
        return a.distances[i] - b.distances[i];
    };
    const double g0 = gap(lo);
    const double g1 = gap(hi);
    const double t0 = a.times[lo];
    const double t1 = a.times[hi];
    if (g0 == g1) return 0.5 * (t0 + t1);
    return t0 + (t1 - t0) * g0 / (g0 - g1);
}

struct LineFit {
    double slope = 0.0;
    double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("fit window has no spread in the abscissa");
    LineFit fit;
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

DecayFit fit_decay(const DistanceCurve& curve, FitWindow window, FitKind kind) {
    if (curve.times.size() != curve.distances.size()) {
        throw InvalidParameter("curve times and distances differ in length");
    }
    if (!(window.start < window.end)) throw FitError("fit window must satisfy start < end");
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        const double t = curve.times[i];
        if (t < window.start || t > window.end) continue;
        if (kind == FitKind::PowerLaw && t <= 0.0) continue;
        if (!(curve.distances[i] > 0.0)) {
            throw FitError("non-positive distance inside the fit window at t = " +
                           io::format_double(t));
        }
        x.push_back(kind == FitKind::PowerLaw ? std::log(t) : t);
        y.push_back(std::log(curve.distances[i]));
    }
    if (x.size() < kMinFitPoints) {
        throw FitError("fit window holds " + std::to_string(x.size()) + " grid points; need " +
                       std::to_string(kMinFitPoints));
    }
    const LineFit line = fit_line(x, y);
    DecayFit fit;
    fit.window = window;
    fit.kind = kind;
    fit.value = kind == FitKind::PowerLaw ? line.slope : -line.slope;
    fit.residual = line.rms;
    fit.points = x.size();
    return fit;
}

}  // namespace

CrossingReport detect_crossings(const DistanceCurve& first, const DistanceCurve& second,
                                const DistanceFunction& first_eval,
                                const DistanceFunction& second_eval) {
    if (first.times.size() != second.times.size() ||
        first.distances.size() != first.times.size() ||
        second.distances.size() != second.times.size()) {
        throw InvalidParameter("crossing detection needs curves on identical grids");
    }
    for (std::size_t i = 0; i < first.times.size(); ++i) {
        if (first.times[i] != second.times[i]) {
            throw InvalidParameter("crossing detection needs curves on identical grids");
        }
    }
    CrossingReport report;
    if (first.times.empty()) return report;

    const int initial = banded_sign(first.distances[0], second.distances[0]);
    report.initially_farther = initial > 0 ? 1 : (initial < 0 ? 2 : 0);

    const bool bisect = static_cast<bool>(first_eval) && static_cast<bool>(second_eval);
    int last_sign = initial;
    std::size_t last_index = 0;
    for (std::size_t i = 0; i < first.times.size(); ++i) {
        const int s = banded_sign(first.distances[i], second.distances[i]);
        if (s == 0) continue;
        if (last_sign != 0 && s != last_sign) {
            const double t = bisect ? refine_by_bisection(first.times[last_index], first.times[i],
                                                          last_sign, first_eval, second_eval)
                                    : refine_by_interpolation(first, second, last_index, i);
            report.crossing_times.push_back(t);
        }
        last_sign = s;
        last_index = i;
    }
    switch (report.crossing_times.size()) {
        case 0: report.verdict = CrossingVerdict::None; break;
        case 1: report.verdict = CrossingVerdict::SingleCrossing; break;
        case 2: report.verdict = CrossingVerdict::DoubleCrossing; break;
        default: report.verdict = CrossingVerdict::MultipleCrossing; break;
    }
    return report;
}

DecayFit fit_power_law(const DistanceCurve& curve, FitWindow window) {
    return fit_decay(curve, window, FitKind::PowerLaw);
}

DecayFit fit_exponential_rate(const DistanceCurve& curve, FitWindow window) {
    return fit_decay(curve, window, FitKind::Exponential);
}

FitWindow detect_algebraic_window(const DistanceCurve& curve) {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> t;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        if (curve.times[i] > 0.0 && curve.distances[i] > 0.0) {
            t.push_back(curve.times[i]);
            x.push_back(std::log(curve.times[i]));
            y.push_back(std::log(curve.distances[i]));
        }
    }
    if (x.size() < kMinFitPoints) throw FitError("curve too short for regime detection");
    std::vector<double> slope(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        slope[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    }
    double best_span = -1.0;
    FitWindow best;
    for (std::size_t a = 0; a < slope.size(); ++a) {
        double lo = slope[a];
        double hi = slope[a];
        std::size_t b = a;
        while (b + 1 < slope.size()) {
            const double nlo = std::min(lo, slope[b + 1]);
            const double nhi = std::max(hi, slope[b + 1]);
            if (nhi - nlo >= 0.1) break;
            lo = nlo;
            hi = nhi;
            ++b;
        }
        // Slopes a..b cover points a..b+1.
        if (b + 2 - a < kMinFitPoints) continue;
        const double span = x[b + 1] - x[a];
        if (span > best_span) {
            best_span = span;
            best = FitWindow{t[a], t[b + 1]};
        }
    }
    if (best_span < 0.0) throw FitError("no algebraic regime found");
    return best;
}

FitWindow detect_exponential_window(const DistanceCurve& curve) {
    if (curve.times.empty()) throw FitError("empty curve");
    const double t_max = curve.times.back();
    return FitWindow{t_max / 10.0, t_max};
}

DistanceCurve rescaled_curve(const DistanceCurve& curve, double decay_scale) {
    DistanceCurve out = curve;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        out.distances[i] *= std::exp(4.0 * decay_scale * out.times[i]);
    }
    return out;
}

std::vector<double> linear_grid(double t_max, int points) {
    if (points < 2 || !(t_max > 0.0)) throw InvalidParameter("linear grid needs t_max > 0, points >= 2");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = t_max * i / (points - 1);
    out.back() = t_max;
    return out;
}

std::vector<double> log_grid(double t_min, double t_max, int points) {
    if (points < 3 || !(t_min > 0.0) || !(t_max > t_min)) {
        throw InvalidParameter("log grid needs 0 < t_min < t_max and points >= 3");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(points));
    out.push_back(0.0);
    const double ratio = std::log(t_max / t_min);
    const int n = points - 1;
    for (int i = 0; i < n; ++i) out.push_back(t_min * std::exp(ratio * i / (n - 1)));
    out[1] = t_min;
    out.back() = t_max;
    return out;
}

std::string model_fingerprint(const LatticeModel& model) {
    std::ostringstream desc;
    if (const auto& c = model.chain_parameters()) {
        desc << "chain;J=" << io::format_double(c->hopping)
             << ";gamma_g=" << io::format_double(c->gamma_gain)
             << ";gamma_l=" << io::format_double(c->gamma_loss) << ";L=" << c->sites
             << ";boundary=" << to_string(c->boundary)
             << ";edge_compensation=" << (c->edge_compensation ? 1 : 0)
             << ";skin=" << to_string(c->skin);
    } else {
        desc << "custom;boundary=" << to_string(model.boundary()) << ";L=" << model.size();
        for (const Matrix* m : {&model.hamiltonian(), &model.gain_coeffs(), &model.loss_coeffs()}) {
            desc << ";" << m->rows() << "x" << m->cols() << ":";
            for (Eigen::Index i = 0; i < m->size(); ++i) {
                desc << io::format_double(m->data()[i].real()) << ","
                     << io::format_double(m->data()[i].imag()) << ",";
            }
        }
    }
    return io::sha256_hex(desc.str()).substr(0, 16);
}

// ---------------------------------------------------------------------------

RelaxationEngine::RelaxationEngine(const LatticeModel& model)
    : RelaxationEngine(model, Options{}) {}

RelaxationEngine::RelaxationEngine(const LatticeModel& model, Options options)
    : model_(model),
      options_(std::move(options)),
      generator_(effective_hamiltonian(model)),
      fingerprint_(model_fingerprint(model)) {
    const auto& chain = model_.chain_parameters();
    if (options_.steady_state) {
        if (options_.steady_state->rows() != model_.size() ||
            options_.steady_state->cols() != model_.size()) {
            throw InvalidParameter("supplied steady state has the wrong size");
        }
        steady_ = *options_.steady_state;
        steady_source_ = "supplied";
        steady_residual_ =
            lyapunov_residual(generator_.matrix, dissipator_matrices(model_).gain, steady_);
    } else if (model_.boundary() == Boundary::Periodic && chain &&
               chain->gamma_gain == chain->gamma_loss) {
        // The ring has a non-decaying mode, so the Lyapunov problem is singular;
        // with balanced gain and loss the steady state is half filling.
        steady_ = 0.5 * Matrix::Identity(model_.size(), model_.size());
        steady_source_ = "imposed";
        steady_residual_ =
            lyapunov_residual(generator_.matrix, dissipator_matrices(model_).gain, steady_);
    } else {
        SteadyStateResult solved = solve_steady_state(model_, options_.steady_state_options);
        steady_ = std::move(solved.state.matrix);
        steady_source_ = std::string(to_string(solved.method));
        steady_residual_ = solved.residual;
    }

    if (!options_.method) {
        if (model_.boundary() == Boundary::Periodic) {
            try {
                circulant_ = make_propagator(generator_, PropagatorMethod::Circulant);
            } catch (const NotTranslationInvariant&) {
            }
        }
    }
}

CorrelationState RelaxationEngine::initial_deviation(const InitialStateSpec& spec) const {
    return build_initial_state(spec, model_.size(), model_.boundary(), steady_);
}

const Propagator& RelaxationEngine::general() const {
    std::call_once(general_once_, [this] {
        general_ = options_.method ? make_propagator(generator_, *options_.method)
                                   : make_default_propagator(generator_);
    });
    return *general_;
}

const Propagator& RelaxationEngine::propagator_for(const Matrix& deviation) const {
    if (circulant_ && is_circulant(deviation)) return *circulant_;
    return general();
}

PropagatorMethod RelaxationEngine::method_for(const Matrix& deviation) const {
    return propagator_for(deviation).method();
}

DistanceFunction RelaxationEngine::distance_function(const Matrix& deviation) const {
    return propagator_for(deviation).distance_function(deviation);
}

Matrix RelaxationEngine::deviation_at(const Matrix& deviation, double t) const {
    return propagator_for(deviation).propagate(deviation, t);
}

DistanceCurve RelaxationEngine::distance_curve(const Matrix& deviation,
                                               std::span<const double> t_grid,
                                               std::string label) const {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
            throw InvalidParameter("time grid must be non-negative and strictly increasing");
        }
    }
    const DistanceFunction distance = distance_function(deviation);
    DistanceCurve curve;
    curve.label = std::move(label);
    curve.model_fingerprint = fingerprint_;
    curve.times.assign(t_grid.begin(), t_grid.end());
    curve.distances.reserve(t_grid.size());
    for (double t : t_grid) curve.distances.push_back(distance(t));
    return curve;
}

DistanceCurve RelaxationEngine::distance_curve(const InitialStateSpec& spec,
                                               std::span<const double> t_grid,
                                               std::string label) const {
    return distance_curve(initial_deviation(spec).matrix, t_grid, std::move(label));
}

DistanceCurve distance_curve(const LatticeModel& model, const InitialStateSpec& spec,
                             std::span<const double> t_grid) {
    return RelaxationEngine(model).distance_curve(spec, t_grid);
}

}  // namespace qmpemba
