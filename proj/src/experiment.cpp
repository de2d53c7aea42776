#include "qmpemba/experiment.hpp"

#include "qmpemba/io.hpp"
#include "qmpemba/oracle.hpp"
#include "qmpemba/spectral.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <optional>

namespace qmpemba::experiment {

using Json = nlohmann::ordered_json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json numbers(const std::vector<double>& xs) {
    Json out = Json::array();
    for (double x : xs) out.push_back(number(x));
    return out;
}

std::string_view kind_name(InitialStateKind k) {
    switch (k) {
        case InitialStateKind::DiagonalEdge: return "diagonal_edge";
        case InitialStateKind::OffDiagonalBand: return "off_diagonal_band";
        case InitialStateKind::Uniform: return "uniform";
    }
    return "unknown";
}

struct OracleOutcome {
    std::string skipped;  // non-empty when the check did not run
    double max_abs_deviation = 0.0;
    std::optional<DistanceCurve> rho_curve;
};

struct StateOutcome {
    std::string label;
    std::string error;
    PropagatorMethod method = PropagatorMethod::Spectral;
    Matrix deviation;
    DistanceCurve curve;
    std::optional<OracleOutcome> oracle;

    bool ok() const { return error.empty(); }
};

// Liouvillian data shared by all states of one run.
struct OracleContext {
    oracle::LiouvillianMatrix liouvillian;
    oracle::FockOperators fock;
    std::optional<Matrix> rho_ss;  // only when its C matches the engine steady state
};

OracleOutcome oracle_check(const OracleContext& ctx, const RelaxationEngine& engine,
                           const Matrix& deviation, const std::vector<double>& grid) {
    OracleOutcome out;
    const Matrix full = engine.steady_state() + deviation;
    const int n = static_cast<int>(full.rows());
    double off = 0.0;
    std::vector<double> occupations(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) off = std::max(off, std::abs(full(i, j)));
        }
        occupations[static_cast<std::size_t>(i)] = full(i, i).real();
    }
    if (off > 1e-14) {
        out.skipped = "initial correlation matrix is not diagonal";
        return out;
    }
    const Matrix rho0 = oracle::product_state(occupations);
    const std::vector<Matrix> rhos = oracle::evolve_trajectory(rho0, ctx.liouvillian, grid);
    const DistanceFunction distance = engine.distance_function(deviation);
    DistanceCurve rho_curve;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Matrix c_oracle = oracle::correlation_from_rho(rhos[k], ctx.fock).matrix;
        const Matrix c_engine = engine.steady_state() + engine.deviation_at(deviation, grid[k]);
        out.max_abs_deviation =
            std::max(out.max_abs_deviation, (c_oracle - c_engine).cwiseAbs().maxCoeff());
        if (ctx.rho_ss) {
            rho_curve.times.push_back(grid[k]);
            rho_curve.distances.push_back(oracle::rho_hs_distance(rhos[k], *ctx.rho_ss));
        }
    }
    if (ctx.rho_ss) out.rho_curve = std::move(rho_curve);
    return out;
}

StateOutcome run_state(const RelaxationEngine& engine, const config::StateConfig& state,
                       const std::vector<double>& grid, const OracleContext* oracle_ctx) {
    StateOutcome out;
    out.label = state.label;
    try {
        out.deviation = engine.initial_deviation(state.spec).matrix;
        out.method = engine.method_for(out.deviation);
        out.curve = engine.distance_curve(out.deviation, grid, state.label);
        if (oracle_ctx) out.oracle = oracle_check(*oracle_ctx, engine, out.deviation, grid);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> crossing_pairs(
    const config::ExperimentConfig& cfg) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (!cfg.analysis.crossings) return out;
    if (cfg.analysis.pairs.empty()) {
        for (std::size_t i = 0; i < cfg.states.size(); ++i) {
            for (std::size_t j = i + 1; j < cfg.states.size(); ++j) out.emplace_back(i, j);
        }
        return out;
    }
    auto index = [&](const std::string& label) {
        for (std::size_t i = 0; i < cfg.states.size(); ++i) {
            if (cfg.states[i].label == label) return i;
        }
        throw InvalidParameter("unknown state label " + label);
    };
    for (const auto& p : cfg.analysis.pairs) out.emplace_back(index(p.first), index(p.second));
    return out;
}

Json crossing_json(const CrossingReport& report, const std::string& first,
                   const std::string& second) {
    Json j;
    j["verdict"] = to_string(report.verdict);
    j["crossing_times"] = numbers(report.crossing_times);
    j["initially_farther"] = report.initially_farther == 1   ? Json(first)
                             : report.initially_farther == 2 ? Json(second)
                                                             : Json(nullptr);
    j["mpemba"] = report.initially_farther != 0 && !report.crossing_times.empty();
    return j;
}

struct Writer {
    std::filesystem::path root;
    std::vector<ManifestEntry> files;

    void write(const std::string& relative, const std::string& bytes) {
        io::write_file(root / relative, bytes);
        files.push_back({relative, io::sha256_hex(bytes), bytes.size()});
    }
};

std::vector<double> match_deviation(const Vector& numeric, const std::vector<cplx>& analytic) {
    // Greedy nearest-neighbour matching of the two multisets.
    std::vector<bool> used(static_cast<std::size_t>(numeric.size()), false);
    std::vector<double> out;
    for (const cplx& a : analytic) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < used.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(numeric(static_cast<Eigen::Index>(i)) - a);
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        if (best_i < used.size()) used[best_i] = true;
        out.push_back(best);
    }
    return out;
}

Json spectra(const config::ExperimentConfig& cfg, Writer& writer) {
    Json out;
    for (Boundary b : {Boundary::Open, Boundary::Periodic}) {
        const std::string name = lower(to_string(b));
        Json entry;
        try {
            const LatticeModel model = LatticeModel::chain(cfg.model.chain(b));
            const EigenSystem sys = biorthogonal_eigensystem(effective_hamiltonian(model));
            const LocalizationReport loc = localization_profile(sys);
            const auto analytic =
                b == Boundary::Open
                    ? analytic_spectrum_obc(cfg.model.hopping, cfg.model.gamma_gain,
                                            cfg.model.gamma_loss, cfg.model.sites)
                    : analytic_spectrum_pbc(cfg.model.hopping, cfg.model.gamma_gain,
                                            cfg.model.gamma_loss, cfg.model.sites);
            const auto dev = match_deviation(sys.eigenvalues, analytic);
            std::string csv = "index,re,im,mean_position,slope\n";
            for (int i = 0; i < sys.size(); ++i) {
                const auto k = static_cast<std::size_t>(i);
                csv += std::to_string(i) + "," + io::format_double(sys.eigenvalues(i).real()) +
                       "," + io::format_double(sys.eigenvalues(i).imag()) + "," +
                       io::format_double(loc.mean_position[k]) + "," +
                       io::format_double(loc.envelope_slope[k]) + "\n";
            }
            const std::string file = "spectra_" + name + ".csv";
            if (cfg.output.csv) {
                writer.write(file, csv);
                entry["file"] = file;
            }
            entry["max_deviation_from_analytic"] = number(*std::max_element(dev.begin(), dev.end()));
            entry["biorthogonality_defect"] = number(sys.biorthogonality_defect);
            entry["aggregate_slope"] = number(loc.aggregate_slope);
            // The ring has no edge to localise at.
            entry["theoretical_slope"] = loc.theoretical_slope && b == Boundary::Open
                                             ? number(*loc.theoretical_slope)
                                             : Json(nullptr);
            double mean = 0.0;
            for (double x : loc.mean_position) mean += x;
            entry["average_mean_position"] = number(mean / sys.size());
        } catch (const std::exception& e) {
            entry["error"] = e.what();
        }
        out[name] = std::move(entry);
    }
    return out;
}

}  // namespace

std::string curve_csv(const DistanceCurve& curve, double decay_scale) {
    const DistanceCurve rescaled = rescaled_curve(curve, decay_scale);
    std::string out = "t,D,rescaled_D\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        out += io::format_double(curve.times[i]);
        out += ',';
        out += io::format_double(curve.distances[i]);
        out += ',';
        out += io::format_double(rescaled.distances[i]);
        out += '\n';
    }
    return out;
}

RunSummary run_experiment(const config::ExperimentConfig& cfg,
                          const std::filesystem::path& directory) {
    Writer writer;
    writer.root = directory.empty() ? std::filesystem::path(cfg.output.directory) : directory;
    std::filesystem::create_directories(writer.root);

    RunSummary summary;
    summary.directory = writer.root;

    Json report;
    report["schema_version"] = config::kSchemaVersion;
    report["seed"] = cfg.seed;
    Json model;
    model["J"] = cfg.model.hopping;
    model["gamma_g"] = cfg.model.gamma_gain;
    model["gamma_l"] = cfg.model.gamma_loss;
    model["L"] = cfg.model.sites;
    model["edge_compensation"] = cfg.model.edge_compensation;
    model["skin"] = to_string(cfg.model.skin);
    model["decay_scale"] = cfg.model.chain(Boundary::Open).decay_scale();
    report["model"] = model;

    const bool multi = cfg.model.boundaries.size() > 1;
    const std::vector<double> grid =
        cfg.states.empty() ? std::vector<double>{} : config::time_grid(cfg.time);
    if (!cfg.states.empty()) {
        Json time;
        time["grid"] = cfg.time.grid == config::GridKind::Linear ? "linear" : "log";
        time["t_max"] = cfg.time.t_max;
        time["points"] = cfg.time.points;
        if (cfg.time.grid == config::GridKind::Log) time["t_min"] = cfg.time.t_min;
        report["time"] = time;
    }

    Json runs = Json::array();
    for (Boundary boundary : cfg.states.empty() ? std::vector<Boundary>{}
                                                : cfg.model.boundaries) {
        Json run;
        run["boundary"] = to_string(boundary);
        const ChainParameters params = cfg.model.chain(boundary);
        std::optional<RelaxationEngine> engine;
        try {
            RelaxationEngine::Options options;
            options.method = cfg.analysis.propagator;
            engine.emplace(LatticeModel::chain(params), options);
        } catch (const std::exception& e) {
            run["error"] = e.what();
            summary.failed_states += static_cast<int>(cfg.states.size());
            runs.push_back(std::move(run));
            continue;
        }
        run["fingerprint"] = engine->fingerprint();
        run["steady_state"] = {{"source", engine->steady_state_source()},
                               {"residual", number(engine->steady_state_residual())}};

        std::optional<OracleContext> oracle_ctx;
        Json oracle_info;
        if (cfg.analysis.oracle_check) {
            try {
                OracleContext ctx{oracle::build_liouvillian(engine->model()),
                                  oracle::FockOperators(params.sites), std::nullopt};
                const Matrix rho_ss = oracle::steady_state_rho(ctx.liouvillian);
                const double mismatch = (oracle::correlation_from_rho(rho_ss, ctx.fock).matrix -
                                         engine->steady_state())
                                            .cwiseAbs()
                                            .maxCoeff();
                oracle_info["steady_state_mismatch"] = number(mismatch);
                if (mismatch < 1e-8) ctx.rho_ss = rho_ss;
                oracle_info["trace_defect"] = number(oracle::trace_defect(ctx.liouvillian));
                oracle_info["liouvillian_gap"] =
                    number(oracle::liouvillian_spectrum(ctx.liouvillian).gap);
                oracle_ctx.emplace(std::move(ctx));
            } catch (const std::exception& e) {
                oracle_info["error"] = e.what();
            }
            run["oracle"] = oracle_info;
        }

        std::vector<std::future<StateOutcome>> pending;
        for (const auto& state : cfg.states) {
            pending.push_back(std::async(std::launch::async, run_state, std::cref(*engine),
                                         std::cref(state), std::cref(grid),
                                         oracle_ctx ? &*oracle_ctx : nullptr));
        }
        std::vector<StateOutcome> outcomes;
        for (auto& f : pending) outcomes.push_back(f.get());

        const std::string suffix = multi ? "_" + lower(to_string(boundary)) : "";
        Json states = Json::array();
        for (const StateOutcome& s : outcomes) {
            Json j;
            j["label"] = s.label;
            const auto& spec = cfg.states[static_cast<std::size_t>(&s - outcomes.data())].spec;
            j["kind"] = kind_name(spec.kind);
            if (!s.ok()) {
                j["status"] = "error";
                j["error"] = s.error;
                ++summary.failed_states;
                states.push_back(std::move(j));
                continue;
            }
            j["status"] = "ok";
            j["propagator"] = to_string(s.method);
            j["initial_distance"] = number(s.curve.distances.front());
            j["final_distance"] = number(s.curve.distances.back());
            if (cfg.output.csv) {
                const std::string file = "curve_" + s.label + suffix + ".csv";
                writer.write(file, curve_csv(s.curve, params.decay_scale()));
                j["curve_file"] = file;
            }
            if (s.oracle) {
                Json o;
                if (!s.oracle->skipped.empty()) {
                    o["skipped"] = s.oracle->skipped;
                } else {
                    o["max_abs_deviation"] = number(s.oracle->max_abs_deviation);
                    o["points"] = grid.size();
                }
                j["oracle"] = o;
            }
            states.push_back(std::move(j));
        }
        run["states"] = states;

        Json crossings = Json::array();
        for (auto [a, b] : crossing_pairs(cfg)) {
            const StateOutcome& first = outcomes[a];
            const StateOutcome& second = outcomes[b];
            Json j;
            j["first"] = first.label;
            j["second"] = second.label;
            if (!first.ok() || !second.ok()) {
                j["error"] = "state failed";
                crossings.push_back(std::move(j));
                continue;
            }
            try {
                const CrossingReport rep =
                    detect_crossings(first.curve, second.curve,
                                     engine->distance_function(first.deviation),
                                     engine->distance_function(second.deviation));
                j.update(crossing_json(rep, first.label, second.label));
                if (first.oracle && second.oracle && first.oracle->rho_curve &&
                    second.oracle->rho_curve) {
                    const CrossingReport rho =
                        detect_crossings(*first.oracle->rho_curve, *second.oracle->rho_curve);
                    j["rho_level"] = crossing_json(rho, first.label, second.label);
                }
            } catch (const std::exception& e) {
                j["error"] = e.what();
            }
            crossings.push_back(std::move(j));
        }
        if (cfg.analysis.crossings) run["crossings"] = crossings;

        Json fits = Json::array();
        for (const auto& fit : cfg.analysis.fits) {
            if (fit.boundary && *fit.boundary != boundary) continue;
            Json j;
            j["state"] = fit.state;
            j["kind"] = to_string(fit.kind);
            j["rescaled"] = fit.rescaled;
            const auto it = std::find_if(outcomes.begin(), outcomes.end(),
                                         [&](const StateOutcome& s) { return s.label == fit.state; });
            if (it == outcomes.end() || !it->ok()) {
                j["error"] = "state failed";
                fits.push_back(std::move(j));
                continue;
            }
            try {
                const DistanceCurve curve = fit.rescaled
                                                ? rescaled_curve(it->curve, params.decay_scale())
                                                : it->curve;
                const FitWindow window = fit.window ? *fit.window
                                         : fit.kind == FitKind::PowerLaw
                                             ? detect_algebraic_window(curve)
                                             : detect_exponential_window(curve);
                const DecayFit result = fit.kind == FitKind::PowerLaw
                                            ? fit_power_law(curve, window)
                                            : fit_exponential_rate(curve, window);
                j["window"] = {number(window.start), number(window.end)};
                j["window_source"] = fit.window ? "config" : "auto";
                j["value"] = number(result.value);
                j["residual"] = number(result.residual);
                j["points"] = result.points;
            } catch (const std::exception& e) {
                j["error"] = e.what();
            }
            fits.push_back(std::move(j));
        }
        if (!cfg.analysis.fits.empty()) run["fits"] = fits;
        runs.push_back(std::move(run));
    }
    if (!cfg.states.empty()) report["runs"] = runs;
    if (cfg.analysis.spectra) report["spectra"] = spectra(cfg, writer);
    report["failed_states"] = summary.failed_states;

    summary.report = report.dump(2) + "\n";
    if (cfg.output.json) writer.write("report.json", summary.report);

    std::sort(writer.files.begin(), writer.files.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    Json manifest;
    manifest["schema_version"] = config::kSchemaVersion;
    Json files = Json::array();
    for (const auto& f : writer.files) {
        files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    manifest["files"] = files;
    io::write_file(writer.root / "manifest.json", manifest.dump(2) + "\n");
    summary.files = writer.files;
    return summary;
}

}  // namespace qmpemba::experiment
