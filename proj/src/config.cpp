#include "qmpemba/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace qmpemba::config {

using nlohmann::json;

ChainParameters ModelConfig::chain(Boundary boundary) const {
    ChainParameters p;
    p.hopping = hopping;
    p.gamma_gain = gamma_gain;
    p.gamma_loss = gamma_loss;
    p.sites = sites;
    p.boundary = boundary;
    p.edge_compensation = edge_compensation;
    p.skin = skin;
    return p;
}

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& line : v) out += "\n  " + line;
    return out;
}

class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& message) {
        errors.push_back(path + ": " + message);
    }

    // Checks the node is an object and flags keys outside `allowed`.
    bool object(const json& node, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
        if (!node.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& item : node.items()) {
            if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
                fail(join(path, item.key()), "unknown key");
            }
        }
        return true;
    }

    static std::string join(const std::string& path, std::string_view key) {
        return path.empty() ? std::string(key) : path + "." + std::string(key);
    }

    const json* field(const json& node, std::string_view key, const std::string& path,
                      bool required) {
        const auto it = node.find(std::string(key));
        if (it == node.end()) {
            if (required) fail(join(path, key), "missing required field");
            return nullptr;
        }
        return &*it;
    }

    std::optional<double> number(const json& node, std::string_view key, const std::string& path,
                                 bool required) {
        const json* v = field(node, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_number()) {
            fail(join(path, key), "expected a number");
            return std::nullopt;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) {
            fail(join(path, key), "must be finite");
            return std::nullopt;
        }
        return x;
    }

    std::optional<long long> integer(const json& node, std::string_view key,
                                     const std::string& path, bool required) {
        const json* v = field(node, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_number_integer()) {
            fail(join(path, key), "expected an integer");
            return std::nullopt;
        }
        return v->get<long long>();
    }

    std::optional<bool> boolean(const json& node, std::string_view key, const std::string& path,
                                bool required) {
        const json* v = field(node, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_boolean()) {
            fail(join(path, key), "expected true or false");
            return std::nullopt;
        }
        return v->get<bool>();
    }

    std::optional<std::string> string(const json& node, std::string_view key,
                                      const std::string& path, bool required) {
        const json* v = field(node, key, path, required);
        if (!v) return std::nullopt;
        if (!v->is_string()) {
            fail(join(path, key), "expected a string");
            return std::nullopt;
        }
        return v->get<std::string>();
    }

    // A real number or a [re, im] pair.
    std::optional<cplx> complex(const json& node, std::string_view key, const std::string& path,
                                bool required) {
        const json* v = field(node, key, path, required);
        if (!v) return std::nullopt;
        const std::string where = join(path, key);
        if (v->is_number()) return cplx{v->get<double>(), 0.0};
        if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
            return cplx{(*v)[0].get<double>(), (*v)[1].get<double>()};
        }
        fail(where, "expected a number or a [re, im] pair");
        return std::nullopt;
    }
};

std::optional<Boundary> parse_boundary(Reader& r, const json& v, const std::string& path) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "OBC" || s == "open") return Boundary::Open;
        if (s == "PBC" || s == "periodic") return Boundary::Periodic;
    }
    r.fail(path, "expected \"OBC\" or \"PBC\"");
    return std::nullopt;
}

std::optional<PropagatorMethod> parse_propagator(Reader& r, const std::string& s,
                                                 const std::string& path, bool& is_auto) {
    is_auto = false;
    if (s == "auto") {
        is_auto = true;
        return std::nullopt;
    }
    if (s == "spectral") return PropagatorMethod::Spectral;
    if (s == "gauge") return PropagatorMethod::Gauge;
    if (s == "ode") return PropagatorMethod::Ode;
    if (s == "circulant") return PropagatorMethod::Circulant;
    r.fail(path, "expected one of auto, spectral, gauge, ode, circulant");
    return std::nullopt;
}

void parse_model(Reader& r, const json& node, ModelConfig& m) {
    const std::string path = "model";
    if (!r.object(node, path,
                  {"J", "gamma_g", "gamma_l", "L", "boundary", "edge_compensation", "skin"})) {
        return;
    }
    if (auto v = r.number(node, "J", path, true)) {
        if (*v < 0.0) r.fail("model.J", "must be >= 0");
        m.hopping = *v;
    }
    if (auto v = r.number(node, "gamma_g", path, true)) {
        if (*v < 0.0) r.fail("model.gamma_g", "must be >= 0");
        m.gamma_gain = *v;
    }
    if (auto v = r.number(node, "gamma_l", path, true)) {
        if (*v < 0.0) r.fail("model.gamma_l", "must be >= 0");
        m.gamma_loss = *v;
    }
    if (auto v = r.integer(node, "L", path, true)) {
        if (*v < 2 || *v > kDefaultMaxSites) {
            r.fail("model.L", "must lie in [2, " + std::to_string(kDefaultMaxSites) + "]");
        } else {
            m.sites = static_cast<int>(*v);
        }
    }
    if (const json* b = r.field(node, "boundary", path, false)) {
        m.boundaries.clear();
        if (b->is_array()) {
            if (b->empty()) r.fail("model.boundary", "list must not be empty");
            for (std::size_t i = 0; i < b->size(); ++i) {
                const std::string where = "model.boundary[" + std::to_string(i) + "]";
                if (auto bc = parse_boundary(r, (*b)[i], where)) {
                    if (std::find(m.boundaries.begin(), m.boundaries.end(), *bc) !=
                        m.boundaries.end()) {
                        r.fail(where, "duplicate boundary");
                    } else {
                        m.boundaries.push_back(*bc);
                    }
                }
            }
        } else if (auto bc = parse_boundary(r, *b, "model.boundary")) {
            m.boundaries.push_back(*bc);
        }
    }
    if (auto v = r.boolean(node, "edge_compensation", path, false)) m.edge_compensation = *v;
    if (auto v = r.string(node, "skin", path, false)) {
        if (*v == "left") {
            m.skin = SkinDirection::Left;
        } else if (*v == "right") {
            m.skin = SkinDirection::Right;
        } else {
            r.fail("model.skin", "expected \"left\" or \"right\"");
        }
    }
}

bool valid_label(const std::string& label) {
    if (label.empty() || label.size() > 64) return false;
    return std::all_of(label.begin(), label.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-';
    });
}

void parse_state(Reader& r, const json& node, const std::string& path, StateConfig& s) {
    if (!node.is_object()) {
        r.fail(path, "expected an object");
        return;
    }
    const auto kind = r.string(node, "kind", path, true);
    if (kind == "diagonal_edge") {
        r.object(node, path, {"label", "kind", "side", "width", "amplitude"});
        s.spec.kind = InitialStateKind::DiagonalEdge;
        if (auto side = r.string(node, "side", path, true)) {
            if (*side == "left") {
                s.spec.side = Side::Left;
            } else if (*side == "right") {
                s.spec.side = Side::Right;
            } else {
                r.fail(path + ".side", "expected \"left\" or \"right\"");
            }
        }
        if (auto w = r.integer(node, "width", path, true)) {
            if (*w < 1) r.fail(path + ".width", "must be >= 1");
            s.spec.width = static_cast<int>(std::clamp<long long>(*w, 0, 1 << 20));
        }
        if (auto a = r.number(node, "amplitude", path, true)) {
            if (std::abs(*a) > 0.5) r.fail(path + ".amplitude", "|amplitude| must be <= 0.5");
            s.spec.amplitude = *a;
        }
    } else if (kind == "off_diagonal_band") {
        r.object(node, path, {"label", "kind", "bands"});
        s.spec.kind = InitialStateKind::OffDiagonalBand;
        const json* bands = r.field(node, "bands", path, true);
        if (bands && (!bands->is_array() || bands->empty())) {
            r.fail(path + ".bands", "expected a non-empty list");
        } else if (bands) {
            for (std::size_t i = 0; i < bands->size(); ++i) {
                const std::string where = path + ".bands[" + std::to_string(i) + "]";
                const json& b = (*bands)[i];
                if (!r.object(b, where, {"offset", "amplitude"})) continue;
                Band band;
                if (auto d = r.integer(b, "offset", where, true)) {
                    band.offset = static_cast<int>(std::clamp<long long>(*d, -(1 << 20), 1 << 20));
                }
                if (auto a = r.complex(b, "amplitude", where, true)) band.amplitude = *a;
                s.spec.bands.push_back(band);
            }
        }
    } else if (kind == "uniform") {
        r.object(node, path, {"label", "kind", "amplitude"});
        s.spec.kind = InitialStateKind::Uniform;
        if (auto a = r.number(node, "amplitude", path, true)) {
            if (std::abs(*a) > 0.5) r.fail(path + ".amplitude", "|amplitude| must be <= 0.5");
            s.spec.amplitude = *a;
        }
    } else if (kind) {
        r.fail(path + ".kind", "expected diagonal_edge, off_diagonal_band or uniform");
    }
}

void parse_time(Reader& r, const json& node, TimeConfig& t) {
    const std::string path = "time";
    if (!r.object(node, path, {"t_max", "grid", "points", "t_min"})) return;
    if (auto v = r.number(node, "t_max", path, true)) {
        if (*v <= 0.0) r.fail("time.t_max", "must be > 0");
        t.t_max = *v;
    }
    if (auto v = r.integer(node, "points", path, true)) {
        if (*v < kMinGridPoints || *v > 1'000'000) {
            r.fail("time.points", "must lie in [" + std::to_string(kMinGridPoints) + ", 1000000]");
        } else {
            t.points = static_cast<int>(*v);
        }
    }
    if (auto g = r.string(node, "grid", path, false)) {
        if (*g == "linear") {
            t.grid = GridKind::Linear;
        } else if (*g == "log") {
            t.grid = GridKind::Log;
        } else {
            r.fail("time.grid", "expected \"linear\" or \"log\"");
        }
    }
    const auto t_min = r.number(node, "t_min", path, false);
    if (t.grid == GridKind::Log) {
        t.t_min = t_min.value_or(t.t_max * 1e-3);
        if (!(t.t_min > 0.0) || !(t.t_min < t.t_max)) r.fail("time.t_min", "must satisfy 0 < t_min < t_max");
    } else if (t_min) {
        r.fail("time.t_min", "only used by the log grid");
    }
}

void parse_analysis(Reader& r, const json& node, AnalysisConfig& a,
                    const std::set<std::string>& labels) {
    const std::string path = "analysis";
    if (!r.object(node, path, {"crossings", "fits", "spectra", "propagator", "oracle_check"})) {
        return;
    }
    auto known = [&](const std::string& label, const std::string& where) {
        if (!labels.count(label)) r.fail(where, "unknown state label \"" + label + "\"");
    };
    if (const json* c = r.field(node, "crossings", path, false)) {
        if (c->is_boolean()) {
            a.crossings = c->get<bool>();
        } else if (c->is_array()) {
            a.crossings = true;
            for (std::size_t i = 0; i < c->size(); ++i) {
                const std::string where = "analysis.crossings[" + std::to_string(i) + "]";
                const json& p = (*c)[i];
                if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
                    r.fail(where, "expected a pair of state labels");
                    continue;
                }
                CrossingPair pair{p[0].get<std::string>(), p[1].get<std::string>()};
                known(pair.first, where);
                known(pair.second, where);
                if (pair.first == pair.second) r.fail(where, "a state cannot cross itself");
                a.pairs.push_back(std::move(pair));
            }
            if (a.pairs.empty()) r.fail("analysis.crossings", "list must not be empty");
        } else {
            r.fail("analysis.crossings", "expected true, false or a list of label pairs");
        }
    }
    if (const json* f = r.field(node, "fits", path, false)) {
        if (!f->is_array()) {
            r.fail("analysis.fits", "expected a list");
        } else {
            for (std::size_t i = 0; i < f->size(); ++i) {
                const std::string where = "analysis.fits[" + std::to_string(i) + "]";
                const json& item = (*f)[i];
                if (!r.object(item, where, {"state", "kind", "window", "rescaled", "boundary"})) {
                    continue;
                }
                FitConfig fit;
                if (auto s = r.string(item, "state", where, true)) {
                    known(*s, where + ".state");
                    fit.state = *s;
                }
                if (auto k = r.string(item, "kind", where, true)) {
                    if (*k == "power_law") {
                        fit.kind = FitKind::PowerLaw;
                    } else if (*k == "exponential") {
                        fit.kind = FitKind::Exponential;
                    } else {
                        r.fail(where + ".kind", "expected \"power_law\" or \"exponential\"");
                    }
                }
                if (const json* w = r.field(item, "window", where, false)) {
                    if (w->is_string() && w->get<std::string>() == "auto") {
                        fit.window.reset();
                    } else if (w->is_array() && w->size() == 2 && (*w)[0].is_number() &&
                               (*w)[1].is_number()) {
                        const FitWindow win{(*w)[0].get<double>(), (*w)[1].get<double>()};
                        if (!(win.start >= 0.0 && win.start < win.end)) {
                            r.fail(where + ".window", "must satisfy 0 <= start < end");
                        }
                        fit.window = win;
                    } else {
                        r.fail(where + ".window", "expected \"auto\" or [start, end]");
                    }
                }
                if (auto v = r.boolean(item, "rescaled", where, false)) fit.rescaled = *v;
                if (const json* b = r.field(item, "boundary", where, false)) {
                    fit.boundary = parse_boundary(r, *b, where + ".boundary");
                }
                a.fits.push_back(std::move(fit));
            }
        }
    }
    if (auto v = r.boolean(node, "spectra", path, false)) a.spectra = *v;
    if (auto v = r.string(node, "propagator", path, false)) {
        bool is_auto = false;
        a.propagator = parse_propagator(r, *v, "analysis.propagator", is_auto);
    }
    if (auto v = r.boolean(node, "oracle_check", path, false)) a.oracle_check = *v;
}

void parse_output(Reader& r, const json& node, OutputConfig& o) {
    const std::string path = "output";
    if (!r.object(node, path, {"directory", "formats"})) return;
    if (auto d = r.string(node, "directory", path, false)) {
        if (d->empty()) r.fail("output.directory", "must not be empty");
        o.directory = *d;
    }
    if (const json* f = r.field(node, "formats", path, false)) {
        if (!f->is_array() || f->empty()) {
            r.fail("output.formats", "expected a non-empty list");
            return;
        }
        o.csv = false;
        o.json = false;
        for (std::size_t i = 0; i < f->size(); ++i) {
            const json& item = (*f)[i];
            if (item == "csv") {
                o.csv = true;
            } else if (item == "json") {
                o.json = true;
            } else {
                r.fail("output.formats[" + std::to_string(i) + "]", "expected \"csv\" or \"json\"");
            }
        }
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

ExperimentConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("syntax: ") + e.what()});
    }
    Reader r;
    ExperimentConfig cfg;
    if (!r.object(root, "", {"schema_version", "model", "states", "time", "analysis", "output",
                             "seed"})) {
        throw ConfigError(std::move(r.errors));
    }

    if (auto v = r.integer(root, "schema_version", "", true)) {
        if (*v != kSchemaVersion) {
            r.fail("schema_version", "version " + std::to_string(*v) + " is not supported (expected " +
                                         std::to_string(kSchemaVersion) + ")");
        }
        cfg.schema_version = static_cast<int>(*v);
    }
    if (const json* m = r.field(root, "model", "", true)) parse_model(r, *m, cfg.model);

    std::set<std::string> labels;
    if (const json* s = r.field(root, "states", "", false)) {
        if (!s->is_array()) {
            r.fail("states", "expected a list");
        } else {
            for (std::size_t i = 0; i < s->size(); ++i) {
                const std::string where = "states[" + std::to_string(i) + "]";
                StateConfig state;
                parse_state(r, (*s)[i], where, state);
                if ((*s)[i].is_object()) {
                    if (auto label = r.string((*s)[i], "label", where, true)) {
                        if (!valid_label(*label)) {
                            r.fail(where + ".label", "use 1-64 characters from [A-Za-z0-9_-]");
                        } else if (!labels.insert(*label).second) {
                            r.fail(where + ".label", "duplicate label \"" + *label + "\"");
                        }
                        state.label = *label;
                    }
                }
                cfg.states.push_back(std::move(state));
            }
        }
    }

    const json* time = r.field(root, "time", "", !cfg.states.empty());
    if (time) parse_time(r, *time, cfg.time);

    if (const json* a = r.field(root, "analysis", "", false)) {
        parse_analysis(r, *a, cfg.analysis, labels);
    }
    if (cfg.states.empty() && !cfg.analysis.spectra) {
        r.fail("states", "at least one state is required unless analysis.spectra is enabled");
    }
    if (cfg.analysis.oracle_check && cfg.model.sites > kOracleCheckMaxSites) {
        r.fail("analysis.oracle_check",
               "supported up to L = " + std::to_string(kOracleCheckMaxSites));
    }
    if (const json* o = r.field(root, "output", "", false)) parse_output(r, *o, cfg.output);
    if (const json* s = r.field(root, "seed", "", false)) {
        if (!s->is_number_unsigned()) {
            r.fail("seed", "expected a non-negative integer");
        } else {
            cfg.seed = s->get<std::uint64_t>();
        }
    }

    if (!r.errors.empty()) throw ConfigError(std::move(r.errors));
    return cfg;
}

std::vector<double> time_grid(const TimeConfig& time) {
    return time.grid == GridKind::Linear ? linear_grid(time.t_max, time.points)
                                         : log_grid(time.t_min, time.t_max, time.points);
}

}  // namespace qmpemba::config
