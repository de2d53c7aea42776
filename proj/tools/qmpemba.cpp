#include "qmpemba/config.hpp"
#include "qmpemba/experiment.hpp"
#include "qmpemba/io.hpp"
#include "qmpemba/presets.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kNumeric = 3 };

constexpr const char* kOutputHelp = R"(Outputs (in the output directory):
  curve_<label>[_obc|_pbc].csv  columns t,D,rescaled_D
                                D = ||C(t) - C_ss||_F, rescaled_D = exp(4 Gamma t) D
  spectra_obc.csv, spectra_pbc.csv
                                columns index,re,im,mean_position,slope
  report.json                   crossings, fits, steady-state and oracle diagnostics
  manifest.json                 SHA-256 and size of every file above
Numbers use shortest round-trip scientific notation.
QMPEMBA_OUTPUT_DIR overrides the configured output directory; --output overrides both.
Exit codes: 0 success, 1 usage, 2 invalid config, 3 numeric failure.)";

// "preset:<name>" reads an embedded preset, anything else is a file path.
std::string load_config_text(const std::string& source) {
    constexpr std::string_view prefix = "preset:";
    if (source.rfind(prefix, 0) == 0) {
        const auto* p = qmpemba::presets::find(source.substr(prefix.size()));
        if (!p) throw qmpemba::config::ConfigError({"unknown preset " + source.substr(prefix.size())});
        return std::string(p->text);
    }
    try {
        return qmpemba::io::read_file(source);
    } catch (const qmpemba::Error& e) {
        throw qmpemba::config::ConfigError({e.what()});
    }
}

void print_violations(const qmpemba::config::ConfigError& e) {
    std::cerr << "invalid configuration (" << e.violations().size() << " problem"
              << (e.violations().size() == 1 ? "" : "s") << "):\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
}

int run(const std::string& source, const std::string& output) {
    qmpemba::config::ExperimentConfig cfg;
    try {
        cfg = qmpemba::config::parse_config(load_config_text(source));
    } catch (const qmpemba::config::ConfigError& e) {
        print_violations(e);
        return kConfig;
    }
    std::filesystem::path directory = output;
    if (directory.empty()) {
        if (const char* env = std::getenv("QMPEMBA_OUTPUT_DIR"); env && *env) directory = env;
    }
    try {
        const auto summary = qmpemba::experiment::run_experiment(cfg, directory);
        std::cout << "wrote " << summary.files.size() + 1 << " files to "
                  << summary.directory.string() << "\n";
        for (const auto& f : summary.files) {
            std::cout << "  " << f.path << "  " << f.bytes << " bytes  " << f.sha256 << "\n";
        }
        if (summary.failed_states > 0) {
            std::cerr << summary.failed_states << " state(s) failed; see report.json\n";
            return kNumeric;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return kOk;
}

int validate(const std::string& source) {
    try {
        const auto cfg = qmpemba::config::parse_config(load_config_text(source));
        std::cout << "ok: L=" << cfg.model.sites << ", " << cfg.states.size() << " state(s), "
                  << cfg.model.boundaries.size() << " boundary run(s)\n";
        return kOk;
    } catch (const qmpemba::config::ConfigError& e) {
        print_violations(e);
        return kConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relaxation experiments for quadratic open fermion chains"};
    app.footer(kOutputHelp);
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment config (a path or preset:<name>)");
    run_cmd->add_option("config", config_path, "Config file")->required();
    run_cmd->add_option("-o,--output", output_dir, "Output directory");

    auto* validate_cmd = app.add_subcommand("validate", "Check a config and list every problem");
    validate_cmd->add_option("config", config_path, "Config file")->required();

    auto* presets_cmd = app.add_subcommand("presets", "Bundled experiment configs");
    presets_cmd->require_subcommand(1);
    presets_cmd->add_subcommand("list", "List bundled presets");
    std::string preset_name;
    auto* export_cmd = presets_cmd->add_subcommand("export", "Print a preset config to stdout");
    export_cmd->add_option("name", preset_name, "Preset name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*run_cmd) return run(config_path, output_dir);
    if (*validate_cmd) return validate(config_path);
    if (presets_cmd->got_subcommand("list")) {
        for (const auto& p : qmpemba::presets::all()) std::cout << p.name << "\n";
        return kOk;
    }
    if (*export_cmd) {
        const auto* p = qmpemba::presets::find(preset_name);
        if (!p) {
            std::cerr << "unknown preset: " << preset_name << "\n";
            return kUsage;
        }
        std::cout << p->text;
        return kOk;
    }
    return kUsage;
}
