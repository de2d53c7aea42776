#pragma once

#include "qmpemba/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qmpemba::experiment {

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunSummary {
    std::filesystem::path directory;
    std::vector<ManifestEntry> files;  // sorted by path; manifest.json excluded
    int failed_states = 0;
    std::string report;  // report.json contents
};

// Runs every state of every boundary, then writes the curve CSVs, the report,
// the optional spectra CSVs and manifest.json. Per-state failures are recorded
// in the report and do not stop the other states. `directory` overrides the
// configured output directory when non-empty.
RunSummary run_experiment(const config::ExperimentConfig& cfg,
                          const std::filesystem::path& directory = {});

// CSV text of a curve: t,D,rescaled_D.
std::string curve_csv(const DistanceCurve& curve, double decay_scale);

}  // namespace qmpemba::experiment
