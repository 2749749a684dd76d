#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kfs/lattice.hpp"
#include "kfs/noise.hpp"
#include "kfs/trajectories.hpp"

namespace kfs {

struct LatticeSpec {
    int plaquette_rows = 4;
    int plaquette_cols = 8;
    Boundary boundary = Boundary::Cylinder;
    Lattice build() const { return build_lattice(plaquette_rows, plaquette_cols, boundary); }
};

// One axis of a parameter sweep. `key` names a preset parameter ("theta_z")
// or a noise field ("noise.p_ini").
struct SweepAxis {
    std::string key;
    std::vector<double> values;
};

struct RunConfig {
    std::string preset;
    LatticeSpec lattice;
    NoiseModel noise;
    PostselectionPolicy postselection;
    // 0 selects the preset default.
    long long trajectories = 0;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = "out";
    bool write_snapshots = true;
    // Preset-specific parameters as a JSON object; keys are checked by the preset.
    std::string params = "{}";
    std::vector<SweepAxis> sweep;
};

// Parses a JSON run configuration. Unknown keys, wrong types and
// out-of-range values throw SchemaError.
RunConfig parse_run_config(const std::string& json_text);
// A configuration with every default and the given preset.
RunConfig default_config(const std::string& preset);
// Sets a sweep key on the configuration (preset parameter or noise.* field).
void apply_override(RunConfig& config, const std::string& key, double value);

struct PresetInfo {
    std::string name;
    std::string panel;      // figure panel the preset regenerates
    std::string tolerance;  // expected band for its headline numbers
    long long default_trajectories = 1;
};
const std::vector<PresetInfo>& presets();
const PresetInfo& preset_info(const std::string& name);

struct Artifact {
    std::string filename;
    std::string content;  // text or raw bytes
};

struct PresetResult {
    std::string preset;
    TrajectorySet trajectories;
    // Trajectory summaries followed by derived rows (Chern numbers,
    // contrasts, deterministic traces).
    std::vector<ObservableSummary> summary;
    std::vector<Artifact> artifacts;
};

// Runs the configured preset. Throws SchemaError for bad parameters.
PresetResult run_preset(const RunConfig& config);

// Writes summary.csv, snapshots.ndjson (when kept) and every artifact.
void write_result(const PresetResult& result, const std::filesystem::path& out_dir);

// Grid product over the sweep axes. Every summary row is prefixed with the
// axis values of its cell.
struct SweepResult {
    std::vector<std::string> axes;
    std::vector<std::vector<double>> cells;
    std::vector<std::vector<ObservableSummary>> rows;
};
SweepResult run_sweep(const RunConfig& config);
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace kfs
