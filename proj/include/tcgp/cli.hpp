#pragma once

// Experiment configuration, artifact output and the command-line front end.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tcgp/fpke.hpp"
#include "tcgp/gaussian.hpp"
#include "tcgp/subordinators.hpp"
#include "tcgp/timechange.hpp"

namespace tcgp {

/// Options shared by the subcommands; flags override config values.
struct CommandOptions {
    std::size_t paths = 10000;
    std::size_t steps = 100;         // simulate: uniform grid intervals on [0, t_max]
    double op_step = 1e-3;           // operational step of the subordinator sampler
    std::vector<double> times;       // evaluation times; empty selects a per-command default
    std::size_t bins = 50;
    std::size_t output_stride = 0;   // solve: write every k-th slice; 0 selects n_t / 10
    std::size_t levels = 3;          // convergence: number of grids, each twice the previous
    std::optional<double> gamma;     // operators and moments
};

/// Fully validated experiment with defaults filled in. `canonical` is the
/// normalized JSON (sorted keys, defaults explicit) that the hash is taken of.
struct ExperimentConfig {
    CovarianceModel model = CovarianceModel::brownian();
    MeanFunction mean;
    SubordinatorSpec subordinator = SubordinatorSpec::stable(0.5);
    SolverConfig solver;
    std::uint64_t seed = 0;
    std::string outputs;
    CommandOptions options;
    std::string canonical;

    std::uint64_t hash() const;
    TimeChangedSpec time_changed() const;
};

/// Reads and validates a JSON config. Throws ConfigError naming the file and
/// the offending field path on parse errors, unknown keys, type and range
/// violations.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Re-validates `options` after flag overrides and refreshes `canonical`.
void finalize_config(ExperimentConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double value);

/// GridDensity as CSV with header "t,x,q", one row per grid value of every
/// `stride`-th slice (the last slice is always included).
std::string grid_density_csv(const GridDensity& density, std::size_t stride = 1);

struct Artifact {
    std::string name;      // file name inside the output directory
    std::string contents;
};

struct Provenance {
    std::string command;
    std::string config;    // canonical config JSON
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

/// Writes every artifact plus a "<stem>.meta.json" provenance sidecar. All
/// files are first written to temporaries in `dir` and renamed only after
/// every write succeeded. Returns the final paths. Throws Error on I/O
/// failure, naming the path.
std::vector<std::filesystem::path> write_outputs(const std::vector<Artifact>& artifacts,
                                                 const Provenance& provenance,
                                                 const std::filesystem::path& dir);

/// Output directory: explicit value, else $TCGP_OUTPUT_DIR, else "tcgp_out".
std::filesystem::path output_directory(const std::string& requested);

struct CheckRecord {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool at_least = false;  // pass iff value >= tolerance instead of <=
    bool passed = false;
    double runtime = 0.0;   // seconds
};

struct RunReport {
    std::vector<CheckRecord> checks;
    bool passed() const;
    std::string to_json(const Provenance& provenance) const;
};

/// Entry point of the tcgp executable. Exit status: 0 success, 1 a check
/// failed, 2 usage or schema error, 3 numerical or I/O failure.
int run_command(int argc, char** argv);

}  // namespace tcgp
