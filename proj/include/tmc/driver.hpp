#pragma once

// Orchestration around run_simulation: file output for single runs, the
// variance-versus-r sweep, and the exact-diagonalization reference report.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tmc/config.hpp"
#include "tmc/simulation.hpp"

namespace tmc {

struct RunArtifacts {
    std::filesystem::path series_path;
    std::filesystem::path summary_path;
    RunSummary summary;
    double wall_seconds = 0.0;
};

// Executes the configured simulation and writes the series CSV and the
// summary JSON (which embeds a normalized config echo).
RunArtifacts run_from_config(const RunConfig& cfg);

struct SweepPointResult {
    double r = 0.0;
    std::vector<double> energies;      // successful replicas, in replica order
    std::vector<std::string> failures; // diagnostics from failed replicas
    bool has_variance = false;
    double mean_energy = 0.0;
    double variance = 0.0;     // sample variance of the replica energies
    double rel_variance = 0.0; // variance / E0^2 when a reference energy exists
};

struct SweepResult {
    std::vector<SweepPointResult> points; // in r_list order
    bool has_reference = false;
    double reference_energy = 0.0;
    bool has_slope = false;
    double slope = 0.0; // log-log fit of variance vs r inside the fit window
    std::filesystem::path table_path;
};

// Runs `replicas` independently seeded simulations per r value; per-run
// failures are recorded and the sweep continues. replicas must be >= 2.
SweepResult sweep_r(const RunConfig& base, const std::vector<double>& r_list, int replicas,
                    double fit_r_min, double fit_r_max);

struct EdReport {
    std::uint64_t dimension = 0;
    double energy = 0.0;
    int degeneracy = -1; // -1: not computed (iterative path)
};

EdReport run_ed(const RunConfig& cfg);

// Fixed-header comma-separated series; floats as %.17g, ratio column NA on
// zero-trace loops.
void write_series_csv(const std::filesystem::path& path,
                      const std::vector<SampleRecord>& records);

// Deterministic per-replica seed derivation for sweeps.
std::uint64_t sweep_replica_seed(std::uint64_t base_seed, std::size_t r_index,
                                 int replica) noexcept;

} // namespace tmc
