#ifndef NLDELAY_EXPERIMENTS_HPP
#define NLDELAY_EXPERIMENTS_HPP

#include "nldelay/diagnostics.hpp"
#include "nldelay/scenario.hpp"
#include "nldelay/schemes.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nldelay {

/// A scenario turned into grid, weights and projected datum.
struct ResolvedScenario {
    Scenario scenario;
    RunSetup setup;
    TimeStepping stepping;
};

ResolvedScenario resolve(const Scenario& s);

/// Same, but with an externally chosen time step (must respect the CFL limit).
ResolvedScenario resolve_with_step(const Scenario& s, double dt, std::size_t delay_steps);

/**
 * Largest dt not above dt_cfl for which every delay in `taus` is an integer
 * number of steps. Throws if no such step is found within 10^6 steps per delay.
 */
DelayFit common_time_step(const std::vector<double>& taus, double dt_cfl);

struct SimulationOptions {
    MonitorOptions monitor;
    std::vector<double> snapshot_times;
    bool keep_stride_levels = false;  // store the level at every monitor stride
};

struct Simulation {
    RunResult result;
    DiagnosticsMonitor monitor;
    std::vector<double> snapshot_requested;
    std::vector<TimedLevel> snapshots;      // same order as snapshot_requested
    std::vector<TimedLevel> stride_levels;  // filled when keep_stride_levels
};

Simulation simulate(const ResolvedScenario& r, const SimulationOptions& options);

/// Restricts a fine level to a grid `factor` times coarser by cell averaging.
Level restrict_level(std::span<const double> fine, std::size_t factor);

void write_level_csv(const std::filesystem::path& path, const Grid& grid, std::span<const double> level);
void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<DiagnosticsRecord>& records);
void write_manifest(const std::filesystem::path& path, const ResolvedScenario& r, const Simulation& sim);
std::string snapshot_filename(double t);

struct RunReport {
    bool passed = false;
    std::filesystem::path directory;
    ResolvedScenario resolved;
    Simulation simulation;
};

/// Writes snapshots, diagnostics.csv and manifest.txt into s.output_dir.
RunReport run_scenario(const Scenario& s);

struct CompareReport {
    bool passed = false;
    double lf_error = 0.0;
    double hw_error = 0.0;
    std::size_t refinement = 0;
    bool hw_closer() const { return hw_error < lf_error; }
};

/// LF and HW at s.dx against a fine LF reference at ref_dx.
CompareReport compare_schemes(const Scenario& s, double ref_dx);

struct TauEntry {
    double tau = 0.0;
    double dt = 0.0;
    std::size_t delay_steps = 0;
    double distance = 0.0;  // to the tau = 0 run at the final time
    double final_tv = 0.0;
    std::vector<std::pair<double, double>> tv_series;  // (t, TV) at the monitor stride
};

struct TauSweepReport {
    bool passed = false;
    std::vector<TauEntry> entries;  // in the order of the requested list, tau = 0 appended if absent
};

TauSweepReport tau_sweep(const Scenario& s, std::vector<double> taus);

struct RefineLevel {
    double dx = 0.0;
    double max_density = 0.0;
    double amplitude = 0.0;  // max - min of the final level over the window
    double difference_to_next = 0.0;  // L1 distance to the next finer level, restricted
};

struct RefineReport {
    bool passed = false;
    std::vector<RefineLevel> levels;
};

/// Halves dx `levels - 1` times. The amplitude window defaults to the domain.
RefineReport grid_refine(const Scenario& s,
                         std::size_t levels,
                         std::optional<std::pair<double, double>> window = std::nullopt);

struct StabilityRow {
    double t = 0.0;
    double measured = 0.0;
    double log_bound = 0.0;
    bool ok = true;
};

struct StabilityReport {
    bool passed = false;
    bool bound_available = false;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double initial_distance = 0.0;
    StabilityConstants constants;
    double log_K = 0.0;
    std::vector<StabilityRow> rows;
};

/// Runs (rho0, tau1 = s.tau) and (sigma0, tau2) on a shared time grid.
StabilityReport stability_experiment(const Scenario& s,
                                     double tau2,
                                     const std::optional<InitialDatumSpec>& perturbed);

struct SaturationVariant {
    std::string label;
    SaturationKind saturation = SaturationKind::None;
    VelocityKind velocity = VelocityKind::NormalizedGreenshields;
    double max_density = 0.0;
    bool exceeded = false;  // max density above R + 1e-12 at some step
};

struct SaturationReport {
    bool passed = false;
    double R = 1.0;
    std::vector<SaturationVariant> variants;
};

/// None (with the cropped velocity), linear and exponential saturation on the same data.
SaturationReport saturation_study(const Scenario& s);

}  // namespace nldelay

#endif  // NLDELAY_EXPERIMENTS_HPP
