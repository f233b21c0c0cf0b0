#ifndef TOFDEMIX_PIPELINE_HPP
#define TOFDEMIX_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "tofdemix/core.hpp"
#include "tofdemix/dictionary.hpp"
#include "tofdemix/outputs.hpp"
#include "tofdemix/solver.hpp"

namespace tofdemix {

struct RunConfig {
    ModulationPlan plan;
    int grid_size = 4096;
    SolverConfig solver;                  ///< residual_tolerance ignored unless epsilon set
    std::optional<double> epsilon;        ///< override for eps0; default sqrt(2N)*sigma_z
    double noise_sigma = 0.0;             ///< bucket-sample noise std
    std::uint64_t rng_seed = 0;
    std::string output_dir;
    double undefined_depth_sentinel = 10.0;
    int histogram_bins = 64;
    int baseline_harmonic = 3;
    bool debug_trace = false;
    bool write_pgm = true;

    /// Per-measurement complex-noise std on z implied by the bucket noise:
    /// each of Re(z), Im(z) gets std sqrt(2)*sigma/s0^2.
    double sigma_z() const {
        return std::sqrt(2.0) * noise_sigma / (plan.modulation_depth * plan.modulation_depth);
    }

    /// Effective residual tolerance: explicit epsilon, or the expected
    /// residual norm of pure noise, sqrt(2N)*sigma_z.
    double effective_epsilon() const {
        if (epsilon) return *epsilon;
        return std::sqrt(2.0 * plan.harmonic_count) * sigma_z();
    }

    void validate() const;
};

/// Output maps, one slot per component rank (ascending depth). Pixels with
/// fewer recovered components carry the sentinel depth and amplitude 0 in the
/// unused slots.
struct MapStack {
    int width = 0;
    int height = 0;
    int k = 0;
    double sentinel = 10.0;
    std::vector<Grid> depth;     ///< k maps
    std::vector<Grid> amplitude; ///< k maps
    Grid baseline_depth;
    Grid baseline_amplitude;
    Grid residual;
};

struct ComponentStats {
    int pixel_count = 0;
    double depth_mean = 0.0;
    double depth_std = 0.0;
    double amplitude_mean = 0.0;
};

struct RunReport {
    std::vector<ComponentStats> components;
    double residual_mean = 0.0;
    double residual_max = 0.0;
    bool no_signal = false;
};

struct RunResult {
    MapStack maps;
    RunReport report;
    Decomposition decomposition;
};

/// Decomposes every pixel of the cube with OMP (pixels are independent).
Decomposition decompose_cube(const MeasurementCube& cube, const Dictionary& dict,
                             const SolverConfig& solver_config,
                             std::vector<std::vector<TraceEntry>>* traces = nullptr);

/// Rank-by-depth map assembly plus the single-frequency baseline.
MapStack assemble_maps(const Decomposition& decomposition, const MeasurementCube& cube,
                       int baseline_harmonic, double sentinel);

/// Single-frequency amplitude/depth readout at one harmonic (the
/// multipath-corrupted baseline). No-signal pixels get the sentinel depth.
void baseline_maps(const MeasurementCube& cube, int harmonic, double sentinel,
                   Grid& depth_out, Grid& amplitude_out);

/// Depth→phase histogram at the given harmonic, binned over [0, 2*pi).
/// Series: "baseline" plus one per component rank. Pixels whose slot is empty
/// (amplitude 0, sentinel depth) are excluded from component series; zero
/// amplitude baseline pixels are excluded from the baseline series.
HistogramTable phase_histogram(const MapStack& maps, double base_frequency_hz, int harmonic,
                               int bins);

RunReport summarize(const Decomposition& decomposition, const MapStack& maps);

/// End-to-end: validate + simulate + decompose + assemble + write everything
/// under config.output_dir (CSV always, PGM unless disabled, histogram,
/// report.json, metadata.json, optional solver trace).
RunResult run_pipeline(const Scene& scene, const RunConfig& config);

/// Writes the map stack, histogram, report and metadata to a directory.
void write_run_outputs(const RunResult& result, const RunConfig& config,
                       const Dictionary& dict);

struct ReproduceConfig {
    int width = 16;
    int height = 12;
    double mid_depth = 4.2;   ///< nominal middle-layer depth (design choice)
    double snr_db = 0.0;      ///< 0 disables noise; else sets sigma from mean |z|
    std::uint64_t rng_seed = 7;
    int grid_size = 4096;
    int harmonic_count = 77;
    double base_frequency_hz = 0.7937e6;
    int k = 3;
    int baseline_harmonic = 3;
    int histogram_bins = 64;
    double min_amplitude = 0.05;
    std::string output_dir;
};

/// Three-layer test scene: a semi-transparent sheet at a nominal 0.3 m, a
/// second sheet at mid_depth covering only the left half, and a far wall at a
/// nominal 8.1 m carrying a text pattern in its amplitude map. Layer depths
/// are snapped onto the dictionary grid so the scene is exactly representable.
Scene make_reproduction_scene(int width, int height, double mid_depth, const Dictionary& dict);

/// Runs the built-in multi-frequency experiment and writes scene, cube, maps,
/// histograms and a summary comparing recovered depths against ground truth.
RunResult reproduce_paper_experiment(const ReproduceConfig& config);

}  // namespace tofdemix

#endif
