// tofdemix: multi-frequency AMCW time-of-flight simulation and multipath
// decomposition. Subcommands: simulate, decompose, run, reproduce, histogram.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "tofdemix/outputs.hpp"
#include "tofdemix/pipeline.hpp"
#include "tofdemix/scene_io.hpp"
#include "tofdemix/sensor.hpp"

namespace {

using namespace tofdemix;

struct PlanFlags {
    double f0_hz = 0.7937e6;
    int harmonics = 77;
    double s0 = 1.0;
    double dc_offset = -1.0; // negative = per-pixel sum of amplitudes

    ModulationPlan plan() const {
        ModulationPlan p;
        p.base_frequency_hz = f0_hz;
        p.harmonic_count = harmonics;
        p.modulation_depth = s0;
        if (dc_offset >= 0.0) p.dc_offset = dc_offset;
        return p;
    }
};

void add_plan_flags(CLI::App* cmd, PlanFlags& flags) {
    cmd->add_option("--f0-hz", flags.f0_hz, "Base modulation frequency [Hz]")
        ->capture_default_str();
    cmd->add_option("--harmonics", flags.harmonics, "Number of harmonics N")
        ->capture_default_str();
    cmd->add_option("--s0", flags.s0, "Modulation depth s0 in (0, 1]")->capture_default_str();
    cmd->add_option("--dc-offset", flags.dc_offset,
                    "Constant bucket offset; negative selects the per-pixel amplitude sum");
}

struct SolveFlags {
    int grid_size = 4096;
    int k = 3;
    double epsilon = -1.0; // negative = sqrt(2N)*sigma_z default
    double min_amplitude = 0.05;
    double sentinel = 10.0;
    int baseline_harmonic = 3;
    int bins = 64;
    bool debug_trace = false;
    bool no_pgm = false;

    void apply(RunConfig& config) const {
        config.grid_size = grid_size;
        config.solver.max_components = k;
        config.solver.min_amplitude = min_amplitude;
        if (epsilon >= 0.0) config.epsilon = epsilon;
        config.undefined_depth_sentinel = sentinel;
        config.baseline_harmonic = baseline_harmonic;
        config.histogram_bins = bins;
        config.debug_trace = debug_trace;
        config.write_pgm = !no_pgm;
    }
};

void add_solve_flags(CLI::App* cmd, SolveFlags& flags) {
    cmd->add_option("--grid-size", flags.grid_size, "Dictionary grid size L")
        ->capture_default_str();
    cmd->add_option("--k", flags.k, "Sparsity budget K")->capture_default_str();
    cmd->add_option("--epsilon", flags.epsilon,
                    "Residual tolerance; negative selects sqrt(2N)*sigma_z");
    cmd->add_option("--min-amplitude", flags.min_amplitude,
                    "Discard recovered components below this amplitude")
        ->capture_default_str();
    cmd->add_option("--sentinel", flags.sentinel, "Depth written for absent components [m]")
        ->capture_default_str();
    cmd->add_option("--baseline-harmonic", flags.baseline_harmonic,
                    "Harmonic for the single-frequency baseline maps")
        ->capture_default_str();
    cmd->add_option("--histogram-bins", flags.bins, "Phase histogram bin count")
        ->capture_default_str();
    cmd->add_flag("--debug-trace", flags.debug_trace, "Write per-pixel solver trace CSV");
    cmd->add_flag("--no-pgm", flags.no_pgm, "Skip 16-bit PGM previews");
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Multi-frequency AMCW ToF simulator and multipath decomposer"};
    app.require_subcommand(1);

    // simulate: scene -> cube file
    auto* sim = app.add_subcommand("simulate", "Simulate a measurement cube from a scene");
    std::string sim_scene, sim_out;
    PlanFlags sim_plan;
    double sim_noise = 0.0;
    std::uint64_t sim_seed = 0;
    sim->add_option("--scene", sim_scene, "Scene JSON path")->required();
    sim->add_option("--out", sim_out, "Output cube CSV path")->required();
    add_plan_flags(sim, sim_plan);
    sim->add_option("--noise-sigma", sim_noise, "Gaussian bucket noise std")
        ->capture_default_str();
    sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();

    // decompose: cube -> maps
    auto* dec = app.add_subcommand("decompose", "Decompose a measurement cube into maps");
    std::string dec_cube, dec_out;
    SolveFlags dec_flags;
    double dec_sigma_z = -1.0;
    dec->add_option("--cube", dec_cube, "Cube CSV path (with .meta.json sidecar)")->required();
    dec->add_option("--out", dec_out, "Output directory")->required();
    add_solve_flags(dec, dec_flags);
    dec->add_option("--sigma-z", dec_sigma_z,
                    "Override per-measurement noise std used for the default epsilon");

    // run: scene -> maps end-to-end
    auto* run = app.add_subcommand("run", "Simulate and decompose in one pass");
    std::string run_scene, run_out;
    PlanFlags run_plan;
    SolveFlags run_flags;
    double run_noise = 0.0;
    std::uint64_t run_seed = 0;
    run->add_option("--scene", run_scene, "Scene JSON path")->required();
    run->add_option("--out", run_out, "Output directory")->required();
    add_plan_flags(run, run_plan);
    add_solve_flags(run, run_flags);
    run->add_option("--noise-sigma", run_noise, "Gaussian bucket noise std")
        ->capture_default_str();
    run->add_option("--seed", run_seed, "RNG seed")->capture_default_str();

    // reproduce: built-in experiment
    auto* rep = app.add_subcommand("reproduce", "Run the built-in three-layer experiment");
    ReproduceConfig rep_config;
    bool rep_full = false;
    int rep_width = 16, rep_height = 12;
    rep->add_option("--out", rep_config.output_dir, "Output directory")->required();
    rep->add_option("--seed", rep_config.rng_seed, "RNG seed")->capture_default_str();
    rep->add_option("--snr-db", rep_config.snr_db,
                    "SNR in dB (0 = noiseless); sets the bucket noise from mean |z|")
        ->capture_default_str();
    rep->add_option("--mid-depth", rep_config.mid_depth, "Middle layer depth [m]")
        ->capture_default_str();
    rep->add_option("--width", rep_width, "Image width")->capture_default_str();
    rep->add_option("--height", rep_height, "Image height")->capture_default_str();
    rep->add_flag("--full-size", rep_full, "Use the full 160x120 sensor size");
    rep->add_option("--grid-size", rep_config.grid_size, "Dictionary grid size L")
        ->capture_default_str();
    rep->add_option("--k", rep_config.k, "Sparsity budget K")->capture_default_str();
    rep->add_option("--baseline-harmonic", rep_config.baseline_harmonic,
                    "Harmonic for baseline maps")
        ->capture_default_str();

    // histogram: maps dir -> CSV
    auto* hist = app.add_subcommand("histogram", "Phase histogram from a maps directory");
    std::string hist_maps, hist_out;
    int hist_harmonic = 3, hist_bins = 64;
    double hist_f0 = 0.7937e6;
    hist->add_option("--maps", hist_maps, "Directory produced by run/decompose/reproduce")
        ->required();
    hist->add_option("--out", hist_out, "Output histogram CSV")->required();
    hist->add_option("--harmonic", hist_harmonic, "Display harmonic")->capture_default_str();
    hist->add_option("--bins", hist_bins, "Bin count")->capture_default_str();
    hist->add_option("--f0-hz", hist_f0, "Base modulation frequency [Hz]")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (sim->parsed()) {
        const Scene scene = load_scene(sim_scene);
        const MeasurementCube cube = measure(scene, sim_plan.plan(), sim_noise, sim_seed);
        write_cube_csv(cube, sim_out, sim_seed);
        std::cout << "wrote " << sim_out << " (" << cube.width() << "x" << cube.height()
                  << ", N=" << cube.plan().harmonic_count << ")\n";
    } else if (dec->parsed()) {
        const MeasurementCube cube = read_cube_csv(dec_cube);
        RunConfig config;
        config.plan = cube.plan();
        config.noise_sigma = cube.noise_sigma();
        dec_flags.apply(config);
        if (dec_sigma_z >= 0.0 && !config.epsilon)
            config.epsilon =
                std::sqrt(2.0 * config.plan.harmonic_count) * dec_sigma_z;
        config.output_dir = dec_out;
        config.validate();

        const Dictionary dict = build_dictionary(config.plan.harmonic_count, config.grid_size,
                                                 config.plan.base_frequency_hz);
        SolverConfig solver = config.solver;
        solver.residual_tolerance = config.effective_epsilon();
        std::vector<std::vector<TraceEntry>> traces;
        RunResult result;
        result.decomposition =
            decompose_cube(cube, dict, solver, config.debug_trace ? &traces : nullptr);
        result.maps = assemble_maps(result.decomposition, cube, config.baseline_harmonic,
                                    config.undefined_depth_sentinel);
        result.report = summarize(result.decomposition, result.maps);
        write_run_outputs(result, config, dict);
        std::cout << "wrote maps to " << dec_out << '\n';
    } else if (run->parsed()) {
        const Scene scene = load_scene(run_scene);
        RunConfig config;
        config.plan = run_plan.plan();
        run_flags.apply(config);
        config.noise_sigma = run_noise;
        config.rng_seed = run_seed;
        config.output_dir = run_out;
        const RunResult result = run_pipeline(scene, config);
        std::cout << "wrote maps to " << run_out
                  << (result.report.no_signal ? " (no signal)" : "") << '\n';
    } else if (rep->parsed()) {
        if (rep_full) {
            rep_config.width = 160;
            rep_config.height = 120;
        } else {
            rep_config.width = rep_width;
            rep_config.height = rep_height;
        }
        reproduce_paper_experiment(rep_config);
        std::cout << "wrote experiment to " << rep_config.output_dir << '\n';
    } else if (hist->parsed()) {
        namespace fs = std::filesystem;
        MapStack maps;
        maps.baseline_depth = read_grid_csv((fs::path(hist_maps) / "baseline_depth.csv").string());
        maps.baseline_amplitude =
            read_grid_csv((fs::path(hist_maps) / "baseline_amplitude.csv").string());
        maps.width = maps.baseline_depth.width();
        maps.height = maps.baseline_depth.height();
        for (int k = 1;; ++k) {
            const fs::path d = fs::path(hist_maps) / ("depth_" + std::to_string(k) + ".csv");
            const fs::path a = fs::path(hist_maps) / ("amplitude_" + std::to_string(k) + ".csv");
            if (!fs::exists(d) || !fs::exists(a)) break;
            maps.depth.push_back(read_grid_csv(d.string()));
            maps.amplitude.push_back(read_grid_csv(a.string()));
            maps.k = k;
        }
        const auto table = phase_histogram(maps, hist_f0, hist_harmonic, hist_bins);
        write_histogram_csv(table, hist_out);
        std::cout << "wrote " << hist_out << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const tofdemix::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const tofdemix::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
