#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "tofdemix/pipeline.hpp"
#include "tofdemix/scene_io.hpp"
#include "tofdemix/sensor.hpp"

using namespace tofdemix;
namespace fs = std::filesystem;

namespace {

ModulationPlan default_plan(int harmonics = 77) {
    ModulationPlan plan;
    plan.base_frequency_hz = 0.7937e6;
    plan.harmonic_count = harmonics;
    return plan;
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tofdemix_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Shared 40 dB reproduction run; several checks read from it.
const RunResult& noisy_reproduction() {
    static const RunResult result = [] {
        ReproduceConfig config;
        config.snr_db = 40.0;
        return reproduce_paper_experiment(config);
    }();
    return result;
}

const Scene& reproduction_scene() {
    static const Scene scene = [] {
        const auto dict = build_dictionary(77, 4096, 0.7937e6);
        return make_reproduction_scene(16, 12, 4.2, dict);
    }();
    return scene;
}

}  // namespace

TEST_CASE("run_pipeline: one on-grid layer comes back at full precision") {
    const auto dict = build_dictionary(77, 4096, 0.7937e6);
    const double depth = grid_index_to_depth(depth_to_nearest_grid_index(5.0, dict), dict);
    Scene scene;
    scene.width = 1;
    scene.height = 1;
    scene.layers.push_back({Grid(1, 1, depth), Grid(1, 1, 0.8)});

    RunConfig config;
    config.plan = default_plan();
    config.solver.max_components = 1;
    const auto result = run_pipeline(scene, config);

    CHECK(std::abs(result.maps.depth[0].at(0, 0) - 5.0) <= dict.grid_cell_depth());
    CHECK(std::abs(result.maps.amplitude[0].at(0, 0) - 0.8) < 1e-6);
    CHECK(result.maps.residual.at(0, 0) < 1e-9);
    CHECK(!result.report.no_signal);
}

TEST_CASE("run_pipeline: empty scene flags no signal and writes sentinels") {
    Scene scene;
    scene.width = 2;
    scene.height = 2;
    scene.layers.push_back({Grid(2, 2, 1.0), Grid(2, 2, 0.0)});

    RunConfig config;
    config.plan = default_plan();
    config.solver.max_components = 2;
    const auto result = run_pipeline(scene, config);

    CHECK(result.report.no_signal);
    for (int k = 0; k < 2; ++k)
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) {
                CHECK(result.maps.depth[k].at(x, y) == config.undefined_depth_sentinel);
                CHECK(result.maps.amplitude[k].at(x, y) == 0.0);
            }
}

TEST_CASE("run_pipeline propagates scene violations as data errors") {
    Scene scene;
    scene.width = 1;
    scene.height = 1;
    scene.layers.push_back({Grid(1, 1, 1.0), Grid(1, 1, 2.0)});
    RunConfig config;
    config.plan = default_plan();
    CHECK_THROWS_AS(run_pipeline(scene, config), DataError);
}

TEST_CASE("run config validation") {
    RunConfig config;
    config.plan = default_plan();
    CHECK_NOTHROW(config.validate());

    RunConfig bad = config;
    bad.undefined_depth_sentinel = 200.0; // beyond the 188.86 m range
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.histogram_bins = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.baseline_harmonic = 78;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = config;
    bad.grid_size = 100;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("epsilon default follows sqrt(2N) * sigma_z") {
    RunConfig config;
    config.plan = default_plan();
    config.noise_sigma = 0.01;
    CHECK(config.sigma_z() == doctest::Approx(std::sqrt(2.0) * 0.01));
    CHECK(config.effective_epsilon() ==
          doctest::Approx(std::sqrt(2.0 * 77) * std::sqrt(2.0) * 0.01));
    config.epsilon = 0.5;
    CHECK(config.effective_epsilon() == 0.5);
}

TEST_CASE("baseline maps: single layer reads back its own depth") {
    Scene scene;
    scene.width = 3;
    scene.height = 2;
    scene.layers.push_back({Grid(3, 2, 4.0), Grid(3, 2, 0.6)});
    const auto plan = default_plan(8);
    const auto cube = measure(scene, plan, 0.0, 0);
    Grid depth, amplitude;
    baseline_maps(cube, 3, 10.0, depth, amplitude);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) {
            CHECK(depth.at(x, y) == doctest::Approx(4.0).epsilon(1e-9));
            CHECK(amplitude.at(x, y) == doctest::Approx(0.6).epsilon(1e-9));
        }
}

TEST_CASE("baseline depth of the mixed reproduction scene matches no physical layer") {
    const Scene& scene = reproduction_scene();
    const auto plan = default_plan();
    const auto cube = measure(scene, plan, 0.0, 0);
    Grid depth, amplitude;
    baseline_maps(cube, 3, 10.0, depth, amplitude);

    const auto dict = build_dictionary(77, 4096, 0.7937e6);
    const double two_cells = 2.0 * dict.grid_cell_depth();
    int far_pixels = 0;
    for (int y = 0; y < scene.height; ++y)
        for (int x = 0; x < scene.width; ++x) {
            double nearest = std::numeric_limits<double>::max();
            for (const Layer& layer : scene.layers)
                if (layer.amplitude_map.at(x, y) > 0.0)
                    nearest = std::min(nearest,
                                       std::abs(depth.at(x, y) - layer.depth_map.at(x, y)));
            if (nearest > two_cells) ++far_pixels;
        }
    CHECK(far_pixels >= static_cast<int>(0.9 * scene.width * scene.height));
}

TEST_CASE("histogram: constant depth map puts all mass in one bin") {
    MapStack maps;
    maps.width = 4;
    maps.height = 3;
    maps.k = 1;
    maps.depth = {Grid(4, 3, 2.5)};
    maps.amplitude = {Grid(4, 3, 0.5)};
    maps.baseline_depth = Grid(4, 3, 2.5);
    maps.baseline_amplitude = Grid(4, 3, 0.5);
    maps.residual = Grid(4, 3);
    const auto table = phase_histogram(maps, 0.7937e6, 3, 64);
    REQUIRE(table.series.size() == 2);
    for (const auto& series : table.series) {
        int nonzero = 0;
        std::size_t total = 0;
        for (auto c : series.counts) {
            if (c) ++nonzero;
            total += c;
        }
        CHECK(nonzero == 1);
        CHECK(total == 12);
    }
}

TEST_CASE("histogram: sentinel slots never leak into component series") {
    const RunResult& result = noisy_reproduction();
    const auto table = phase_histogram(result.maps, 0.7937e6, 3, 64);
    REQUIRE(table.series.size() == 4);
    std::size_t comp3 = 0;
    for (auto c : table.series[3].counts) comp3 += c;
    // only the 96 left-half pixels carry a third component
    CHECK(comp3 == 96);
    std::size_t baseline = 0;
    for (auto c : table.series[0].counts) baseline += c;
    CHECK(baseline == 192);
}

TEST_CASE("component-1 histogram of the noiseless reproduction is a single bin") {
    ReproduceConfig config;
    const auto result = reproduce_paper_experiment(config);
    const auto table = phase_histogram(result.maps, 0.7937e6, 3, 64);
    const auto& comp1 = table.series[1];
    int nonzero = 0;
    std::size_t where = 0;
    for (std::size_t b = 0; b < comp1.counts.size(); ++b)
        if (comp1.counts[b]) {
            ++nonzero;
            where = b;
        }
    CHECK(nonzero == 1);
    // same bin as the true first-layer phase at the display harmonic
    const double truth_phase = wrap_two_pi(2.0 * reproduction_scene().layers[0].depth_map.at(0, 0) *
                                           3.0 * two_pi * 0.7937e6 / speed_of_light);
    CHECK(where == static_cast<std::size_t>(truth_phase / (two_pi / 64)));
}

TEST_CASE("per-pixel component depths are strictly ascending") {
    const RunResult& result = noisy_reproduction();
    const auto& maps = result.maps;
    for (int y = 0; y < maps.height; ++y)
        for (int x = 0; x < maps.width; ++x) {
            double previous = -1.0;
            for (int k = 0; k < maps.k; ++k) {
                if (maps.amplitude[k].at(x, y) <= 0.0) continue;
                CHECK(maps.depth[k].at(x, y) > previous);
                previous = maps.depth[k].at(x, y);
            }
        }
}

TEST_CASE("sentinels appear exactly where amplitudes vanish") {
    const RunResult& result = noisy_reproduction();
    const auto& maps = result.maps;
    for (int y = 0; y < maps.height; ++y)
        for (int x = 0; x < maps.width; ++x)
            for (int k = 0; k < maps.k; ++k) {
                const bool absent = maps.amplitude[k].at(x, y) == 0.0;
                const bool sentinel = maps.depth[k].at(x, y) == maps.sentinel;
                CHECK(absent == sentinel);
            }
}

TEST_CASE("reproduction: noiseless recovery lands within one grid cell per half") {
    ReproduceConfig config;
    const auto result = reproduce_paper_experiment(config);
    const Scene& scene = reproduction_scene();
    const auto dict = build_dictionary(77, 4096, 0.7937e6);
    const double cell = dict.grid_cell_depth() * (1.0 + 1e-9);

    for (int y = 0; y < scene.height; ++y)
        for (int x = 0; x < scene.width; ++x) {
            std::vector<double> truth;
            for (const Layer& layer : scene.layers)
                if (layer.amplitude_map.at(x, y) > 0.0)
                    truth.push_back(layer.depth_map.at(x, y));
            int reported = 0;
            for (int k = 0; k < result.maps.k; ++k) {
                if (result.maps.amplitude[k].at(x, y) <= 0.0) continue;
                ++reported;
                double nearest = std::numeric_limits<double>::max();
                for (double t : truth)
                    nearest = std::min(nearest,
                                       std::abs(result.maps.depth[k].at(x, y) - t));
                CHECK(nearest <= cell);
            }
            CHECK(reported == static_cast<int>(truth.size()));
        }
}

TEST_CASE("reproduction: text pattern survives in the recovered wall amplitudes") {
    const RunResult& result = noisy_reproduction();
    const Scene& scene = reproduction_scene();
    // component 3 on the left half is the wall; correlate against ground truth
    double sum_t = 0, sum_r = 0, sum_tt = 0, sum_rr = 0, sum_tr = 0;
    int count = 0;
    for (int y = 0; y < scene.height; ++y)
        for (int x = 0; x < scene.width / 2; ++x) {
            const double t = scene.layers[2].amplitude_map.at(x, y);
            const double r = result.maps.amplitude[2].at(x, y);
            if (r <= 0.0) continue;
            sum_t += t;
            sum_r += r;
            sum_tt += t * t;
            sum_rr += r * r;
            sum_tr += t * r;
            ++count;
        }
    REQUIRE(count == 96);
    const double cov = sum_tr / count - (sum_t / count) * (sum_r / count);
    const double var_t = sum_tt / count - (sum_t / count) * (sum_t / count);
    const double var_r = sum_rr / count - (sum_r / count) * (sum_r / count);
    CHECK(cov / std::sqrt(var_t * var_r) >= 0.95);
}

TEST_CASE("identical configs and seeds write byte-identical outputs") {
    Scene scene;
    scene.width = 4;
    scene.height = 3;
    scene.layers.push_back({Grid(4, 3, 1.5), Grid(4, 3, 0.7)});
    scene.layers.push_back({Grid(4, 3, 6.0), Grid(4, 3, 0.3)});

    RunConfig config;
    config.plan = default_plan(16);
    config.grid_size = 256;
    config.solver.max_components = 2;
    config.noise_sigma = 0.01;
    config.rng_seed = 424242;
    config.baseline_harmonic = 3;

    const auto dir_a = temp_dir("det_a");
    const auto dir_b = temp_dir("det_b");
    config.output_dir = dir_a.string();
    run_pipeline(scene, config);
    config.output_dir = dir_b.string();
    run_pipeline(scene, config);

    int compared = 0;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        if (entry.path().extension() != ".csv") continue;
        CHECK(read_bytes(entry.path()) == read_bytes(dir_b / entry.path().filename()));
        ++compared;
    }
    CHECK(compared >= 7);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("cube CSV round trip preserves values and plan") {
    Scene scene;
    scene.width = 2;
    scene.height = 2;
    scene.layers.push_back({Grid(2, 2, 2.0), Grid(2, 2, 0.5)});
    const auto plan = default_plan(5);
    const auto cube = measure(scene, plan, 0.02, 9);

    const auto dir = temp_dir("cube_rt");
    const auto path = (dir / "cube.csv").string();
    write_cube_csv(cube, path, 9);
    const auto loaded = read_cube_csv(path);
    CHECK(loaded.width() == 2);
    CHECK(loaded.height() == 2);
    CHECK(loaded.plan().harmonic_count == 5);
    CHECK(loaded.plan().base_frequency_hz == plan.base_frequency_hz);
    CHECK(loaded.noise_sigma() == 0.02);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            for (int n = 1; n <= 5; ++n) CHECK(loaded.at(x, y, n) == cube.at(x, y, n));
    fs::remove_all(dir);
}

TEST_CASE("grid CSV and histogram CSV round trips") {
    const auto dir = temp_dir("grid_rt");
    Grid grid(3, 2);
    grid.at(0, 0) = 0.1;
    grid.at(2, 1) = 123.456789012345678;
    const auto path = (dir / "grid.csv").string();
    write_grid_csv(grid, path);
    CHECK(read_grid_csv(path) == grid);

    HistogramTable table;
    table.harmonic = 3;
    table.bin_centers = {0.5, 1.5};
    table.series = {{"baseline", {3, 4}}, {"component_1", {1, 6}}};
    const auto hpath = (dir / "hist.csv").string();
    write_histogram_csv(table, hpath);
    const auto loaded = read_histogram_csv(hpath);
    REQUIRE(loaded.series.size() == 2);
    CHECK(loaded.series[1].counts == std::vector<std::size_t>{1, 6});
    CHECK(loaded.bin_centers == table.bin_centers);
    fs::remove_all(dir);
}

TEST_CASE("PGM output is a well-formed 16-bit big-endian image") {
    const auto dir = temp_dir("pgm");
    Grid grid(2, 1);
    grid.at(0, 0) = 0.0;
    grid.at(1, 0) = 1.0;
    const auto path = (dir / "map.pgm").string();
    write_pgm16(grid, path, 2.0); // half scale: 1.0 -> 32768
    const std::string bytes = read_bytes(path);
    CHECK(bytes.rfind("P5\n2 1\n65535\n", 0) == 0);
    const std::size_t header = std::string("P5\n2 1\n65535\n").size();
    REQUIRE(bytes.size() == header + 4);
    CHECK(static_cast<unsigned char>(bytes[header]) == 0);
    CHECK(static_cast<unsigned char>(bytes[header + 1]) == 0);
    const unsigned value = (static_cast<unsigned char>(bytes[header + 2]) << 8) |
                           static_cast<unsigned char>(bytes[header + 3]);
    CHECK(value == 32768);
}

TEST_CASE("run outputs include maps, histogram, report and metadata") {
    ReproduceConfig config;
    const auto dir = temp_dir("outputs");
    config.output_dir = dir.string();
    reproduce_paper_experiment(config);
    for (const char* name :
         {"depth_1.csv", "depth_2.csv", "depth_3.csv", "amplitude_1.csv", "amplitude_2.csv",
          "amplitude_3.csv", "baseline_depth.csv", "baseline_amplitude.csv", "residual.csv",
          "histogram.csv", "report.json", "metadata.json", "scene.json", "cube.csv",
          "cube.csv.meta.json", "summary.json", "depth_1.pgm", "amplitude_3.pgm"})
        CHECK_MESSAGE(fs::exists(dir / name), name);
    fs::remove_all(dir);
}
