#include <doctest.h>

#include <filesystem>

#include "tofdemix/core.hpp"
#include "tofdemix/scene_io.hpp"

using namespace tofdemix;

namespace {

Scene single_pixel_scene(std::vector<std::pair<double, double>> layers) {
    Scene scene;
    scene.width = 1;
    scene.height = 1;
    for (auto [depth, amp] : layers)
        scene.layers.push_back({Grid(1, 1, depth), Grid(1, 1, amp)});
    return scene;
}

}  // namespace

TEST_CASE("validate_scene accepts a well-formed minimal scene") {
    const Scene scene = single_pixel_scene({{1.0, 0.5}});
    CHECK(validate_scene(scene).empty());
}

TEST_CASE("validate_scene flags amplitude out of range") {
    const Scene scene = single_pixel_scene({{1.0, 1.5}});
    const auto report = validate_scene(scene);
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("amplitude out of range") != std::string::npos);
}

TEST_CASE("validate_scene flags non-increasing depths") {
    const Scene scene = single_pixel_scene({{2.0, 0.5}, {1.0, 0.5}});
    const auto report = validate_scene(scene);
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("depths not increasing") != std::string::npos);
}

TEST_CASE("validate_scene ignores depth ordering for absent layers") {
    // amplitude 0 marks the layer absent; its depth must not matter
    const Scene scene = single_pixel_scene({{2.0, 0.5}, {1.0, 0.0}, {3.0, 0.2}});
    CHECK(validate_scene(scene).empty());
}

TEST_CASE("validate_scene flags shape mismatch") {
    Scene scene;
    scene.width = 2;
    scene.height = 2;
    scene.layers.push_back({Grid(1, 1, 1.0), Grid(1, 1, 0.5)});
    const auto report = validate_scene(scene);
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("shape mismatch") != std::string::npos);
}

TEST_CASE("validate_scene flags negative and non-finite depths") {
    CHECK(validate_scene(single_pixel_scene({{-1.0, 0.5}})).size() == 1);
    CHECK(validate_scene(single_pixel_scene({{std::nan(""), 0.5}})).size() == 1);
}

TEST_CASE("modulation plan validation") {
    ModulationPlan plan;
    plan.base_frequency_hz = 1e6;
    plan.harmonic_count = 4;
    CHECK_NOTHROW(plan.validate());

    ModulationPlan bad = plan;
    bad.bucket_count = 3;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = plan;
    bad.modulation_depth = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = plan;
    bad.modulation_depth = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = plan;
    bad.harmonic_count = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("scene JSON round trip is bit exact") {
    Scene scene;
    scene.width = 3;
    scene.height = 2;
    Layer a{Grid(3, 2), Grid(3, 2)};
    double v = 0.1;
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) {
            a.depth_map.at(x, y) = 0.3 + 1.7 * x + 0.013 * y; // not exactly representable
            a.amplitude_map.at(x, y) = v;
            v = std::nextafter(v, 1.0);
        }
    scene.layers.push_back(a);

    const auto path = std::filesystem::temp_directory_path() / "tofdemix_scene_rt.json";
    save_scene(scene, path.string());
    const Scene loaded = load_scene(path.string());
    CHECK(loaded == scene);
    std::filesystem::remove(path);
}

TEST_CASE("scene JSON scalars broadcast") {
    const Scene scene = parse_scene_json(R"({
        "width": 2, "height": 2,
        "layers": [{"depth": 1.25, "amplitude": [0.1, 0.2, 0.3, 0.4]}]
    })");
    CHECK(scene.layers.size() == 1);
    CHECK(scene.layers[0].depth_map.at(1, 1) == 1.25);
    CHECK(scene.layers[0].amplitude_map.at(0, 1) == 0.3);
}

TEST_CASE("scene JSON rejects malformed input") {
    CHECK_THROWS_AS(parse_scene_json("{"), DataError);
    CHECK_THROWS_AS(parse_scene_json(R"({"width": 2, "height": 2})"), DataError);
    CHECK_THROWS_AS(parse_scene_json(R"({"width": 2, "height": 2,
        "layers": [{"depth": [1, 2, 3], "amplitude": 0.5}]})"),
                    DataError);
    CHECK_THROWS_AS(parse_scene_json(R"({"width": 0, "height": 2, "layers": []})"), DataError);
}
