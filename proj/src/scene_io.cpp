#include "tofdemix/scene_io.hpp"

#include <fstream>

#include <json.hpp>

namespace tofdemix {

namespace {

using nlohmann::json;

Grid grid_from_json(const json& value, int width, int height, const char* what) {
    Grid grid(width, height);
    if (value.is_number()) {
        const double v = value.get<double>();
        std::fill(grid.values().begin(), grid.values().end(), v);
        return grid;
    }
    if (value.is_array()) {
        if (value.size() != grid.size())
            throw DataError(std::string(what) + ": array length does not match width*height");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!value[i].is_number())
                throw DataError(std::string(what) + ": array entries must be numbers");
            grid.values()[i] = value[i].get<double>();
        }
        return grid;
    }
    throw DataError(std::string(what) + ": expected a number or an array");
}

}  // namespace

Scene parse_scene_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("scene JSON parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("width") || !doc.contains("height") ||
        !doc.contains("layers") || !doc["layers"].is_array())
        throw DataError("scene JSON must contain width, height and a layers array");

    Scene scene;
    scene.width = doc["width"].get<int>();
    scene.height = doc["height"].get<int>();
    if (scene.width <= 0 || scene.height <= 0)
        throw DataError("scene dimensions must be positive");

    for (const auto& entry : doc["layers"]) {
        if (!entry.is_object() || !entry.contains("depth") || !entry.contains("amplitude"))
            throw DataError("each layer needs depth and amplitude fields");
        Layer layer;
        layer.depth_map = grid_from_json(entry["depth"], scene.width, scene.height, "depth");
        layer.amplitude_map =
            grid_from_json(entry["amplitude"], scene.width, scene.height, "amplitude");
        scene.layers.push_back(std::move(layer));
    }
    return scene;
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scene file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_scene_json(text);
}

std::string scene_to_json(const Scene& scene) {
    json doc;
    doc["width"] = scene.width;
    doc["height"] = scene.height;
    doc["layers"] = json::array();
    for (const Layer& layer : scene.layers) {
        json entry;
        entry["depth"] = layer.depth_map.values();
        entry["amplitude"] = layer.amplitude_map.values();
        doc["layers"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open scene file for writing: " + path);
    out << scene_to_json(scene) << '\n';
}

}  // namespace tofdemix
