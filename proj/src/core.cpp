#include "tofdemix/core.hpp"

#include <cmath>
#include <sstream>

namespace tofdemix {

std::vector<std::string> validate_scene(const Scene& scene) {
    std::vector<std::string> report;
    auto note = [&report](const std::string& msg) { report.push_back(msg); };

    if (scene.width <= 0 || scene.height <= 0) {
        note("scene dimensions must be positive");
        return report;
    }

    for (std::size_t li = 0; li < scene.layers.size(); ++li) {
        const Layer& layer = scene.layers[li];
        const std::string tag = "layer " + std::to_string(li);
        if (layer.depth_map.width() != scene.width || layer.depth_map.height() != scene.height ||
            layer.amplitude_map.width() != scene.width ||
            layer.amplitude_map.height() != scene.height) {
            note(tag + ": shape mismatch with scene");
            continue;
        }
        for (int y = 0; y < scene.height; ++y) {
            for (int x = 0; x < scene.width; ++x) {
                const double a = layer.amplitude_map.at(x, y);
                const double d = layer.depth_map.at(x, y);
                if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
                    std::ostringstream os;
                    os << tag << ": amplitude out of range at (" << x << "," << y << "): " << a;
                    note(os.str());
                }
                if (a > 0.0 && (!std::isfinite(d) || d < 0.0)) {
                    std::ostringstream os;
                    os << tag << ": invalid depth at (" << x << "," << y << "): " << d;
                    note(os.str());
                }
            }
        }
    }
    if (!report.empty()) return report;

    // Present layers must be strictly ordered front to back at every pixel.
    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            double prev = -1.0;
            for (std::size_t li = 0; li < scene.layers.size(); ++li) {
                const Layer& layer = scene.layers[li];
                if (layer.amplitude_map.at(x, y) <= 0.0) continue;
                const double d = layer.depth_map.at(x, y);
                if (d <= prev) {
                    std::ostringstream os;
                    os << "layer " << li << ": depths not increasing at (" << x << "," << y
                       << "): " << d << " after " << prev;
                    report.push_back(os.str());
                }
                prev = d;
            }
        }
    }
    return report;
}

void require_valid_scene(const Scene& scene) {
    const auto report = validate_scene(scene);
    if (report.empty()) return;
    std::string msg = "invalid scene:";
    for (const auto& line : report) {
        msg += "\n  ";
        msg += line;
    }
    throw DataError(msg);
}

void ModulationPlan::validate() const {
    if (!(base_frequency_hz > 0.0)) throw ConfigError("base frequency must be positive");
    if (harmonic_count < 1) throw ConfigError("harmonic count must be at least 1");
    if (!(modulation_depth > 0.0) || modulation_depth > 1.0)
        throw ConfigError("modulation depth must lie in (0, 1]");
    if (bucket_count != 4)
        throw ConfigError("only 4-bucket sampling is supported");
    if (dc_offset && (!std::isfinite(*dc_offset) || *dc_offset < 0.0))
        throw ConfigError("dc offset must be finite and nonnegative");
}

}  // namespace tofdemix
