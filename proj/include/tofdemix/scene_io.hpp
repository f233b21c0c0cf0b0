#ifndef TOFDEMIX_SCENE_IO_HPP
#define TOFDEMIX_SCENE_IO_HPP

#include <string>

#include "tofdemix/core.hpp"

namespace tofdemix {

/// Loads a scene from the JSON schema documented in docs/scene_format.md.
/// Scalar depth/amplitude entries broadcast to the whole image; array entries
/// are row-major with width*height values. Throws DataError on malformed input.
Scene load_scene(const std::string& path);

/// Parses a scene from a JSON string (same schema as load_scene).
Scene parse_scene_json(const std::string& text);

/// Writes the scene as JSON (row-major arrays, full double precision).
void save_scene(const Scene& scene, const std::string& path);

std::string scene_to_json(const Scene& scene);

}  // namespace tofdemix

#endif
