#pragma once

#include <string>

#include "sigtraj/scene.hpp"

namespace sigtraj {

// Canonical scene-file round trip. Files are JSON with fixed key order and
// every real number rendered at 6 decimal places, so save(load(f)) is
// byte-identical to f. Schema: docs/FORMATS.md.
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

Scene scene_from_json_text(const std::string& text, const std::string& origin = "<string>");
std::string scene_to_json_text(const Scene& scene);

// The exact value a 6-decimal serialization round-trips to. Generators
// quantize geometry through this so derived quantities (arc lengths) match
// what a loader recomputes from the file.
double quantize6(double v);
std::string format6(double v);

std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(const std::string& text);

// SHA-256 of a byte string, lowercase hex. Used for dataset manifests.
std::string sha256_hex(const std::string& bytes);

std::string read_file(const std::string& path);
// Writes via temp file + rename in the same directory.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace sigtraj
