#pragma once

#include <string>

#include "sigtraj/nn.hpp"

namespace sigtraj {

// Parameter checkpoint: versioned magic string, 8-byte little-endian header
// length, JSON header (names, shapes, byte offsets, free-form metadata), then
// the raw 64-bit values. Round-trips exactly.
inline constexpr char kCheckpointMagic[] = "SIGTRAJCKPT1\n";

void save_checkpoint(const ParamStore& params, const std::string& meta_json, const std::string& path);

struct Checkpoint {
  ParamStore params;
  std::string meta_json;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace sigtraj
