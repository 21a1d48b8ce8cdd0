#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sigtraj/rng.hpp"
#include "sigtraj/scene.hpp"

namespace sigtraj {

enum class ManeuverIntent { kStop = 0, kStraight, kLeft, kRight, kUturn };
const char* maneuver_intent_name(ManeuverIntent m);

struct GeneratorConfig {
  uint64_t seed = 0;
  double diameter = 26.0;  // D: distance between opposite stop lines
  int arms = 4;            // 3 = T-intersection, 4 = orthogonal
  int lanes_per_arm = 1;
  // Phase-duration template; the opposing arm pair runs the same phases
  // shifted by half a cycle. Durations: green, yellow, red = green + yellow.
  std::vector<SignalPhase> cycle = {
      {SignalColor::kGreen, 20.0}, {SignalColor::kYellow, 3.0}, {SignalColor::kRed, 23.0}};
  double spawn_rate = 4.0;  // vehicles per signal cycle per arm
  double speed_min = 11.2;  // m/s
  double speed_max = 13.4;
  double accel_limit = 3.0;   // m/s^2 longitudinal
  int horizon_frames = 0;     // total rollout frames; 0 = obs + 1 + pred
  TaskConfig task;

  double cycle_length() const;
  int total_frames() const;
  void validate() const;
};

// A fully planned vehicle: route geometry plus the state it starts from.
struct ManeuverPlan {
  ManeuverIntent intent = ManeuverIntent::kStraight;
  int entry_arm = 0;
  int target_arm = 0;
  std::vector<Vec2> path;           // arc-length-parameterized route polyline
  double stop_line_s = 0.0;         // distance along the path to the stop line
  std::string governing_light;      // light id controlling the entry arm
  double start_s = 0.0;             // position along the path at frame 0
  double start_speed = 0.0;
  double target_speed = 10.0;
  bool obey_signals = true;
};

struct GeneratedMap {
  std::vector<LaneSegment> lanes;
  RasterMap raster;
  Vec2 center;
  double diameter = 0.0;
  std::vector<SignalSchedule> lights;  // with cycle_offset 0; scenes shift it
};

// Deterministic intersection geometry for a config: approach/exit lanes per
// arm plus straight/left/right connectors, and a drivable corridor raster.
GeneratedMap generate_map(const GeneratorConfig& config);

// Kinematic rollout of one plan at frame_rate over total_frames() frames.
// The vehicle tracks its target speed, slows for path curvature, and obeys
// the governing light: stop at the line on red, and on yellow stop only when
// it can brake within accel_limit.
AgentTrack simulate_vehicle(const ManeuverPlan& plan, const std::vector<SignalSchedule>& lights,
                            const GeneratorConfig& config);

// A full rollout from which scene windows at consecutive frames are cut.
struct Episode {
  GeneratorConfig config;
  GeneratedMap map;
  std::vector<SignalSchedule> lights;  // offsets resolved for this episode
  struct Vehicle {
    ManeuverPlan plan;
    std::vector<AgentObservation> frames;  // one per global frame
    std::vector<uint8_t> valid;
  };
  std::vector<Vehicle> vehicles;
  int total_frames = 0;

  int first_window() const { return config.task.obs_horizon_frames; }
  int last_window() const { return total_frames - config.task.pred_horizon_frames - 1; }
  // Scene at current frame t_c; includes vehicles observed at t_c.
  Scene window(int t_c) const;
};

Episode generate_episode(const GeneratorConfig& config, uint64_t episode_seed);

struct DatasetManifest {
  struct Entry {
    std::string path;
    std::string sha256;
    int n_agents = 0;
  };
  std::vector<Entry> entries;
  // planted-intent histogram across all generated vehicles
  std::vector<int64_t> intent_counts = std::vector<int64_t>(5, 0);

  std::string to_json_text() const;
};

// Writes n_scenes scene files plus manifest.json under out_dir. Identical
// (config, n_scenes) produce byte-identical files and manifest.
DatasetManifest generate_dataset(const GeneratorConfig& config, int n_scenes, const std::string& out_dir);

DatasetManifest load_manifest(const std::string& path);
std::vector<std::string> manifest_scene_paths(const std::string& manifest_path);

}  // namespace sigtraj
