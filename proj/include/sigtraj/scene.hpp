#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigtraj/geometry.hpp"

namespace sigtraj {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model/task dimensions shared by the scene file, the predictor, and the
// checkpoint header.
struct TaskConfig {
  int obs_horizon_frames = 8;    // T_h: history length before the current frame
  int pred_horizon_frames = 24;  // T_f
  double frame_rate = 10.0;      // Hz
  int num_modes = 6;             // K
  double local_radius = 30.0;    // meters
  double max_cycle_time = 120.0; // T_omega, seconds
  int hidden_dim = 64;
  int num_heads = 4;
  int num_attn_layers = 2;

  double frame_period() const { return 1.0 / frame_rate; }
  void validate() const;
  bool operator==(const TaskConfig&) const = default;
};

enum class AgentClass { kCar = 0, kBus, kTruck, kCyclist, kPedestrian, kOther };
const char* agent_class_name(AgentClass c);
AgentClass agent_class_from_name(const std::string& name);

struct AgentObservation {
  int frame = 0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, (-pi, pi]
  double speed = 0.0;    // m/s
  double vel_dir = 0.0;  // velocity direction in the agent frame, radians
  double length = 4.5;
  double width = 1.8;
  AgentClass agent_class = AgentClass::kCar;
  bool valid = true;

  Pose pose() const { return Pose{{x, y}, heading}; }
};

struct AgentTrack {
  std::string agent_id;
  // Exactly T_h+1 entries covering [t_c - T_h, t_c]; gaps flagged, not omitted.
  std::vector<AgentObservation> history;
  // Exactly T_f ground-truth future positions over (t_c, t_c + T_f].
  std::vector<Vec2> future_gt;
  std::vector<uint8_t> future_valid;

  const AgentObservation& current() const { return history.back(); }
  // Pose used as the prediction origin: the latest valid observation.
  bool last_valid_pose(Pose& out) const;
};

enum class SignalColor { kRed = 0, kGreen = 1, kYellow = 2 };
const char* signal_color_name(SignalColor c);
SignalColor signal_color_from_name(const std::string& name);

struct SignalPhase {
  SignalColor color = SignalColor::kRed;
  double duration = 0.0;  // seconds, > 0
};

// Periodic phase plan. Phase intervals are half-open [start, end): at a
// boundary instant the next color is already active.
struct SignalSchedule {
  std::string light_id;
  Vec2 position;
  Vec2 control_dir;  // unit vector of the controlled approach
  std::vector<SignalPhase> phases;
  double cycle_offset = 0.0;  // phase 0 starts at t = cycle_offset (mod cycle)

  double cycle_length() const;
  SignalColor color_at(double t) const;
  // Remaining time of color d at time t; 0 when d is not the active color.
  double remaining_time(double t, SignalColor d) const;
};

enum class TurnSign { kNone = 0, kLeft, kRight, kUturn };
const char* turn_sign_name(TurnSign t);
TurnSign turn_sign_from_name(const std::string& name);

struct LaneAttributes {
  Vec2 center;
  double heading = 0.0;
  bool is_intersection = false;
  TurnSign turn_sign = TurnSign::kNone;
  bool signal_controlled = false;
};

struct LaneAdjacency {
  std::vector<std::string> predecessors;
  std::vector<std::string> successors;
  std::string left_neighbor;   // empty when none
  std::string right_neighbor;  // empty when none
};

struct LaneSegment {
  std::string lane_id;
  std::vector<Vec2> centerline;  // >= 2 points
  double length = 0.0;           // arc length of the centerline
  LaneAttributes attrs;
  LaneAdjacency adjacency;

  double polyline_length() const;
};

// Drivable-area bit grid, row-major, bit (ix, iy) at iy*width+ix.
struct RasterMap {
  Vec2 origin;
  double resolution = 0.5;  // meters per cell
  int width = 0;
  int height = 0;
  std::vector<uint8_t> drivable;  // packed bits, (width*height+7)/8 bytes

  bool get_cell(int ix, int iy) const {
    const size_t bit = static_cast<size_t>(iy) * width + ix;
    return (drivable[bit >> 3] >> (bit & 7)) & 1;
  }
  void set_cell(int ix, int iy, bool v) {
    const size_t bit = static_cast<size_t>(iy) * width + ix;
    if (v)
      drivable[bit >> 3] |= static_cast<uint8_t>(1u << (bit & 7));
    else
      drivable[bit >> 3] &= static_cast<uint8_t>(~(1u << (bit & 7)));
  }
};

// Cell assignment follows floor((p - origin) / resolution); out-of-bounds
// points are non-drivable.
bool query_drivable(const RasterMap& raster, double x, double y);

struct Scene {
  TaskConfig config;
  std::vector<LaneSegment> map;
  RasterMap raster;
  std::vector<SignalSchedule> lights;
  std::vector<AgentTrack> tracks;
  int current_frame = 0;  // t_c
  Vec2 center;
  double diameter = 0.0;  // D, prior knowledge carried with the scene

  int num_agents() const { return static_cast<int>(tracks.size()); }
  double frame_time(int frame) const { return frame * config.frame_period(); }
  // Throws ValidationError naming the offending field on the first violation.
  void validate() const;
};

struct SceneMode {
  // trajectories[n][t]: agent n, future frame t (global frame t_c + 1 + t)
  std::vector<std::vector<Vec2>> trajectories;
  double score = 0.0;
};

// K joint futures, sorted by descending score; every agent appears in every
// mode, in scene track order.
struct ScenePrediction {
  std::vector<std::string> agent_ids;
  std::vector<SceneMode> modes;

  int num_modes() const { return static_cast<int>(modes.size()); }
  int num_agents() const { return static_cast<int>(agent_ids.size()); }
  void validate() const;
};

}  // namespace sigtraj
