#include "sigtraj/scene.hpp"

#include <cmath>
#include <set>

namespace sigtraj {

void TaskConfig::validate() const {
  if (obs_horizon_frames < 1) throw ValidationError("config.obs_horizon_frames must be >= 1");
  if (pred_horizon_frames < 1) throw ValidationError("config.pred_horizon_frames must be >= 1");
  if (frame_rate <= 0.0) throw ValidationError("config.frame_rate must be > 0");
  if (num_modes < 3) throw ValidationError("config.num_modes must be >= 3");
  if (local_radius <= 0.0) throw ValidationError("config.local_radius must be > 0");
  if (max_cycle_time <= 0.0) throw ValidationError("config.max_cycle_time must be > 0");
  if (hidden_dim < 1) throw ValidationError("config.hidden_dim must be >= 1");
  if (num_heads < 1) throw ValidationError("config.num_heads must be >= 1");
  if (num_attn_layers < 1) throw ValidationError("config.num_attn_layers must be >= 1");
  if (hidden_dim % num_heads != 0) throw ValidationError("config.hidden_dim must be divisible by num_heads");
}

const char* agent_class_name(AgentClass c) {
  switch (c) {
    case AgentClass::kCar: return "car";
    case AgentClass::kBus: return "bus";
    case AgentClass::kTruck: return "truck";
    case AgentClass::kCyclist: return "cyclist";
    case AgentClass::kPedestrian: return "pedestrian";
    case AgentClass::kOther: return "other";
  }
  return "other";
}

AgentClass agent_class_from_name(const std::string& name) {
  if (name == "car") return AgentClass::kCar;
  if (name == "bus") return AgentClass::kBus;
  if (name == "truck") return AgentClass::kTruck;
  if (name == "cyclist") return AgentClass::kCyclist;
  if (name == "pedestrian") return AgentClass::kPedestrian;
  if (name == "other") return AgentClass::kOther;
  throw ParseError("unknown agent class '" + name + "'");
}

bool AgentTrack::last_valid_pose(Pose& out) const {
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->valid) {
      out = it->pose();
      return true;
    }
  }
  return false;
}

const char* signal_color_name(SignalColor c) {
  switch (c) {
    case SignalColor::kRed: return "red";
    case SignalColor::kGreen: return "green";
    case SignalColor::kYellow: return "yellow";
  }
  return "red";
}

SignalColor signal_color_from_name(const std::string& name) {
  if (name == "red") return SignalColor::kRed;
  if (name == "green") return SignalColor::kGreen;
  if (name == "yellow") return SignalColor::kYellow;
  throw ParseError("unknown signal color '" + name + "'");
}

double SignalSchedule::cycle_length() const {
  double total = 0.0;
  for (const auto& p : phases) total += p.duration;
  return total;
}

namespace {

// Time into the cycle, in [0, cycle).
double phase_time(const SignalSchedule& s, double t) {
  const double cycle = s.cycle_length();
  double u = std::fmod(t - s.cycle_offset, cycle);
  if (u < 0.0) u += cycle;
  return u;
}

}  // namespace

SignalColor SignalSchedule::color_at(double t) const {
  double u = phase_time(*this, t);
  for (const auto& p : phases) {
    if (u < p.duration) return p.color;
    u -= p.duration;
  }
  return phases.back().color;  // u == cycle due to rounding
}

double SignalSchedule::remaining_time(double t, SignalColor d) const {
  double u = phase_time(*this, t);
  for (const auto& p : phases) {
    if (u < p.duration) return p.color == d ? p.duration - u : 0.0;
    u -= p.duration;
  }
  return 0.0;
}

const char* turn_sign_name(TurnSign t) {
  switch (t) {
    case TurnSign::kNone: return "none";
    case TurnSign::kLeft: return "left";
    case TurnSign::kRight: return "right";
    case TurnSign::kUturn: return "uturn";
  }
  return "none";
}

TurnSign turn_sign_from_name(const std::string& name) {
  if (name == "none") return TurnSign::kNone;
  if (name == "left") return TurnSign::kLeft;
  if (name == "right") return TurnSign::kRight;
  if (name == "uturn") return TurnSign::kUturn;
  throw ParseError("unknown turn sign '" + name + "'");
}

double LaneSegment::polyline_length() const {
  double total = 0.0;
  for (size_t i = 1; i < centerline.size(); ++i) total += dist(centerline[i - 1], centerline[i]);
  return total;
}

bool query_drivable(const RasterMap& raster, double x, double y) {
  const int ix = static_cast<int>(std::floor((x - raster.origin.x) / raster.resolution));
  const int iy = static_cast<int>(std::floor((y - raster.origin.y) / raster.resolution));
  if (ix < 0 || iy < 0 || ix >= raster.width || iy >= raster.height) return false;
  return raster.get_cell(ix, iy);
}

void Scene::validate() const {
  config.validate();
  if (diameter <= 1.0) throw ValidationError("scene.diameter must be > 1 m");
  if (raster.resolution <= 0.0) throw ValidationError("raster.resolution must be > 0");
  if (raster.width < 0 || raster.height < 0) throw ValidationError("raster dimensions must be non-negative");
  const size_t want_bytes = (static_cast<size_t>(raster.width) * raster.height + 7) / 8;
  if (raster.drivable.size() != want_bytes) throw ValidationError("raster.drivable has wrong byte count");

  std::set<std::string> lane_ids;
  for (const auto& lane : map) {
    const std::string where = "map.lane '" + lane.lane_id + "'";
    if (!lane_ids.insert(lane.lane_id).second) throw ValidationError(where + ": duplicate lane_id");
    if (lane.centerline.size() < 2) throw ValidationError(where + ": centerline needs >= 2 points");
    if (std::fabs(lane.polyline_length() - lane.length) > 1e-6)
      throw ValidationError(where + ": length does not match centerline arc length");
  }
  auto check_ref = [&lane_ids](const std::string& where, const std::string& id) {
    if (!id.empty() && lane_ids.count(id) == 0)
      throw ValidationError(where + ": dangling adjacency reference '" + id + "'");
  };
  for (const auto& lane : map) {
    const std::string where = "map.lane '" + lane.lane_id + "'";
    for (const auto& id : lane.adjacency.predecessors) check_ref(where, id);
    for (const auto& id : lane.adjacency.successors) check_ref(where, id);
    check_ref(where, lane.adjacency.left_neighbor);
    check_ref(where, lane.adjacency.right_neighbor);
  }

  std::set<std::string> light_ids;
  for (const auto& light : lights) {
    const std::string where = "lights '" + light.light_id + "'";
    if (!light_ids.insert(light.light_id).second) throw ValidationError(where + ": duplicate light_id");
    if (light.phases.empty()) throw ValidationError(where + ": schedule needs >= 1 phase");
    for (const auto& p : light.phases)
      if (p.duration <= 0.0) throw ValidationError(where + ": phase duration must be > 0");
    if (light.cycle_length() > config.max_cycle_time + 1e-9)
      throw ValidationError(where + ": cycle length exceeds config.max_cycle_time");
  }

  std::set<std::string> agent_ids;
  for (const auto& track : tracks) {
    const std::string where = "tracks '" + track.agent_id + "'";
    if (!agent_ids.insert(track.agent_id).second)
      throw ValidationError(where + ": duplicate agent_id '" + track.agent_id + "'");
    if (static_cast<int>(track.history.size()) != config.obs_horizon_frames + 1)
      throw ValidationError(where + ": history length must be obs_horizon_frames+1");
    if (static_cast<int>(track.future_gt.size()) != config.pred_horizon_frames)
      throw ValidationError(where + ": future_gt length must be pred_horizon_frames");
    if (track.future_valid.size() != track.future_gt.size())
      throw ValidationError(where + ": future_valid length must match future_gt");
    for (const auto& obs : track.history) {
      if (!obs.valid) continue;
      if (obs.speed < 0.0) throw ValidationError(where + ": speed must be >= 0");
      if (obs.length <= 0.0 || obs.width <= 0.0) throw ValidationError(where + ": agent box must be positive");
      if (obs.heading <= -M_PI - 1e-12 || obs.heading > M_PI + 1e-12)
        throw ValidationError(where + ": heading must be normalized to (-pi, pi]");
    }
    const int expect_last = current_frame;
    if (track.history.back().frame != expect_last)
      throw ValidationError(where + ": last history frame must equal current_frame");
  }
}

void ScenePrediction::validate() const {
  double total = 0.0;
  double prev = 1.0 + 1e-12;
  for (const auto& mode : modes) {
    if (static_cast<int>(mode.trajectories.size()) != num_agents())
      throw ValidationError("prediction: every agent must appear in every mode");
    if (mode.score > prev + 1e-9) throw ValidationError("prediction: modes must be sorted by descending score");
    prev = mode.score;
    total += mode.score;
  }
  if (!modes.empty() && std::fabs(total - 1.0) > 1e-9)
    throw ValidationError("prediction: mode scores must sum to 1");
}

}  // namespace sigtraj
