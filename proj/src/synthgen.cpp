#include "sigtraj/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "json.hpp"
#include "sigtraj/scene_io.hpp"

namespace sigtraj {

namespace {

constexpr double kLaneWidth = 3.5;
constexpr double kCorridorHalfWidth = 2.5;
constexpr double kRasterResolution = 0.5;
constexpr double kApproachLength = 60.0;
constexpr double kExitTailLength = 120.0;   // driven path continues past the mapped exit lane
constexpr double kLateralAccelLimit = 2.0;  // caps curve speed at sqrt(a_lat * r)
constexpr double kStopBuffer = 0.3;         // vehicles hold this far before the line
constexpr double kSimSubstep = 0.01;        // seconds
// Fixed away from the origin so absolute-coordinate assumptions surface in tests.
const Vec2 kCenter{240.0, -180.0};

Vec2 arm_dir(int arm) {
  switch (arm & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

Vec2 right_perp(const Vec2& d) { return {d.y, -d.x}; }
Vec2 left_perp(const Vec2& d) { return {-d.y, d.x}; }

void append_line(std::vector<Vec2>& pts, const Vec2& a, const Vec2& b, double max_step) {
  const double len = dist(a, b);
  const int n = std::max(1, static_cast<int>(std::ceil(len / max_step)));
  if (pts.empty()) pts.push_back(a);
  for (int i = 1; i <= n; ++i) pts.push_back(a + (b - a) * (static_cast<double>(i) / n));
}

// Line-arc-line fillet from (p1, heading h1) to (p2, heading h2). The arm
// layout only produces quarter turns and half-turn (u-turn) connectors.
std::vector<Vec2> make_connector(const Vec2& p1, double h1, const Vec2& p2, double h2) {
  std::vector<Vec2> pts;
  const Vec2 fwd{std::cos(h1), std::sin(h1)};
  const Vec2 left = left_perp(fwd);
  const Vec2 d = p2 - p1;
  const double x = d.dot(fwd);
  const double y = d.dot(left);
  const double turn = wrap_angle(h2 - h1);
  if (std::fabs(turn) < 1e-9) {
    append_line(pts, p1, p2, 2.5);
    return pts;
  }
  const bool uturn = std::fabs(std::fabs(turn) - M_PI) < 1e-9;
  const double radius = uturn ? std::fabs(y) / 2.0 : std::min(x, std::fabs(y));
  const double lead = uturn ? x : std::max(0.0, x - std::fabs(y));
  const double tail = uturn ? 0.0 : std::max(0.0, std::fabs(y) - x);
  if (radius <= 0.0) throw ValidationError("generator: degenerate connector geometry");
  const double side = (uturn || turn > 0.0) ? 1.0 : -1.0;  // u-turns are left-hand
  Vec2 cursor = p1;
  if (pts.empty()) pts.push_back(p1);
  if (lead > 1e-9) {
    append_line(pts, cursor, cursor + fwd * lead, 2.5);
    cursor = cursor + fwd * lead;
  }
  const Vec2 arc_center = cursor + left * (side * radius);
  const double sweep = uturn ? M_PI : std::fabs(turn);
  const int steps = std::max(6, static_cast<int>(std::ceil(sweep * radius / 1.2)));
  const double a0 = (cursor - arc_center).angle();
  for (int i = 1; i <= steps; ++i) {
    const double a = a0 + side * sweep * (static_cast<double>(i) / steps);
    pts.push_back(arc_center + Vec2{std::cos(a), std::sin(a)} * radius);
  }
  if (tail > 1e-9) {
    const Vec2 exit_fwd{std::cos(h2), std::sin(h2)};
    const Vec2 from = pts.back();
    append_line(pts, from, from + exit_fwd * tail, 2.5);
  }
  return pts;
}

double polyline_len(const std::vector<Vec2>& pts) {
  double total = 0.0;
  for (size_t i = 1; i < pts.size(); ++i) total += dist(pts[i - 1], pts[i]);
  return total;
}

std::vector<double> cumulative(const std::vector<Vec2>& pts) {
  std::vector<double> cum(pts.size(), 0.0);
  for (size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + dist(pts[i - 1], pts[i]);
  return cum;
}

Vec2 point_at(const std::vector<Vec2>& pts, const std::vector<double>& cum, double s) {
  if (s <= 0.0) return pts.front();
  if (s >= cum.back()) return pts.back();
  const size_t i = static_cast<size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin());
  const double seg = cum[i] - cum[i - 1];
  const double t = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
  return pts[i - 1] + (pts[i] - pts[i - 1]) * t;
}

double heading_at(const std::vector<Vec2>& pts, const std::vector<double>& cum, double s) {
  size_t i = 1;
  if (s >= cum.back()) {
    i = pts.size() - 1;
  } else if (s > 0.0) {
    i = static_cast<size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin());
  }
  i = std::min(std::max<size_t>(i, 1), pts.size() - 1);
  return (pts[i] - pts[i - 1]).angle();
}

void quantize_polyline(std::vector<Vec2>& pts) {
  for (auto& p : pts) {
    p.x = quantize6(p.x);
    p.y = quantize6(p.y);
  }
}

LaneSegment finish_lane(std::string id, std::vector<Vec2> pts, bool is_intersection, TurnSign turn,
                        bool signal_controlled) {
  LaneSegment lane;
  lane.lane_id = std::move(id);
  quantize_polyline(pts);
  lane.centerline = std::move(pts);
  lane.length = quantize6(lane.polyline_length());
  const auto cum = cumulative(lane.centerline);
  const Vec2 c = point_at(lane.centerline, cum, cum.back() / 2.0);
  lane.attrs.center = {quantize6(c.x), quantize6(c.y)};
  lane.attrs.heading = quantize6(wrap_angle(heading_at(lane.centerline, cum, cum.back() / 2.0)));
  lane.attrs.is_intersection = is_intersection;
  lane.attrs.turn_sign = turn;
  lane.attrs.signal_controlled = signal_controlled;
  return lane;
}

bool arm_exists(const GeneratorConfig& cfg, int arm) { return arm >= 0 && arm < cfg.arms; }

// Exit arm reached from entry_arm by the maneuver, or -1 when that arm is
// missing (3-arm layouts).
int exit_arm_for(const GeneratorConfig& cfg, int entry_arm, ManeuverIntent intent) {
  int k;
  switch (intent) {
    case ManeuverIntent::kLeft: k = (entry_arm + 3) % 4; break;
    case ManeuverIntent::kRight: k = (entry_arm + 1) % 4; break;
    case ManeuverIntent::kUturn: k = entry_arm; break;
    default: k = (entry_arm + 2) % 4; break;  // straight; stop shares the route
  }
  return arm_exists(cfg, k) ? k : -1;
}

}  // namespace

const char* maneuver_intent_name(ManeuverIntent m) {
  switch (m) {
    case ManeuverIntent::kStop: return "stop";
    case ManeuverIntent::kStraight: return "straight";
    case ManeuverIntent::kLeft: return "left";
    case ManeuverIntent::kRight: return "right";
    case ManeuverIntent::kUturn: return "uturn";
  }
  return "stop";
}

double GeneratorConfig::cycle_length() const {
  double s = 0.0;
  for (const auto& p : cycle) s += p.duration;
  return s;
}

int GeneratorConfig::total_frames() const {
  const int base = task.obs_horizon_frames + 1 + task.pred_horizon_frames;
  return horizon_frames > 0 ? horizon_frames : base;
}

void GeneratorConfig::validate() const {
  task.validate();
  if (arms != 3 && arms != 4) throw ValidationError("generator.arms must be 3 or 4");
  if (lanes_per_arm < 1) throw ValidationError("generator.lanes_per_arm must be >= 1");
  if (diameter <= lanes_per_arm * kLaneWidth)
    throw ValidationError("generator.diameter must exceed lanes_per_arm * lane width");
  if (speed_min <= 0.0 || speed_max < speed_min) throw ValidationError("generator.speed_range invalid");
  if (accel_limit <= 0.0) throw ValidationError("generator.accel_limit must be > 0");
  if (cycle.empty()) throw ValidationError("generator.cycle must have phases");
  for (const auto& p : cycle)
    if (p.duration <= 0.0) throw ValidationError("generator.cycle durations must be > 0");
  if (total_frames() < task.obs_horizon_frames + 1 + task.pred_horizon_frames)
    throw ValidationError("generator.horizon_frames too small for the task window");
  if (cycle_length() > task.max_cycle_time)
    throw ValidationError("generator.cycle exceeds task.max_cycle_time");
}

GeneratedMap generate_map(const GeneratorConfig& config) {
  config.validate();
  GeneratedMap out;
  out.center = kCenter;
  out.diameter = config.diameter;
  const double radius = config.diameter / 2.0;
  const int lanes = config.lanes_per_arm;

  struct ArmGeometry {
    Vec2 entry_point;
    double entry_heading = 0.0;
    Vec2 exit_point;
    double exit_heading = 0.0;
  };
  std::vector<ArmGeometry> arms(static_cast<size_t>(config.arms));

  // Approach and exit lanes; lane 0 is the curbside lane.
  for (int a = 0; a < config.arms; ++a) {
    const Vec2 u = arm_dir(a);
    const Vec2 d_in = u * -1.0;
    for (int j = 0; j < lanes; ++j) {
      const double off = kLaneWidth * (j + 0.5);
      const Vec2 o_in = right_perp(d_in) * off;
      const Vec2 o_out = right_perp(u) * off;
      std::vector<Vec2> in_pts, out_pts;
      append_line(in_pts, kCenter + u * (radius + kApproachLength) + o_in, kCenter + u * radius + o_in, 5.0);
      append_line(out_pts, kCenter + u * radius + o_out, kCenter + u * (radius + kApproachLength) + o_out, 5.0);
      out.lanes.push_back(finish_lane("arm" + std::to_string(a) + "_in" + std::to_string(j),
                                      std::move(in_pts), false, TurnSign::kNone, true));
      out.lanes.push_back(finish_lane("arm" + std::to_string(a) + "_out" + std::to_string(j),
                                      std::move(out_pts), false, TurnSign::kNone, false));
      if (j == 0) {
        arms[static_cast<size_t>(a)] = {kCenter + u * radius + o_in, d_in.angle(),
                                        kCenter + u * radius + o_out, u.angle()};
      }
    }
  }

  // Connectors between curbside lanes: straight, left, right where the exit
  // arm exists. U-turn paths are driven but not mapped as lanes.
  std::map<std::string, std::vector<std::string>> successors, predecessors;
  for (int a = 0; a < config.arms; ++a) {
    const ArmGeometry& entry = arms[static_cast<size_t>(a)];
    for (ManeuverIntent intent : {ManeuverIntent::kStraight, ManeuverIntent::kLeft, ManeuverIntent::kRight}) {
      const int k = exit_arm_for(config, a, intent);
      if (k < 0) continue;
      const ArmGeometry& exit = arms[static_cast<size_t>(k)];
      auto pts = make_connector(entry.entry_point, entry.entry_heading, exit.exit_point, exit.exit_heading);
      TurnSign sign = TurnSign::kNone;
      if (intent == ManeuverIntent::kLeft) sign = TurnSign::kLeft;
      if (intent == ManeuverIntent::kRight) sign = TurnSign::kRight;
      const std::string id = "conn" + std::to_string(a) + "_" + maneuver_intent_name(intent);
      out.lanes.push_back(finish_lane(id, std::move(pts), true, sign, false));
      const std::string in_id = "arm" + std::to_string(a) + "_in0";
      const std::string out_id = "arm" + std::to_string(k) + "_out0";
      successors[in_id].push_back(id);
      successors[id].push_back(out_id);
      predecessors[id].push_back(in_id);
      predecessors[out_id].push_back(id);
    }
  }
  for (auto& lane : out.lanes) {
    if (auto it = successors.find(lane.lane_id); it != successors.end()) lane.adjacency.successors = it->second;
    if (auto it = predecessors.find(lane.lane_id); it != predecessors.end()) lane.adjacency.predecessors = it->second;
  }
  // Neighbor links between same-direction lanes of one arm (lane j+1 is to
  // the left of lane j).
  for (int a = 0; a < config.arms; ++a)
    for (int j = 0; j + 1 < lanes; ++j)
      for (const char* kind : {"_in", "_out"}) {
        const std::string id_j = "arm" + std::to_string(a) + kind + std::to_string(j);
        const std::string id_j1 = "arm" + std::to_string(a) + kind + std::to_string(j + 1);
        for (auto& lane : out.lanes) {
          if (lane.lane_id == id_j) lane.adjacency.left_neighbor = id_j1;
          if (lane.lane_id == id_j1) lane.adjacency.right_neighbor = id_j;
        }
      }

  // Signal heads, one per arm, mounted curbside at the stop line. The
  // opposing pair (even arms) leads; odd arms run half a cycle later.
  for (int a = 0; a < config.arms; ++a) {
    const Vec2 u = arm_dir(a);
    const Vec2 d_in = u * -1.0;
    SignalSchedule s;
    s.light_id = "light" + std::to_string(a);
    const Vec2 pos = kCenter + u * (radius + 0.5) + right_perp(d_in) * (kLaneWidth * lanes + 1.5);
    s.position = {quantize6(pos.x), quantize6(pos.y)};
    s.control_dir = {quantize6(d_in.x), quantize6(d_in.y)};
    s.phases = config.cycle;
    for (auto& p : s.phases) p.duration = quantize6(p.duration);
    s.cycle_offset = (a % 2 == 0) ? 0.0 : quantize6(s.cycle_length() / 2.0);
    out.lights.push_back(std::move(s));
  }

  // Raster: mark cells whose center lies within the corridor of any
  // centerline segment.
  Vec2 lo{1e18, 1e18}, hi{-1e18, -1e18};
  for (const auto& lane : out.lanes)
    for (const auto& p : lane.centerline) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
  const double margin = 8.0;
  RasterMap raster;
  raster.resolution = kRasterResolution;
  raster.origin = {quantize6(lo.x - margin), quantize6(lo.y - margin)};
  raster.width = static_cast<int>(std::ceil((hi.x - lo.x + 2 * margin) / raster.resolution));
  raster.height = static_cast<int>(std::ceil((hi.y - lo.y + 2 * margin) / raster.resolution));
  raster.drivable.assign((static_cast<size_t>(raster.width) * raster.height + 7) / 8, 0);
  for (const auto& lane : out.lanes) {
    for (size_t i = 1; i < lane.centerline.size(); ++i) {
      const Vec2 a = lane.centerline[i - 1];
      const Vec2 b = lane.centerline[i];
      const double pad = kCorridorHalfWidth + raster.resolution;
      const int x0 = std::max(0, static_cast<int>((std::min(a.x, b.x) - pad - raster.origin.x) / raster.resolution));
      const int x1 = std::min(raster.width - 1,
                              static_cast<int>((std::max(a.x, b.x) + pad - raster.origin.x) / raster.resolution));
      const int y0 = std::max(0, static_cast<int>((std::min(a.y, b.y) - pad - raster.origin.y) / raster.resolution));
      const int y1 = std::min(raster.height - 1,
                              static_cast<int>((std::max(a.y, b.y) + pad - raster.origin.y) / raster.resolution));
      for (int iy = y0; iy <= y1; ++iy)
        for (int ix = x0; ix <= x1; ++ix) {
          const Vec2 cell_center{raster.origin.x + (ix + 0.5) * raster.resolution,
                                 raster.origin.y + (iy + 0.5) * raster.resolution};
          if (point_segment_distance(cell_center, a, b) <= kCorridorHalfWidth) raster.set_cell(ix, iy, true);
        }
    }
  }
  out.raster = std::move(raster);
  return out;
}

// ---------------------------------------------------------------------------
// rollout
// ---------------------------------------------------------------------------

namespace {

struct PathProfile {
  std::vector<Vec2> pts;
  std::vector<double> cum;
  std::vector<double> allowed;  // backward-propagated curvature speed envelope
};

PathProfile build_profile(const std::vector<Vec2>& path, double target_speed, double accel_limit) {
  PathProfile prof;
  prof.pts = path;
  prof.cum = cumulative(path);
  const size_t n = path.size();
  std::vector<double> vlim(n, target_speed);
  for (size_t i = 1; i + 1 < n; ++i) {
    const Vec2 d0 = path[i] - path[i - 1];
    const Vec2 d1 = path[i + 1] - path[i];
    const double dang = std::fabs(wrap_angle(d1.angle() - d0.angle()));
    const double seg = 0.5 * (d0.norm() + d1.norm());
    if (dang > 1e-6) vlim[i] = std::min(vlim[i], std::sqrt(kLateralAccelLimit * seg / dang));
  }
  prof.allowed.assign(n, target_speed);
  prof.allowed[n - 1] = vlim[n - 1];
  for (size_t i = n - 1; i-- > 0;) {
    const double seg = prof.cum[i + 1] - prof.cum[i];
    prof.allowed[i] =
        std::min(vlim[i], std::sqrt(prof.allowed[i + 1] * prof.allowed[i + 1] + 2.0 * accel_limit * seg));
  }
  return prof;
}

double envelope_speed(const PathProfile& prof, double s, double accel_limit) {
  if (s >= prof.cum.back()) return prof.allowed.back();
  const size_t i = static_cast<size_t>(std::upper_bound(prof.cum.begin(), prof.cum.end(), s) - prof.cum.begin());
  const double gap = prof.cum[i] - s;
  return std::sqrt(prof.allowed[i] * prof.allowed[i] + 2.0 * accel_limit * gap);
}

const SignalSchedule* find_light(const std::vector<SignalSchedule>& lights, const std::string& id) {
  for (const auto& l : lights)
    if (l.light_id == id) return &l;
  return nullptr;
}

// Full kinematic rollout, one observation per frame.
std::vector<AgentObservation> rollout_vehicle(const ManeuverPlan& plan,
                                              const std::vector<SignalSchedule>& lights,
                                              const GeneratorConfig& config, int frames) {
  const PathProfile prof = build_profile(plan.path, plan.target_speed, config.accel_limit);
  const SignalSchedule* light = plan.obey_signals ? find_light(lights, plan.governing_light) : nullptr;
  const double dt = kSimSubstep;
  const int substeps = std::max(1, static_cast<int>(std::llround(config.task.frame_period() / dt)));

  double s = plan.start_s;
  double v = plan.start_speed;
  std::vector<AgentObservation> all;
  all.reserve(static_cast<size_t>(frames));
  auto emit = [&](int frame) {
    AgentObservation o;
    o.frame = frame;
    const Vec2 p = point_at(prof.pts, prof.cum, s);
    o.x = p.x;
    o.y = p.y;
    o.heading = wrap_angle(heading_at(prof.pts, prof.cum, s));
    o.speed = v;
    o.vel_dir = 0.0;  // velocity tracks the path tangent
    o.valid = true;
    all.push_back(o);
  };
  emit(0);
  for (int f = 1; f < frames; ++f) {
    for (int sub = 0; sub < substeps; ++sub) {
      const double t_abs = (f - 1) * config.task.frame_period() + (sub + 1) * dt;
      bool must_stop = false;
      if (light != nullptr && s < plan.stop_line_s) {
        const SignalColor color = light->color_at(t_abs);
        if (color == SignalColor::kRed) {
          must_stop = true;
        } else if (color == SignalColor::kYellow) {
          // stop only when braking within accel_limit still fits
          must_stop = v * v / (2.0 * config.accel_limit) <= (plan.stop_line_s - s);
        }
      }
      double v_allowed = std::min(plan.target_speed, envelope_speed(prof, s, config.accel_limit));
      if (must_stop) {
        const double rem = std::max(0.0, plan.stop_line_s - kStopBuffer - s);
        v_allowed = std::min(v_allowed, std::sqrt(2.0 * config.accel_limit * rem));
      }
      const double accel = std::clamp((v_allowed - v) / dt, -config.accel_limit, config.accel_limit);
      v = std::max(0.0, v + accel * dt);
      s += v * dt;
      if (must_stop && s > plan.stop_line_s - kStopBuffer / 2.0) {
        s = plan.stop_line_s - kStopBuffer / 2.0;
        v = 0.0;
      }
    }
    emit(f);
  }
  return all;
}

}  // namespace

AgentTrack simulate_vehicle(const ManeuverPlan& plan, const std::vector<SignalSchedule>& lights,
                            const GeneratorConfig& config) {
  const auto all = rollout_vehicle(plan, lights, config, config.total_frames());
  const int t_c = config.task.obs_horizon_frames;
  AgentTrack track;
  track.history.assign(all.begin(), all.begin() + t_c + 1);
  const int last = std::min<int>(static_cast<int>(all.size()) - 1, t_c + config.task.pred_horizon_frames);
  for (int f = t_c + 1; f <= last; ++f) {
    track.future_gt.push_back({all[static_cast<size_t>(f)].x, all[static_cast<size_t>(f)].y});
    track.future_valid.push_back(1);
  }
  return track;
}

// ---------------------------------------------------------------------------
// episode generation
// ---------------------------------------------------------------------------

namespace {

struct RouteGeometry {
  std::vector<Vec2> path;
  double stop_line_s = 0.0;
};

RouteGeometry build_route(const GeneratedMap& map, const GeneratorConfig& config, int entry_arm,
                          ManeuverIntent intent) {
  const double radius = config.diameter / 2.0;
  const Vec2 u = arm_dir(entry_arm);
  const Vec2 d_in = u * -1.0;
  const Vec2 o_in = right_perp(d_in) * (kLaneWidth * 0.5);
  std::vector<Vec2> path;
  append_line(path, map.center + u * (radius + kApproachLength) + o_in, map.center + u * radius + o_in, 5.0);
  const double stop_line_s = polyline_len(path);

  const ManeuverIntent route = intent == ManeuverIntent::kStop ? ManeuverIntent::kStraight : intent;
  int exit_arm = exit_arm_for(config, entry_arm, route);
  if (exit_arm < 0) {
    for (ManeuverIntent alt : {ManeuverIntent::kRight, ManeuverIntent::kLeft, ManeuverIntent::kUturn}) {
      exit_arm = exit_arm_for(config, entry_arm, alt);
      if (exit_arm >= 0) break;
    }
  }
  const Vec2 uk = arm_dir(exit_arm);
  const Vec2 o_out = right_perp(uk) * (kLaneWidth * 0.5);
  const Vec2 exit_start = map.center + uk * radius + o_out;
  auto conn = make_connector(path.back(), d_in.angle(), exit_start, uk.angle());
  path.insert(path.end(), conn.begin() + 1, conn.end());
  std::vector<Vec2> tail;
  append_line(tail, exit_start, map.center + uk * (radius + kExitTailLength) + o_out, 5.0);
  path.insert(path.end(), tail.begin() + 1, tail.end());
  return {std::move(path), stop_line_s};
}

AgentClass sample_class(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.82) return AgentClass::kCar;
  if (u < 0.92) return AgentClass::kTruck;
  return AgentClass::kBus;
}

}  // namespace

Episode generate_episode(const GeneratorConfig& config, uint64_t episode_seed) {
  config.validate();
  Episode ep;
  ep.config = config;
  ep.map = generate_map(config);
  ep.total_frames = config.total_frames();
  Rng rng(splitmix64(episode_seed));

  // Episode-specific signal timing: one shared phase shift.
  ep.lights = ep.map.lights;
  const double phase_shift = quantize6(rng.uniform(0.0, config.cycle_length()));
  for (auto& l : ep.lights) l.cycle_offset = quantize6(l.cycle_offset + phase_shift);

  const double period = config.task.frame_period();
  const double t_c_time = config.task.obs_horizon_frames * period;
  const double window_time = (config.task.pred_horizon_frames + 1) * period;
  const double cycle = config.cycle_length();
  const double visible_time = kApproachLength / config.speed_min + window_time;
  const double mean_agents = config.spawn_rate * config.arms * visible_time / cycle;
  const int n_vehicles = std::clamp(1 + rng.poisson(mean_agents), 1, 8);

  std::map<int, std::vector<double>> used_s;  // occupied spawn slots per arm
  auto slot_free = [](const std::vector<double>& used, double s) {
    for (double u : used)
      if (std::fabs(u - s) < 9.0) return false;
    return true;
  };

  for (int vi = 0; vi < n_vehicles; ++vi) {
    const double im = rng.uniform();
    ManeuverIntent intent = ManeuverIntent::kStraight;
    if (im < 0.18)
      intent = ManeuverIntent::kStop;
    else if (im < 0.52)
      intent = ManeuverIntent::kStraight;
    else if (im < 0.70)
      intent = ManeuverIntent::kLeft;
    else if (im < 0.90)
      intent = ManeuverIntent::kRight;
    else
      intent = ManeuverIntent::kUturn;

    const double target_speed = rng.uniform(config.speed_min, config.speed_max);

    // Arms where the intent is feasible under this episode's signal timing.
    std::vector<int> arms_ok;
    auto stoppable = [&](int a) {
      const SignalSchedule& sig = ep.lights[static_cast<size_t>(a)];
      return sig.color_at(t_c_time) == SignalColor::kRed &&
             sig.remaining_time(t_c_time, SignalColor::kRed) >= window_time + 0.5;
    };
    for (int a = 0; a < config.arms; ++a) {
      if (intent == ManeuverIntent::kStop) {
        if (stoppable(a)) arms_ok.push_back(a);
        continue;
      }
      if (intent != ManeuverIntent::kUturn && exit_arm_for(config, a, intent) < 0) continue;
      const SignalSchedule& sig = ep.lights[static_cast<size_t>(a)];
      if (sig.color_at(t_c_time) == SignalColor::kGreen &&
          sig.remaining_time(t_c_time, SignalColor::kGreen) >= 1.2)
        arms_ok.push_back(a);
    }
    if (arms_ok.empty()) {
      intent = ManeuverIntent::kStop;
      for (int a = 0; a < config.arms; ++a)
        if (stoppable(a)) arms_ok.push_back(a);
    }
    if (arms_ok.empty()) continue;  // degenerate timing (all-yellow instant)
    const int arm = arms_ok[static_cast<size_t>(rng.uniform_int(static_cast<int>(arms_ok.size())))];
    const SignalSchedule& sig = ep.lights[static_cast<size_t>(arm)];

    RouteGeometry route = build_route(ep.map, config, arm, intent);
    ManeuverPlan plan;
    plan.intent = intent;
    plan.entry_arm = arm;
    plan.target_arm =
        exit_arm_for(config, arm, intent == ManeuverIntent::kStop ? ManeuverIntent::kStraight : intent);
    if (plan.target_arm < 0) plan.target_arm = arm;
    plan.path = std::move(route.path);
    plan.stop_line_s = route.stop_line_s;
    plan.governing_light = "light" + std::to_string(arm);
    plan.target_speed = target_speed;

    if (intent == ManeuverIntent::kStop) {
      if (rng.bernoulli(0.5)) {
        // parked at the line or queued behind an earlier stopper
        double s0 = plan.stop_line_s - kStopBuffer / 2.0;
        while (!slot_free(used_s[arm], s0)) s0 -= 9.0;
        if (s0 < 2.0) continue;
        plan.start_s = s0;
        plan.start_speed = 0.0;
        // queued vehicles hold at their slot, not the distant real line
        plan.stop_line_s = s0 + kStopBuffer / 2.0;
      } else {
        // final braking: low speed on the braking envelope toward the line
        const double v0 = rng.uniform(1.4, 2.6);
        double s0 = plan.stop_line_s - kStopBuffer - v0 * v0 / (2.0 * config.accel_limit) - rng.uniform(0.0, 0.3);
        if (!slot_free(used_s[arm], s0)) continue;
        plan.start_s = s0;
        plan.start_speed = v0;
      }
    } else {
      // moving crosser: at t_c it sits d0 short of the stop line
      double d0 = intent == ManeuverIntent::kStraight ? rng.uniform(-4.0, 14.0) : rng.uniform(1.0, 14.0);
      const double v_eff = intent == ManeuverIntent::kStraight ? target_speed : std::max(3.0, 0.4 * target_speed);
      const double green_rem = sig.remaining_time(t_c_time, SignalColor::kGreen);
      d0 = std::min(d0, std::max(-4.0, (green_rem - 0.9) * v_eff));
      double s0 = plan.stop_line_s - d0 - target_speed * t_c_time;
      while (!slot_free(used_s[arm], s0)) s0 -= 10.0;
      if (s0 < 1.0) continue;
      plan.start_s = s0;
      plan.start_speed = target_speed;
    }
    used_s[arm].push_back(plan.start_s);

    Episode::Vehicle veh;
    veh.plan = plan;
    veh.frames = rollout_vehicle(plan, ep.lights, config, ep.total_frames);
    // agent identity and observation noise
    Rng noise(mix_seed(episode_seed, 1000003ULL * static_cast<uint64_t>(vi) + 17ULL));
    const AgentClass cls = sample_class(noise);
    double len = 4.5, wid = 1.8;
    if (cls == AgentClass::kCar) {
      len = noise.uniform(4.2, 5.2);
      wid = noise.uniform(1.7, 2.0);
    } else if (cls == AgentClass::kTruck) {
      len = noise.uniform(6.5, 9.0);
      wid = noise.uniform(2.2, 2.5);
    } else {
      len = noise.uniform(10.0, 12.0);
      wid = noise.uniform(2.4, 2.6);
    }
    for (auto& o : veh.frames) {
      o.length = len;
      o.width = wid;
      o.agent_class = cls;
    }
    veh.valid.assign(veh.frames.size(), 1);
    ep.vehicles.push_back(std::move(veh));
  }
  return ep;
}

Scene Episode::window(int t_c) const {
  if (t_c < first_window() || t_c > last_window())
    throw ValidationError("episode window " + std::to_string(t_c) + " outside [" +
                          std::to_string(first_window()) + "," + std::to_string(last_window()) + "]");
  Scene scene;
  scene.config = config.task;
  scene.map = map.lanes;
  scene.raster = map.raster;
  scene.lights = lights;
  scene.center = map.center;
  scene.diameter = map.diameter;
  scene.current_frame = t_c;
  const int t_h = config.task.obs_horizon_frames;
  const int t_f = config.task.pred_horizon_frames;
  for (size_t vi = 0; vi < vehicles.size(); ++vi) {
    const auto& veh = vehicles[vi];
    if (!veh.valid[static_cast<size_t>(t_c)]) continue;
    AgentTrack track;
    track.agent_id = "veh_" + std::to_string(vi);
    for (int f = t_c - t_h; f <= t_c; ++f) {
      if (f < 0 || !veh.valid[static_cast<size_t>(f)]) {
        AgentObservation gap;
        gap.frame = f;
        gap.valid = false;
        gap.length = 0.0;  // zeroed state for padded frames
        gap.width = 0.0;
        track.history.push_back(gap);
      } else {
        // observed (noisy) history; deterministic per (vehicle, frame)
        AgentObservation o = veh.frames[static_cast<size_t>(f)];
        Rng n(mix_seed(mix_seed(config.seed, 77ULL + vi), static_cast<uint64_t>(f)));
        o.x += n.normal(0.0, 0.03);
        o.y += n.normal(0.0, 0.03);
        o.heading = wrap_angle(o.heading + n.normal(0.0, 0.01));
        o.speed = std::max(0.0, o.speed + n.normal(0.0, 0.05));
        o.vel_dir = wrap_angle(o.vel_dir + n.normal(0.0, 0.01));
        track.history.push_back(o);
      }
    }
    for (int f = t_c + 1; f <= t_c + t_f; ++f) {
      const auto& o = veh.frames[static_cast<size_t>(f)];
      track.future_gt.push_back({o.x, o.y});
      track.future_valid.push_back(veh.valid[static_cast<size_t>(f)]);
    }
    scene.tracks.push_back(std::move(track));
  }
  return scene;
}

// ---------------------------------------------------------------------------
// dataset emission
// ---------------------------------------------------------------------------

std::string DatasetManifest::to_json_text() const {
  nlohmann::json j;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json je;
    je["path"] = e.path;
    je["sha256"] = e.sha256;
    je["n_agents"] = e.n_agents;
    j["entries"].push_back(je);
  }
  nlohmann::json hist;
  for (int i = 0; i < 5; ++i) hist[maneuver_intent_name(static_cast<ManeuverIntent>(i))] = intent_counts[static_cast<size_t>(i)];
  j["label_histogram"] = hist;
  return j.dump(2) + "\n";
}

DatasetManifest generate_dataset(const GeneratorConfig& config, int n_scenes, const std::string& out_dir) {
  config.validate();
  if (n_scenes < 0) throw ValidationError("generate_dataset: n_scenes must be >= 0");
  std::filesystem::create_directories(out_dir);
  DatasetManifest manifest;
  for (int i = 0; i < n_scenes; ++i) {
    GeneratorConfig scene_cfg = config;
    scene_cfg.seed = mix_seed(config.seed, static_cast<uint64_t>(i));
    Episode ep = generate_episode(scene_cfg, scene_cfg.seed);
    const Scene scene = ep.window(ep.first_window());
    char name[64];
    std::snprintf(name, sizeof(name), "scene_%05d.json", i);
    const std::string text = scene_to_json_text(scene);
    const std::string path = out_dir + "/" + name;
    write_file_atomic(path, text);
    DatasetManifest::Entry entry;
    entry.path = name;
    entry.sha256 = sha256_hex(text);
    entry.n_agents = scene.num_agents();
    manifest.entries.push_back(entry);
    for (size_t vi = 0; vi < ep.vehicles.size(); ++vi) {
      if (!ep.vehicles[vi].valid[static_cast<size_t>(scene.current_frame)]) continue;
      manifest.intent_counts[static_cast<size_t>(ep.vehicles[vi].plan.intent)] += 1;
    }
  }
  write_file_atomic(out_dir + "/manifest.json", manifest.to_json_text());
  return manifest;
}

DatasetManifest load_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": bad manifest: " + e.what());
  }
  DatasetManifest m;
  for (const auto& je : j["entries"]) {
    DatasetManifest::Entry e;
    e.path = je["path"].get<std::string>();
    e.sha256 = je["sha256"].get<std::string>();
    e.n_agents = je["n_agents"].get<int>();
    m.entries.push_back(e);
  }
  if (j.contains("label_histogram"))
    for (int i = 0; i < 5; ++i) {
      const char* name = maneuver_intent_name(static_cast<ManeuverIntent>(i));
      if (j["label_histogram"].contains(name)) m.intent_counts[static_cast<size_t>(i)] = j["label_histogram"][name].get<int64_t>();
    }
  return m;
}

std::vector<std::string> manifest_scene_paths(const std::string& manifest_path) {
  const DatasetManifest m = load_manifest(manifest_path);
  std::filesystem::path dir = std::filesystem::path(manifest_path).parent_path();
  std::vector<std::string> out;
  out.reserve(m.entries.size());
  for (const auto& e : m.entries) out.push_back((dir / e.path).string());
  return out;
}

}  // namespace sigtraj
