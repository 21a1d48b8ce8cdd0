#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <set>

#include "sigtraj/scene_io.hpp"
#include "sigtraj/strategy.hpp"
#include "sigtraj/synthgen.hpp"

using namespace sigtraj;

namespace {

std::string temp_dir(const std::string& leaf) {
  auto dir = std::filesystem::temp_directory_path() / "sigtraj_synthgen_tests" / leaf;
  std::filesystem::create_directories(dir);
  return dir.string();
}

GeneratorConfig fast_config(uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.task.obs_horizon_frames = 6;
  cfg.task.pred_horizon_frames = 18;
  return cfg;
}

}  // namespace

TEST_CASE("orthogonal map lane counts: 4 approach, 4 exit, 12 connectors") {
  GeneratorConfig cfg = fast_config(1);
  cfg.diameter = 40.0;
  const GeneratedMap m = generate_map(cfg);
  int approach = 0, exit_lanes = 0, connectors = 0;
  for (const auto& lane : m.lanes) {
    if (lane.attrs.is_intersection)
      ++connectors;
    else if (lane.attrs.signal_controlled)
      ++approach;
    else
      ++exit_lanes;
  }
  CHECK(approach == 4);
  CHECK(exit_lanes == 4);
  CHECK(connectors == 12);
  CHECK(m.lights.size() == 4);
}

TEST_CASE("T-intersection drops the missing arm's connectors") {
  GeneratorConfig cfg = fast_config(1);
  cfg.arms = 3;
  const GeneratedMap m = generate_map(cfg);
  int approach = 0, exit_lanes = 0, connectors = 0;
  for (const auto& lane : m.lanes) {
    if (lane.attrs.is_intersection)
      ++connectors;
    else if (lane.attrs.signal_controlled)
      ++approach;
    else
      ++exit_lanes;
  }
  CHECK(approach == 3);
  CHECK(exit_lanes == 3);
  // ordered (entry, exit) pairs among 3 arms = 6
  CHECK(connectors == 6);
}

TEST_CASE("lane adjacency references resolve") {
  const GeneratedMap m = generate_map(fast_config(2));
  std::set<std::string> ids;
  for (const auto& lane : m.lanes) ids.insert(lane.lane_id);
  for (const auto& lane : m.lanes) {
    for (const auto& id : lane.adjacency.successors) CHECK(ids.count(id) == 1);
    for (const auto& id : lane.adjacency.predecessors) CHECK(ids.count(id) == 1);
  }
}

TEST_CASE("red at the line keeps the vehicle parked") {
  GeneratorConfig cfg = fast_config(3);
  cfg.task.pred_horizon_frames = 40;
  const GeneratedMap m = generate_map(cfg);
  std::vector<SignalSchedule> lights = m.lights;
  // make arm 0 red over the whole horizon
  lights[0].phases = {{SignalColor::kRed, 100.0}, {SignalColor::kGreen, 20.0}};
  ManeuverPlan plan;
  plan.intent = ManeuverIntent::kStop;
  plan.entry_arm = 0;
  plan.governing_light = "light0";
  plan.target_speed = 12.0;
  auto route_scene = generate_map(cfg);
  // straight route on arm 0
  plan.path = {};
  {
    // reuse the generator's own route by simulating a full episode is
    // overkill; build the approach straight line manually
    const Vec2 u{1.0, 0.0};
    const Vec2 off{0.0, 1.75};
    for (int i = 0; i <= 20; ++i) {
      const double t = i / 20.0;
      plan.path.push_back(m.center + u * (13.0 + 60.0 * (1.0 - t)) + off);
    }
    for (int i = 1; i <= 30; ++i) plan.path.push_back(m.center + u * (13.0 - 2.0 * i) + off);
  }
  plan.stop_line_s = 60.0;
  plan.start_s = 60.0 - 0.15;
  plan.start_speed = 0.0;
  const AgentTrack track = simulate_vehicle(plan, lights, cfg);
  const Vec2 start{track.history.front().x, track.history.front().y};
  const Vec2 end{track.future_gt.back().x, track.future_gt.back().y};
  CHECK(dist(start, end) < 1.0);
}

TEST_CASE("green straight at 10 m/s covers 50 m in 5 s") {
  GeneratorConfig cfg = fast_config(4);
  cfg.task.obs_horizon_frames = 1;
  cfg.task.pred_horizon_frames = 50;  // 5 s at 10 Hz
  ManeuverPlan plan;
  plan.intent = ManeuverIntent::kStraight;
  plan.obey_signals = false;  // green throughout
  plan.target_speed = 10.0;
  plan.start_speed = 10.0;
  plan.start_s = 0.0;
  plan.stop_line_s = 1e9;
  for (int i = 0; i <= 100; ++i) plan.path.push_back({2.0 * i, 0.0});
  const AgentTrack track = simulate_vehicle(plan, {}, cfg);
  const double traveled = track.future_gt.back().x - track.history[1].x;
  CHECK(traveled == doctest::Approx(50.0).epsilon(0.002));
}

TEST_CASE("green-to-red transition stops the vehicle at the line") {
  GeneratorConfig cfg = fast_config(5);
  cfg.task.obs_horizon_frames = 1;
  cfg.task.pred_horizon_frames = 90;
  ManeuverPlan plan;
  plan.intent = ManeuverIntent::kStraight;
  plan.target_speed = 12.0;
  plan.start_speed = 12.0;
  plan.start_s = 0.0;
  plan.stop_line_s = 70.0;
  plan.governing_light = "L";
  for (int i = 0; i <= 100; ++i) plan.path.push_back({2.0 * i, 0.0});
  SignalSchedule light;
  light.light_id = "L";
  light.control_dir = {-1.0, 0.0};
  // green for 2 s, yellow 3 s, then red: the vehicle is ~46 m out at the
  // yellow and must stop
  light.phases = {{SignalColor::kGreen, 2.0}, {SignalColor::kYellow, 3.0}, {SignalColor::kRed, 120.0}};
  const AgentTrack track = simulate_vehicle(plan, {light}, cfg);
  double max_x = 0.0, final_speed = 0.0;
  for (const auto& p : track.future_gt) max_x = std::max(max_x, p.x);
  final_speed = dist(track.future_gt[track.future_gt.size() - 1], track.future_gt[track.future_gt.size() - 2]) * 10.0;
  CHECK(max_x < 70.0);     // never crosses the line on red
  CHECK(final_speed <= 0.01);  // at rest at the end
}

TEST_CASE("dataset generation: empty manifest for zero scenes") {
  const std::string dir = temp_dir("empty");
  const DatasetManifest m = generate_dataset(fast_config(6), 0, dir);
  CHECK(m.entries.empty());
  CHECK(load_manifest(dir + "/manifest.json").entries.empty());
}

TEST_CASE("seed 7 generates identical manifests twice") {
  const std::string dir1 = temp_dir("det1");
  const std::string dir2 = temp_dir("det2");
  generate_dataset(fast_config(7), 6, dir1);
  generate_dataset(fast_config(7), 6, dir2);
  CHECK(read_file(dir1 + "/manifest.json") == read_file(dir2 + "/manifest.json"));
  // and the scene bytes themselves
  CHECK(read_file(dir1 + "/scene_00003.json") == read_file(dir2 + "/scene_00003.json"));
}

TEST_CASE("different seeds give different traffic") {
  const std::string dir1 = temp_dir("seedA");
  const std::string dir2 = temp_dir("seedB");
  generate_dataset(fast_config(7), 1, dir1);
  generate_dataset(fast_config(8), 1, dir2);
  CHECK(read_file(dir1 + "/scene_00000.json") != read_file(dir2 + "/scene_00000.json"));
}

TEST_CASE("every intent appears with reasonable frequency") {
  const std::string dir = temp_dir("mix");
  const DatasetManifest m = generate_dataset(fast_config(11), 150, dir);
  int64_t total = 0;
  for (int64_t c : m.intent_counts) total += c;
  REQUIRE(total > 0);
  for (size_t i = 0; i < m.intent_counts.size(); ++i) {
    CAPTURE(maneuver_intent_name(static_cast<ManeuverIntent>(i)));
    CHECK(m.intent_counts[i] >= total / 20);  // >= 5%
  }
}

TEST_CASE("generated vehicles never cross the stop line on red") {
  GeneratorConfig cfg = fast_config(13);
  for (uint64_t ep_seed = 0; ep_seed < 30; ++ep_seed) {
    const Episode ep = generate_episode(cfg, mix_seed(cfg.seed, ep_seed));
    for (const auto& veh : ep.vehicles) {
      const auto* light = [&]() -> const SignalSchedule* {
        for (const auto& l : ep.lights)
          if (l.light_id == veh.plan.governing_light) return &l;
        return nullptr;
      }();
      REQUIRE(light != nullptr);
      // find the crossing frame, if any
      for (size_t f = 1; f < veh.frames.size(); ++f) {
        const Vec2 p{veh.frames[f].x, veh.frames[f].y};
        const Vec2 prev{veh.frames[f - 1].x, veh.frames[f - 1].y};
        // distance from intersection center along the entry arm axis
        // crossing = moving inside the stop-line radius on the entry arm
        const double r_now = dist(p, ep.map.center);
        const double r_prev = dist(prev, ep.map.center);
        if (r_prev > cfg.diameter / 2.0 + 0.05 && r_now <= cfg.diameter / 2.0 + 0.05) {
          const double t = f * cfg.task.frame_period();
          CHECK(light->color_at(t) != SignalColor::kRed);
          break;
        }
      }
    }
  }
}

TEST_CASE("stop and straight intents match their maneuver intervals") {
  GeneratorConfig cfg;  // default horizons: the invariant is stated for them
  cfg.seed = 17;
  const ManeuverIntervals intervals = maneuver_intervals(cfg.diameter, cfg.task.num_modes);
  int checked = 0, consistent = 0;
  for (uint64_t ep_seed = 0; ep_seed < 120; ++ep_seed) {
    const Episode ep = generate_episode(cfg, mix_seed(cfg.seed, ep_seed));
    const Scene scene = ep.window(ep.first_window());
    size_t track_idx = 0;
    for (size_t vi = 0; vi < ep.vehicles.size(); ++vi) {
      if (!ep.vehicles[vi].valid[static_cast<size_t>(scene.current_frame)]) continue;
      const auto& track = scene.tracks[track_idx++];
      const ManeuverIntent intent = ep.vehicles[vi].plan.intent;
      if (intent != ManeuverIntent::kStop && intent != ManeuverIntent::kStraight) continue;
      const int label = classify_gt_strategy(track, intervals);
      ++checked;
      if (intent == ManeuverIntent::kStop && label == 0) ++consistent;
      if (intent == ManeuverIntent::kStraight && label == cfg.task.num_modes - 1) ++consistent;
    }
  }
  REQUIRE(checked > 100);
  CHECK(static_cast<double>(consistent) >= 0.99 * checked);
}
