#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "sigtraj/scene.hpp"
#include "sigtraj/scene_io.hpp"
#include "sigtraj/synthgen.hpp"
#include "testutil.hpp"

using namespace sigtraj;

namespace {

std::string temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "sigtraj_scene_tests";
  std::filesystem::create_directories(dir);
  return dir.string();
}

// Smallest schema-valid scene: one agent, one lane, one light.
Scene minimal_scene() {
  Scene s;
  s.config.obs_horizon_frames = 2;
  s.config.pred_horizon_frames = 3;
  s.center = {0.0, 0.0};
  s.diameter = 20.0;
  s.current_frame = 2;

  LaneSegment lane;
  lane.lane_id = "lane0";
  lane.centerline = {{quantize6(-10.0), 0.0}, {quantize6(10.0), 0.0}};
  lane.length = quantize6(lane.polyline_length());
  lane.attrs.center = {0.0, 0.0};
  s.map.push_back(lane);

  s.raster.origin = {-16.0, -16.0};
  s.raster.resolution = 0.5;
  s.raster.width = 64;
  s.raster.height = 64;
  s.raster.drivable.assign(64 * 64 / 8, 0xff);

  SignalSchedule light;
  light.light_id = "light0";
  light.position = {10.0, 3.0};
  light.control_dir = {-1.0, 0.0};
  light.phases = {{SignalColor::kRed, 30.0}, {SignalColor::kGreen, 30.0}, {SignalColor::kYellow, 5.0}};
  s.lights.push_back(light);

  AgentTrack t;
  t.agent_id = "veh_0";
  for (int f = 0; f <= 2; ++f) {
    AgentObservation o;
    o.frame = f;
    o.x = quantize6(-5.0 + f);
    o.speed = 10.0;
    t.history.push_back(o);
  }
  for (int f = 0; f < 3; ++f) {
    t.future_gt.push_back({quantize6(-2.0 + f), 0.0});
    t.future_valid.push_back(1);
  }
  s.tracks.push_back(t);
  return s;
}

GeneratorConfig small_config(uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.task.obs_horizon_frames = 6;
  cfg.task.pred_horizon_frames = 18;
  return cfg;
}

}  // namespace

TEST_CASE("minimal scene loads with one agent") {
  const std::string path = temp_dir() + "/minimal.json";
  save_scene(minimal_scene(), path);
  const Scene s = load_scene(path);
  CHECK(s.num_agents() == 1);
  CHECK(s.tracks[0].agent_id == "veh_0");
  CHECK(s.map.size() == 1);
  CHECK(s.lights.size() == 1);
}

TEST_CASE("generated scenes round-trip bit-identically") {
  const std::string dir = temp_dir() + "/roundtrip";
  generate_dataset(small_config(7), 3, dir);
  for (const auto& path : manifest_scene_paths(dir + "/manifest.json")) {
    const std::string original = read_file(path);
    const Scene s = load_scene(path);
    const std::string again = scene_to_json_text(s);
    CHECK(again == original);
  }
}

TEST_CASE("duplicate agent ids are rejected by name") {
  Scene s = minimal_scene();
  AgentTrack copy = s.tracks[0];
  s.tracks.push_back(copy);
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("veh_0"), ValidationError);
}

TEST_CASE("schema violations name the offending field path") {
  CHECK_THROWS_WITH_AS(scene_from_json_text("{}", "f"), doctest::Contains("config"), ParseError);
  const std::string missing_diameter =
      R"({"config":{"obs_horizon_frames":2,"pred_horizon_frames":3,"frame_rate":10.0,"num_modes":6,)"
      R"("local_radius":30.0,"max_cycle_time":120.0,"hidden_dim":64,"num_heads":4,"num_attn_layers":2},)"
      R"("map":[],"raster":{"origin":[0,0],"resolution":0.5,"width":0,"height":0,"drivable":""},)"
      R"("lights":[],"tracks":[],"center":[0,0],"current_frame":2})";
  CHECK_THROWS_WITH_AS(scene_from_json_text(missing_diameter, "f"), doctest::Contains("diameter"), ParseError);
}

TEST_CASE("empty-agents scene round-trips with N=0") {
  Scene s = minimal_scene();
  s.tracks.clear();
  const std::string path = temp_dir() + "/empty.json";
  save_scene(s, path);
  CHECK(load_scene(path).num_agents() == 0);
}

TEST_CASE("a 100-agent scene survives the round trip") {
  Scene s = minimal_scene();
  const AgentTrack proto = s.tracks[0];
  s.tracks.clear();
  for (int i = 0; i < 100; ++i) {
    AgentTrack t = proto;
    t.agent_id = "veh_" + std::to_string(i);
    for (auto& o : t.history) o.y = quantize6(0.05 * i);
    s.tracks.push_back(t);
  }
  const std::string path = temp_dir() + "/many.json";
  save_scene(s, path);
  const Scene r = load_scene(path);
  REQUIRE(r.num_agents() == 100);
  for (int i = 0; i < 100; ++i) {
    CHECK(r.tracks[i].agent_id == s.tracks[i].agent_id);
    CHECK(r.tracks[i].history[0].y == s.tracks[i].history[0].y);
  }
  // second save is byte-identical
  const std::string path2 = temp_dir() + "/many2.json";
  save_scene(r, path2);
  CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("drivable queries: corridor, out-of-bounds, boundary rule") {
  GeneratorConfig cfg = small_config(3);
  const GeneratedMap m = generate_map(cfg);
  // every lane centerline point is drivable
  for (const auto& lane : m.lanes)
    for (const auto& p : lane.centerline) CHECK(query_drivable(m.raster, p.x, p.y));
  // far outside the map bounds
  CHECK_FALSE(query_drivable(m.raster, m.center.x + 10 * cfg.task.local_radius, m.center.y));

  RasterMap r;
  r.origin = {0.0, 0.0};
  r.resolution = 0.5;
  r.width = 4;
  r.height = 4;
  r.drivable.assign(2, 0);
  r.set_cell(1, 0, true);
  // x=0.5 sits exactly on the boundary between cells 0 and 1: floor rule
  // assigns it to cell 1.
  CHECK(query_drivable(r, 0.5, 0.1));
  CHECK_FALSE(query_drivable(r, 0.4999, 0.1));
  // identical queries are deterministic
  for (int i = 0; i < 10; ++i) CHECK(query_drivable(r, 0.5, 0.1));
}

TEST_CASE("signal schedules are periodic and follow the half-open rule") {
  SignalSchedule s;
  s.phases = {{SignalColor::kRed, 30.0}, {SignalColor::kGreen, 30.0}, {SignalColor::kYellow, 5.0}};
  s.cycle_offset = 0.0;
  CHECK(s.cycle_length() == 65.0);
  CHECK(s.color_at(10.0) == SignalColor::kRed);
  CHECK(s.color_at(30.0) == SignalColor::kGreen);  // boundary: new color active
  CHECK(s.color_at(59.9999) == SignalColor::kGreen);
  CHECK(s.color_at(60.0) == SignalColor::kYellow);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.uniform(-100.0, 300.0);
    CHECK(s.color_at(t) == s.color_at(t + s.cycle_length()));
  }
}

TEST_CASE("scene validation flags bad lane lengths") {
  Scene s = minimal_scene();
  s.map[0].length += 1e-3;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("arc length"), ValidationError);
}

TEST_CASE("prediction invariants: score order and sum") {
  ScenePrediction p;
  p.agent_ids = {"a"};
  p.modes.resize(2);
  p.modes[0].trajectories = {{{0, 0}}};
  p.modes[1].trajectories = {{{0, 0}}};
  p.modes[0].score = 0.7;
  p.modes[1].score = 0.3;
  CHECK_NOTHROW(p.validate());
  p.modes[1].score = 0.4;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}
