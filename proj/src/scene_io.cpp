#include "sigtraj/scene_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sigtraj {

using nlohmann::json;

double quantize6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return std::strtod(buf, nullptr);
}

std::string format6(double v) {
  if (!std::isfinite(v)) throw ValidationError("cannot serialize non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  if (std::strcmp(buf, "-0.000000") == 0) return "0.000000";
  return buf;
}

// ---------------------------------------------------------------------------
// base64
// ---------------------------------------------------------------------------

namespace {
const char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back(kB64[v & 63]);
  }
  if (i + 1 == bytes.size()) {
    const uint32_t v = bytes[i] << 16;
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(kB64[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
  int8_t rev[256];
  std::memset(rev, -1, sizeof(rev));
  for (int i = 0; i < 64; ++i) rev[static_cast<uint8_t>(kB64[i])] = static_cast<int8_t>(i);
  std::vector<uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int8_t v = rev[static_cast<uint8_t>(c)];
    if (v < 0) throw ParseError("invalid base64 character");
    acc = (acc << 6) | static_cast<uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<uint8_t>((acc >> bits) & 0xff));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SHA-256 (self-contained; used only for manifests)
// ---------------------------------------------------------------------------

namespace {

struct Sha256 {
  uint32_t h[8] = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                   0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
  uint8_t block[64];
  uint64_t total = 0;
  size_t fill = 0;

  static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

  void process(const uint8_t* p) {
    static const uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
        0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
        0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
        0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
        0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (static_cast<uint32_t>(p[4 * i]) << 24) | (p[4 * i + 1] << 16) | (p[4 * i + 2] << 8) | p[4 * i + 3];
    for (int i = 16; i < 64; ++i) {
      const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      const uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const uint32_t ch = (e & f) ^ (~e & g);
      const uint32_t t1 = hh + s1 + ch + k[i] + w[i];
      const uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const uint32_t t2 = s0 + maj;
      hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d; h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const uint8_t* data, size_t len) {
    total += len;
    while (len > 0) {
      const size_t take = std::min(len, sizeof(block) - fill);
      std::memcpy(block + fill, data, take);
      fill += take;
      data += take;
      len -= take;
      if (fill == sizeof(block)) {
        process(block);
        fill = 0;
      }
    }
  }

  std::string finish() {
    const uint64_t bits = total * 8;
    const uint8_t one = 0x80;
    update(&one, 1);
    const uint8_t zero = 0;
    while (fill != 56) update(&zero, 1);
    uint8_t len_be[8];
    for (int i = 0; i < 8; ++i) len_be[i] = static_cast<uint8_t>((bits >> (56 - 8 * i)) & 0xff);
    update(len_be, 8);
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (uint32_t v : h)
      for (int i = 3; i >= 0; --i) {
        const uint8_t byte = static_cast<uint8_t>((v >> (8 * i)) & 0xff);
        out.push_back(hex[byte >> 4]);
        out.push_back(hex[byte & 15]);
      }
    return out;
  }
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 s;
  s.update(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size());
  return s.finish();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file '" + tmp + "'");
    out << contents;
    if (!out) throw ValidationError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ValidationError("cannot rename '" + tmp + "' to '" + path + "'");
}

// ---------------------------------------------------------------------------
// canonical writer
// ---------------------------------------------------------------------------

namespace {

class JsonWriter {
 public:
  explicit JsonWriter(std::string& out) : out_(out) {}

  void raw(const std::string& s) { out_ += s; }
  void num(double v) { out_ += format6(v); }
  void integer(int64_t v) { out_ += std::to_string(v); }
  void boolean(bool v) { out_ += v ? "true" : "false"; }
  void str(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }
  void point(const Vec2& p) {
    out_ += '[';
    num(p.x);
    out_ += ',';
    num(p.y);
    out_ += ']';
  }
  void key(const std::string& k, bool first = false) {
    if (!first) out_ += ',';
    str(k);
    out_ += ':';
  }

 private:
  std::string& out_;
};

void write_track(JsonWriter& w, const AgentTrack& t) {
  w.raw("{");
  w.key("agent_id", true);
  w.str(t.agent_id);
  w.key("history");
  w.raw("[");
  for (size_t i = 0; i < t.history.size(); ++i) {
    const auto& o = t.history[i];
    if (i) w.raw(",");
    w.raw("{");
    w.key("frame", true);
    w.integer(o.frame);
    w.key("x");
    w.num(o.x);
    w.key("y");
    w.num(o.y);
    w.key("heading");
    w.num(o.heading);
    w.key("speed");
    w.num(o.speed);
    w.key("vel_dir");
    w.num(o.vel_dir);
    w.key("length");
    w.num(o.length);
    w.key("width");
    w.num(o.width);
    w.key("agent_class");
    w.str(agent_class_name(o.agent_class));
    w.key("valid");
    w.boolean(o.valid);
    w.raw("}");
  }
  w.raw("]");
  w.key("future");
  w.raw("[");
  for (size_t i = 0; i < t.future_gt.size(); ++i) {
    if (i) w.raw(",");
    w.point(t.future_gt[i]);
  }
  w.raw("]");
  w.key("future_valid");
  w.raw("[");
  for (size_t i = 0; i < t.future_valid.size(); ++i) {
    if (i) w.raw(",");
    w.boolean(t.future_valid[i] != 0);
  }
  w.raw("]}");
}

void write_lane(JsonWriter& w, const LaneSegment& l) {
  w.raw("{");
  w.key("lane_id", true);
  w.str(l.lane_id);
  w.key("centerline");
  w.raw("[");
  for (size_t i = 0; i < l.centerline.size(); ++i) {
    if (i) w.raw(",");
    w.point(l.centerline[i]);
  }
  w.raw("]");
  w.key("length");
  w.num(l.length);
  w.key("attrs");
  w.raw("{");
  w.key("center", true);
  w.point(l.attrs.center);
  w.key("heading");
  w.num(l.attrs.heading);
  w.key("is_intersection");
  w.boolean(l.attrs.is_intersection);
  w.key("turn_sign");
  w.str(turn_sign_name(l.attrs.turn_sign));
  w.key("signal_controlled");
  w.boolean(l.attrs.signal_controlled);
  w.raw("}");
  w.key("adjacency");
  w.raw("{");
  w.key("predecessors", true);
  w.raw("[");
  for (size_t i = 0; i < l.adjacency.predecessors.size(); ++i) {
    if (i) w.raw(",");
    w.str(l.adjacency.predecessors[i]);
  }
  w.raw("]");
  w.key("successors");
  w.raw("[");
  for (size_t i = 0; i < l.adjacency.successors.size(); ++i) {
    if (i) w.raw(",");
    w.str(l.adjacency.successors[i]);
  }
  w.raw("]");
  w.key("left_neighbor");
  if (l.adjacency.left_neighbor.empty())
    w.raw("null");
  else
    w.str(l.adjacency.left_neighbor);
  w.key("right_neighbor");
  if (l.adjacency.right_neighbor.empty())
    w.raw("null");
  else
    w.str(l.adjacency.right_neighbor);
  w.raw("}}");
}

void write_light(JsonWriter& w, const SignalSchedule& s) {
  w.raw("{");
  w.key("light_id", true);
  w.str(s.light_id);
  w.key("position");
  w.point(s.position);
  w.key("control_dir");
  w.point(s.control_dir);
  w.key("phases");
  w.raw("[");
  for (size_t i = 0; i < s.phases.size(); ++i) {
    if (i) w.raw(",");
    w.raw("[");
    w.str(signal_color_name(s.phases[i].color));
    w.raw(",");
    w.num(s.phases[i].duration);
    w.raw("]");
  }
  w.raw("]");
  w.key("cycle_offset");
  w.num(s.cycle_offset);
  w.raw("}");
}

}  // namespace

std::string scene_to_json_text(const Scene& scene) {
  scene.validate();
  std::string out;
  out.reserve(1 << 16);
  JsonWriter w(out);
  w.raw("{");
  w.key("config", true);
  w.raw("{");
  w.key("obs_horizon_frames", true);
  w.integer(scene.config.obs_horizon_frames);
  w.key("pred_horizon_frames");
  w.integer(scene.config.pred_horizon_frames);
  w.key("frame_rate");
  w.num(scene.config.frame_rate);
  w.key("num_modes");
  w.integer(scene.config.num_modes);
  w.key("local_radius");
  w.num(scene.config.local_radius);
  w.key("max_cycle_time");
  w.num(scene.config.max_cycle_time);
  w.key("hidden_dim");
  w.integer(scene.config.hidden_dim);
  w.key("num_heads");
  w.integer(scene.config.num_heads);
  w.key("num_attn_layers");
  w.integer(scene.config.num_attn_layers);
  w.raw("}");

  w.key("map");
  w.raw("[");
  for (size_t i = 0; i < scene.map.size(); ++i) {
    if (i) w.raw(",\n");
    write_lane(w, scene.map[i]);
  }
  w.raw("]");

  w.key("raster");
  w.raw("{");
  w.key("origin", true);
  w.point(scene.raster.origin);
  w.key("resolution");
  w.num(scene.raster.resolution);
  w.key("width");
  w.integer(scene.raster.width);
  w.key("height");
  w.integer(scene.raster.height);
  w.key("drivable");
  w.str(base64_encode(scene.raster.drivable));
  w.raw("}");

  w.key("lights");
  w.raw("[");
  for (size_t i = 0; i < scene.lights.size(); ++i) {
    if (i) w.raw(",\n");
    write_light(w, scene.lights[i]);
  }
  w.raw("]");

  w.key("tracks");
  w.raw("[");
  for (size_t i = 0; i < scene.tracks.size(); ++i) {
    if (i) w.raw(",\n");
    write_track(w, scene.tracks[i]);
  }
  w.raw("]");

  w.key("center");
  w.point(scene.center);
  w.key("diameter");
  w.num(scene.diameter);
  w.key("current_frame");
  w.integer(scene.current_frame);
  w.raw("}\n");
  return out;
}

void save_scene(const Scene& scene, const std::string& path) {
  write_file_atomic(path, scene_to_json_text(scene));
}

// ---------------------------------------------------------------------------
// loader
// ---------------------------------------------------------------------------

namespace {

// Field-path-carrying accessors so schema errors name the offending field.
const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key + ": missing field");
  return *it;
}

double get_num(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw ParseError(path + "." + key + ": expected number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) throw ParseError(path + "." + key + ": expected integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_boolean()) throw ParseError(path + "." + key + ": expected boolean");
  return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ParseError(path + "." + key + ": expected string");
  return v.get<std::string>();
}

Vec2 get_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError(path + ": expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

Vec2 get_point(const json& obj, const std::string& key, const std::string& path) {
  return get_point(require(obj, key, path), path + "." + key);
}

std::string opt_id(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (v.is_null()) return "";
  if (!v.is_string()) throw ParseError(path + "." + key + ": expected string or null");
  return v.get<std::string>();
}

}  // namespace

Scene scene_from_json_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin + ": not valid JSON: " + e.what());
  }
  Scene scene;
  const json& cfg = require(root, "config", origin);
  scene.config.obs_horizon_frames = get_int(cfg, "obs_horizon_frames", origin + ".config");
  scene.config.pred_horizon_frames = get_int(cfg, "pred_horizon_frames", origin + ".config");
  scene.config.frame_rate = get_num(cfg, "frame_rate", origin + ".config");
  scene.config.num_modes = get_int(cfg, "num_modes", origin + ".config");
  scene.config.local_radius = get_num(cfg, "local_radius", origin + ".config");
  scene.config.max_cycle_time = get_num(cfg, "max_cycle_time", origin + ".config");
  scene.config.hidden_dim = get_int(cfg, "hidden_dim", origin + ".config");
  scene.config.num_heads = get_int(cfg, "num_heads", origin + ".config");
  scene.config.num_attn_layers = get_int(cfg, "num_attn_layers", origin + ".config");

  const json& lanes = require(root, "map", origin);
  if (!lanes.is_array()) throw ParseError(origin + ".map: expected array");
  for (size_t i = 0; i < lanes.size(); ++i) {
    const std::string path = origin + ".map[" + std::to_string(i) + "]";
    const json& jl = lanes[i];
    LaneSegment lane;
    lane.lane_id = get_str(jl, "lane_id", path);
    const json& cl = require(jl, "centerline", path);
    if (!cl.is_array()) throw ParseError(path + ".centerline: expected array");
    for (size_t p = 0; p < cl.size(); ++p)
      lane.centerline.push_back(get_point(cl[p], path + ".centerline[" + std::to_string(p) + "]"));
    lane.length = get_num(jl, "length", path);
    const json& attrs = require(jl, "attrs", path);
    lane.attrs.center = get_point(attrs, "center", path + ".attrs");
    lane.attrs.heading = get_num(attrs, "heading", path + ".attrs");
    lane.attrs.is_intersection = get_bool(attrs, "is_intersection", path + ".attrs");
    try {
      lane.attrs.turn_sign = turn_sign_from_name(get_str(attrs, "turn_sign", path + ".attrs"));
    } catch (const ParseError& e) {
      throw ParseError(path + ".attrs.turn_sign: " + e.what());
    }
    lane.attrs.signal_controlled = get_bool(attrs, "signal_controlled", path + ".attrs");
    const json& adj = require(jl, "adjacency", path);
    const json& preds = require(adj, "predecessors", path + ".adjacency");
    for (const auto& p : preds) lane.adjacency.predecessors.push_back(p.get<std::string>());
    const json& succs = require(adj, "successors", path + ".adjacency");
    for (const auto& p : succs) lane.adjacency.successors.push_back(p.get<std::string>());
    lane.adjacency.left_neighbor = opt_id(adj, "left_neighbor", path + ".adjacency");
    lane.adjacency.right_neighbor = opt_id(adj, "right_neighbor", path + ".adjacency");
    scene.map.push_back(std::move(lane));
  }

  const json& raster = require(root, "raster", origin);
  scene.raster.origin = get_point(raster, "origin", origin + ".raster");
  scene.raster.resolution = get_num(raster, "resolution", origin + ".raster");
  scene.raster.width = get_int(raster, "width", origin + ".raster");
  scene.raster.height = get_int(raster, "height", origin + ".raster");
  scene.raster.drivable = base64_decode(get_str(raster, "drivable", origin + ".raster"));

  const json& lights = require(root, "lights", origin);
  if (!lights.is_array()) throw ParseError(origin + ".lights: expected array");
  for (size_t i = 0; i < lights.size(); ++i) {
    const std::string path = origin + ".lights[" + std::to_string(i) + "]";
    const json& jl = lights[i];
    SignalSchedule light;
    light.light_id = get_str(jl, "light_id", path);
    light.position = get_point(jl, "position", path);
    light.control_dir = get_point(jl, "control_dir", path);
    const json& phases = require(jl, "phases", path);
    if (!phases.is_array()) throw ParseError(path + ".phases: expected array");
    for (size_t p = 0; p < phases.size(); ++p) {
      const json& jp = phases[p];
      if (!jp.is_array() || jp.size() != 2)
        throw ParseError(path + ".phases[" + std::to_string(p) + "]: expected [color, duration]");
      SignalPhase phase;
      try {
        phase.color = signal_color_from_name(jp[0].get<std::string>());
      } catch (const std::exception& e) {
        throw ParseError(path + ".phases[" + std::to_string(p) + "]: " + e.what());
      }
      phase.duration = jp[1].get<double>();
      light.phases.push_back(phase);
    }
    light.cycle_offset = get_num(jl, "cycle_offset", path);
    scene.lights.push_back(std::move(light));
  }

  const json& tracks = require(root, "tracks", origin);
  if (!tracks.is_array()) throw ParseError(origin + ".tracks: expected array");
  for (size_t i = 0; i < tracks.size(); ++i) {
    const std::string path = origin + ".tracks[" + std::to_string(i) + "]";
    const json& jt = tracks[i];
    AgentTrack track;
    track.agent_id = get_str(jt, "agent_id", path);
    const json& hist = require(jt, "history", path);
    if (!hist.is_array()) throw ParseError(path + ".history: expected array");
    for (size_t f = 0; f < hist.size(); ++f) {
      const std::string opath = path + ".history[" + std::to_string(f) + "]";
      const json& jo = hist[f];
      AgentObservation obs;
      obs.frame = get_int(jo, "frame", opath);
      obs.x = get_num(jo, "x", opath);
      obs.y = get_num(jo, "y", opath);
      obs.heading = get_num(jo, "heading", opath);
      obs.speed = get_num(jo, "speed", opath);
      obs.vel_dir = get_num(jo, "vel_dir", opath);
      obs.length = get_num(jo, "length", opath);
      obs.width = get_num(jo, "width", opath);
      try {
        obs.agent_class = agent_class_from_name(get_str(jo, "agent_class", opath));
      } catch (const ParseError& e) {
        throw ParseError(opath + ".agent_class: " + e.what());
      }
      obs.valid = get_bool(jo, "valid", opath);
      track.history.push_back(obs);
    }
    const json& fut = require(jt, "future", path);
    if (!fut.is_array()) throw ParseError(path + ".future: expected array");
    for (size_t f = 0; f < fut.size(); ++f)
      track.future_gt.push_back(get_point(fut[f], path + ".future[" + std::to_string(f) + "]"));
    const json& fv = require(jt, "future_valid", path);
    if (!fv.is_array()) throw ParseError(path + ".future_valid: expected array");
    for (const auto& b : fv) track.future_valid.push_back(b.get<bool>() ? 1 : 0);
    scene.tracks.push_back(std::move(track));
  }

  scene.center = get_point(root, "center", origin);
  scene.diameter = get_num(root, "diameter", origin);
  scene.current_frame = get_int(root, "current_frame", origin);
  scene.validate();
  return scene;
}

Scene load_scene(const std::string& path) { return scene_from_json_text(read_file(path), path); }

}  // namespace sigtraj
