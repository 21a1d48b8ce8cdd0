#include "sigtraj/checkpoint.hpp"

#include <cstring>

#include "json.hpp"
#include "sigtraj/scene.hpp"
#include "sigtraj/scene_io.hpp"

namespace sigtraj {

using nlohmann::json;

void save_checkpoint(const ParamStore& params, const std::string& meta_json, const std::string& path) {
  json header;
  header["version"] = 1;
  header["meta"] = meta_json.empty() ? json::object() : json::parse(meta_json);
  json tensors = json::array();
  size_t offset = 0;
  for (const auto& name : params.names()) {
    const auto& e = params.at(name);
    json t;
    t["name"] = name;
    t["shape"] = e.shape;
    t["offset"] = offset;
    t["count"] = e.value.size();
    tensors.push_back(t);
    offset += e.value.size();
  }
  header["tensors"] = tensors;
  const std::string head = header.dump();

  std::string out;
  out.reserve(sizeof(kCheckpointMagic) + head.size() + offset * sizeof(double) + 8);
  out.append(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
  uint64_t len = head.size();
  char lenbuf[8];
  for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<char>((len >> (8 * i)) & 0xff);
  out.append(lenbuf, 8);
  out += head;
  for (const auto& name : params.names()) {
    const auto& v = params.at(name).value;
    const char* raw = reinterpret_cast<const char*>(v.data());
    out.append(raw, v.size() * sizeof(double));
  }
  write_file_atomic(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string bytes = read_file(path);
  const size_t magic_len = sizeof(kCheckpointMagic) - 1;
  if (bytes.size() < magic_len + 8 || std::memcmp(bytes.data(), kCheckpointMagic, magic_len) != 0)
    throw ParseError(path + ": not a checkpoint file (bad magic)");
  uint64_t len = 0;
  for (int i = 7; i >= 0; --i) len = (len << 8) | static_cast<uint8_t>(bytes[magic_len + i]);
  if (bytes.size() < magic_len + 8 + len) throw ParseError(path + ": truncated checkpoint header");
  json header;
  try {
    header = json::parse(bytes.substr(magic_len + 8, len));
  } catch (const json::exception& e) {
    throw ParseError(path + ": bad checkpoint header: " + e.what());
  }
  if (header.value("version", 0) != 1) throw ParseError(path + ": unsupported checkpoint version");
  Checkpoint ck;
  ck.meta_json = header.contains("meta") ? header["meta"].dump() : "{}";
  const size_t payload = magic_len + 8 + len;
  for (const auto& t : header["tensors"]) {
    const std::string name = t["name"].get<std::string>();
    Shape shape = t["shape"].get<Shape>();
    const size_t offset = t["offset"].get<size_t>();
    const size_t count = t["count"].get<size_t>();
    if (payload + (offset + count) * sizeof(double) > bytes.size())
      throw ParseError(path + ": truncated checkpoint data for " + name);
    std::vector<double> values(count);
    std::memcpy(values.data(), bytes.data() + payload + offset * sizeof(double), count * sizeof(double));
    ck.params.add(name, std::move(shape), std::move(values));
  }
  return ck;
}

}  // namespace sigtraj
