#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "caerl/tensor.hpp"

namespace caerl::nn {

/// Ordered view over a parameter collection: (name, tensor) pairs. Gradient
/// collections expose the same names so the two line up positionally.
using ParamRefs = std::vector<std::pair<std::string, Tensor*>>;

inline std::size_t param_count(const ParamRefs& refs) {
  std::size_t n = 0;
  for (const auto& [name, t] : refs) n += t->numel();
  return n;
}

inline void check_aligned(const ParamRefs& a, const ParamRefs& b, const char* what) {
  if (a.size() != b.size())
    throw structural_error(std::string(what) + ": collections differ in size");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first)
      throw structural_error(std::string(what) + ": name mismatch at " + a[i].first +
                             " vs " + b[i].first);
    if (!a[i].second->same_shape(*b[i].second))
      throw structural_error(std::string(what) + ": shape mismatch at " + a[i].first);
  }
}

/// target <- tau * online + (1 - tau) * target, elementwise over aligned refs.
inline void soft_update(ParamRefs target, const ParamRefs& online, double tau) {
  check_aligned(target, online, "soft_update");
  for (std::size_t i = 0; i < target.size(); ++i) {
    Tensor& t = *target[i].second;
    const Tensor& o = *online[i].second;
    for (std::size_t j = 0; j < t.numel(); ++j)
      t[j] = tau * o[j] + (1.0 - tau) * t[j];
  }
}

inline void copy_params(ParamRefs target, const ParamRefs& online) {
  check_aligned(target, online, "copy_params");
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i].second->data = online[i].second->data;
}

// ---------------------------------------------------------------------------
// Checkpoint serialization: "cae-rl/ckpt/1" magic line, a u64 little-endian
// manifest length, a JSON manifest (tensor names, shapes, byte offsets, plus
// a free-form meta object), then raw little-endian float64 payload.
// ---------------------------------------------------------------------------

inline constexpr const char* kCheckpointMagic = "cae-rl/ckpt/1";

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64(const std::string& in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

inline void put_f64(std::string& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(out, bits);
}

inline double get_f64(const std::string& in, std::size_t pos) {
  std::uint64_t bits = get_u64(in, pos);
  double d;
  std::memcpy(&d, &bits, sizeof(d));
  return d;
}

}  // namespace detail

inline std::string serialize_checkpoint(const ParamRefs& refs,
                                        const nlohmann::json& meta) {
  nlohmann::json manifest;
  manifest["meta"] = meta;
  auto& tensors = manifest["tensors"] = nlohmann::json::array();
  std::string blob;
  std::uint64_t offset = 0;
  for (const auto& [name, t] : refs) {
    tensors.push_back({{"name", name}, {"shape", t->shape}, {"offset", offset}});
    for (double v : t->data) detail::put_f64(blob, v);
    offset += 8 * t->numel();
  }
  std::string out = std::string(kCheckpointMagic) + "\n";
  const std::string mjson = manifest.dump();
  detail::put_u64(out, mjson.size());
  out += mjson;
  out += blob;
  return out;
}

struct Checkpoint {
  nlohmann::json meta;
  std::map<std::string, Tensor> tensors;
};

inline Checkpoint parse_checkpoint(const std::string& bytes) {
  const std::string magic = std::string(kCheckpointMagic) + "\n";
  if (bytes.size() < magic.size() + 8 || bytes.compare(0, magic.size(), magic) != 0)
    throw validation_error("checkpoint: bad magic, expected " +
                           std::string(kCheckpointMagic));
  std::size_t pos = magic.size();
  const std::uint64_t mlen = detail::get_u64(bytes, pos);
  pos += 8;
  if (pos + mlen > bytes.size()) throw validation_error("checkpoint: truncated manifest");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.substr(pos, mlen));
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("checkpoint: manifest parse failure: ") +
                           e.what());
  }
  pos += mlen;
  Checkpoint ck;
  ck.meta = manifest.value("meta", nlohmann::json::object());
  for (const auto& entry : manifest.at("tensors")) {
    const std::string name = entry.at("name");
    std::vector<std::size_t> shape = entry.at("shape").get<std::vector<std::size_t>>();
    const std::uint64_t offset = entry.at("offset");
    Tensor t(shape);
    const std::size_t start = pos + offset;
    if (start + 8 * t.numel() > bytes.size())
      throw validation_error("checkpoint: truncated payload at tensor " + name);
    for (std::size_t i = 0; i < t.numel(); ++i)
      t[i] = detail::get_f64(bytes, start + 8 * i);
    ck.tensors.emplace(name, std::move(t));
  }
  return ck;
}

inline void load_into(const Checkpoint& ck, ParamRefs refs) {
  for (auto& [name, t] : refs) {
    auto it = ck.tensors.find(name);
    if (it == ck.tensors.end())
      throw structural_error("checkpoint: missing tensor " + name);
    if (!it->second.same_shape(*t))
      throw structural_error("checkpoint: shape mismatch at " + name + " (" +
                             it->second.shape_str() + " vs " + t->shape_str() + ")");
    t->data = it->second.data;
  }
}

inline void write_checkpoint_file(const std::string& path, const ParamRefs& refs,
                                  const nlohmann::json& meta) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open checkpoint file for writing: " + path);
  const std::string bytes = serialize_checkpoint(refs, meta);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline Checkpoint read_checkpoint_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open checkpoint file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

}  // namespace caerl::nn
