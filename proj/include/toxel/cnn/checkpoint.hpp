#pragma once

// TOXN checkpoint layout, all integers little-endian:
//
//   "TOXN"  u32 version (1)
//   u32 input_size, u32 stages, stages x u32 conv channels,
//   u32 kernel, u32 padding, u32 pool, u32 fc_hidden, 4 x u32 head sizes
//   u64 epochs completed, u64 optimizer step count
//   f64 parameter values, buffer by buffer in model order
//     (conv_w[0], conv_b[0], ..., fc1_w, fc1_b, fc2_w, fc2_b)
//   f64 first moments, same order
//   f64 second moments, same order

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "toxel/cnn/model.hpp"
#include "toxel/cnn/optim.hpp"
#include "toxel/error.hpp"
#include "toxel/grid4.hpp"

namespace toxel::cnn {

inline constexpr std::array<char, 4> kCheckpointMagic{'T', 'O', 'X', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
struct Checkpoint {
  Model<T> model;
  AdamState<T> adam;
  std::uint64_t epochs = 0;
};

namespace detail {

inline void put_f64(std::string& buf, double v) { toxel::detail::put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  const unsigned char* take(std::size_t n) {
    if (data_.size() - pos_ < n) throw FormatError("truncated checkpoint");
    const auto* p = reinterpret_cast<const unsigned char*>(data_.data() + pos_);
    pos_ += n;
    return p;
  }
  std::uint32_t u32() { return toxel::detail::get_u32(take(4)); }
  std::uint64_t u64() { return toxel::detail::get_u64(take(8)); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

template <class T>
std::string serialize_checkpoint(const Checkpoint<T>& ck) {
  const CNNConfig& cfg = ck.model.config();
  std::string buf(kCheckpointMagic.begin(), kCheckpointMagic.end());
  using toxel::detail::put_u32;
  using toxel::detail::put_u64;
  put_u32(buf, kCheckpointVersion);
  put_u32(buf, static_cast<std::uint32_t>(cfg.input_size));
  put_u32(buf, static_cast<std::uint32_t>(cfg.conv_channels.size()));
  for (std::size_t c : cfg.conv_channels) put_u32(buf, static_cast<std::uint32_t>(c));
  put_u32(buf, static_cast<std::uint32_t>(cfg.kernel));
  put_u32(buf, static_cast<std::uint32_t>(cfg.padding));
  put_u32(buf, static_cast<std::uint32_t>(cfg.pool));
  put_u32(buf, static_cast<std::uint32_t>(cfg.fc_hidden));
  for (std::size_t h : cfg.heads) put_u32(buf, static_cast<std::uint32_t>(h));
  put_u64(buf, ck.epochs);
  put_u64(buf, ck.adam.step);

  const auto& params = ck.model.params();
  for (const auto& p : params)
    for (T v : p.data) detail::put_f64(buf, static_cast<double>(v));
  for (int which = 0; which < 2; ++which) {
    const auto& moments = which == 0 ? ck.adam.m : ck.adam.v;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (moments.size() == params.size()) {
        for (T v : moments[i]) detail::put_f64(buf, static_cast<double>(v));
      } else {
        for (std::size_t k = 0; k < params[i].size(); ++k) detail::put_f64(buf, 0.0);
      }
    }
  }
  return buf;
}

template <class T>
Checkpoint<T> deserialize_checkpoint(std::string bytes) {
  detail::Reader r(std::move(bytes));
  if (std::memcmp(r.take(4), kCheckpointMagic.data(), 4) != 0) {
    throw FormatError("bad checkpoint magic (expected TOXN)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  CNNConfig cfg;
  cfg.input_size = r.u32();
  const std::uint32_t stages = r.u32();
  if (stages == 0 || stages > 16) throw FormatError("implausible stage count in checkpoint");
  cfg.conv_channels.resize(stages);
  for (auto& c : cfg.conv_channels) c = r.u32();
  cfg.kernel = r.u32();
  cfg.padding = r.u32();
  cfg.pool = r.u32();
  cfg.fc_hidden = r.u32();
  for (auto& h : cfg.heads) h = r.u32();
  try {
    cfg.validate();
  } catch (const ParameterError& e) {
    throw FormatError(std::string("checkpoint config invalid: ") + e.what());
  }

  Checkpoint<T> ck{Model<T>(cfg), {}, 0};
  ck.epochs = r.u64();
  const std::uint64_t step = r.u64();
  std::vector<std::size_t> sizes;
  for (const auto& p : ck.model.params()) sizes.push_back(p.size());
  ck.adam.init(sizes);
  ck.adam.step = step;
  for (auto& p : ck.model.params())
    for (auto& v : p.data) v = static_cast<T>(r.f64());
  for (auto& buf : ck.adam.m)
    for (auto& v : buf) v = static_cast<T>(r.f64());
  for (auto& buf : ck.adam.v)
    for (auto& v : buf) v = static_cast<T>(r.f64());
  if (!r.done()) throw FormatError("trailing bytes after checkpoint");
  return ck;
}

template <class T>
void save_checkpoint(const std::filesystem::path& path, const Checkpoint<T>& ck) {
  const std::string bytes = serialize_checkpoint(ck);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

template <class T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_checkpoint<T>(ss.str());
}

}  // namespace toxel::cnn
