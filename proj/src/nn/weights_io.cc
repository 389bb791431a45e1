// Copyright 2026 The TabForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Weight file layout (all integers little-endian; see docs/formats.md):
//
//   char[8]  "TABFORGE"
//   u32      format_version (1)
//   u32      tensor count
//   per tensor:
//     u16    name length, then the name bytes
//     u8     rank, then rank x u32 dimensions
//     u64    byte offset of the tensor inside the data section
//     u64    byte length of the tensor (4 * element count)
//   u64      data section length in bytes
//   data     float32 values, row-major, tensors back to back
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tabforge/error.h"
#include "tabforge/nn/network.h"

namespace tabforge::nn {

namespace {

constexpr char kMagic[8] = {'T', 'A', 'B', 'F', 'O', 'R', 'G', 'E'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename U>
  U uint(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<U>(in_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(U);
    return v;
  }
  std::string string(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw WeightsError(WeightsError::Kind::kTruncated,
                         std::string("weight file truncated while reading ") +
                             what + " at byte " + std::to_string(pos_));
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_weights(const ModelWeights<float>& weights) {
  validate_shapes(weights);
  const auto& layout = parameter_layout();
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(weights.format_version));
  w.uint<std::uint32_t>(kParamCount);
  std::uint64_t offset = 0;
  for (int i = 0; i < kParamCount; ++i) {
    const auto& name = layout[i].name;
    w.uint<std::uint16_t>(static_cast<std::uint16_t>(name.size()));
    w.bytes(name.data(), name.size());
    w.uint<std::uint8_t>(static_cast<std::uint8_t>(weights[i].shape.size()));
    for (auto d : weights[i].shape) w.uint<std::uint32_t>(static_cast<std::uint32_t>(d));
    const std::uint64_t length = 4 * weights[i].size();
    w.uint<std::uint64_t>(offset);
    w.uint<std::uint64_t>(length);
    offset += length;
  }
  w.uint<std::uint64_t>(offset);
  for (const auto& t : weights.params) {
    for (float v : t.data) w.f32(v);
  }
  return w.take();
}

ModelWeights<float> decode_weights(std::span<const std::uint8_t> bytes) {
  using Kind = WeightsError::Kind;
  Reader r(bytes);
  if (r.string(sizeof(kMagic), "magic") != std::string(kMagic, sizeof(kMagic))) {
    throw WeightsError(Kind::kMagic, "not a TABFORGE weight file");
  }
  const auto version = r.uint<std::uint32_t>("format version");
  if (version != kWeightsFormatVersion) {
    throw WeightsError(Kind::kVersion,
                       "unsupported weight format version " +
                           std::to_string(version) + " (expected " +
                           std::to_string(kWeightsFormatVersion) + ")");
  }
  const auto count = r.uint<std::uint32_t>("tensor count");
  if (count != kParamCount) {
    throw WeightsError(Kind::kShape, "expected " + std::to_string(kParamCount) +
                                         " tensors, file has " +
                                         std::to_string(count));
  }

  const auto& layout = parameter_layout();
  struct Entry {
    std::uint64_t offset;
    std::uint64_t length;
  };
  std::array<Entry, kParamCount> entries{};
  ModelWeights<float> weights;
  for (int i = 0; i < kParamCount; ++i) {
    const auto name_len = r.uint<std::uint16_t>("tensor name length");
    const std::string name = r.string(name_len, "tensor name");
    if (name != layout[i].name) {
      throw WeightsError(Kind::kShape, "unexpected tensor '" + name +
                                           "' (expected '" +
                                           std::string(layout[i].name) + "')");
    }
    const auto rank = r.uint<std::uint8_t>("tensor rank");
    std::vector<std::size_t> shape;
    for (int d = 0; d < rank; ++d) shape.push_back(r.uint<std::uint32_t>("tensor shape"));
    if (shape != layout[i].shape) {
      throw WeightsError(Kind::kShape,
                         "shape mismatch for layer '" + name + "'");
    }
    entries[i].offset = r.uint<std::uint64_t>("tensor offset");
    entries[i].length = r.uint<std::uint64_t>("tensor length");
    if (entries[i].length != 4 * Tensor<float>::element_count(shape)) {
      throw WeightsError(Kind::kShape,
                         "byte length does not match shape for layer '" + name + "'");
    }
    weights[i].shape = std::move(shape);
  }
  const auto data_size = r.uint<std::uint64_t>("data length");
  const std::size_t data_start = r.position();
  if (r.remaining() < data_size) {
    throw WeightsError(Kind::kTruncated,
                       "weight file truncated: data section needs " +
                           std::to_string(data_size) + " bytes, " +
                           std::to_string(r.remaining()) + " present");
  }
  for (int i = 0; i < kParamCount; ++i) {
    const auto& e = entries[i];
    if (e.offset + e.length > data_size) {
      throw WeightsError(Kind::kTruncated,
                         "tensor '" + std::string(layout[i].name) +
                             "' extends past the data section");
    }
    auto& data = weights[i].data;
    data.resize(e.length / 4);
    const std::uint8_t* p = bytes.data() + data_start + e.offset;
    for (std::size_t k = 0; k < data.size(); ++k) {
      const std::uint32_t u = static_cast<std::uint32_t>(p[4 * k]) |
                              static_cast<std::uint32_t>(p[4 * k + 1]) << 8 |
                              static_cast<std::uint32_t>(p[4 * k + 2]) << 16 |
                              static_cast<std::uint32_t>(p[4 * k + 3]) << 24;
      data[k] = std::bit_cast<float>(u);
    }
  }
  return weights;
}

void save_weights(const ModelWeights<float>& weights, const std::string& path) {
  const auto bytes = encode_weights(weights);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WeightsError(WeightsError::Kind::kIo, "cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw WeightsError(WeightsError::Kind::kIo, "failed writing " + path);
}

ModelWeights<float> load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WeightsError(WeightsError::Kind::kIo, "cannot open " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_weights(bytes);
}

}  // namespace tabforge::nn
