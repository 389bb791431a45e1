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
#include "tabforge/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "tabforge/error.h"
#include "tabforge/playability.h"

namespace tabforge {

void AugmentConfig::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw ContractViolation("augmentation probability must be in [0, 1]");
  }
  if (intervals.empty()) throw ContractViolation("augmentation intervals are empty");
}

MidiPitchSet augment_pitches(const MidiPitchSet& pitches,
                             const AugmentConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<int> out = pitches.pitches();
  for (int p : pitches) {
    if (uniform01(rng) >= cfg.probability) continue;
    const int q = p + cfg.intervals[uniform_index(rng, cfg.intervals.size())];
    if (q >= 0 && q < kMidiBits) out.push_back(q);
  }
  return MidiPitchSet(std::move(out));
}

std::vector<TrainingExample> piece_to_examples(
    const Piece& piece, int history, const std::optional<AugmentConfig>& augment,
    std::uint64_t stream) {
  if (history < 0) throw ContractViolation("history must be >= 0");
  if (piece.frames.empty()) {
    throw ContractViolation("piece '" + piece.id + "' has no frames");
  }
  std::optional<Rng> rng;
  if (augment) {
    augment->validate();
    rng = make_rng(augment->seed, Stream::kAugment, stream);
  }

  const std::size_t width = kMidiBits + static_cast<std::size_t>(history) * kFrameBits;
  std::vector<TrainingExample> out;
  out.reserve(piece.frames.size());
  for (std::size_t t = 0; t < piece.frames.size(); ++t) {
    const FretboardFrame& frame = piece.frames[t];
    if (frame.empty()) {
      throw ContractViolation("piece '" + piece.id + "' has an empty frame");
    }
    MidiPitchSet midi = frame_to_midi(frame);
    if (rng) midi = augment_pitches(midi, *augment, *rng);

    TrainingExample ex;
    ex.input.assign(width, 0);
    const auto bits = midi.to_bits();
    std::copy(bits.begin(), bits.end(), ex.input.begin());
    for (int slot = 0; slot < history; ++slot) {
      const long src = static_cast<long>(t) - history + slot;
      if (src < 0) continue;
      const auto& h = piece.frames[static_cast<std::size_t>(src)].bits();
      std::copy(h.begin(), h.end(),
                ex.input.begin() + kMidiBits + static_cast<long>(slot) * kFrameBits);
    }
    ex.target = flatten(frame);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<TrainingExample> corpus_to_examples(
    std::span<const Piece> pieces, int history,
    const std::optional<AugmentConfig>& augment) {
  std::vector<TrainingExample> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    auto ex = piece_to_examples(pieces[i], history, augment, i);
    std::move(ex.begin(), ex.end(), std::back_inserter(out));
  }
  return out;
}

CorpusSplit split_corpus(std::span<const Piece> pieces, const SplitRatios& ratios,
                         std::uint64_t seed) {
  if (pieces.size() < 3) {
    throw ContractViolation("need at least 3 pieces to split, got " +
                            std::to_string(pieces.size()));
  }
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ContractViolation("split ratios must be non-negative and sum to 1");
  }
  const std::size_t n = pieces.size();
  // The small epsilon keeps e.g. 100 * 0.29 = 28.999... from flooring to 28.
  const auto n_val = static_cast<std::size_t>(std::floor(n * ratios.val + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * ratios.test + 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, Stream::kSplit);
  shuffle(order.begin(), order.end(), rng);

  std::vector<int> part(n, 0);
  for (std::size_t k = 0; k < n_val; ++k) part[order[k]] = 1;
  for (std::size_t k = n_val; k < n_val + n_test; ++k) part[order[k]] = 2;

  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (part[i] == 0 ? split.train : part[i] == 1 ? split.val : split.test)
        .push_back(pieces[i]);
  }
  return split;
}

std::vector<Piece> load_corpus(std::istream& in) {
  std::vector<Piece> pieces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Piece piece;
    try {
      const auto j = nlohmann::json::parse(line);
      piece.id = j.at("id").get<std::string>();
      for (const auto& jf : j.at("frames")) {
        FretboardFrame frame;
        for (const auto& cell : jf) {
          if (!cell.is_array() || cell.size() != 2) {
            throw LoadError("cell must be a [string, fret] pair", line_no);
          }
          const int s = cell[0].get<int>();
          const int f = cell[1].get<int>();
          if (s < 0 || s >= kStrings) {
            throw LoadError("string " + std::to_string(s) + " out of range 0..5", line_no);
          }
          if (f < 0 || f > kFrets) {
            throw LoadError("fret " + std::to_string(f) + " out of range 0..24", line_no);
          }
          if (frame.fret_on(s) >= 0) {
            throw LoadError("string " + std::to_string(s) + " used twice in one frame",
                            line_no);
          }
          frame.set(s, f);
        }
        if (frame.empty()) throw LoadError("empty frame", line_no);
        piece.frames.push_back(frame);
      }
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(std::string("malformed corpus record: ") + e.what(), line_no);
    }
    if (piece.frames.empty()) {
      throw LoadError("piece '" + piece.id + "' has no frames", line_no);
    }
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

std::vector<Piece> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path, 0);
  return load_corpus(in);
}

void save_corpus(std::ostream& out, std::span<const Piece> pieces) {
  for (const auto& piece : pieces) {
    nlohmann::ordered_json j;
    j["id"] = piece.id;
    auto frames = nlohmann::ordered_json::array();
    for (const auto& frame : piece.frames) {
      auto cells = nlohmann::ordered_json::array();
      for (const Cell& c : frame.cells()) cells.push_back({c.string, c.fret});
      frames.push_back(std::move(cells));
    }
    j["frames"] = std::move(frames);
    out << j.dump() << '\n';
  }
}

void save_corpus(const std::string& path, std::span<const Piece> pieces) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError("cannot open " + path + " for writing", 0);
  save_corpus(out, pieces);
}

// --- Synthetic corpus ---------------------------------------------------------

namespace {

struct Shape {
  std::vector<Cell> cells;  // fret is an offset from the root fret
};

// Movable chord shapes, root fret r at offset 0.
const std::vector<Shape>& chord_shapes() {
  static const std::vector<Shape> shapes = [] {
    std::vector<Shape> s;
    for (int root = 0; root <= 3; ++root) s.push_back({{{root, 0}, {root + 1, 2}}});
    for (int root = 0; root <= 2; ++root) {
      s.push_back({{{root, 0}, {root + 1, 2}, {root + 2, 2}}});
    }
    s.push_back({{{0, 0}, {1, 2}, {2, 2}, {3, 1}, {4, 0}, {5, 0}}});  // E major
    s.push_back({{{0, 0}, {1, 2}, {2, 2}, {3, 0}, {4, 0}, {5, 0}}});  // E minor
    s.push_back({{{1, 0}, {2, 2}, {3, 2}, {4, 2}, {5, 0}}});          // A major
    s.push_back({{{1, 0}, {2, 2}, {3, 2}, {4, 1}, {5, 0}}});          // A minor
    s.push_back({{{2, 0}, {3, 2}, {4, 3}, {5, 2}}});                  // D major
    return s;
  }();
  return shapes;
}

int draw_pitch_count(Rng& rng) {
  double u = uniform01(rng);
  for (int k = 0; k < 6; ++k) {
    u -= kSynthPitchCountDistribution[k];
    if (u < 0) return k + 1;
  }
  return 6;
}

std::optional<FretboardFrame> try_frame(int k, int position, Rng& rng) {
  FretboardFrame frame;
  if (k == 1) {
    const int s = static_cast<int>(uniform_index(rng, kStrings));
    const int f = uniform01(rng) < 0.15 ? 0 : position + static_cast<int>(uniform_index(rng, 4));
    if (f > kFrets) return std::nullopt;
    frame.set(s, f);
    return frame;
  }
  std::vector<const Shape*> eligible;
  for (const auto& shape : chord_shapes()) {
    if (static_cast<int>(shape.cells.size()) >= k) eligible.push_back(&shape);
  }
  const Shape& shape = *eligible[uniform_index(rng, eligible.size())];
  const int root = uniform01(rng) < 0.2 ? 0 : position;
  std::vector<Cell> cells = shape.cells;
  shuffle(cells.begin(), cells.end(), rng);
  cells.resize(static_cast<std::size_t>(k));
  for (const Cell& c : cells) {
    const int f = root + c.fret;
    if (f > kFrets) return std::nullopt;
    frame.set(c.string, f);
  }
  if (static_cast<int>(frame_to_midi(frame).size()) != k || !is_playable(frame)) {
    return std::nullopt;
  }
  return frame;
}

}  // namespace

std::vector<Piece> synth_corpus(std::uint64_t seed, int n_pieces,
                                int frames_per_piece) {
  if (n_pieces < 1 || frames_per_piece < 1) {
    throw ContractViolation("synthetic corpus sizes must be >= 1");
  }
  std::vector<Piece> pieces;
  pieces.reserve(static_cast<std::size_t>(n_pieces));
  for (int i = 0; i < n_pieces; ++i) {
    Rng rng = make_rng(seed, Stream::kSynth, static_cast<std::uint64_t>(i));
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%05d", i);
    Piece piece{id, {}};
    int position = 1 + static_cast<int>(uniform_index(rng, 12));
    for (int t = 0; t < frames_per_piece; ++t) {
      if (t > 0 && uniform01(rng) < 0.1) {
        position = 1 + static_cast<int>(uniform_index(rng, 12));
      }
      const int k = draw_pitch_count(rng);
      std::optional<FretboardFrame> frame;
      while (!frame) frame = try_frame(k, position, rng);
      piece.frames.push_back(*frame);
    }
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

// --- Example cache --------------------------------------------------------------

namespace {

constexpr char kExamplesMagic[4] = {'T', 'F', 'E', 'X'};
constexpr std::uint32_t kExamplesVersion = 1;

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int n) {
  for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t& pos, int n) {
  if (in.size() - pos < static_cast<std::size_t>(n)) {
    throw ParseError("truncated example cache", pos);
  }
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  pos += static_cast<std::size_t>(n);
  return v;
}

void pack(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> bits) {
  std::uint8_t byte = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) byte |= static_cast<std::uint8_t>(1u << (i % 8));
    if (i % 8 == 7) {
      out.push_back(byte);
      byte = 0;
    }
  }
  if (bits.size() % 8 != 0) out.push_back(byte);
}

void unpack(std::span<const std::uint8_t> in, std::size_t& pos, std::span<std::uint8_t> bits) {
  const std::size_t bytes = (bits.size() + 7) / 8;
  if (in.size() - pos < bytes) throw ParseError("truncated example cache", pos);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = (in[pos + i / 8] >> (i % 8)) & 1u;
  }
  pos += bytes;
}

}  // namespace

std::vector<std::uint8_t> encode_examples(std::span<const TrainingExample> examples) {
  const std::size_t width = examples.empty() ? 0 : examples.front().input.size();
  std::vector<std::uint8_t> out(kExamplesMagic, kExamplesMagic + 4);
  put_le(out, kExamplesVersion, 4);
  put_le(out, width, 4);
  put_le(out, kFrameBits, 4);
  put_le(out, examples.size(), 8);
  for (const auto& ex : examples) {
    if (ex.input.size() != width) {
      throw ContractViolation("examples in one cache must share an input width");
    }
    pack(out, ex.input);
    pack(out, ex.target);
  }
  return out;
}

std::vector<TrainingExample> decode_examples(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, kExamplesMagic)) {
    throw ParseError("not a TFEX example cache", 0);
  }
  std::size_t pos = 4;
  const auto version = get_le(bytes, pos, 4);
  if (version != kExamplesVersion) {
    throw ParseError("unsupported example cache version " + std::to_string(version), 4);
  }
  const auto width = get_le(bytes, pos, 4);
  const auto target_bits = get_le(bytes, pos, 4);
  if (target_bits != kFrameBits) throw ParseError("target width must be 150", 12);
  const auto count = get_le(bytes, pos, 8);
  std::vector<TrainingExample> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    TrainingExample ex;
    ex.input.resize(width);
    unpack(bytes, pos, ex.input);
    unpack(bytes, pos, ex.target);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace tabforge
