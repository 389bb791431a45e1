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
// Training data: tablature corpora, history windows, MIDI augmentation and
// train/validation/test splitting.
//
// A training example pairs the network input
//   [128 MIDI bits][history frame t-H]...[history frame t-1]   (150 bits each)
// with the 150-bit tablature frame t. History slots before the start of the
// piece are all-zero frames. History always holds the true tablature, even
// when the MIDI bits are augmented.
#ifndef TABFORGE_DATASET_H_
#define TABFORGE_DATASET_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabforge/fretboard.h"
#include "tabforge/random.h"

namespace tabforge {

inline constexpr int kDefaultHistory = 4;

struct Piece {
  std::string id;
  std::vector<FretboardFrame> frames;
  bool operator==(const Piece&) const = default;
};

struct TrainingExample {
  std::vector<std::uint8_t> input;  // 128 + 150 * history
  FlatFrame target{};
  bool operator==(const TrainingExample&) const = default;
};

struct AugmentConfig {
  double probability = 0.5;
  // Octave up/down, then fifth, fourth, major/minor third, major/minor sixth
  // above the original pitch.
  std::vector<int> intervals = {12, -12, 7, 5, 4, 3, 9, 8};
  std::uint64_t seed = 0;

  void validate() const;
};

// Each original pitch independently gains, with cfg.probability, one extra
// pitch at an interval drawn uniformly from cfg.intervals. Extra pitches
// outside [0, 127] are discarded; originals are always kept.
MidiPitchSet augment_pitches(const MidiPitchSet& pitches,
                             const AugmentConfig& cfg, Rng& rng);

// One example per frame. With `augment`, the MIDI bits are augmented using a
// random stream derived from (augment->seed, stream).
std::vector<TrainingExample> piece_to_examples(
    const Piece& piece, int history = kDefaultHistory,
    const std::optional<AugmentConfig>& augment = std::nullopt,
    std::uint64_t stream = 0);

// Concatenates piece_to_examples over the corpus, stream = piece index.
std::vector<TrainingExample> corpus_to_examples(
    std::span<const Piece> pieces, int history = kDefaultHistory,
    const std::optional<AugmentConfig>& augment = std::nullopt);

struct SplitRatios {
  double train = 0.64;
  double val = 0.16;
  double test = 0.20;
};

struct CorpusSplit {
  std::vector<Piece> train;
  std::vector<Piece> val;
  std::vector<Piece> test;
};

// Piece-level split after a seeded shuffle. Validation and test sizes are
// floor(n * ratio); train takes the remainder. Each part keeps corpus order.
CorpusSplit split_corpus(std::span<const Piece> pieces,
                         const SplitRatios& ratios, std::uint64_t seed);

// Corpus JSONL: {"id": "...", "frames": [[[string, fret], ...], ...]} per
// line. Load errors carry the 1-based line number.
std::vector<Piece> load_corpus(std::istream& in);
std::vector<Piece> load_corpus(const std::string& path);
void save_corpus(std::ostream& out, std::span<const Piece> pieces);
void save_corpus(const std::string& path, std::span<const Piece> pieces);

// Fraction of synthetic frames with 1..6 pitches.
inline constexpr std::array<double, 6> kSynthPitchCountDistribution = {
    0.70, 0.13, 0.11, 0.03, 0.02, 0.01};

// Random playable pieces that imitate idiomatic guitar parts: a hand
// position that drifts occasionally, single notes near that position, and
// chords taken from common movable shapes (power chords, E/A barre shapes,
// D shape). Deterministic by seed.
std::vector<Piece> synth_corpus(std::uint64_t seed, int n_pieces,
                                int frames_per_piece);

// Example cache ("TFEX"): magic, u32 version, u32 input bits, u32 target
// bits, u64 count, then each example as packed input bits followed by packed
// target bits (LSB-first within each byte).
std::vector<std::uint8_t> encode_examples(std::span<const TrainingExample> examples);
std::vector<TrainingExample> decode_examples(std::span<const std::uint8_t> bytes);

}  // namespace tabforge

#endif  // TABFORGE_DATASET_H_
