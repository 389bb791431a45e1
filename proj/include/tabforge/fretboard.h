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
// Fretboard data model: standard tuning, 6x25 tablature frames, MIDI pitch
// sets and the flat 150-bit layout used by the network.
//
// String 0 is the lowest string (low E). Column 0 of each string is the open
// string, columns 1..24 are frets. Flattening is string-major: bit s*25 + f.
#ifndef TABFORGE_FRETBOARD_H_
#define TABFORGE_FRETBOARD_H_

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tabforge {

inline constexpr int kStrings = 6;
inline constexpr int kFrets = 24;
inline constexpr int kFretColumns = kFrets + 1;
inline constexpr int kFrameBits = kStrings * kFretColumns;  // 150
inline constexpr int kMidiBits = 128;

struct Tuning {
  std::array<int, kStrings> open_pitches;
  int fret_count = kFrets;

  static constexpr Tuning standard() { return {{40, 45, 50, 55, 59, 64}, kFrets}; }

  constexpr int lowest_pitch() const { return open_pitches.front(); }
  constexpr int highest_pitch() const {
    return open_pitches.back() + fret_count;
  }
  bool operator==(const Tuning&) const = default;
};

// Throws ContractViolation unless `tuning` is standard tuning; v1 supports
// nothing else.
void require_standard(const Tuning& tuning);

struct Cell {
  int string = 0;
  int fret = 0;
  auto operator<=>(const Cell&) const = default;
};

// Sorted, duplicate-free set of MIDI pitches in [0, 127].
class MidiPitchSet {
 public:
  MidiPitchSet() = default;
  // Sorts and deduplicates; throws ContractViolation on pitches outside
  // [0, 127].
  explicit MidiPitchSet(std::vector<int> pitches);
  MidiPitchSet(std::initializer_list<int> pitches)
      : MidiPitchSet(std::vector<int>(pitches)) {}

  const std::vector<int>& pitches() const { return pitches_; }
  std::size_t size() const { return pitches_.size(); }
  bool empty() const { return pitches_.empty(); }
  auto begin() const { return pitches_.begin(); }
  auto end() const { return pitches_.end(); }
  bool contains(int pitch) const;
  bool includes(const MidiPitchSet& other) const;

  // 128-bit one-hot encoding.
  std::array<std::uint8_t, kMidiBits> to_bits() const;

  auto operator<=>(const MidiPitchSet&) const = default;

 private:
  std::vector<int> pitches_;
};

MidiPitchSet set_difference(const MidiPitchSet& a, const MidiPitchSet& b);
MidiPitchSet set_union(const MidiPitchSet& a, const MidiPitchSet& b);

using FlatFrame = std::array<std::uint8_t, kFrameBits>;

// A 6x25 binary matrix. Any bit pattern is representable so that invalid
// frames (two cells on one string) can be detected rather than assumed
// away; valid() checks the one-cell-per-string invariant.
class FretboardFrame {
 public:
  FretboardFrame() { bits_.fill(0); }
  FretboardFrame(std::initializer_list<Cell> cells);
  static FretboardFrame from_cells(std::span<const Cell> cells);

  bool at(int string, int fret) const { return bits_[index(string, fret)] != 0; }
  void set(int string, int fret, bool on = true);
  void clear() { bits_.fill(0); }

  // At most one active cell per string.
  bool valid() const;
  bool empty() const;
  int active_count() const;
  // Active cells in string-major order.
  std::vector<Cell> cells() const;
  // Fret of the active cell on `string`, or -1. Throws ContractViolation if
  // the string has more than one cell.
  int fret_on(int string) const;

  const FlatFrame& bits() const { return bits_; }

  // Lexicographic on the flattened bits.
  auto operator<=>(const FretboardFrame&) const = default;

  static int index(int string, int fret);

 private:
  FlatFrame bits_;
};

// Pitches sounded by a valid frame; coinciding pitches collapse.
MidiPitchSet frame_to_midi(const FretboardFrame& frame,
                           const Tuning& tuning = Tuning::standard());

// All (string, fret) positions producing `pitch`, by ascending string.
std::vector<Cell> placements_for_pitch(int pitch,
                                       const Tuning& tuning = Tuning::standard());

// Shifts each pitch by octaves into the playable range and deduplicates.
MidiPitchSet fold_to_range(const MidiPitchSet& pitches,
                           const Tuning& tuning = Tuning::standard());

FlatFrame flatten(const FretboardFrame& frame);
// Rejects inputs that are not exactly 150 values in {0, 1}.
FretboardFrame unflatten(std::span<const std::uint8_t> bits);

// Network output over the 6x25 grid: per-cell plausibility, not normalized
// to sum to one. Same string-major layout as FlatFrame.
struct ProbabilisticTablature {
  std::array<double, kFrameBits> values{};

  double at(int string, int fret) const {
    return values[static_cast<std::size_t>(FretboardFrame::index(string, fret))];
  }
  // 1.0 at the frame's cells, 0.0 elsewhere.
  static ProbabilisticTablature from_frame(const FretboardFrame& frame);
  static ProbabilisticTablature constant(double value);
};

std::string to_string(const FretboardFrame& frame);
std::string to_string(const MidiPitchSet& pitches);

}  // namespace tabforge

#endif  // TABFORGE_FRETBOARD_H_
