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
#include "tabforge/fretboard.h"

#include <algorithm>
#include <iterator>
#include <sstream>

#include "tabforge/error.h"

namespace tabforge {

void require_standard(const Tuning& tuning) {
  if (tuning != Tuning::standard()) {
    throw ContractViolation("only standard tuning (40 45 50 55 59 64, 24 frets) "
                            "is supported");
  }
}

MidiPitchSet::MidiPitchSet(std::vector<int> pitches)
    : pitches_(std::move(pitches)) {
  for (int p : pitches_) {
    if (p < 0 || p >= kMidiBits) {
      throw ContractViolation("MIDI pitch out of range: " + std::to_string(p));
    }
  }
  std::sort(pitches_.begin(), pitches_.end());
  pitches_.erase(std::unique(pitches_.begin(), pitches_.end()), pitches_.end());
}

bool MidiPitchSet::contains(int pitch) const {
  return std::binary_search(pitches_.begin(), pitches_.end(), pitch);
}

bool MidiPitchSet::includes(const MidiPitchSet& other) const {
  return std::includes(pitches_.begin(), pitches_.end(), other.begin(),
                       other.end());
}

std::array<std::uint8_t, kMidiBits> MidiPitchSet::to_bits() const {
  std::array<std::uint8_t, kMidiBits> bits{};
  for (int p : pitches_) bits[static_cast<std::size_t>(p)] = 1;
  return bits;
}

MidiPitchSet set_difference(const MidiPitchSet& a, const MidiPitchSet& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return MidiPitchSet(std::move(out));
}

MidiPitchSet set_union(const MidiPitchSet& a, const MidiPitchSet& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return MidiPitchSet(std::move(out));
}

int FretboardFrame::index(int string, int fret) {
  if (string < 0 || string >= kStrings || fret < 0 || fret >= kFretColumns) {
    throw ContractViolation("cell out of range: string " +
                            std::to_string(string) + ", fret " +
                            std::to_string(fret));
  }
  return string * kFretColumns + fret;
}

FretboardFrame::FretboardFrame(std::initializer_list<Cell> cells)
    : FretboardFrame() {
  for (const Cell& c : cells) set(c.string, c.fret);
}

FretboardFrame FretboardFrame::from_cells(std::span<const Cell> cells) {
  FretboardFrame frame;
  for (const Cell& c : cells) frame.set(c.string, c.fret);
  return frame;
}

void FretboardFrame::set(int string, int fret, bool on) {
  bits_[static_cast<std::size_t>(index(string, fret))] = on ? 1 : 0;
}

bool FretboardFrame::valid() const {
  for (int s = 0; s < kStrings; ++s) {
    int n = 0;
    for (int f = 0; f < kFretColumns; ++f) n += bits_[s * kFretColumns + f];
    if (n > 1) return false;
  }
  return true;
}

bool FretboardFrame::empty() const {
  return std::all_of(bits_.begin(), bits_.end(), [](auto b) { return b == 0; });
}

int FretboardFrame::active_count() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<Cell> FretboardFrame::cells() const {
  std::vector<Cell> out;
  for (int i = 0; i < kFrameBits; ++i) {
    if (bits_[i]) out.push_back({i / kFretColumns, i % kFretColumns});
  }
  return out;
}

int FretboardFrame::fret_on(int string) const {
  int fret = -1;
  for (int f = 0; f < kFretColumns; ++f) {
    if (!at(string, f)) continue;
    if (fret >= 0) {
      throw ContractViolation("string " + std::to_string(string) +
                              " has more than one active cell");
    }
    fret = f;
  }
  return fret;
}

MidiPitchSet frame_to_midi(const FretboardFrame& frame, const Tuning& tuning) {
  if (!frame.valid()) {
    throw ContractViolation("invalid frame: more than one cell on a string: " +
                            to_string(frame));
  }
  std::vector<int> pitches;
  for (const Cell& c : frame.cells()) {
    pitches.push_back(tuning.open_pitches[c.string] + c.fret);
  }
  return MidiPitchSet(std::move(pitches));
}

std::vector<Cell> placements_for_pitch(int pitch, const Tuning& tuning) {
  std::vector<Cell> out;
  for (int s = 0; s < kStrings; ++s) {
    const int fret = pitch - tuning.open_pitches[s];
    if (fret >= 0 && fret <= tuning.fret_count) out.push_back({s, fret});
  }
  return out;
}

MidiPitchSet fold_to_range(const MidiPitchSet& pitches, const Tuning& tuning) {
  std::vector<int> out;
  out.reserve(pitches.size());
  for (int p : pitches) {
    while (p < tuning.lowest_pitch()) p += 12;
    while (p > tuning.highest_pitch()) p -= 12;
    out.push_back(p);
  }
  return MidiPitchSet(std::move(out));
}

FlatFrame flatten(const FretboardFrame& frame) { return frame.bits(); }

FretboardFrame unflatten(std::span<const std::uint8_t> bits) {
  if (bits.size() != static_cast<std::size_t>(kFrameBits)) {
    throw ContractViolation("flat frame must have 150 entries, got " +
                            std::to_string(bits.size()));
  }
  FretboardFrame frame;
  for (int i = 0; i < kFrameBits; ++i) {
    const auto b = bits[static_cast<std::size_t>(i)];
    if (b > 1) {
      throw ContractViolation("flat frame entry " + std::to_string(i) +
                              " is not binary");
    }
    if (b) frame.set(i / kFretColumns, i % kFretColumns);
  }
  return frame;
}

ProbabilisticTablature ProbabilisticTablature::from_frame(
    const FretboardFrame& frame) {
  ProbabilisticTablature p;
  for (int i = 0; i < kFrameBits; ++i) p.values[i] = frame.bits()[i];
  return p;
}

ProbabilisticTablature ProbabilisticTablature::constant(double value) {
  ProbabilisticTablature p;
  p.values.fill(value);
  return p;
}

std::string to_string(const FretboardFrame& frame) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const Cell& c : frame.cells()) {
    if (!first) os << ", ";
    first = false;
    os << '(' << c.string << ',' << c.fret << ')';
  }
  os << '}';
  return os.str();
}

std::string to_string(const MidiPitchSet& pitches) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int p : pitches) {
    if (!first) os << ", ";
    first = false;
    os << p;
  }
  os << '}';
  return os.str();
}

}  // namespace tabforge
