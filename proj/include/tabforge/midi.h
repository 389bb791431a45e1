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
// Standard MIDI File (format 0 and 1) note extraction, and conversion of
// note events into the "one frame per change" pitch-set sequence that the
// decoder consumes. Tempo, velocity and duration are ignored.
#ifndef TABFORGE_MIDI_H_
#define TABFORGE_MIDI_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tabforge/fretboard.h"

namespace tabforge {

enum class NoteKind { kOn, kOff };

struct NoteEvent {
  std::uint64_t tick = 0;  // absolute
  int pitch = 0;
  NoteKind kind = NoteKind::kOn;
  int track = 0;
  int channel = 0;

  bool operator==(const NoteEvent&) const = default;
};

inline NoteEvent note_on(std::uint64_t tick, int pitch, int track = 0,
                         int channel = 0) {
  return {tick, pitch, NoteKind::kOn, track, channel};
}
inline NoteEvent note_off(std::uint64_t tick, int pitch, int track = 0,
                          int channel = 0) {
  return {tick, pitch, NoteKind::kOff, track, channel};
}

using FrameSequence = std::vector<MidiPitchSet>;

inline constexpr int kPercussionChannel = 9;  // "channel 10" 1-based

// All note-on/off events with absolute ticks, merged across tracks and
// stably sorted by tick (ties keep track order, then file order). Velocity-0
// note-ons become note-offs; running status is honoured; meta, sysex and
// other channel messages are skipped. Throws ParseError with the byte offset
// on a malformed header, truncated chunk or format-2 file.
std::vector<NoteEvent> parse_smf(std::span<const std::uint8_t> bytes);
std::vector<NoteEvent> read_smf(const std::string& path);

// Serializes events (format 0 for a single track, otherwise format 1 with
// one chunk per track index). parse_smf(write_smf(e)) == e for event lists
// that came out of parse_smf.
std::vector<std::uint8_t> write_smf(std::span<const NoteEvent> events,
                                    int ticks_per_quarter = 480);

struct FrameOptions {
  std::uint64_t quantize = 10;
  bool include_percussion = false;
};

// Groups events into buckets of `quantize` ticks and emits the active pitch
// set after every bucket in which it changed, skipping silence and repeats
// of the previously emitted set. Pitches stay active until their note-off;
// notes still held at the end are simply closed.
FrameSequence events_to_frames(std::span<const NoteEvent> events,
                               const FrameOptions& options = {});

// Frame JSONL: one object per line, {"frames": [[pitch, ...], ...]}. Other
// keys (e.g. "id") are ignored on read. Blank lines are skipped.
std::vector<FrameSequence> read_frames_jsonl(std::istream& in);
std::vector<FrameSequence> read_frames_jsonl(const std::string& path);
void write_frames_jsonl(std::ostream& out, const FrameSequence& frames,
                        const std::string& id = "");

}  // namespace tabforge

#endif  // TABFORGE_MIDI_H_
