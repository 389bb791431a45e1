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
// Enumeration of playable fretboards for a set of requested pitches.
//
// A frame is playable when every string carries at most one cell and all
// fretted (non-open) cells fit in `fret_window` consecutive fret positions,
// i.e. max_fret - min_fret <= fret_window - 1. Open strings never count
// against the window.
//
// candidate_frames() realizes as many of the requested pitches as possible:
// starting from N = min(|pitches|, 6) it collects the playable frames of
// every N-subset and drops N by one until something is playable.
#ifndef TABFORGE_PLAYABILITY_H_
#define TABFORGE_PLAYABILITY_H_

#include <vector>

#include "tabforge/fretboard.h"

namespace tabforge {

struct PlayabilityConfig {
  int fret_window = 6;
  int max_strings = kStrings;

  // Throws ContractViolation on fret_window < 1 or max_strings != 6.
  void validate() const;
};

struct CandidateSet {
  int n_used = 0;
  // Sorted by flattened bits, no duplicates.
  std::vector<FretboardFrame> frames;
  // realized[i] is frame_to_midi(frames[i]).
  std::vector<MidiPitchSet> realized;
};

bool is_playable(const FretboardFrame& frame,
                 const PlayabilityConfig& cfg = {});

// Every playable frame that places each of `pitches` exactly once.
// Pitches outside the fretboard range make the result empty; the empty set
// yields the single empty frame.
std::vector<FretboardFrame> enumerate_playable(
    const MidiPitchSet& pitches, const Tuning& tuning = Tuning::standard(),
    const PlayabilityConfig& cfg = {});

// Playable frames realizing exactly `n` of `pitches` (pitches are folded
// first). Empty when no n-subset is playable.
CandidateSet candidates_with_count(const MidiPitchSet& pitches, int n,
                                   const Tuning& tuning = Tuning::standard(),
                                   const PlayabilityConfig& cfg = {});

CandidateSet candidate_frames(const MidiPitchSet& pitches,
                              const Tuning& tuning = Tuning::standard(),
                              const PlayabilityConfig& cfg = {});

}  // namespace tabforge

#endif  // TABFORGE_PLAYABILITY_H_
