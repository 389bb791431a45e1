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
// Turns a probabilistic tablature and the requested pitches into one
// playable frame: b = argmax_k (p . b_k) over the candidate frames.
#ifndef TABFORGE_DECODER_H_
#define TABFORGE_DECODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "tabforge/fretboard.h"
#include "tabforge/midi.h"
#include "tabforge/nn/network.h"
#include "tabforge/playability.h"

namespace tabforge {

enum class DecodeMode {
  kGreedy,       // realize as many pitches as possible, then score
  kExhaustiveN,  // compare every pitch count by score / N
};

// Only one rule for now: smaller max fret, then smaller fret sum, then
// lexicographically smaller flattened bits.
enum class TieBreak { kLowPosition };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kGreedy;
  TieBreak tie_break = TieBreak::kLowPosition;
  PlayabilityConfig playability;
};

struct DecodeResult {
  FretboardFrame frame;
  int n_realized = 0;
  double score = 0.0;
  MidiPitchSet dropped;  // folded request minus realized pitches
  bool operator==(const DecodeResult&) const = default;
};

double score(const ProbabilisticTablature& p, const FretboardFrame& b);

// True when `a` wins a score tie against `b`.
bool tie_break_less(const FretboardFrame& a, const FretboardFrame& b,
                    TieBreak rule = TieBreak::kLowPosition);

// Throws ContractViolation on an empty candidate list.
const FretboardFrame& select_best(const ProbabilisticTablature& p,
                                  std::span<const FretboardFrame> candidates,
                                  TieBreak rule = TieBreak::kLowPosition);

DecodeResult decode_frame(const MidiPitchSet& pitches,
                          const ProbabilisticTablature& p,
                          const DecodeConfig& cfg = {});

// 728-bit network input: pitch bits then `history` oldest first. Missing
// history slots (fewer than four frames) are zero on the old side.
std::vector<std::uint8_t> network_input(const MidiPitchSet& pitches,
                                        std::span<const FretboardFrame> history);

// Closed loop: each decoded frame becomes history for the next one.
std::vector<DecodeResult> transcribe_sequence(const FrameSequence& frames,
                                              const nn::ModelWeights<float>& weights,
                                              const DecodeConfig& cfg = {});

}  // namespace tabforge

#endif  // TABFORGE_DECODER_H_
