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
#include "tabforge/decoder.h"

#include <algorithm>

#include "tabforge/error.h"

namespace tabforge {

namespace {

struct Position {
  int max_fret = 0;
  int fret_sum = 0;
};

Position position_of(const FretboardFrame& f) {
  Position pos;
  for (const Cell& c : f.cells()) {
    pos.max_fret = std::max(pos.max_fret, c.fret);
    pos.fret_sum += c.fret;
  }
  return pos;
}

DecodeResult make_result(const FretboardFrame& frame, const ProbabilisticTablature& p,
                         const MidiPitchSet& folded) {
  DecodeResult r;
  r.frame = frame;
  const MidiPitchSet realized = frame_to_midi(frame);
  r.n_realized = static_cast<int>(realized.size());
  r.score = score(p, frame);
  r.dropped = set_difference(folded, realized);
  return r;
}

}  // namespace

double score(const ProbabilisticTablature& p, const FretboardFrame& b) {
  double s = 0.0;
  const FlatFrame& bits = b.bits();
  for (int i = 0; i < kFrameBits; ++i) {
    if (bits[i]) s += p.values[i];
  }
  return s;
}

bool tie_break_less(const FretboardFrame& a, const FretboardFrame& b, TieBreak) {
  const Position pa = position_of(a), pb = position_of(b);
  if (pa.max_fret != pb.max_fret) return pa.max_fret < pb.max_fret;
  if (pa.fret_sum != pb.fret_sum) return pa.fret_sum < pb.fret_sum;
  return a.bits() < b.bits();
}

const FretboardFrame& select_best(const ProbabilisticTablature& p,
                                  std::span<const FretboardFrame> candidates,
                                  TieBreak rule) {
  if (candidates.empty()) throw ContractViolation("select_best: no candidates");
  std::size_t best = 0;
  double best_score = score(p, candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double s = score(p, candidates[i]);
    if (s > best_score || (s == best_score && tie_break_less(candidates[i], candidates[best], rule))) {
      best = i;
      best_score = s;
    }
  }
  return candidates[best];
}

DecodeResult decode_frame(const MidiPitchSet& pitches, const ProbabilisticTablature& p,
                          const DecodeConfig& cfg) {
  cfg.playability.validate();
  if (pitches.empty()) return {};
  const Tuning tuning = Tuning::standard();
  const MidiPitchSet folded = fold_to_range(pitches, tuning);

  if (cfg.mode == DecodeMode::kGreedy) {
    const CandidateSet cs = candidate_frames(folded, tuning, cfg.playability);
    return make_result(select_best(p, cs.frames, cfg.tie_break), p, folded);
  }

  // Exhaustive: best mean score per realized pitch over every N. Equal
  // normalized scores prefer the larger N, then the usual tie-break.
  const int top = std::min<int>(static_cast<int>(folded.size()), kStrings);
  bool found = false;
  FretboardFrame best;
  double best_norm = 0.0;
  for (int n = top; n >= 1; --n) {
    const CandidateSet cs = candidates_with_count(folded, n, tuning, cfg.playability);
    if (cs.frames.empty()) continue;
    const FretboardFrame& local = select_best(p, cs.frames, cfg.tie_break);
    const double norm = score(p, local) / n;
    if (!found || norm > best_norm) {
      best = local;
      best_norm = norm;
      found = true;
    }
  }
  if (!found) throw ContractViolation("no playable placement for " + to_string(folded));
  return make_result(best, p, folded);
}

std::vector<std::uint8_t> network_input(const MidiPitchSet& pitches,
                                        std::span<const FretboardFrame> history) {
  constexpr int kHistory = nn::NetworkSpec::kHistory;
  if (history.size() > static_cast<std::size_t>(kHistory)) {
    throw ContractViolation("history holds at most 4 frames");
  }
  std::vector<std::uint8_t> input(nn::NetworkSpec::kInput, 0);
  const auto bits = pitches.to_bits();
  std::copy(bits.begin(), bits.end(), input.begin());
  const std::size_t pad = kHistory - history.size();
  for (std::size_t h = 0; h < history.size(); ++h) {
    const FlatFrame& f = history[h].bits();
    std::copy(f.begin(), f.end(), input.begin() + kMidiBits + (pad + h) * kFrameBits);
  }
  return input;
}

std::vector<DecodeResult> transcribe_sequence(const FrameSequence& frames,
                                              const nn::ModelWeights<float>& weights,
                                              const DecodeConfig& cfg) {
  nn::validate_shapes(weights);
  std::vector<DecodeResult> out;
  out.reserve(frames.size());
  std::vector<FretboardFrame> history(nn::NetworkSpec::kHistory);
  for (const MidiPitchSet& pitches : frames) {
    const auto input = network_input(pitches, history);
    const ProbabilisticTablature p = nn::forward(weights, input);
    out.push_back(decode_frame(pitches, p, cfg));
    history.erase(history.begin());
    history.push_back(out.back().frame);
  }
  return out;
}

}  // namespace tabforge
