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
#include "tabforge/playability.h"

#include <algorithm>
#include <bit>
#include <string>

#include "tabforge/error.h"

namespace tabforge {

void PlayabilityConfig::validate() const {
  if (fret_window < 1) {
    throw ContractViolation("fret_window must be >= 1, got " +
                            std::to_string(fret_window));
  }
  if (max_strings != kStrings) {
    throw ContractViolation("max_strings must be 6");
  }
}

bool is_playable(const FretboardFrame& frame, const PlayabilityConfig& cfg) {
  int min_fret = kFretColumns;
  int max_fret = 0;
  for (int s = 0; s < kStrings; ++s) {
    int on_string = 0;
    for (int f = 0; f < kFretColumns; ++f) {
      if (!frame.at(s, f)) continue;
      if (++on_string > 1) return false;
      if (f == 0) continue;
      min_fret = std::min(min_fret, f);
      max_fret = std::max(max_fret, f);
    }
  }
  return max_fret == 0 || max_fret - min_fret <= cfg.fret_window - 1;
}

namespace {

struct PitchOptions {
  int pitch;
  std::vector<Cell> placements;
};

// Depth-first search that picks exactly `target` of the pitches (each on its
// own string) while keeping the fretted span inside the window. Pitches are
// visited fewest-placements first so conflicts prune early.
class PlacementSearch {
 public:
  PlacementSearch(std::vector<PitchOptions> options, int target,
                  const PlayabilityConfig& cfg)
      : options_(std::move(options)), target_(target), cfg_(cfg) {
    std::stable_sort(options_.begin(), options_.end(),
                     [](const PitchOptions& a, const PitchOptions& b) {
                       return a.placements.size() < b.placements.size();
                     });
  }

  std::vector<FretboardFrame> run() {
    if (target_ <= static_cast<int>(options_.size()) && target_ <= kStrings) {
      visit(0, 0, 0, kFretColumns, 0);
    }
    std::sort(found_.begin(), found_.end());
    found_.erase(std::unique(found_.begin(), found_.end()), found_.end());
    return std::move(found_);
  }

 private:
  void visit(std::size_t next, int placed, unsigned used_strings, int min_fret,
             int max_fret) {
    if (placed == target_) {
      found_.push_back(current_);
      return;
    }
    const int remaining = static_cast<int>(options_.size() - next);
    const int free_strings = kStrings - std::popcount(used_strings);
    if (placed + std::min(remaining, free_strings) < target_) return;

    for (const Cell& c : options_[next].placements) {
      if (used_strings & (1u << c.string)) continue;
      int lo = min_fret;
      int hi = max_fret;
      if (c.fret > 0) {
        lo = std::min(lo, c.fret);
        hi = std::max(hi, c.fret);
        if (hi - lo > cfg_.fret_window - 1) continue;
      }
      current_.set(c.string, c.fret, true);
      visit(next + 1, placed + 1, used_strings | (1u << c.string), lo, hi);
      current_.set(c.string, c.fret, false);
    }
    // Leave this pitch out.
    visit(next + 1, placed, used_strings, min_fret, max_fret);
  }

  std::vector<PitchOptions> options_;
  int target_;
  PlayabilityConfig cfg_;
  FretboardFrame current_;
  std::vector<FretboardFrame> found_;
};

std::vector<PitchOptions> options_for(const MidiPitchSet& pitches,
                                      const Tuning& tuning) {
  std::vector<PitchOptions> out;
  out.reserve(pitches.size());
  for (int p : pitches) out.push_back({p, placements_for_pitch(p, tuning)});
  return out;
}

CandidateSet make_candidate_set(int n, std::vector<FretboardFrame> frames,
                                const Tuning& tuning) {
  CandidateSet set;
  set.n_used = n;
  set.realized.reserve(frames.size());
  for (const auto& f : frames) set.realized.push_back(frame_to_midi(f, tuning));
  set.frames = std::move(frames);
  return set;
}

}  // namespace

std::vector<FretboardFrame> enumerate_playable(const MidiPitchSet& pitches,
                                               const Tuning& tuning,
                                               const PlayabilityConfig& cfg) {
  require_standard(tuning);
  cfg.validate();
  auto options = options_for(pitches, tuning);
  for (const auto& o : options) {
    if (o.placements.empty()) return {};
  }
  return PlacementSearch(std::move(options), static_cast<int>(pitches.size()),
                         cfg)
      .run();
}

CandidateSet candidates_with_count(const MidiPitchSet& pitches, int n,
                                   const Tuning& tuning,
                                   const PlayabilityConfig& cfg) {
  require_standard(tuning);
  cfg.validate();
  if (n < 0) throw ContractViolation("pitch count must be non-negative");
  const MidiPitchSet folded = fold_to_range(pitches, tuning);
  auto frames = PlacementSearch(options_for(folded, tuning), n, cfg).run();
  return make_candidate_set(n, std::move(frames), tuning);
}

CandidateSet candidate_frames(const MidiPitchSet& pitches, const Tuning& tuning,
                              const PlayabilityConfig& cfg) {
  require_standard(tuning);
  cfg.validate();
  const MidiPitchSet folded = fold_to_range(pitches, tuning);
  const auto options = options_for(folded, tuning);
  for (int n = std::min<int>(static_cast<int>(folded.size()), kStrings); n >= 0;
       --n) {
    auto frames = PlacementSearch(options, n, cfg).run();
    if (!frames.empty()) return make_candidate_set(n, std::move(frames), tuning);
  }
  // n = 0 always yields the empty frame, so this is unreachable.
  return make_candidate_set(0, {FretboardFrame{}}, tuning);
}

}  // namespace tabforge
