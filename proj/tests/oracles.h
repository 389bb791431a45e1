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
// Slow, obviously-correct reference implementations used by the tests.
#ifndef TABFORGE_TESTS_ORACLES_H_
#define TABFORGE_TESTS_ORACLES_H_

#include <algorithm>
#include <optional>
#include <vector>

#include "tabforge/fretboard.h"
#include "tabforge/random.h"

namespace tabforge::oracle {

inline constexpr int kOpen[6] = {40, 45, 50, 55, 59, 64};

inline bool naive_is_playable(const FretboardFrame& f, int window = 6) {
  std::vector<int> fretted;
  for (int s = 0; s < 6; ++s) {
    int on = 0;
    for (int fr = 0; fr <= 24; ++fr) {
      if (f.at(s, fr)) {
        ++on;
        if (fr > 0) fretted.push_back(fr);
      }
    }
    if (on > 1) return false;
  }
  if (fretted.empty()) return true;
  const auto [lo, hi] = std::minmax_element(fretted.begin(), fretted.end());
  return *hi - *lo <= window - 1;
}

inline int naive_pitch(int string, int fret) { return kOpen[string] + fret; }

// Independent restatement of the tie-break: lower max fret, lower fret sum,
// then smaller bits.
inline bool prefer(const FretboardFrame& a, const FretboardFrame& b) {
  int amax = 0, asum = 0, bmax = 0, bsum = 0;
  for (int s = 0; s < 6; ++s) {
    for (int fr = 0; fr <= 24; ++fr) {
      if (a.at(s, fr)) { amax = std::max(amax, fr); asum += fr; }
      if (b.at(s, fr)) { bmax = std::max(bmax, fr); bsum += fr; }
    }
  }
  if (amax != bmax) return amax < bmax;
  if (asum != bsum) return asum < bsum;
  return a.bits() < b.bits();
}

inline double naive_score(const ProbabilisticTablature& p, const FretboardFrame& f) {
  double s = 0;
  for (int st = 0; st < 6; ++st)
    for (int fr = 0; fr <= 24; ++fr)
      if (f.at(st, fr)) s += p.values[st * 25 + fr];
  return s;
}

inline std::vector<int> naive_fold(std::vector<int> pitches) {
  for (int& p : pitches) {
    while (p < 40) p += 12;
    while (p > 88) p -= 12;
  }
  std::sort(pitches.begin(), pitches.end());
  pitches.erase(std::unique(pitches.begin(), pitches.end()), pitches.end());
  return pitches;
}

// Walks the full product (each pitch: skip, or any string/fret with that
// pitch), keeps valid playable frames with the largest number of placed
// pitches, returns the argmax with the tie-break.
inline FretboardFrame brute_force_decode(const std::vector<int>& requested,
                                         const ProbabilisticTablature& p, int window = 6) {
  const std::vector<int> pitches = naive_fold(requested);
  std::vector<std::vector<std::pair<int, int>>> options;
  for (int pitch : pitches) {
    std::vector<std::pair<int, int>> o = {{-1, -1}};
    for (int s = 0; s < 6; ++s) {
      const int fr = pitch - kOpen[s];
      if (fr >= 0 && fr <= 24) o.push_back({s, fr});
    }
    options.push_back(o);
  }
  std::vector<std::size_t> idx(options.size(), 0);
  int best_n = -1;
  std::optional<FretboardFrame> best;
  double best_score = 0;
  while (true) {
    FretboardFrame f;
    bool clash = false;
    int placed = 0;
    for (std::size_t i = 0; i < options.size(); ++i) {
      const auto [s, fr] = options[i][idx[i]];
      if (s < 0) continue;
      for (int other = 0; other <= 24; ++other) clash = clash || f.at(s, other);
      f.set(s, fr);
      ++placed;
    }
    if (!clash && naive_is_playable(f, window)) {
      const double sc = naive_score(p, f);
      if (placed > best_n || (placed == best_n && (sc > best_score ||
                                                   (sc == best_score && prefer(f, *best))))) {
        best_n = placed;
        best = f;
        best_score = sc;
      }
    }
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == options[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return *best;
}

inline ProbabilisticTablature random_tablature(Rng& rng) {
  ProbabilisticTablature p;
  for (double& v : p.values) v = uniform01(rng);
  return p;
}

}  // namespace tabforge::oracle

#endif  // TABFORGE_TESTS_ORACLES_H_
