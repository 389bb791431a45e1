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
#ifndef TABFORGE_REPORT_H_
#define TABFORGE_REPORT_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabforge/dataset.h"
#include "tabforge/decoder.h"

namespace tabforge {

enum class MatchKind { kNone = 0, kPartial = 1, kMatch = 2 };

const char* to_string(MatchKind kind);

// match: identical cell sets; none: no shared cell; partial otherwise.
MatchKind classify_match(const FretboardFrame& pred, const FretboardFrame& truth);

inline constexpr int kReportColumns = 6;  // truth pitch counts 1..6

struct MatchReport {
  // counts[kind][pitches - 1]
  std::array<std::array<std::int64_t, kReportColumns>, 3> counts{};
  std::int64_t total = 0;
  std::vector<std::string> notes;  // emitted as header comments

  double fraction(MatchKind kind, int pitches) const;
  double column_sum(int pitches) const;
  double row_sum(MatchKind kind) const;

  // Rows: no match, partial, match, sum. Columns: 1..6, sum. Two decimals.
  std::string to_tsv() const;
  std::string to_text() const;
};

using Sample = std::pair<FretboardFrame, FretboardFrame>;  // (prediction, truth)

// Throws ContractViolation on an empty list or a truth frame with a pitch
// count outside 1..6.
MatchReport build_report(std::span<const Sample> samples);

enum class HistorySource { kTruth, kDecoded };

struct EvalConfig {
  int samples = 5000;
  std::uint64_t seed = 42;
  DecodeConfig decode;
  HistorySource history = HistorySource::kTruth;
  // Augments the requested pitches; the truth stays the original frame.
  std::optional<AugmentConfig> augment;
};

// Draws `samples` frames uniformly without replacement from the pieces (all
// of them when there are fewer), predicts each one and pairs it with the
// truth frame.
std::vector<Sample> predict_samples(const nn::ModelWeights<float>& weights,
                                    std::span<const Piece> pieces,
                                    const EvalConfig& cfg);

// Six lines, high e on top. Each frame is one column padded to the widest
// fret in that frame.
std::string render_ascii_tab(std::span<const FretboardFrame> frames);
std::string render_ascii_tab(std::span<const DecodeResult> results);

}  // namespace tabforge

#endif  // TABFORGE_REPORT_H_
