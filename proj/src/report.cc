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
#include "tabforge/report.h"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "tabforge/error.h"
#include "tabforge/random.h"

namespace tabforge {

namespace {

constexpr std::array<MatchKind, 3> kRows = {MatchKind::kNone, MatchKind::kPartial,
                                            MatchKind::kMatch};
constexpr int kPredictBatch = 256;

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Table body as strings: header row then no match / partial / match / sum.
std::vector<std::vector<std::string>> table_cells(const MatchReport& r) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head = {"outcome"};
  for (int c = 1; c <= kReportColumns; ++c) head.push_back(std::to_string(c));
  head.push_back("sum");
  rows.push_back(head);
  for (MatchKind k : kRows) {
    std::vector<std::string> row = {to_string(k)};
    for (int c = 1; c <= kReportColumns; ++c) row.push_back(fixed2(r.fraction(k, c)));
    row.push_back(fixed2(r.row_sum(k)));
    rows.push_back(row);
  }
  std::vector<std::string> sum = {"sum"};
  double total = 0.0;
  for (int c = 1; c <= kReportColumns; ++c) {
    sum.push_back(fixed2(r.column_sum(c)));
    total += r.column_sum(c);
  }
  sum.push_back(fixed2(total));
  rows.push_back(sum);
  return rows;
}

std::string header_comments(const MatchReport& r) {
  std::string out = "# frames: " + std::to_string(r.total) + "\n";
  out += "# columns: pitch count of the truth frame\n";
  for (const auto& n : r.notes) out += "# " + n + "\n";
  return out;
}

}  // namespace

const char* to_string(MatchKind kind) {
  switch (kind) {
    case MatchKind::kNone: return "no match";
    case MatchKind::kPartial: return "partial";
    case MatchKind::kMatch: return "match";
  }
  return "?";
}

MatchKind classify_match(const FretboardFrame& pred, const FretboardFrame& truth) {
  if (pred == truth) return MatchKind::kMatch;
  const FlatFrame& a = pred.bits();
  const FlatFrame& b = truth.bits();
  for (int i = 0; i < kFrameBits; ++i) {
    if (a[i] && b[i]) return MatchKind::kPartial;
  }
  return MatchKind::kNone;
}

double MatchReport::fraction(MatchKind kind, int pitches) const {
  if (pitches < 1 || pitches > kReportColumns) throw ContractViolation("pitch column out of range");
  if (total == 0) return 0.0;
  return static_cast<double>(counts[static_cast<int>(kind)][pitches - 1]) / total;
}

double MatchReport::column_sum(int pitches) const {
  double s = 0.0;
  for (MatchKind k : kRows) s += fraction(k, pitches);
  return s;
}

double MatchReport::row_sum(MatchKind kind) const {
  double s = 0.0;
  for (int c = 1; c <= kReportColumns; ++c) s += fraction(kind, c);
  return s;
}

std::string MatchReport::to_tsv() const {
  std::string out = header_comments(*this);
  for (const auto& row : table_cells(*this)) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += '\t';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

std::string MatchReport::to_text() const {
  const auto rows = table_cells(*this);
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out = header_comments(*this);
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == 0) {
        line += row[i] + std::string(width[i] - row[i].size(), ' ');
      } else {
        line += "  " + std::string(width[i] - row[i].size(), ' ') + row[i];
      }
    }
    out += line + "\n";
  }
  return out;
}

MatchReport build_report(std::span<const Sample> samples) {
  if (samples.empty()) throw ContractViolation("build_report: no samples");
  MatchReport r;
  for (const auto& [pred, truth] : samples) {
    const int n = static_cast<int>(frame_to_midi(truth).size());
    if (n < 1 || n > kReportColumns) {
      throw ContractViolation("truth frame has " + std::to_string(n) + " pitches");
    }
    ++r.counts[static_cast<int>(classify_match(pred, truth))][n - 1];
    ++r.total;
  }
  return r;
}

std::vector<Sample> predict_samples(const nn::ModelWeights<float>& weights,
                                    std::span<const Piece> pieces,
                                    const EvalConfig& cfg) {
  if (cfg.samples < 1) throw ContractViolation("samples must be >= 1");
  nn::validate_shapes(weights);

  // (piece, frame) for every frame, in corpus order.
  std::vector<std::pair<std::size_t, std::size_t>> pool;
  std::vector<std::vector<TrainingExample>> examples(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    examples[i] = piece_to_examples(pieces[i], nn::NetworkSpec::kHistory, cfg.augment, i);
    for (std::size_t t = 0; t < pieces[i].frames.size(); ++t) pool.emplace_back(i, t);
  }
  if (pool.empty()) throw ContractViolation("no frames to evaluate");

  std::vector<std::size_t> chosen(pool.size());
  std::iota(chosen.begin(), chosen.end(), 0);
  if (static_cast<std::size_t>(cfg.samples) < pool.size()) {
    Rng rng = make_rng(cfg.seed, Stream::kSample);
    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.samples); ++i) {
      const std::size_t j = i + uniform_index(rng, pool.size() - i);
      std::swap(chosen[i], chosen[j]);
    }
    chosen.resize(static_cast<std::size_t>(cfg.samples));
    std::sort(chosen.begin(), chosen.end());
  }

  auto requested = [&](std::size_t piece, std::size_t t) {
    const auto& in = examples[piece][t].input;
    std::vector<int> p;
    for (int b = 0; b < kMidiBits; ++b) {
      if (in[b]) p.push_back(b);
    }
    return MidiPitchSet(std::move(p));
  };

  std::vector<Sample> out;
  out.reserve(chosen.size());
  if (cfg.history == HistorySource::kTruth) {
    nn::Matrix<float> input;
    for (std::size_t start = 0; start < chosen.size(); start += kPredictBatch) {
      const std::size_t n = std::min<std::size_t>(kPredictBatch, chosen.size() - start);
      input.resize(static_cast<Eigen::Index>(n), nn::NetworkSpec::kInput);
      for (std::size_t r = 0; r < n; ++r) {
        const auto [pi, t] = pool[chosen[start + r]];
        const auto& in = examples[pi][t].input;
        for (int c = 0; c < nn::NetworkSpec::kInput; ++c) {
          input(static_cast<Eigen::Index>(r), c) = in[c];
        }
      }
      const nn::Matrix<float> output = nn::forward_batch(weights, input);
      for (std::size_t r = 0; r < n; ++r) {
        const auto [pi, t] = pool[chosen[start + r]];
        ProbabilisticTablature p;
        for (int c = 0; c < kFrameBits; ++c) p.values[c] = output(static_cast<Eigen::Index>(r), c);
        out.emplace_back(decode_frame(requested(pi, t), p, cfg.decode).frame,
                         pieces[pi].frames[t]);
      }
    }
    return out;
  }

  // Decoded history: run each touched piece closed-loop up to its last
  // sampled frame.
  std::size_t k = 0;
  while (k < chosen.size()) {
    const std::size_t pi = pool[chosen[k]].first;
    std::size_t last = k;
    while (last + 1 < chosen.size() && pool[chosen[last + 1]].first == pi) ++last;
    FrameSequence seq;
    for (std::size_t t = 0; t <= pool[chosen[last]].second; ++t) seq.push_back(requested(pi, t));
    const auto decoded = transcribe_sequence(seq, weights, cfg.decode);
    for (; k <= last; ++k) {
      const std::size_t t = pool[chosen[k]].second;
      out.emplace_back(decoded[t].frame, pieces[pi].frames[t]);
    }
  }
  return out;
}

std::string render_ascii_tab(std::span<const FretboardFrame> frames) {
  static constexpr const char* kLabels = "EADGBe";
  std::array<std::string, kStrings> lines;
  for (int s = 0; s < kStrings; ++s) lines[s] = std::string(1, kLabels[s]) + "|";
  for (const auto& f : frames) {
    std::array<std::string, kStrings> cell;
    std::size_t width = 1;
    for (const Cell& c : f.cells()) {
      cell[c.string] += (cell[c.string].empty() ? "" : "/") + std::to_string(c.fret);
    }
    for (const auto& c : cell) width = std::max(width, c.size());
    for (int s = 0; s < kStrings; ++s) {
      lines[s] += "-" + cell[s] + std::string(width - cell[s].size(), '-');
    }
  }
  std::string out;
  for (int s = kStrings - 1; s >= 0; --s) {
    out += lines[s];
    if (!frames.empty()) out += "-";
    out += "\n";
  }
  return out;
}

std::string render_ascii_tab(std::span<const DecodeResult> results) {
  std::vector<FretboardFrame> frames;
  frames.reserve(results.size());
  for (const auto& r : results) frames.push_back(r.frame);
  return render_ascii_tab(frames);
}

}  // namespace tabforge
