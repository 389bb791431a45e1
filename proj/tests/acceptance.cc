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
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass --skip-slow to leave out the two training runs.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "oracles.h"
#include "smf_fixtures.h"
#include "tabforge/cli.h"
#include "tabforge/dataset.h"
#include "tabforge/decoder.h"
#include "tabforge/error.h"
#include "tabforge/midi.h"
#include "tabforge/nn/gradcheck.h"
#include "tabforge/nn/network.h"
#include "tabforge/playability.h"
#include "tabforge/report.h"
#include "tabforge/trainer.h"

namespace fs = std::filesystem;
using namespace tabforge;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

// --- 1 ---------------------------------------------------------------------
Verdict gradient_suite() {
  const auto t0 = Clock::now();
  nn::GradcheckOptions opts;  // 20 instances, eps 1e-5, tolerance 1e-4
  const auto results = nn::run_gradient_suite(opts);
  const double secs = seconds_since(t0);
  bool ok = secs < 60.0;
  std::string detail;
  for (const auto& r : results) {
    const bool layer_ok = r.passed && r.max_relative_error <= 1e-4 &&
                          (r.layer == "network" || r.instances >= 20);
    ok = ok && layer_ok;
    detail += r.layer + "=" + fmt("%.1e", r.max_relative_error) + " ";
  }
  for (const char* needed : {"dense", "selu", "sigmoid", "deconv1", "deconv2"}) {
    ok = ok && std::any_of(results.begin(), results.end(),
                           [&](const auto& r) { return r.layer == needed; });
  }
  return {ok, detail + fmt("(%.2fs)", secs)};
}

// --- 2 ---------------------------------------------------------------------
Verdict architecture_shapes() {
  const auto w = nn::init_weights<float>(42);
  std::vector<std::uint8_t> input(728, 0);
  input[60] = 1;
  input[128 + 3 * 150 + 27] = 1;
  const auto trace = nn::forward_trace(w, input);
  const std::vector<std::vector<std::size_t>> expected = {
      {728}, {512}, {448}, {384}, {384}, {64, 1, 6}, {32, 3, 12}, {1, 6, 26}, {6, 25}};
  bool ok = trace.size() == expected.size();
  std::string detail;
  for (std::size_t i = 0; ok && i < trace.size(); ++i) {
    ok = trace[i].shape == expected[i] &&
         trace[i].values.size() == nn::Tensor<float>::element_count(expected[i]);
    std::string dims;
    for (std::size_t d : trace[i].shape) dims += (dims.empty() ? "" : "x") + std::to_string(d);
    detail += (i ? " -> " : "") + dims;
  }
  return {ok, detail};
}

// --- 3 ---------------------------------------------------------------------
Verdict decoder_oracle() {
  const auto t0 = Clock::now();
  Rng rng = make_rng(2026, Stream::kSample);
  int agree = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 4));
    std::vector<int> pitches;
    for (int k = 0; k < n; ++k) pitches.push_back(28 + static_cast<int>(uniform_index(rng, 72)));
    const auto p = oracle::random_tablature(rng);
    agree += decode_frame(MidiPitchSet(pitches), p).frame == oracle::brute_force_decode(pitches, p);
  }
  const double secs = seconds_since(t0);
  return {agree == trials && secs < 30.0, fmt("%.0f/%.0f agree (%.2fs)", agree, trials, secs)};
}

// --- 4 ---------------------------------------------------------------------
std::vector<Sample> identity_samples() {
  std::vector<Sample> out;
  for (const auto& piece : synth_corpus(4242, 50, 20))
    for (const auto& g : piece.frames)
      out.emplace_back(decode_frame(frame_to_midi(g), ProbabilisticTablature::from_frame(g)).frame, g);
  return out;
}

Verdict ground_truth_fixed_point(const std::vector<Sample>& samples) {
  int fixed = 0, playable = 0;
  for (const auto& [pred, truth] : samples) {
    playable += is_playable(truth);
    fixed += pred == truth;
  }
  const int n = static_cast<int>(samples.size());
  return {n == 1000 && playable == n && fixed == n,
          fmt("%.0f/%.0f frames reproduced", fixed, n)};
}

// --- 5 ---------------------------------------------------------------------
Verdict overfit() {
  const auto t0 = Clock::now();
  auto examples = corpus_to_examples(synth_corpus(555, 4, 8));
  examples.resize(32);
  TrainConfig cfg;
  cfg.epochs = 600;
  cfg.batch_size = 8;
  cfg.learning_rate = 3e-4;  // 1e-3 oscillates on a set this small
  cfg.seed = 42;
  const TrainResult r = train(nn::init_weights<float>(42), examples, examples, cfg);
  const Evaluation ev = evaluate(r.weights, examples);

  int exact = 0;
  for (const auto& ex : examples) {
    std::vector<int> pitches;
    for (int b = 0; b < kMidiBits; ++b)
      if (ex.input[b]) pitches.push_back(b);
    const auto p = nn::forward(r.weights, ex.input);
    exact += decode_frame(MidiPitchSet(pitches), p).frame.bits() == ex.target;
  }
  const double secs = seconds_since(t0);
  const double exact_rate = exact / 32.0;
  return {ev.accuracy >= 0.99 && exact_rate >= 0.90 && secs < 600.0,
          fmt("cosine %.4f, exact %.0f/32, %.0f epochs (%.1fs)", ev.accuracy, exact,
              cfg.epochs, secs)};
}

// --- 6 ---------------------------------------------------------------------
double hit_rate(const MatchReport& r) {
  return r.row_sum(MatchKind::kMatch) + r.row_sum(MatchKind::kPartial);
}

Verdict augmentation_trend() {
  const auto t0 = Clock::now();
  const auto corpus = synth_corpus(2000, 2000, 12);
  const CorpusSplit split = split_corpus(corpus, SplitRatios{}, 42);
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 128;
  cfg.seed = 42;

  auto train_model = [&](std::optional<AugmentConfig> aug) {
    std::optional<AugmentConfig> val_aug = aug;
    if (val_aug) val_aug->seed = derive_seed(aug->seed, Stream::kAugment, 1);
    const auto tr = corpus_to_examples(split.train, kDefaultHistory, aug);
    const auto va = corpus_to_examples(split.val, kDefaultHistory, val_aug);
    return train(nn::init_weights<float>(42), tr, va, cfg).weights;
  };
  AugmentConfig aug;
  aug.probability = 0.5;
  aug.seed = 42;
  const auto guitar_w = train_model(std::nullopt);
  const auto augmented_w = train_model(aug);

  EvalConfig ev;  // 5000 frames, guitar-only test split, truth history
  const double guitar = hit_rate(build_report(predict_samples(guitar_w, split.test, ev)));
  const double augmented = hit_rate(build_report(predict_samples(augmented_w, split.test, ev)));
  const double secs = seconds_since(t0);
  return {augmented >= guitar - 0.02,
          fmt("match+partial: augmented %.3f vs guitar-only %.3f (%.0fs)", augmented, guitar, secs)};
}

// --- 7 ---------------------------------------------------------------------
Verdict playability_predicate() {
  Rng rng = make_rng(7, Stream::kSample);
  int agree = 0;
  for (int i = 0; i < 10000; ++i) {
    FretboardFrame f;
    const int cells = static_cast<int>(uniform_index(rng, 7));
    const int centre = static_cast<int>(uniform_index(rng, 25));
    for (int k = 0; k < cells; ++k) {
      int fr = centre + static_cast<int>(uniform_index(rng, 9)) - 4;
      if (uniform01(rng) < 0.15) fr = 0;
      f.set(static_cast<int>(uniform_index(rng, 6)), std::clamp(fr, 0, 24));
    }
    agree += is_playable(f) == oracle::naive_is_playable(f);
  }
  const bool span5 = is_playable(FretboardFrame{{0, 1}, {1, 6}});
  const bool span6 = !is_playable(FretboardFrame{{0, 1}, {1, 7}});
  const bool open = is_playable(FretboardFrame{{0, 0}, {1, 12}, {2, 14}});
  return {agree == 10000 && span5 && span6 && open,
          fmt("%.0f/10000 agree; span5 ", agree) + (span5 ? "ok" : "FAIL") +
              ", span6 " + (span6 ? "ok" : "FAIL") + ", open " + (open ? "ok" : "FAIL")};
}

// --- 8 ---------------------------------------------------------------------
bool report_consistent(const MatchReport& r) {
  double grand = 0, rows = 0;
  for (int c = 1; c <= 6; ++c) {
    double col = 0;
    for (MatchKind k : {MatchKind::kNone, MatchKind::kPartial, MatchKind::kMatch}) {
      if (r.fraction(k, c) < 0) return false;
      col += r.fraction(k, c);
    }
    if (std::abs(col - r.column_sum(c)) > 1e-12) return false;
    grand += col;
  }
  for (MatchKind k : {MatchKind::kNone, MatchKind::kPartial, MatchKind::kMatch}) rows += r.row_sum(k);
  // rounded cells, as printed, must still total 1 within 0.01
  std::istringstream tsv(r.to_tsv());
  std::string line;
  double printed = -1;
  while (std::getline(tsv, line))
    if (line.rfind("sum\t", 0) == 0) printed = std::stod(line.substr(line.rfind('\t') + 1));
  return std::abs(grand - 1) < 1e-9 && std::abs(rows - 1) < 1e-9 && std::abs(printed - 1) <= 0.01;
}

Verdict report_integrity(const std::vector<Sample>& identity) {
  Rng rng = make_rng(8, Stream::kSample);
  std::vector<Sample> noisy;
  for (const auto& piece : synth_corpus(88, 40, 25))
    for (const auto& f : piece.frames) {
      FretboardFrame pred;
      for (const Cell& c : f.cells())
        if (uniform01(rng) < 0.6) pred.set(c.string, uniform01(rng) < 0.6 ? c.fret : (c.fret + 2) % 25);
      noisy.emplace_back(pred, f);
    }
  const MatchReport random_report = build_report(noisy);
  const MatchReport id_report = build_report(identity);
  bool identity_ok = true;
  for (int c = 1; c <= 6; ++c)
    identity_ok = identity_ok && id_report.fraction(MatchKind::kMatch, c) == id_report.column_sum(c);
  const bool ok = report_consistent(random_report) && report_consistent(id_report) && identity_ok;
  return {ok, fmt("random report: none %.2f partial %.2f match %.2f; identity match row = column sums",
                  random_report.row_sum(MatchKind::kNone), random_report.row_sum(MatchKind::kPartial),
                  random_report.row_sum(MatchKind::kMatch))};
}

// --- 9 ---------------------------------------------------------------------
Verdict smf_fixtures() {
  using namespace fixtures;
  const std::vector<NoteEvent> f0 = {note_on(0, 64), note_on(0, 67), note_off(480, 64),
                                     note_off(480, 67)};
  const std::vector<NoteEvent> f1 = {note_on(0, 40, 1, 1), note_off(96, 40, 1, 1),
                                     note_on(96, 45, 1, 1), note_off(288, 45, 1, 1)};
  const bool ok0 = parse_smf(format0_fixture()) == f0;
  const bool ok1 = parse_smf(format1_fixture()) == f1;
  Bytes bad = format0_fixture();
  bad[2] = 'X';
  long offset = -1;
  try {
    parse_smf(bad);
  } catch (const ParseError& e) {
    offset = static_cast<long>(e.offset());
  }
  return {ok0 && ok1 && offset == 0,
          std::string("format0 ") + (ok0 ? "ok" : "FAIL") + ", format1 " + (ok1 ? "ok" : "FAIL") +
              ", bad header -> ParseError at offset " + std::to_string(offset)};
}

// --- 10 --------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tabforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "tabforge_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string corpus = (dir / "corpus.jsonl").string();
  save_corpus(corpus, synth_corpus(10, 40, 12));
  {
    const auto smf = write_smf(std::vector<NoteEvent>{note_on(0, 40), note_on(0, 47), note_off(480, 47),
                                                      note_on(480, 55), note_on(480, 59), note_off(960, 40),
                                                      note_off(960, 55), note_off(960, 59), note_on(960, 64),
                                                      note_off(1440, 64)});
    std::ofstream(dir / "in.mid", std::ios::binary)
        .write(reinterpret_cast<const char*>(smf.data()), static_cast<std::streamsize>(smf.size()));
  }
  bool ran = true;
  for (const std::string run : {"a", "b"}) {
    const std::string w = (dir / (run + ".tfw")).string();
    ran = ran && run_cli({"--seed", "17", "train", "--corpus", corpus, "--epochs", "3", "--batch", "32",
                          "--augment-prob", "0.5", "--weights", w, "--log",
                          (dir / (run + ".csv")).string()}) == 0;
    ran = ran && run_cli({"--seed", "17", "eval", "--corpus", corpus, "--weights", w, "--samples", "100",
                          "--report", (dir / (run + ".tsv")).string()}) == 0;
    ran = ran && run_cli({"--seed", "17", "transcribe", "--midi", (dir / "in.mid").string(),
                          "--weights", w, "--out", (dir / (run + ".txt")).string()}) == 0;
  }
  std::string detail;
  bool same = ran;
  for (const std::string ext : {".tfw", ".csv", ".tsv", ".txt"}) {
    const std::string a = slurp(dir / ("a" + ext)), b = slurp(dir / ("b" + ext));
    const bool eq = !a.empty() && a == b;
    same = same && eq;
    detail += ext.substr(1) + (eq ? " identical " : " DIFFER ");
  }
  fs::remove_all(dir);
  return {same, detail + (ran ? "" : "(a command failed)")};
}

}  // namespace

int main(int argc, char** argv) {
  // --known-failure N keeps the FAIL line but does not count it in the exit
  // status; ctest uses it for criteria we cannot currently meet.
  bool skip_slow = false;
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--skip-slow") == 0) {
      skip_slow = true;
    } else if (std::strcmp(argv[i], "--known-failure") == 0 && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--skip-slow] [--known-failure N]...\n");
      return 2;
    }
  }

  const auto identity = identity_samples();
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gradient suite", gradient_suite},
      {"architecture shapes", architecture_shapes},
      {"decoder vs brute-force oracle", decoder_oracle},
      {"ground-truth fixed point", [&] { return ground_truth_fixed_point(identity); }},
      {"overfit 32 examples", overfit},
      {"augmentation trend on guitar-only test", augmentation_trend},
      {"playability predicate", playability_predicate},
      {"report integrity", [&] { return report_integrity(identity); }},
      {"SMF fixtures", smf_fixtures},
      {"determinism of train/eval/transcribe", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (skip_slow && (id == 5 || id == 6)) {
      std::printf("SKIP criterion %d: %s\n", id, criteria[i].first.c_str());
      continue;
    }
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const bool excused = !v.pass && known.count(id) > 0;
    failed += !v.pass && !excused;
    std::printf("%s criterion %d: %s -- %s%s\n", v.pass ? "PASS" : "FAIL", id,
                criteria[i].first.c_str(), v.detail.c_str(),
                excused ? " [known failure]" : "");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
