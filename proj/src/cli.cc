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
#include "tabforge/cli.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "tabforge/dataset.h"
#include "tabforge/decoder.h"
#include "tabforge/error.h"
#include "tabforge/midi.h"
#include "tabforge/nn/gradcheck.h"
#include "tabforge/nn/network.h"
#include "tabforge/report.h"
#include "tabforge/trainer.h"

namespace tabforge::cli {

namespace {

struct Globals {
  std::uint64_t seed = 42;
  bool verbose = false;
  int threads = 1;
};

struct SynthArgs {
  int pieces = 100;
  int frames = 64;
  std::string out;
};

struct IngestArgs {
  std::string midi;
  int quantize = 10;
  bool percussion = false;
  std::string out;
};

struct AugmentArgs {
  std::string corpus;
  double prob = 0.5;
  std::string out;
};

struct TrainArgs {
  std::string corpus;
  std::string val_corpus;
  int epochs = 10;
  int batch = 128;
  double lr = 1e-3;
  int history = kDefaultHistory;
  double augment_prob = 0.0;
  std::string weights;
  std::string log;
};

struct EvalArgs {
  std::string corpus;
  std::string weights;
  int samples = 5000;
  std::string mode = "greedy";
  std::string split = "test";
  std::string history = "truth";
  double augment_prob = 0.0;
  int fret_window = 6;
  std::string report;
};

struct TranscribeArgs {
  std::string midi;
  std::string frames;
  std::string weights;
  std::string mode = "greedy";
  int fret_window = 6;
  int quantize = 10;
  std::string out;
};

struct GradcheckArgs {
  int instances = 20;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw LoadError("cannot write " + path, 0);
  f << text;
  if (!f) throw LoadError("write failed: " + path, 0);
}

DecodeConfig decode_config(const std::string& mode, int fret_window) {
  DecodeConfig cfg;
  cfg.mode = mode == "exhaustive-n" ? DecodeMode::kExhaustiveN : DecodeMode::kGreedy;
  cfg.playability.fret_window = fret_window;
  cfg.playability.validate();
  return cfg;
}

// Train/val/test parts of a corpus. Fewer than three pieces cannot be split,
// so every part is the whole corpus.
CorpusSplit split_or_share(const std::vector<Piece>& corpus, std::uint64_t seed,
                           std::ostream& err) {
  if (corpus.size() >= 3) return split_corpus(corpus, SplitRatios{}, seed);
  err << "warning: corpus has " << corpus.size()
      << " piece(s); using it for training, validation and test\n";
  return {corpus, corpus, corpus};
}

std::optional<AugmentConfig> augment_config(double prob, std::uint64_t seed) {
  if (prob <= 0.0) return std::nullopt;
  AugmentConfig a;
  a.probability = prob;
  a.seed = seed;
  a.validate();
  return a;
}

int cmd_synth(const Globals& g, const SynthArgs& a, std::ostream& out) {
  const auto corpus = synth_corpus(g.seed, a.pieces, a.frames);
  save_corpus(a.out, corpus);
  out << "wrote " << corpus.size() << " pieces to " << a.out << "\n";
  return kExitOk;
}

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  FrameOptions opts;
  opts.quantize = a.quantize;
  opts.include_percussion = a.percussion;
  const auto frames = events_to_frames(read_smf(a.midi), opts);
  std::ostringstream text;
  write_frames_jsonl(text, frames, a.midi);
  write_text(a.out, text.str());
  out << "wrote " << frames.size() << " frames to " << a.out << "\n";
  return kExitOk;
}

int cmd_augment(const Globals& g, const AugmentArgs& a, std::ostream& out) {
  AugmentConfig cfg;
  cfg.probability = a.prob;
  cfg.seed = g.seed;
  cfg.validate();
  const auto corpus = load_corpus(a.corpus);
  std::ostringstream text;
  std::size_t frames = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Rng rng = make_rng(cfg.seed, Stream::kAugment, i);
    FrameSequence seq;
    for (const auto& f : corpus[i].frames) seq.push_back(augment_pitches(frame_to_midi(f), cfg, rng));
    frames += seq.size();
    write_frames_jsonl(text, seq, corpus[i].id);
  }
  write_text(a.out, text.str());
  out << "wrote " << frames << " augmented frames to " << a.out << "\n";
  return kExitOk;
}

int cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  if (a.history != nn::NetworkSpec::kHistory) {
    throw UsageError("--history: the network input is built for exactly " +
                     std::to_string(nn::NetworkSpec::kHistory) + " history frames");
  }
  const auto corpus = load_corpus(a.corpus);
  CorpusSplit split;
  if (!a.val_corpus.empty()) {
    split.train = corpus;
    split.val = load_corpus(a.val_corpus);
  } else {
    split = split_or_share(corpus, g.seed, err);
  }
  const auto augment = augment_config(a.augment_prob, g.seed);
  const auto train_ex = corpus_to_examples(split.train, a.history, augment);
  std::optional<AugmentConfig> val_augment;
  if (augment) {
    val_augment = augment;
    val_augment->seed = derive_seed(g.seed, Stream::kAugment, 1);
  }
  const auto val_ex = corpus_to_examples(split.val, a.history, val_augment);

  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.learning_rate = a.lr;
  cfg.seed = g.seed;
  cfg.validate();

  auto progress = [&](const EpochRecord& r) {
    if (!g.verbose) return;
    char line[160];
    std::snprintf(line, sizeof(line), "epoch %d train_loss %.6f val_loss %.6f val_acc %.4f\n",
                  r.epoch, r.train_loss, r.val_loss, r.val_accuracy);
    err << line;
  };
  const TrainResult result =
      train(nn::init_weights<float>(g.seed), train_ex, val_ex, cfg, progress);
  nn::save_weights(result.weights, a.weights);
  if (!a.log.empty()) write_text(a.log, result.log.to_csv());

  const EpochRecord& best = result.log.records[result.log.best_epoch - 1];
  char line[200];
  std::snprintf(line, sizeof(line),
                "trained %zu examples, best epoch %d: val_loss %.6f val_acc %.4f\n",
                train_ex.size(), best.epoch, best.val_loss, best.val_accuracy);
  out << line;
  return kExitOk;
}

int cmd_eval(const Globals& g, const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto corpus = load_corpus(a.corpus);
  const auto weights = nn::load_weights(a.weights);
  std::vector<Piece> pieces;
  if (a.split == "all") {
    pieces = corpus;
  } else {
    CorpusSplit split = split_or_share(corpus, g.seed, err);
    pieces = a.split == "train" ? split.train : a.split == "val" ? split.val : split.test;
  }

  EvalConfig cfg;
  cfg.samples = a.samples;
  cfg.seed = g.seed;
  cfg.decode = decode_config(a.mode, a.fret_window);
  cfg.history = a.history == "decoded" ? HistorySource::kDecoded : HistorySource::kTruth;
  cfg.augment = augment_config(a.augment_prob, derive_seed(g.seed, Stream::kAugment, 2));

  const auto samples = predict_samples(weights, pieces, cfg);
  MatchReport report = build_report(samples);
  report.notes.push_back("split: " + a.split + ", mode: " + a.mode +
                         ", history: " + a.history);
  if (cfg.augment) {
    report.notes.push_back("requested pitches augmented (prob " + std::to_string(a.augment_prob) +
                           "); compared against the original tablature frame");
  }
  out << report.to_text();
  if (!a.report.empty()) write_text(a.report, report.to_tsv());
  return kExitOk;
}

int cmd_transcribe(const TranscribeArgs& a, std::ostream& out) {
  std::vector<FrameSequence> sequences;
  if (!a.midi.empty()) {
    FrameOptions opts;
    opts.quantize = a.quantize;
    sequences.push_back(events_to_frames(read_smf(a.midi), opts));
  } else {
    sequences = read_frames_jsonl(a.frames);
  }
  const auto weights = nn::load_weights(a.weights);
  const DecodeConfig cfg = decode_config(a.mode, a.fret_window);
  std::string text;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (i) text += "\n";
    text += render_ascii_tab(transcribe_sequence(sequences[i], weights, cfg));
  }
  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
  }
  return kExitOk;
}

int cmd_gradcheck(const Globals& g, const GradcheckArgs& a, std::ostream& out) {
  nn::GradcheckOptions opts;
  opts.instances = a.instances;
  opts.seed = g.seed;
  bool ok = true;
  for (const auto& r : nn::run_gradient_suite(opts)) {
    char line[200];
    std::snprintf(line, sizeof(line), "%-8s %-4s instances %3d values %7zu max_rel_err %.3e\n",
                  r.layer.c_str(), r.passed ? "ok" : "FAIL", r.instances, r.values_checked,
                  r.max_relative_error);
    out << line;
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitNumeric;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural guitar tablature transcription from MIDI.", "tabforge"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random stream");
  app.add_flag("--verbose", g.verbose, "Per-epoch progress on stderr");
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  const auto modes = CLI::IsMember({"greedy", "exhaustive-n"});

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic tablature corpus");
  c_synth->add_option("--pieces", synth.pieces, "Number of pieces")->check(CLI::PositiveNumber);
  c_synth->add_option("--frames", synth.frames, "Frames per piece")->check(CLI::PositiveNumber);
  c_synth->add_option("--out", synth.out, "Corpus JSONL")->required();

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Convert a MIDI file to pitch frames");
  c_ingest->add_option("--midi", ingest.midi, "Standard MIDI file")->required();
  c_ingest->add_option("--quantize", ingest.quantize, "Ticks per quantization bucket")
      ->check(CLI::PositiveNumber);
  c_ingest->add_flag("--include-percussion", ingest.percussion, "Keep channel 10 notes");
  c_ingest->add_option("--out", ingest.out, "Frame JSONL")->required();

  AugmentArgs augment;
  auto* c_augment = app.add_subcommand("augment", "Write augmented pitch frames of a corpus");
  c_augment->add_option("--corpus", augment.corpus, "Corpus JSONL")->required();
  c_augment->add_option("--prob", augment.prob, "Per-pitch augmentation probability")
      ->check(CLI::Range(0.0, 1.0));
  c_augment->add_option("--out", augment.out, "Frame JSONL")->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train the network on a corpus");
  c_train->add_option("--corpus", tr.corpus, "Corpus JSONL")->required();
  c_train->add_option("--val-corpus", tr.val_corpus,
                      "Validation corpus; without it the corpus is split by --seed");
  c_train->add_option("--epochs", tr.epochs, "Epochs")->check(CLI::PositiveNumber);
  c_train->add_option("--batch", tr.batch, "Mini-batch size")->check(CLI::PositiveNumber);
  c_train->add_option("--lr", tr.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  c_train->add_option("--history", tr.history, "History frames (the network needs 4)");
  c_train->add_option("--augment-prob", tr.augment_prob, "MIDI augmentation probability")
      ->check(CLI::Range(0.0, 1.0));
  c_train->add_option("--weights", tr.weights, "Output weights file")->required();
  c_train->add_option("--log", tr.log, "Training log CSV");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Match report on sampled corpus frames");
  c_eval->add_option("--corpus", ev.corpus, "Corpus JSONL")->required();
  c_eval->add_option("--weights", ev.weights, "Weights file")->required();
  c_eval->add_option("--samples", ev.samples, "Frames to sample")->check(CLI::PositiveNumber);
  c_eval->add_option("--mode", ev.mode, "Decoding mode")->check(modes);
  c_eval->add_option("--split", ev.split, "Corpus part, split by --seed")
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  c_eval->add_option("--history", ev.history, "History fed to the network")
      ->check(CLI::IsMember({"truth", "decoded"}));
  c_eval->add_option("--augment-prob", ev.augment_prob, "Augment the requested pitches")
      ->check(CLI::Range(0.0, 1.0));
  c_eval->add_option("--fret-window", ev.fret_window, "Playable fret window")
      ->check(CLI::PositiveNumber);
  c_eval->add_option("--report", ev.report, "Report TSV");

  TranscribeArgs tx;
  auto* c_tx = app.add_subcommand("transcribe", "Transcribe MIDI into ASCII tablature");
  auto* midi_opt = c_tx->add_option("--midi", tx.midi, "Standard MIDI file");
  auto* frames_opt = c_tx->add_option("--frames", tx.frames, "Frame JSONL");
  midi_opt->excludes(frames_opt);
  c_tx->add_option("--weights", tx.weights, "Weights file")->required();
  c_tx->add_option("--mode", tx.mode, "Decoding mode")->check(modes);
  c_tx->add_option("--fret-window", tx.fret_window, "Playable fret window")
      ->check(CLI::PositiveNumber);
  c_tx->add_option("--quantize", tx.quantize, "Ticks per quantization bucket")
      ->check(CLI::PositiveNumber);
  c_tx->add_option("--out", tx.out, "Output text file (default stdout)");

  GradcheckArgs gc;
  auto* c_gc = app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  c_gc->add_option("--instances", gc.instances, "Random instances per layer")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (c_tx->parsed() && tx.midi.empty() && tx.frames.empty()) {
      throw CLI::RequiredError("--midi or --frames");
    }
  } catch (const CLI::CallForHelp&) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    out << sub->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "error: " << e.what() << "\n" << sub->help();
    return kExitUsage;
  }

  try {
    if (c_synth->parsed()) return cmd_synth(g, synth, out);
    if (c_ingest->parsed()) return cmd_ingest(ingest, out);
    if (c_augment->parsed()) return cmd_augment(g, augment, out);
    if (c_train->parsed()) return cmd_train(g, tr, out, err);
    if (c_eval->parsed()) return cmd_eval(g, ev, out, err);
    if (c_tx->parsed()) return cmd_transcribe(tx, out);
    if (c_gc->parsed()) return cmd_gradcheck(g, gc, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {  // parse, load and weight-file errors
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace tabforge::cli
