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
#include "doctest.h"
#include "oracles.h"
#include "tabforge/error.h"
#include "tabforge/fretboard.h"

using namespace tabforge;

TEST_CASE("standard tuning covers E2 to E6") {
  const Tuning t = Tuning::standard();
  CHECK(t.open_pitches == std::array<int, 6>{40, 45, 50, 55, 59, 64});
  CHECK(t.lowest_pitch() == 40);
  CHECK(t.highest_pitch() == 88);
  CHECK_NOTHROW(require_standard(t));
  Tuning drop_d = t;
  drop_d.open_pitches[0] = 38;
  CHECK_THROWS_AS(require_standard(drop_d), ContractViolation);
}

TEST_CASE("pitch sets are sorted, deduplicated and range checked") {
  const MidiPitchSet s{64, 40, 64, 52};
  CHECK(s.pitches() == std::vector<int>{40, 52, 64});
  CHECK(s.contains(52));
  CHECK_FALSE(s.contains(53));
  CHECK(s.includes(MidiPitchSet{40, 64}));
  CHECK_FALSE(s.includes(MidiPitchSet{41}));
  CHECK_THROWS_AS(MidiPitchSet({128}), ContractViolation);
  CHECK_THROWS_AS(MidiPitchSet({-1}), ContractViolation);
  const auto bits = s.to_bits();
  CHECK(bits[40] == 1);
  CHECK(bits[41] == 0);
  CHECK(std::count(bits.begin(), bits.end(), 1) == 3);
  CHECK(set_difference(s, MidiPitchSet{52}) == MidiPitchSet{40, 64});
  CHECK(set_union(MidiPitchSet{1}, MidiPitchSet{2}) == MidiPitchSet{1, 2});
}

TEST_CASE("frame to midi adds fret to the open pitch") {
  CHECK(frame_to_midi(FretboardFrame{{0, 0}}) == MidiPitchSet{40});
  CHECK(frame_to_midi(FretboardFrame{{5, 24}}) == MidiPitchSet{88});
  // E major open chord
  const FretboardFrame e{{0, 0}, {1, 2}, {2, 2}, {3, 1}, {4, 0}, {5, 0}};
  CHECK(frame_to_midi(e) == MidiPitchSet{40, 47, 52, 56, 59, 64});
  // unison on two strings collapses to one pitch
  CHECK(frame_to_midi(FretboardFrame{{0, 5}, {1, 0}}) == MidiPitchSet{45});
  CHECK(frame_to_midi(FretboardFrame{}).empty());
}

TEST_CASE("frame to midi rejects two cells on one string") {
  FretboardFrame f{{2, 3}};
  f.set(2, 5);
  CHECK_FALSE(f.valid());
  CHECK_THROWS_AS(frame_to_midi(f), ContractViolation);
  CHECK_THROWS_AS(f.fret_on(2), ContractViolation);
}

TEST_CASE("placements for a pitch") {
  CHECK(placements_for_pitch(40) == std::vector<Cell>{{0, 0}});
  CHECK(placements_for_pitch(88) == std::vector<Cell>{{5, 24}});
  CHECK(placements_for_pitch(39).empty());
  CHECK(placements_for_pitch(89).empty());
  const std::vector<Cell> e4 = {{0, 24}, {1, 19}, {2, 14}, {3, 9}, {4, 5}, {5, 0}};
  CHECK(placements_for_pitch(64) == e4);
  for (int pitch = 40; pitch <= 88; ++pitch) {
    for (const Cell& c : placements_for_pitch(pitch)) {
      CHECK(oracle::naive_pitch(c.string, c.fret) == pitch);
    }
  }
}

TEST_CASE("fold to range moves by octaves") {
  CHECK(fold_to_range(MidiPitchSet{28}) == MidiPitchSet{40});
  CHECK(fold_to_range(MidiPitchSet{39}) == MidiPitchSet{51});
  CHECK(fold_to_range(MidiPitchSet{100}) == MidiPitchSet{88});
  CHECK(fold_to_range(MidiPitchSet{89}) == MidiPitchSet{77});
  CHECK(fold_to_range(MidiPitchSet{30, 42}) == MidiPitchSet{42});
  CHECK(fold_to_range(MidiPitchSet{0, 127}) == MidiPitchSet{48, 79});
  Rng rng = make_rng(5, Stream::kSample);
  for (int i = 0; i < 500; ++i) {
    std::vector<int> p;
    for (int k = 0; k < 5; ++k) p.push_back(static_cast<int>(uniform_index(rng, 128)));
    CHECK(fold_to_range(MidiPitchSet(p)).pitches() == oracle::naive_fold(p));
  }
}

TEST_CASE("flattening is string major") {
  CHECK(FretboardFrame::index(0, 0) == 0);
  CHECK(FretboardFrame::index(1, 0) == 25);
  CHECK(FretboardFrame::index(5, 24) == 149);
  CHECK_THROWS_AS(FretboardFrame::index(6, 0), ContractViolation);
  CHECK_THROWS_AS(FretboardFrame::index(0, 25), ContractViolation);
  const FretboardFrame f{{1, 3}, {4, 0}};
  const FlatFrame flat = flatten(f);
  CHECK(flat[28] == 1);
  CHECK(flat[100] == 1);
  CHECK(std::count(flat.begin(), flat.end(), 1) == 2);
  CHECK(unflatten(flat) == f);
  std::vector<std::uint8_t> short_bits(149, 0);
  CHECK_THROWS_AS(unflatten(short_bits), ContractViolation);
  std::vector<std::uint8_t> bad(150, 0);
  bad[3] = 2;
  CHECK_THROWS_AS(unflatten(bad), ContractViolation);
}

TEST_CASE("frame accessors") {
  FretboardFrame f{{3, 7}, {0, 1}};
  CHECK(f.active_count() == 2);
  CHECK(f.cells() == std::vector<Cell>{{0, 1}, {3, 7}});
  CHECK(f.fret_on(3) == 7);
  CHECK(f.fret_on(2) == -1);
  f.set(3, 7, false);
  CHECK(f.active_count() == 1);
  f.clear();
  CHECK(f.empty());
  CHECK(to_string(FretboardFrame{{0, 1}, {3, 7}}) == "{(0,1), (3,7)}");
  CHECK(to_string(MidiPitchSet{40, 52}) == "{40, 52}");
}

TEST_CASE("random frames keep pitch count at most the cell count") {
  Rng rng = make_rng(11, Stream::kSample);
  for (int i = 0; i < 1000; ++i) {
    FretboardFrame f;
    for (int s = 0; s < 6; ++s) {
      if (uniform01(rng) < 0.5) f.set(s, static_cast<int>(uniform_index(rng, 25)));
    }
    const MidiPitchSet m = frame_to_midi(f);
    CHECK(static_cast<int>(m.size()) <= f.active_count());
    for (const Cell& c : f.cells()) CHECK(m.contains(oracle::naive_pitch(c.string, c.fret)));
  }
}

TEST_CASE("probabilistic tablature helpers") {
  const auto p = ProbabilisticTablature::from_frame(FretboardFrame{{2, 4}});
  CHECK(p.at(2, 4) == 1.0);
  CHECK(p.at(2, 5) == 0.0);
  CHECK(ProbabilisticTablature::constant(0.25).at(5, 24) == 0.25);
}
