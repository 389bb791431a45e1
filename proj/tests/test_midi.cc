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
#include <set>
#include <sstream>

#include "doctest.h"
#include "tabforge/error.h"
#include "tabforge/midi.h"
#include "tabforge/random.h"
#include "smf_fixtures.h"

using namespace tabforge;
using namespace tabforge::fixtures;

namespace {

std::size_t parse_error_offset(const Bytes& bytes) {
  try {
    parse_smf(bytes);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected ParseError");
  return 0;
}

}  // namespace

TEST_CASE("format 0 fixture parses to the expected events") {
  const std::vector<NoteEvent> expected = {
      note_on(0, 64), note_on(0, 67), note_off(480, 64), note_off(480, 67)};
  CHECK(parse_smf(format0_fixture()) == expected);
}

TEST_CASE("format 1 fixture parses to the expected events") {
  const std::vector<NoteEvent> expected = {
      note_on(0, 40, 1, 1), note_off(96, 40, 1, 1), note_on(96, 45, 1, 1),
      note_off(288, 45, 1, 1)};
  CHECK(parse_smf(format1_fixture()) == expected);
}

TEST_CASE("malformed files report byte offsets") {
  Bytes bad = format0_fixture();
  bad[3] = 'x';  // "MThx"
  CHECK(parse_error_offset(bad) == 0);
  CHECK(parse_error_offset(Bytes{'M', 'T'}) == 0);

  CHECK(parse_error_offset(cat({chunk("MThd", {0x00, 0x00, 0x00, 0x01, 0x01})})) == 4);

  Bytes fmt2 = format0_fixture();
  fmt2[9] = 0x02;
  CHECK(parse_error_offset(fmt2) == 8);

  Bytes two_tracks_fmt0 = format0_fixture();
  two_tracks_fmt0[11] = 0x02;
  CHECK(parse_error_offset(two_tracks_fmt0) == 10);

  // Track declares more bytes than the file holds.
  Bytes truncated = format0_fixture();
  truncated.resize(truncated.size() - 5);
  CHECK(parse_error_offset(truncated) == 14);

  // Data byte with no running status.
  CHECK(parse_error_offset(cat({chunk("MThd", {0x00, 0x00, 0x00, 0x01, 0x01, 0xE0}),
                                chunk("MTrk", {0x00, 0x40, 0x40})})) == 23);

  // Five-byte variable-length quantity.
  CHECK(parse_error_offset(cat({chunk("MThd", {0x00, 0x00, 0x00, 0x01, 0x01, 0xE0}),
                                chunk("MTrk", {0x81, 0x81, 0x81, 0x81, 0x01})})) == 22);
}

TEST_CASE("writer output parses back to the same events") {
  const std::vector<NoteEvent> one_track = {note_on(0, 60), note_on(10, 64), note_off(500, 60),
                                            note_off(70000, 64)};
  CHECK(parse_smf(write_smf(one_track)) == one_track);
  const auto bytes = write_smf(one_track);
  CHECK(bytes[9] == 0);  // format 0

  const std::vector<NoteEvent> two_tracks = {note_on(0, 40, 0, 0), note_on(5, 52, 1, 3),
                                             note_off(20, 40, 0, 0), note_off(30, 52, 1, 3)};
  CHECK(parse_smf(write_smf(two_tracks)) == two_tracks);
  CHECK(write_smf(two_tracks)[9] == 1);
}

TEST_CASE("frames from overlapping notes") {
  const std::vector<NoteEvent> ev = {note_on(0, 60), note_on(0, 64), note_off(480, 60),
                                     note_off(960, 64)};
  CHECK(events_to_frames(ev) == FrameSequence{{60, 64}, {64}});
}

TEST_CASE("quantization merges nearby onsets") {
  const std::vector<NoteEvent> ev = {note_on(0, 60), note_on(5, 64), note_off(100, 60),
                                     note_off(100, 64)};
  CHECK(events_to_frames(ev) == FrameSequence{{60, 64}});
  FrameOptions fine;
  fine.quantize = 1;
  CHECK(events_to_frames(ev, fine) == FrameSequence{{60}, {60, 64}});
  fine.quantize = 0;
  CHECK_THROWS_AS(events_to_frames(ev, fine), ContractViolation);
}

TEST_CASE("percussion channel is dropped by default") {
  const std::vector<NoteEvent> ev = {note_on(0, 36, 0, 9), note_on(0, 60, 0, 0),
                                     note_off(50, 36, 0, 9), note_off(50, 60, 0, 0)};
  CHECK(events_to_frames(ev) == FrameSequence{{60}});
  FrameOptions with;
  with.include_percussion = true;
  CHECK(events_to_frames(ev, with) == FrameSequence{{36, 60}});
}

TEST_CASE("stray note-offs and silence produce no frames") {
  CHECK(events_to_frames(std::vector<NoteEvent>{note_off(0, 60)}).empty());
  CHECK(events_to_frames(std::vector<NoteEvent>{}).empty());
  // Re-striking a held set inside one bucket is not a change.
  const std::vector<NoteEvent> ev = {note_on(0, 60), note_off(20, 60), note_on(25, 60),
                                     note_off(90, 60)};
  CHECK(events_to_frames(ev) == FrameSequence{{60}});
}

TEST_CASE("frame properties on random event streams") {
  Rng rng = make_rng(21, Stream::kSample);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<NoteEvent> ev;
    std::uint64_t t = 0;
    for (int i = 0; i < 40; ++i) {
      t += uniform_index(rng, 30);
      const int pitch = 50 + static_cast<int>(uniform_index(rng, 8));
      ev.push_back(uniform01(rng) < 0.6 ? note_on(t, pitch) : note_off(t, pitch));
    }
    const FrameSequence frames = events_to_frames(ev);
    std::set<std::uint64_t> buckets;
    for (const auto& e : ev) buckets.insert(e.tick / 10);
    CHECK(frames.size() <= buckets.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
      CHECK_FALSE(frames[i].empty());
      if (i) CHECK(frames[i] != frames[i - 1]);
    }
  }
}

TEST_CASE("frame jsonl round trip and errors") {
  std::ostringstream out;
  write_frames_jsonl(out, FrameSequence{{40, 52}, {64}}, "a");
  write_frames_jsonl(out, FrameSequence{}, "");
  CHECK(out.str() == "{\"id\":\"a\",\"frames\":[[40,52],[64]]}\n{\"frames\":[]}\n");
  std::istringstream in(out.str());
  CHECK(read_frames_jsonl(in) == std::vector<FrameSequence>{{{40, 52}, {64}}, {}});

  std::istringstream bad("{\"frames\":[[40]]}\n\n{\"frames\":[[200]]}\n");
  try {
    read_frames_jsonl(bad);
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream garbage("{not json");
  CHECK_THROWS_AS(read_frames_jsonl(garbage), LoadError);
}
