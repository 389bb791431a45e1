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
#include "tabforge/midi.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <map>

#include "json.hpp"
#include "tabforge/error.h"

namespace tabforge {

namespace {

class ByteCursor {
 public:
  ByteCursor(std::span<const std::uint8_t> bytes, std::size_t pos, std::size_t end)
      : bytes_(bytes), pos_(pos), end_(end) {}

  bool done() const { return pos_ >= end_; }
  std::size_t pos() const { return pos_; }

  std::uint8_t u8(const char* what) {
    if (pos_ >= end_) throw ParseError(std::string("truncated ") + what, pos_);
    return bytes_[pos_++];
  }
  std::uint8_t peek(const char* what) const {
    if (pos_ >= end_) throw ParseError(std::string("truncated ") + what, pos_);
    return bytes_[pos_];
  }
  std::uint32_t be(int n, const char* what) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 8) | u8(what);
    return v;
  }
  // Variable-length quantity: at most four 7-bit groups.
  std::uint32_t vlq(const char* what) {
    const std::size_t start = pos_;
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      const std::uint8_t b = u8(what);
      v = (v << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return v;
    }
    throw ParseError(std::string("variable-length quantity too long in ") + what,
                     start);
  }
  void skip(std::size_t n, const char* what) {
    if (end_ - pos_ < n) throw ParseError(std::string("truncated ") + what, pos_);
    pos_ += n;
  }
  std::uint8_t data_byte(const char* what) {
    const std::size_t at = pos_;
    const std::uint8_t b = u8(what);
    if (b & 0x80) throw ParseError(std::string("status byte where data expected in ") + what, at);
    return b;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::size_t end_;
};

void parse_track(std::span<const std::uint8_t> bytes, std::size_t begin,
                 std::size_t end, int track, std::vector<NoteEvent>& out) {
  ByteCursor c(bytes, begin, end);
  std::uint64_t tick = 0;
  std::uint8_t running = 0;
  while (!c.done()) {
    tick += c.vlq("delta time");
    std::uint8_t status = c.peek("event");
    if (status & 0x80) {
      c.u8("event");
    } else if (running == 0) {
      throw ParseError("data byte without running status", c.pos());
    } else {
      status = running;
    }

    if (status == 0xFF) {
      running = 0;
      const std::uint8_t type = c.u8("meta event");
      const std::uint32_t len = c.vlq("meta length");
      c.skip(len, "meta event");
      if (type == 0x2F) return;  // end of track
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      running = 0;
      c.skip(c.vlq("sysex length"), "sysex event");
      continue;
    }
    if (status >= 0xF0) {
      throw ParseError("unexpected system message in track", c.pos() - 1);
    }

    running = status;
    const int kind = status & 0xF0;
    const int channel = status & 0x0F;
    switch (kind) {
      case 0x80:
      case 0x90: {
        const int pitch = c.data_byte("note event");
        const int velocity = c.data_byte("note event");
        const bool on = kind == 0x90 && velocity > 0;
        out.push_back({tick, pitch, on ? NoteKind::kOn : NoteKind::kOff, track, channel});
        break;
      }
      case 0xA0:
      case 0xB0:
      case 0xE0:
        c.data_byte("channel message");
        c.data_byte("channel message");
        break;
      default:  // 0xC0 program change, 0xD0 channel pressure
        c.data_byte("channel message");
        break;
    }
  }
}

void put_be(std::vector<std::uint8_t>& out, std::uint32_t v, int n) {
  for (int i = n - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_vlq(std::vector<std::uint8_t>& out, std::uint64_t v) {
  if (v > 0x0FFFFFFF) throw ContractViolation("delta time too large for SMF");
  std::array<std::uint8_t, 4> groups{};
  int n = 0;
  do {
    groups[n++] = static_cast<std::uint8_t>(v & 0x7F);
    v >>= 7;
  } while (v != 0);
  for (int i = n - 1; i >= 0; --i) {
    out.push_back(static_cast<std::uint8_t>(groups[i] | (i > 0 ? 0x80 : 0)));
  }
}

}  // namespace

std::vector<NoteEvent> parse_smf(std::span<const std::uint8_t> bytes) {
  ByteCursor header(bytes, 0, bytes.size());
  if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, "MThd")) {
    throw ParseError("missing MThd header", 0);
  }
  header.skip(4, "header");
  const std::uint32_t header_len = header.be(4, "header length");
  if (header_len < 6) throw ParseError("header chunk shorter than 6 bytes", 4);
  const std::size_t format_at = header.pos();
  const std::uint32_t format = header.be(2, "header");
  const std::uint32_t ntracks = header.be(2, "header");
  header.be(2, "header");  // division; ticks are kept as-is
  header.skip(header_len - 6, "header");
  if (format == 2) throw ParseError("unsupported SMF format 2", format_at);
  if (format > 2) throw ParseError("unknown SMF format " + std::to_string(format), format_at);
  if (format == 0 && ntracks != 1) {
    throw ParseError("format 0 file must have exactly one track", format_at + 2);
  }

  std::vector<NoteEvent> events;
  std::size_t pos = header.pos();
  int track = 0;
  while (track < static_cast<int>(ntracks)) {
    if (bytes.size() - pos < 8) throw ParseError("truncated chunk header", pos);
    const bool is_track = std::equal(bytes.begin() + pos, bytes.begin() + pos + 4, "MTrk");
    ByteCursor c(bytes, pos + 4, bytes.size());
    const std::uint32_t len = c.be(4, "chunk length");
    const std::size_t body = pos + 8;
    if (bytes.size() - body < len) {
      throw ParseError("truncated chunk (declares " + std::to_string(len) +
                           " bytes, " + std::to_string(bytes.size() - body) +
                           " available)",
                       pos);
    }
    if (is_track) parse_track(bytes, body, body + len, track++, events);
    pos = body + len;
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const NoteEvent& a, const NoteEvent& b) { return a.tick < b.tick; });
  return events;
}

std::vector<NoteEvent> read_smf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path, 0);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_smf(bytes);
}

std::vector<std::uint8_t> write_smf(std::span<const NoteEvent> events,
                                    int ticks_per_quarter) {
  std::map<int, std::vector<NoteEvent>> tracks;
  int max_track = 0;
  for (const auto& e : events) {
    if (e.track < 0 || e.channel < 0 || e.channel > 15 || e.pitch < 0 || e.pitch > 127) {
      throw ContractViolation("note event out of range");
    }
    tracks[e.track].push_back(e);
    max_track = std::max(max_track, e.track);
  }
  const int ntracks = max_track + 1;

  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd'};
  put_be(out, 6, 4);
  put_be(out, ntracks == 1 ? 0 : 1, 2);
  put_be(out, static_cast<std::uint32_t>(ntracks), 2);
  put_be(out, static_cast<std::uint32_t>(ticks_per_quarter), 2);
  for (int t = 0; t < ntracks; ++t) {
    auto track_events = tracks[t];
    std::stable_sort(track_events.begin(), track_events.end(),
                     [](const NoteEvent& a, const NoteEvent& b) { return a.tick < b.tick; });
    std::vector<std::uint8_t> body;
    std::uint64_t now = 0;
    for (const auto& e : track_events) {
      put_vlq(body, e.tick - now);
      now = e.tick;
      const bool on = e.kind == NoteKind::kOn;
      body.push_back(static_cast<std::uint8_t>((on ? 0x90 : 0x80) | e.channel));
      body.push_back(static_cast<std::uint8_t>(e.pitch));
      body.push_back(on ? 64 : 0);
    }
    body.insert(body.end(), {0x00, 0xFF, 0x2F, 0x00});
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    put_be(out, static_cast<std::uint32_t>(body.size()), 4);
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

FrameSequence events_to_frames(std::span<const NoteEvent> events,
                               const FrameOptions& options) {
  if (options.quantize < 1) throw ContractViolation("quantize must be >= 1");
  std::vector<NoteEvent> sorted;
  for (const auto& e : events) {
    if (!options.include_percussion && e.channel == kPercussionChannel) continue;
    sorted.push_back(e);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const NoteEvent& a, const NoteEvent& b) { return a.tick < b.tick; });

  std::array<int, kMidiBits> held{};
  FrameSequence frames;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const std::uint64_t bucket = sorted[i].tick / options.quantize;
    for (; i < sorted.size() && sorted[i].tick / options.quantize == bucket; ++i) {
      int& count = held[static_cast<std::size_t>(sorted[i].pitch)];
      if (sorted[i].kind == NoteKind::kOn) {
        ++count;
      } else if (count > 0) {
        --count;
      }
    }
    std::vector<int> active;
    for (int p = 0; p < kMidiBits; ++p) {
      if (held[static_cast<std::size_t>(p)] > 0) active.push_back(p);
    }
    if (active.empty()) continue;
    MidiPitchSet current(std::move(active));
    if (frames.empty() || frames.back() != current) frames.push_back(std::move(current));
  }
  return frames;
}

std::vector<FrameSequence> read_frames_jsonl(std::istream& in) {
  std::vector<FrameSequence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      FrameSequence seq;
      for (const auto& frame : j.at("frames")) {
        seq.emplace_back(frame.get<std::vector<int>>());
      }
      out.push_back(std::move(seq));
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(std::string("malformed frame record: ") + e.what(), line_no);
    } catch (const ContractViolation& e) {
      throw LoadError(e.what(), line_no);
    }
  }
  return out;
}

std::vector<FrameSequence> read_frames_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path, 0);
  return read_frames_jsonl(in);
}

void write_frames_jsonl(std::ostream& out, const FrameSequence& frames,
                        const std::string& id) {
  nlohmann::ordered_json j;
  if (!id.empty()) j["id"] = id;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& f : frames) arr.push_back(f.pitches());
  j["frames"] = std::move(arr);
  out << j.dump() << '\n';
}

}  // namespace tabforge
