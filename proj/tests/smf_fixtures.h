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
// Hand-assembled Standard MIDI File fixtures.
#ifndef TABFORGE_TESTS_SMF_FIXTURES_H_
#define TABFORGE_TESTS_SMF_FIXTURES_H_

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace tabforge::fixtures {

using Bytes = std::vector<std::uint8_t>;

inline Bytes cat(std::initializer_list<Bytes> parts) {
  Bytes out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline Bytes chunk(const char* tag, const Bytes& body) {
  Bytes out;
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(tag[i]));
  const auto n = static_cast<std::uint32_t>(body.size());
  out.insert(out.end(), {std::uint8_t(n >> 24), std::uint8_t(n >> 16), std::uint8_t(n >> 8),
                         std::uint8_t(n)});
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

// Format 0, 480 ticks per quarter. Tempo meta, a program change, two notes
// via running status, and 0x80 note-offs also via running status.
inline Bytes format0_fixture() {
  return cat({chunk("MThd", {0x00, 0x00, 0x00, 0x01, 0x01, 0xE0}),
              chunk("MTrk", {0x00, 0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20,  // tempo
                             0x00, 0xC0, 0x19,                          // program
                             0x00, 0x90, 0x40, 0x64,                    // on E4
                             0x00, 0x43, 0x64,                          // on G4 (running)
                             0x83, 0x60, 0x80, 0x40, 0x00,              // +480 off E4
                             0x00, 0x43, 0x00,                          // off G4 (running)
                             0x00, 0xFF, 0x2F, 0x00})});
}

// Format 1: a tempo track, an unknown chunk, then a channel-2 track that
// ends notes with velocity-0 note-ons and carries a sysex message.
inline Bytes format1_fixture() {
  return cat({chunk("MThd", {0x00, 0x01, 0x00, 0x02, 0x00, 0x60}),
              chunk("MTrk", {0x00, 0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20, 0x00, 0xFF, 0x2F, 0x00}),
              chunk("XFIH", {0x01, 0x02, 0x03, 0x04}),
              chunk("MTrk", {0x00, 0xF0, 0x03, 0x7E, 0x7F, 0xF7,  // sysex
                             0x00, 0x91, 0x28, 0x50,              // on E2
                             0x60, 0x91, 0x28, 0x00,              // +96 on vel 0 -> off
                             0x00, 0x2D, 0x50,                    // on A2 (running)
                             0x81, 0x40, 0x81, 0x2D, 0x40,        // +192 off A2
                             0x00, 0xFF, 0x2F, 0x00})});
}

}  // namespace tabforge::fixtures

#endif  // TABFORGE_TESTS_SMF_FIXTURES_H_
