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
// Exception types shared by all modules. The CLI maps them onto exit codes:
// ContractViolation -> 1, ParseError/LoadError/WeightsError -> 2,
// NumericError -> 3.
#ifndef TABFORGE_ERROR_H_
#define TABFORGE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tabforge {

// A caller broke an operation's precondition (bad shape, invalid frame...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed binary input. `offset` is the byte position of the problem.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Malformed text input. `line` is 1-based; 0 when not tied to a line.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Weight-file problems. Each failure mode has its own kind so callers can
// tell a stale file from a corrupt one.
class WeightsError : public std::runtime_error {
 public:
  enum class Kind { kIo, kMagic, kVersion, kShape, kTruncated };

  WeightsError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Non-finite values during training, or a failed gradient check.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tabforge

#endif  // TABFORGE_ERROR_H_
