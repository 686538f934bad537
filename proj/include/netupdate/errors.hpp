// Copyright 2026 The netupdate authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NETUPDATE_ERRORS_HPP_
#define NETUPDATE_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netupdate {

// Structural problem in a topology, policy, or trace that should have been
// caught by validation before the operation ran.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// An update or rule is not compatible with the switch it targets.
class CompatibilityError : public ModelError {
 public:
  explicit CompatibilityError(const std::string& what) : ModelError(what) {}
};

// Rule lists of a switch cannot be aligned into per-rule slots.
class ReductionError : public ModelError {
 public:
  explicit ReductionError(const std::string& what) : ModelError(what) {}
};

// Syntax error in an LTL formula or an input file. `offset` is a byte
// position into the parsed text when known, npos otherwise.
class ParseError : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  ParseError(const std::string& what, std::size_t offset = npos)
      : std::runtime_error(what), offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A name in a formula does not resolve against the packet space or topology.
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace netupdate

#endif  // NETUPDATE_ERRORS_HPP_
