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
//
// Parameterized benchmark family: a sparse connected core, ingress regions
// hanging off the core behind two-hop fringes, and shortest-path routing
// computed before and after a seeded set of core switches is taken down.
// The impossible variant additionally makes the final configuration drop
// packets at their destination gateway, so no update order can preserve
// delivery.

#ifndef NETUPDATE_BENCH_HPP_
#define NETUPDATE_BENCH_HPP_

#include <cstdint>
#include <string>

#include "netupdate/json_io.hpp"

namespace netupdate {

struct BenchParams {
  std::uint64_t total_nodes = 0;     // N, all switches
  std::uint64_t updating_nodes = 0;  // M, switches whose policy differs
  std::uint64_t ingress_count = 3;
  bool impossible = false;
  std::uint64_t seed = 0;
};

struct BenchInstance {
  NetworkFile net;        // policies "initial" and "final"
  std::string spec_text;  // delivery invariant, one conjunct per destination
};

// Deterministic in all parameters including the seed: the same call yields a
// byte-identical network file. The generator retries internal removal seeds
// until exactly M switch policies differ; unrealizable parameters raise
// ModelError.
BenchInstance bench_generate(const BenchParams& params);

}  // namespace netupdate

#endif  // NETUPDATE_BENCH_HPP_
