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
// Emits NuSMV models of single configurations for cross-validation, and
// optionally runs an external NuSMV binary to compare verdicts. The encoding
// uses one `port` variable (plus a START entry point feeding every ingress),
// frozen packet-field variables, and a case table that inlines links. NuSMV
// is strictly an optional oracle; nothing else depends on it.

#ifndef NETUPDATE_NUSMV_HPP_
#define NETUPDATE_NUSMV_HPP_

#include <map>
#include <string>

#include "netupdate/checker.hpp"
#include "netupdate/ltl.hpp"
#include "netupdate/model.hpp"

namespace netupdate {

struct NusmvModel {
  std::string text;
  std::vector<std::string> var_order;  // "port" first, then packet fields
  // Mangled identifier -> original name, for mapping traces back.
  std::map<std::string, std::string> demangle;
};

// Deterministic: same inputs produce identical text. Requires a loop-free
// policy so that the emitted model's runs are finite lassos. Names that are
// not NuSMV identifiers are mangled reversibly; a mangling collision raises
// ModelError.
NusmvModel emit_nusmv(const Topology& topo, const NetworkPolicy& policy,
                      const LtlFormula& f, const PacketSpace& space);

enum class NusmvStatus {
  kOk,           // ran and parsed
  kUnavailable,  // binary missing or not executable
  kRunFailed,    // nonzero exit
  kUnparseable,  // output did not contain a specification verdict
};

struct NusmvRun {
  NusmvStatus status;
  Verdict verdict;     // meaningful when status == kOk
  std::string detail;  // diagnostic text for failures
};

// Invokes `binary_path` on the model and parses the specification verdict;
// counterexample states are parsed back into a trace when NuSMV prints one.
NusmvRun run_nusmv(const NusmvModel& model, const std::string& binary_path,
                   const PacketSpace& space);

}  // namespace netupdate

#endif  // NETUPDATE_NUSMV_HPP_
