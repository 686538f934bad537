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

#include "netupdate/nusmv.hpp"

#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace netupdate {

namespace {

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "MODULE", "VAR",  "ASSIGN", "INIT",    "LTLSPEC", "case", "esac",
      "next",   "init", "TRUE",   "FALSE",   "DEFINE",  "SPEC", "INVAR",
      "TRANS",  "in",   "union",  "process", "self",    "mod",  "xor",
      "xnor",   "A",    "E",      "U",       "V",       "X",    "F",
      "G",      "O",    "H",      "Y",       "Z",       "S",    "T",
      "B",      "W"};
  return words;
}

bool plain_identifier(const std::string& name) {
  if (name.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') {
    return false;
  }
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return reserved_words().count(name) == 0;
}

// Reversible mangling into the NuSMV identifier alphabet: unsafe characters
// become "_xHH", and names needing mangling get an "m_" prefix.
std::string mangle(const std::string& name) {
  if (plain_identifier(name)) return name;
  static const char* hex = "0123456789abcdef";
  std::string out = "m_";
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += c;
    } else if (c == '_') {
      out += "__";
    } else {
      out += "_x";
      out += hex[(static_cast<unsigned char>(c) >> 4) & 0xf];
      out += hex[static_cast<unsigned char>(c) & 0xf];
    }
  }
  return out;
}

class Mangler {
 public:
  std::string add(const std::string& name) {
    auto it = forward_.find(name);
    if (it != forward_.end()) return it->second;
    std::string m = mangle(name);
    auto [rit, inserted] = reverse_.emplace(m, name);
    if (!inserted && rit->second != name) {
      throw ModelError("name mangling collision between '" + name + "' and '" +
                       rit->second + "'");
    }
    forward_.emplace(name, m);
    return m;
  }

  const std::map<std::string, std::string>& reverse() const { return reverse_; }

 private:
  std::map<std::string, std::string> forward_;
  std::map<std::string, std::string> reverse_;
};

void render_formula(const LtlFormula& f, Mangler& names, std::ostringstream& out) {
  switch (f.op) {
    case LtlOp::kAtomPort:
      out << "port = " << names.add(f.name);
      break;
    case LtlOp::kAtomField:
      out << names.add(f.name) << " = " << names.add(f.value);
      break;
    case LtlOp::kNot:
      out << "!(";
      render_formula(*f.lhs, names, out);
      out << ")";
      break;
    case LtlOp::kNext:
    case LtlOp::kFinally:
    case LtlOp::kGlobally:
      out << (f.op == LtlOp::kNext ? "X (" : f.op == LtlOp::kFinally ? "F (" : "G (");
      render_formula(*f.lhs, names, out);
      out << ")";
      break;
    case LtlOp::kAnd:
    case LtlOp::kOr:
    case LtlOp::kImplies:
    case LtlOp::kUntil: {
      const char* op = f.op == LtlOp::kAnd       ? " & "
                       : f.op == LtlOp::kOr      ? " | "
                       : f.op == LtlOp::kImplies ? " -> "
                                                 : " U ";
      out << "(";
      render_formula(*f.lhs, names, out);
      out << ")" << op << "(";
      render_formula(*f.rhs, names, out);
      out << ")";
      break;
    }
  }
}

}  // namespace

NusmvModel emit_nusmv(const Topology& topo, const NetworkPolicy& policy,
                      const LtlFormula& f, const PacketSpace& space) {
  Mangler names;
  std::ostringstream out;

  out << "MODULE main\n";
  out << "VAR\n";
  out << "    port : {";
  for (const PortId& p : topo.ports) out << names.add(p) << ", ";
  out << "START};\n";
  for (const PacketField& field : space.fields()) {
    out << "    " << names.add(field.name) << " : {";
    for (std::size_t i = 0; i < field.values.size(); ++i) {
      if (i) out << ", ";
      out << names.add(field.values[i]);
    }
    out << "};\n";
  }

  out << "ASSIGN\n";
  out << "    next(port) := case\n";
  if (topo.ingress.empty()) {
    out << "        port = START : START;\n";
  } else if (topo.ingress.size() == 1) {
    out << "        port = START : " << names.add(topo.ingress.front()) << ";\n";
  } else {
    out << "        port = START : {";
    for (std::size_t i = 0; i < topo.ingress.size(); ++i) {
      if (i) out << ", ";
      out << names.add(topo.ingress[i]);
    }
    out << "};\n";
  }
  for (const PortId& p : topo.ports) {
    if (topo.is_special(p)) continue;
    const SwitchId* owner = topo.owner_of(p);
    if (owner == nullptr) {
      throw ModelError("port '" + p + "' is owned by no unique switch");
    }
    // Rule priority order is semantic: NuSMV evaluates case rows top-down.
    for (const Rule& r : policy.at(*owner).rules) {
      if (r.in_port != p) continue;
      if (!r.rewrites.empty()) {
        throw ModelError("rule '" + r.key + "' of switch '" + *owner +
                         "' rewrites packet fields; the frozen-field encoding "
                         "cannot express it");
      }
      out << "        port = " << names.add(p);
      for (const FieldAssignment& ga : r.guard) {
        out << " & " << names.add(space.field_name(ga.field)) << " = "
            << names.add(space.value_name(ga.field, ga.value));
      }
      out << " : " << names.add(r.out_port) << ";\n";
    }
    out << "        port = " << names.add(p) << " : " << names.add(topo.drop)
        << ";\n";
  }
  out << "        port = " << names.add(topo.world) << " : "
      << names.add(topo.world) << ";\n";
  out << "        port = " << names.add(topo.drop) << " : " << names.add(topo.drop)
      << ";\n";
  out << "    esac;\n";
  for (const PacketField& field : space.fields()) {
    std::string fn = names.add(field.name);
    out << "    next(" << fn << ") := " << fn << ";\n";
  }
  out << "INIT port = START;\n";

  std::ostringstream spec;
  render_formula(f, names, spec);
  out << "LTLSPEC " << spec.str() << ";\n";

  NusmvModel model;
  model.text = out.str();
  model.var_order.push_back("port");
  for (const PacketField& field : space.fields()) {
    model.var_order.push_back(field.name);
  }
  model.demangle = names.reverse();
  return model;
}

namespace {

std::string demangled(const NusmvModel& model, const std::string& name) {
  auto it = model.demangle.find(name);
  return it == model.demangle.end() ? name : it->second;
}

}  // namespace

NusmvRun run_nusmv(const NusmvModel& model, const std::string& binary_path,
                   const PacketSpace& space) {
  namespace fs = std::filesystem;
  NusmvRun result{NusmvStatus::kOk, Verdict::pass(), ""};

  std::error_code ec;
  fs::path binary(binary_path);
  if (binary_path.empty() || !fs::exists(binary, ec)) {
    result.status = NusmvStatus::kUnavailable;
    result.detail = "NuSMV binary not found at '" + binary_path + "'";
    return result;
  }

  fs::path dir = fs::temp_directory_path(ec);
  if (ec) dir = ".";
  fs::path model_path =
      dir / ("netupdate_nusmv_" + std::to_string(::getpid()) + ".smv");
  {
    std::ofstream out(model_path);
    out << model.text;
  }

  std::string cmd = "'" + binary_path + "' -dcx=0 2>&1 '" +
                    model_path.string() + "'";
  // Older NuSMV builds reject -dcx=0; fall back to the plain invocation.
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    fs::remove(model_path, ec);
    result.status = NusmvStatus::kUnavailable;
    result.detail = "could not spawn NuSMV";
    return result;
  }
  std::string output;
  char buffer[4096];
  std::size_t n;
  while ((n = ::fread(buffer, 1, sizeof buffer, pipe)) > 0) {
    output.append(buffer, n);
  }
  int rc = ::pclose(pipe);
  if (output.find("is true") == std::string::npos &&
      output.find("is false") == std::string::npos) {
    std::string retry = "'" + binary_path + "' 2>&1 '" + model_path.string() + "'";
    pipe = ::popen(retry.c_str(), "r");
    if (pipe != nullptr) {
      output.clear();
      while ((n = ::fread(buffer, 1, sizeof buffer, pipe)) > 0) {
        output.append(buffer, n);
      }
      rc = ::pclose(pipe);
    }
  }
  fs::remove(model_path, ec);

  if (output.find("is true") == std::string::npos &&
      output.find("is false") == std::string::npos) {
    if (rc != 0) {
      result.status = NusmvStatus::kRunFailed;
      result.detail = "NuSMV exited with status " + std::to_string(rc) + ":\n" + output;
    } else {
      result.status = NusmvStatus::kUnparseable;
      result.detail = "no specification verdict in NuSMV output:\n" + output;
    }
    return result;
  }

  if (output.find("is true") != std::string::npos) {
    result.verdict = Verdict::pass();
    return result;
  }

  // Parse the counterexample state listing, carrying unchanged variables
  // forward from state to state as NuSMV prints only deltas.
  Counterexample cex;
  cex.kind = CexKind::kPropertyViolation;
  std::istringstream lines(output);
  std::string line;
  std::map<std::string, std::string> current;
  bool in_state = false;
  auto flush_state = [&]() {
    if (!in_state) return;
    auto pit = current.find("port");
    if (pit == current.end()) return;
    std::string port = demangled(model, pit->second);
    if (port == "START") return;
    LocatedPacket lp;
    lp.port = port;
    lp.packet.values.assign(space.field_count(), 0);
    for (std::size_t i = 0; i < space.field_count(); ++i) {
      auto vit = current.find(space.field_name(static_cast<int>(i)));
      if (vit == current.end()) continue;
      int v = space.value_index(static_cast<int>(i), vit->second);
      if (v >= 0) lp.packet.values[i] = v;
    }
    cex.trace.states.push_back(std::move(lp));
  };
  while (std::getline(lines, line)) {
    if (line.find("-> State:") != std::string::npos) {
      flush_state();
      in_state = true;
      continue;
    }
    std::size_t eq = line.find(" = ");
    if (!in_state || eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 3);
    auto trim = [](std::string& s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.erase(s.begin());
      }
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.pop_back();
      }
    };
    trim(key);
    trim(value);
    current[demangled(model, key)] = demangled(model, value);
  }
  flush_state();
  result.verdict = Verdict::fail(std::move(cex));
  return result;
}

}  // namespace netupdate
