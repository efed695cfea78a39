// Copyright 2026 The fwcomp authors
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

#ifndef FWCOMP_BACKENDS_HPP_
#define FWCOMP_BACKENDS_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fwcomp/semantics.hpp"
#include "fwcomp/transform.hpp"

namespace fwcomp {

// The fixed feature descriptor of each supported target.
Capabilities capabilities(Platform target);

struct Script {
  Platform target = Platform::Iptables;
  std::vector<std::string> lines;
  // pf address tables backing negated groups: name -> blocks.
  std::vector<std::pair<std::string, std::vector<Cidr>>> tables;

  std::string text() const;
};

// Renders fully lowered IR into the target's emission grammar.
// Deterministic: identical IR produces byte-identical scripts. Throws
// InvariantViolationError when the IR is not lowered for the target.
Script emit(Platform target, const std::vector<FlatRule>& filter_ir,
            const std::vector<FlatRule>& nat_ir);

// Parsed form of an emitted script, reusable across packets.
class CompiledScript {
 public:
  struct Impl;
  explicit CompiledScript(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

// Parses a script in the emission grammar; throws UnparseableScriptError
// for anything outside it.
CompiledScript parse_script(Platform target, const std::string& text);

// Simulates the target's own processing model over one packet:
// iptables runs DNAT, then first-match filtering with chain policies,
// then SNAT; pf and ipfilter translate first and filter last-match
// unless quick. `iface_addrs` resolves dynamic interface address
// operands ("(if0)", "0/32"); without a binding those match nothing.
Verdict interpret(const CompiledScript& script, const Packet& packet,
                  const std::map<std::string, uint32_t>& iface_addrs = {});

Verdict interpret(Platform target, const Script& script, const Packet& packet,
                  const std::map<std::string, uint32_t>& iface_addrs = {});

}  // namespace fwcomp

#endif  // FWCOMP_BACKENDS_HPP_
