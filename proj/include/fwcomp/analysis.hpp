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

#ifndef FWCOMP_ANALYSIS_HPP_
#define FWCOMP_ANALYSIS_HPP_

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fwcomp/semantics.hpp"

namespace fwcomp {

// Interface-name dimension: a finite set of names or its complement.
class ItfSet {
 public:
  static ItfSet universe() { return ItfSet(true, {}); }
  static ItfSet of(std::vector<std::string> names) {
    return ItfSet(false, std::move(names));
  }

  ItfSet complement() const { return ItfSet(!complemented_, names_); }
  bool matches(const std::string& name) const;
  bool subset_of(const ItfSet& other) const;
  bool is_universe() const { return complemented_ && names_.empty(); }
  bool empty() const { return !complemented_ && names_.empty(); }

  bool operator==(const ItfSet&) const = default;

 private:
  ItfSet(bool complemented, std::vector<std::string> names);

  bool complemented_;
  std::vector<std::string> names_;  // sorted, unique
};

// The exact match set of one rule as a product over the packet
// dimensions.
struct RuleRegion {
  AddressSet src_ip;
  MacSet src_mac = MacSet::universe();
  AddressSet dst_ip;
  ServiceSet srv;
  ItfSet itf = ItfSet::universe();
  uint8_t dirs = 0;  // bit0 = Inbound, bit1 = Outbound
  TimeSet when;

  bool empty() const;
};

inline constexpr uint8_t kDirInbound = 1;
inline constexpr uint8_t kDirOutbound = 2;

// Region whose membership predicate equals match_rule. Throws
// OpaqueSetError for unevaluable elements and SchemaError("non-product")
// for mixed-layer disjunctive sources.
RuleRegion rule_region(const PolicyRule& rule, const ObjectDatabase& db);

// Product-region subset: per-dimension, with the empty-region escape.
bool region_subset(const RuleRegion& a, const RuleRegion& b);

struct AnomalyReport {
  enum class Kind { Shadowing };
  Kind kind = Kind::Shadowing;
  int shadowing_position = 0;
  int shadowed_position = 0;
  std::string explanation;

  // "warning: rule <i> shadows rule <j>: <explanation>"
  std::string render() const;
};

// Pairwise full shadowing among terminal rules. Rules with opaque or
// non-product elements are skipped; a diagnostic note is appended to
// `skipped` when given.
std::vector<AnomalyReport> detect_shadowing(
    const Policy& policy, const ObjectDatabase& db,
    std::vector<std::string>* skipped = nullptr);

// Verdict-preserving rewrite: drops shadowed terminal rules and merges
// adjacent rules differing in a single field; positions renumbered
// gapless from 0.
Policy optimize(const Policy& policy, const ObjectDatabase& db);

// Finite packet enumeration for equivalence checking.
struct Universe {
  std::vector<uint32_t> srcs, dsts;
  std::vector<uint16_t> sports = {1024};
  std::vector<uint16_t> dports;
  std::vector<Proto> protos = {Proto::Tcp, Proto::Udp};
  std::vector<uint8_t> other_protos = {47};
  std::vector<uint8_t> tcp_flag_states = {kTcpSyn};
  std::vector<std::pair<uint8_t, uint8_t>> icmp_types = {{8, 0}};
  std::vector<std::string> ifaces;
  std::vector<Direction> dirs = {Direction::Inbound, Direction::Outbound};
  std::vector<std::optional<PacketTime>> times = {std::nullopt};

  // Addresses of a CIDR window, sampled at `stride`, plus both corners.
  static std::vector<uint32_t> window(const Cidr& cidr, uint32_t stride = 1);

  uint64_t size() const;
  void enumerate(const std::function<void(const Packet&)>& fn) const;
};

inline constexpr uint64_t kDefaultUniverseBound = uint64_t{1} << 20;

// Whether two policies produce the same verdict action (and egress
// header on accept) for every packet in the universe, evaluated in the
// context of `firewall` (its interfaces and NAT rules). Throws
// UniverseTooLargeError past `bound`.
bool equivalent(const FirewallObj& firewall, const Policy& p1,
                const Policy& p2, const Universe& universe,
                const ObjectDatabase& db,
                uint64_t bound = kDefaultUniverseBound);

}  // namespace fwcomp

#endif  // FWCOMP_ANALYSIS_HPP_
