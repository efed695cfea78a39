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

#ifndef FWCOMP_TRANSFORM_HPP_
#define FWCOMP_TRANSFORM_HPP_

#include <optional>
#include <string>
#include <vector>

#include "fwcomp/fwbxml.hpp"
#include "fwcomp/model.hpp"

namespace fwcomp {

enum class MatchStrategy { First, LastWithQuick };
enum class DefaultPolicyKind { Pass, Drop, Configurable };
enum class NatOrder { NatFirst, SplitDnatSnat };

// Per-target feature descriptor driving the pipeline. Fixed per
// platform; see backends::capabilities().
struct Capabilities {
  MatchStrategy match_strategy = MatchStrategy::First;
  DefaultPolicyKind default_policy = DefaultPolicyKind::Configurable;
  NatOrder nat_order = NatOrder::NatFirst;
  bool supports_single_negation = false;
  bool supports_group_negation = false;
  bool supports_address_ranges = false;
  bool supports_dynamic_iface_address = false;
  bool supports_time = false;
  bool supports_mac = false;
  bool supports_address_lists = false;
};

// One concrete address operand of a lowered rule.
struct AddrAtom {
  enum class Kind { Any, Cidr, Range, DynamicIface, NegatedTable };
  Kind kind = Kind::Any;
  Cidr cidr;             // Kind::Cidr
  bool negated = false;  // Kind::Cidr only: native single negation
  uint32_t range_lo = 0, range_hi = 0;  // Kind::Range
  std::string ifname;                   // Kind::DynamicIface
  std::vector<Cidr> table;  // Kind::NegatedTable: matches NOT in table

  static AddrAtom any() { return {}; }
  static AddrAtom of_cidr(const Cidr& c, bool neg = false) {
    AddrAtom a;
    a.kind = Kind::Cidr;
    a.cidr = c;
    a.negated = neg;
    return a;
  }

  bool matches(uint32_t addr) const;
  bool operator==(const AddrAtom&) const = default;
};

// One concrete service operand.
struct SvcAtom {
  enum class Kind { Any, Tcp, Udp, Icmp, Proto };
  Kind kind = Kind::Any;
  uint16_t sport_lo = 0, sport_hi = 65535;
  uint16_t dport_lo = 0, dport_hi = 65535;
  uint8_t flags_mask = 0, flags_set = 0;  // Tcp
  std::optional<uint8_t> icmp_type, icmp_code;
  uint8_t proto_number = 0;  // Proto

  static SvcAtom any() { return {}; }
  bool matches(const ServicePoint& p) const;
  bool operator==(const SvcAtom&) const = default;
};

// Fully lowered single-valued rule. After the pipeline runs for a
// target, every operand is expressible in that target's grammar.
struct FlatRule {
  enum class Kind { Filter, Snat, Dnat };

  int origin = -1;  // source rule position
  Kind kind = Kind::Filter;
  RuleAction action = RuleAction::Deny;
  Direction dir = Direction::Inbound;  // filter rules: never Both
  std::string iface;                   // empty = any interface
  AddrAtom src, dst;
  std::optional<uint64_t> src_mac;
  SvcAtom srv;
  TimeAtom when;

  // NAT translations.
  std::optional<uint32_t> to_src, to_dst;
  std::optional<uint16_t> to_sport, to_dport;

  bool operator==(const FlatRule&) const = default;
};

struct PipelineResult {
  std::vector<FlatRule> filter;
  std::vector<FlatRule> nat;
  // The abstract default policy; backends must enforce a trailing drop.
  bool default_drop = true;
  std::vector<Diagnostic> warnings;
};

// Lowers one negated address element into atoms whose union is the
// element's match set: a native negated atom when the target supports
// the needed negation form, a pf-style negated table, or the positive
// complement as CIDR blocks. An empty result matches nothing.
std::vector<AddrAtom> expand_negation(const MatchElement& element,
                                      const Capabilities& caps,
                                      const ObjectDatabase& db,
                                      std::vector<Diagnostic>* warnings);

// Lowers one enabled policy rule: groups flattened, Both split into
// Inbound then Outbound, multi-reference elements split by cartesian
// product (src, dst, srv, itf, when order), ranges and negation
// rewritten per capabilities. `firewall` supplies the interface
// inventory for negated Itf elements.
std::vector<FlatRule> expand_rule_elements(const PolicyRule& rule,
                                           const Capabilities& caps,
                                           const ObjectDatabase& db,
                                           const FirewallObj* firewall,
                                           std::vector<Diagnostic>* warnings);

// Rewrites filter-rule source sets so that matching before SNAT (the
// iptables filter point) equals the abstract model's matching after
// NAT: S' = (union of SNAT originals whose translated source is in S)
// united with (S minus all SNAT originals).
std::vector<FlatRule> adjust_for_iptables_nat_order(
    std::vector<FlatRule> filter_rules, const std::vector<NatRule>& nat_rules,
    const ObjectDatabase& db);

// The full processor pipeline for one firewall and target.
PipelineResult run_pipeline(const FirewallObj& firewall, Platform target,
                            const ObjectDatabase& db);

}  // namespace fwcomp

#endif  // FWCOMP_TRANSFORM_HPP_
